"""Configuration, orchestration, and result emission.

A run is described by a JSON config (see README for the schema); command-line
flags override config keys.  Results land in an output bundle directory that
is written atomically (staged in a temp dir, then renamed):

    summary.json   -- provenance block plus the experiment's summary record
    *.csv          -- tabular results, fixed column orders
    *.vtk          -- legacy ASCII meshes/fields where applicable

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 verification
failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import shutil
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .errors import ConfigError, HoleoptError
from .eigensolver import hole_flux, solve_lambda1
from .geometry import (Hole, PuncturedDomain, SmoothDomain, arc_decomposition,
                       project_to_boundary)
from .meshing import generate_mesh, mesh_statistics, write_vtk
from .optimizer import landscape_scan, optimize_hole
from .shape_analysis import arc_integrals, fd_derivative, flucher_fit
from .verify import SUITES, VerifyContext, run_suite

EXPERIMENTS = ("solve", "deriv", "optimize", "scan", "flucher", "blowup", "verify")

_SCHEMA = {
    "experiment": None,
    "domain": {"kind": None, "radius": None, "a": None, "b": None,
               "r0": None, "modes": None},
    "hole": {"center": None, "radius": None},
    "mesh": {"target_h": None, "hole_refine_factor": None},
    "solver": {"tol": None, "max_iter": None},
    "seed": None,
    "jobs": None,
    "deriv": {"theta": None, "direction": None, "fd_step": None, "fd": None},
    "optimize": {"delta": None, "p0": None, "max_iter": None, "g_tol": None,
                 "step0": None, "shrink": None},
    "scan": {"delta": None, "grid": None, "min_clearance": None},
    "flucher": {"x": None, "radii": None},
    "blowup": {"R": None, "alpha": None, "h_circle": None, "theta0": None,
               "blowdown_radii": None},
    "verify": {"suite": None},
}


def _check_keys(cfg, schema, path=""):
    for key, val in cfg.items():
        where = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(schema[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config key {where!r} must be a mapping")
            _check_keys(val, schema[key], where)


def _require(cfg, key, where):
    if key not in cfg:
        raise ConfigError(f"missing config key {where}.{key}" if where else
                          f"missing config key {key}")
    return cfg[key]


def _positive(value, name):
    if not isinstance(value, (int, float)) or not value > 0:
        raise ConfigError(f"config key {name!r} must be positive, got {value!r}")
    return float(value)


def build_domain(cfg):
    kind = _require(cfg, "kind", "domain")
    if kind == "disk":
        return SmoothDomain.disk(_positive(_require(cfg, "radius", "domain"),
                                           "domain.radius"))
    if kind == "ellipse":
        return SmoothDomain.ellipse(
            _positive(_require(cfg, "a", "domain"), "domain.a"),
            _positive(_require(cfg, "b", "domain"), "domain.b"),
        )
    if kind == "fourier_star":
        return SmoothDomain.fourier_star(
            _positive(_require(cfg, "r0", "domain"), "domain.r0"),
            _require(cfg, "modes", "domain"),
        )
    raise ConfigError(f"unknown domain.kind {kind!r}")


def build_hole(cfg):
    center = _require(cfg, "center", "hole")
    radius = _positive(_require(cfg, "radius", "hole"), "hole.radius")
    if not (isinstance(center, (list, tuple)) and len(center) == 2):
        raise ConfigError("config key 'hole.center' must be a pair [x, y]")
    return Hole((float(center[0]), float(center[1])), radius)


def validate_config(cfg):
    """Strict validation; unknown keys and out-of-range values are rejected."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(cfg, _SCHEMA)
    exp = _require(cfg, "experiment", "")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {exp!r}; choose from {EXPERIMENTS}")
    mesh = cfg.get("mesh", {})
    if "target_h" in mesh:
        _positive(mesh["target_h"], "mesh.target_h")
    if "hole_refine_factor" in mesh:
        f = mesh["hole_refine_factor"]
        if not 1.0 <= f <= 64.0:
            raise ConfigError(
                f"config key 'mesh.hole_refine_factor' must lie in [1, 64], got {f!r}"
            )
    solver = cfg.get("solver", {})
    if "tol" in solver:
        _positive(solver["tol"], "solver.tol")
    if "hole" in cfg:
        build_hole(cfg["hole"])  # raises with the field name
    if "domain" in cfg:
        build_domain(cfg["domain"])
    if exp == "verify":
        suite = cfg.get("verify", {}).get("suite", "all")
        if suite not in SUITES:
            raise ConfigError(f"unknown verification suite {suite!r}")
    return cfg


def config_hash(cfg):
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _domain_id(cfg):
    d = cfg["domain"]
    if d["kind"] == "disk":
        return f"disk({d['radius']})"
    if d["kind"] == "ellipse":
        return f"ellipse({d['a']},{d['b']})"
    return f"fourier_star({d['r0']},{d['modes']})"


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


# ---------------------------------------------------------------------------
# experiment runners: each returns (summary_dict, files_dict)
# ---------------------------------------------------------------------------


def _mesh_params(cfg):
    mesh = cfg.get("mesh", {})
    return (mesh.get("target_h", 0.02), mesh.get("hole_refine_factor", 8.0))


def _solver_params(cfg):
    solver = cfg.get("solver", {})
    return (solver.get("tol", 1e-10), solver.get("max_iter", 400))


def _run_solve(cfg, outdir):
    domain = build_domain(_require(cfg, "domain", ""))
    hole = build_hole(_require(cfg, "hole", ""))
    target_h, factor = _mesh_params(cfg)
    tol, max_iter = _solver_params(cfg)
    pd = PuncturedDomain(domain, hole)
    mesh = generate_mesh(pd, target_h, factor, seed=cfg.get("seed", 0))
    sol = solve_lambda1(mesh, tol=tol, max_iter=max_iter)
    stats = mesh_statistics(mesh)
    n_dof = int(np.sum(mesh.boundary_tags == 0))
    summary = {
        "lambda1": sol.lambda1,
        "residual": sol.residual,
        "n_dof": n_dof,
        "clearance": pd.clearance,
        "mesh": stats,
    }
    write_vtk(mesh, os.path.join(outdir, "solution.vtk"), fields={"u": sol.u})
    write_csv(
        os.path.join(outdir, "solution.csv"),
        ["lambda1", "residual", "n_dof", "n_vertices", "n_triangles", "clearance"],
        [[sol.lambda1, sol.residual, n_dof, stats["n_vertices"],
          stats["n_triangles"], pd.clearance]],
    )
    return summary


def _run_deriv(cfg, outdir):
    domain = build_domain(_require(cfg, "domain", ""))
    hole = build_hole(_require(cfg, "hole", ""))
    target_h, factor = _mesh_params(cfg)
    tol, _ = _solver_params(cfg)
    opts = cfg.get("deriv", {})
    theta = opts.get("theta", np.pi / 6)
    pd = PuncturedDomain(domain, hole)
    mesh = generate_mesh(pd, target_h, factor, seed=cfg.get("seed", 0))
    sol = solve_lambda1(mesh, tol=tol)
    flux = hole_flux(sol, center=pd.hole.center_array, radius=hole.radius)
    direction = opts.get("direction")
    if direction is None:
        z, _ = project_to_boundary(domain, pd.hole.center_array)
        axis = pd.hole.center_array - z
        axis /= np.linalg.norm(axis)
    else:
        axis = np.asarray(direction, dtype=float)
        axis /= np.linalg.norm(axis)
    dec = arc_decomposition(pd, theta, axis=axis)
    rep = arc_integrals(sol, dec, flux=flux)
    fd_val = ""
    rel_err = ""
    if opts.get("fd", True):
        fd = fd_derivative(pd, axis, step=opts.get("fd_step"),
                           target_h=target_h, hole_refine_factor=factor,
                           seed=cfg.get("seed", 0), tol=tol)
        fd_val = fd.value
        rel_err = abs(rep.hadamard_total - fd.value) / max(abs(fd.value), 1e-3)
    row = [_domain_id(cfg), hole.center[0], hole.center[1], hole.radius, theta,
           rep.arc_top, rep.arc_bottom, rep.arc_sides, rep.hadamard_total,
           fd_val, rel_err]
    write_csv(
        os.path.join(outdir, "deriv.csv"),
        ["domain_id", "p_x", "p_y", "delta", "theta", "arc_top", "arc_bottom",
         "arc_sides", "total", "fd", "rel_err"],
        [row],
    )
    return {
        "hadamard_total": rep.hadamard_total,
        "arc_top": rep.arc_top,
        "arc_bottom": rep.arc_bottom,
        "arc_sides": rep.arc_sides,
        "fd": fd_val if fd_val == "" else float(fd_val),
        "rel_err": rel_err if rel_err == "" else float(rel_err),
        "direction": [float(axis[0]), float(axis[1])],
        "theta": float(theta),
    }


def _run_optimize(cfg, outdir):
    domain = build_domain(_require(cfg, "domain", ""))
    opts = dict(cfg.get("optimize", {}))
    delta = _positive(_require(opts, "delta", "optimize"), "optimize.delta")
    p0 = _require(opts, "p0", "optimize")
    target_h, factor = _mesh_params(cfg)
    tol, _ = _solver_params(cfg)
    traj = optimize_hole(
        domain, delta, p0,
        max_iter=opts.get("max_iter", 40),
        g_tol=opts.get("g_tol"),
        step0=opts.get("step0"),
        shrink=opts.get("shrink", 0.5),
        target_h=target_h,
        hole_refine_factor=factor,
        seed=cfg.get("seed", 0),
        tol=tol,
    )
    rows = [
        [i, it.p[0], it.p[1], it.lambda1, it.gradient[0], it.gradient[1],
         it.clearance, it.step]
        for i, it in enumerate(traj.iterates)
    ]
    write_csv(
        os.path.join(outdir, "trajectory.csv"),
        ["iter", "p_x", "p_y", "lambda1", "grad_x", "grad_y", "clearance", "step"],
        rows,
    )
    last = traj.iterates[-1]
    return {
        "p_star": [float(last.p[0]), float(last.p[1])],
        "lambda_star": last.lambda1,
        "clearance_star": last.clearance,
        "termination": traj.termination,
        "n_iterates": len(traj.iterates),
    }


def _run_scan(cfg, outdir):
    domain = build_domain(_require(cfg, "domain", ""))
    opts = cfg.get("scan", {})
    delta = _positive(_require(opts, "delta", "scan"), "scan.delta")
    grid = _require(opts, "grid", "scan")
    target_h, factor = _mesh_params(cfg)
    tol, _ = _solver_params(cfg)
    res = landscape_scan(domain, delta, grid, target_h=target_h,
                         hole_refine_factor=factor, seed=cfg.get("seed", 0),
                         tol=tol, min_clearance=opts.get("min_clearance", 0.0),
                         n_jobs=max(1, int(cfg.get("jobs", 1))))
    write_csv(
        os.path.join(outdir, "landscape.csv"),
        ["p_x", "p_y", "lambda1", "clearance"],
        res["rows"],
    )
    best = res["argmax"]
    return {
        "argmax": None if best is None else {
            "p": [best[0], best[1]], "lambda1": best[2], "clearance": best[3]
        },
        "n_feasible": len(res["rows"]),
    }


def _run_flucher(cfg, outdir):
    domain = build_domain(_require(cfg, "domain", ""))
    opts = cfg.get("flucher", {})
    x = _require(opts, "x", "flucher")
    radii = _require(opts, "radii", "flucher")
    target_h, factor = _mesh_params(cfg)
    tol, _ = _solver_params(cfg)
    fit = flucher_fit(domain, x, radii, target_h=target_h,
                      hole_refine_factor=factor, seed=cfg.get("seed", 0), tol=tol)
    write_csv(
        os.path.join(outdir, "flucher.csv"),
        ["radius", "lambda1"],
        list(zip(fit.radii.tolist(), fit.lambdas.tolist())),
    )
    return {
        "a_fit": fit.a_fit,
        "c_fit": fit.c_fit,
        "reference": fit.reference,
        "lambda_base": fit.lambda_base,
        "rel_coefficient_error": abs(fit.a_fit - fit.reference) / fit.reference,
    }


def _checks_to_files(checks, outdir, name):
    write_csv(
        os.path.join(outdir, name),
        ["check_id", "parameters", "statistic", "threshold", "pass"],
        [c.row() for c in checks],
    )


def _run_blowup(cfg, outdir):
    opts = cfg.get("blowup", {})
    ctx = VerifyContext(seed=cfg.get("seed", 0))
    kwargs = {}
    if "R" in opts:
        kwargs["R"] = opts["R"]
    if "alpha" in opts:
        kwargs["alpha"] = opts["alpha"]
    if "theta0" in opts:
        kwargs["theta0"] = opts["theta0"]
    if "blowdown_radii" in opts:
        kwargs["blowdown_radii"] = tuple(opts["blowdown_radii"])
    checks = run_suite("blowup", ctx, **kwargs)
    _checks_to_files(checks, outdir, "blowup_checks.csv")
    n_fail = sum(not c.passed for c in checks)
    return {"n_checks": len(checks), "n_failed": n_fail,
            "all_passed": n_fail == 0}


def _run_verify(cfg, outdir):
    suite = cfg.get("verify", {}).get("suite", "all")
    ctx = VerifyContext(seed=cfg.get("seed", 0))
    checks = run_suite(suite, ctx)
    _checks_to_files(checks, outdir, "verify.csv")
    n_fail = sum(not c.passed for c in checks)
    return {"suite": suite, "n_checks": len(checks), "n_failed": n_fail,
            "all_passed": n_fail == 0}


_RUNNERS = {
    "solve": _run_solve,
    "deriv": _run_deriv,
    "optimize": _run_optimize,
    "scan": _run_scan,
    "flucher": _run_flucher,
    "blowup": _run_blowup,
    "verify": _run_verify,
}


def run(config, out_dir):
    """Validate, dispatch, and write the result bundle atomically."""
    cfg = validate_config(config)
    t0 = time.time()
    parent = os.path.dirname(os.path.abspath(out_dir)) or "."
    os.makedirs(parent, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=".holeopt-stage-", dir=parent)
    try:
        summary_body = _RUNNERS[cfg["experiment"]](cfg, tmp)
        summary = {
            "experiment": cfg["experiment"],
            "config_hash": config_hash(cfg),
            "toolkit_version": __version__,
            "wall_time_s": time.time() - t0,
            "results": summary_body,
        }
        with open(os.path.join(tmp, "summary.json"), "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
        if os.path.exists(out_dir):
            shutil.rmtree(out_dir)
        os.rename(tmp, out_dir)
    except Exception:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return summary


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="holeopt",
        description="Eigenvalue of a domain with a circular hole: solves, "
                    "shape derivatives, hole-placement optimization, and "
                    "verification suites.",
    )
    parser.add_argument("command", choices=EXPERIMENTS)
    parser.add_argument("suite", nargs="?", default=None,
                        help="suite name for the verify command")
    parser.add_argument("--config", default=None, help="JSON config path")
    parser.add_argument("--out", default="holeopt-out", help="output bundle dir")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--h", type=float, default=None,
                        dest="target_h", help="override mesh.target_h")
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args.config)
        cfg["experiment"] = args.command
        if args.command == "verify" and args.suite is not None:
            cfg.setdefault("verify", {})["suite"] = args.suite
        if args.target_h is not None:
            cfg.setdefault("mesh", {})["target_h"] = args.target_h
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.jobs != 1:
            cfg["jobs"] = args.jobs
        summary = run(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HoleoptError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(summary, indent=2, sort_keys=True))
    if args.command in ("verify", "blowup") and not summary["results"]["all_passed"]:
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
