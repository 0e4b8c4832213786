"""Config validation, result bundles, exit codes, determinism."""

import csv
import json
import os

import pytest

from holeopt import ConfigError
from holeopt.cli import config_hash, main, run, validate_config
from holeopt.verify import run_suite

BASE = {
    "experiment": "solve",
    "domain": {"kind": "disk", "radius": 1.0},
    "hole": {"center": [0.0, 0.0], "radius": 0.3},
    "mesh": {"target_h": 0.06, "hole_refine_factor": 2.0},
    "seed": 0,
}


def test_validate_rejects_unknown_keys():
    cfg = dict(BASE)
    cfg["bogus"] = 1
    with pytest.raises(ConfigError, match="bogus"):
        validate_config(cfg)
    cfg = json.loads(json.dumps(BASE))
    cfg["mesh"]["extra"] = 2
    with pytest.raises(ConfigError, match="mesh.extra"):
        validate_config(cfg)


def test_validate_names_bad_field():
    cfg = json.loads(json.dumps(BASE))
    cfg["hole"]["radius"] = -0.3
    with pytest.raises(ConfigError, match="hole.radius"):
        validate_config(cfg)
    cfg = json.loads(json.dumps(BASE))
    cfg["mesh"]["hole_refine_factor"] = 1000
    with pytest.raises(ConfigError, match="hole_refine_factor"):
        validate_config(cfg)


def test_unknown_suite_rejected():
    with pytest.raises(ConfigError):
        run_suite("not-a-suite")
    cfg = {"experiment": "verify", "verify": {"suite": "nope"}}
    with pytest.raises(ConfigError):
        validate_config(cfg)


def test_solve_bundle_and_determinism(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    s1 = run(json.loads(json.dumps(BASE)), str(out1))
    s2 = run(json.loads(json.dumps(BASE)), str(out2))
    assert (out1 / "summary.json").exists()
    assert (out1 / "solution.csv").exists()
    assert (out1 / "solution.vtk").exists()
    assert s1["results"] == s2["results"]
    assert s1["config_hash"] == s2["config_hash"]
    assert s1["results"]["lambda1"] > 0
    # no leftover staging directories
    assert not any(p.name.startswith(".holeopt-stage") for p in tmp_path.iterdir())
    # csv header order is fixed, and the summary re-derives from the rows
    with open(out1 / "solution.csv", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        row = next(reader)
    assert header == ["lambda1", "residual", "n_dof", "n_vertices",
                      "n_triangles", "clearance"]
    assert float(row[0]) == s1["results"]["lambda1"]
    assert int(row[2]) == s1["results"]["n_dof"]
    assert float(row[5]) == s1["results"]["clearance"]


def test_bundle_overwrites_atomically(tmp_path):
    out = tmp_path / "bundle"
    run(json.loads(json.dumps(BASE)), str(out))
    marker = out / "summary.json"
    first = marker.read_text()
    run(json.loads(json.dumps(BASE)), str(out))
    second = marker.read_text()
    assert json.loads(first)["config_hash"] == json.loads(second)["config_hash"]


def test_config_hash_stable_and_canonical():
    a = config_hash({"x": 1, "y": [1, 2]})
    b = config_hash({"y": [1, 2], "x": 1})
    assert a == b


def test_main_exit_codes(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(BASE))
    out = tmp_path / "out"
    assert main(["solve", "--config", str(cfg_path), "--out", str(out)]) == 0

    bad = json.loads(json.dumps(BASE))
    bad["hole"]["radius"] = -1
    bad_path = tmp_path / "bad.json"
    bad_path.write_text(json.dumps(bad))
    assert main(["solve", "--config", str(bad_path), "--out", str(out)]) == 2

    # numerical failure: hole not contained in the domain
    infeasible = json.loads(json.dumps(BASE))
    infeasible["hole"]["center"] = [0.9, 0.0]
    path = tmp_path / "infeasible.json"
    path.write_text(json.dumps(infeasible))
    assert main(["solve", "--config", str(path), "--out", str(out)]) == 3


def test_flag_overrides(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(BASE))
    out = tmp_path / "o"
    assert main(["solve", "--config", str(cfg_path), "--out", str(out),
                 "--h", "0.08", "--seed", "1"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    # coarser override produces a smaller mesh than the config's 0.06
    assert summary["results"]["mesh"]["n_vertices"] < 4000


def test_blowup_exit_code_on_failed_check(tmp_path):
    """A blowdown over small radii is knowably unstable: exit code 4."""
    cfg = {
        "blowup": {"R": 8.0, "alpha": 1.0, "blowdown_radii": [2.0, 3.0]},
        "seed": 0,
    }
    path = tmp_path / "blowup.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "bl"
    code = main(["blowup", "--config", str(path), "--out", str(out)])
    assert code == 4
    with open(out / "blowup_checks.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["check_id", "parameters", "statistic", "threshold", "pass"]
    by_id = {r[0]: r for r in rows[1:]}
    assert by_id["blowup_blowdown_stable"][4] == "False"
    assert by_id["blowup_top_positive"][4] == "True"


def test_scan_and_optimize_commands(tmp_path):
    cfg = {
        "domain": {"kind": "disk", "radius": 1.0},
        "mesh": {"target_h": 0.05, "hole_refine_factor": 4.0},
        "scan": {"delta": 0.2, "grid": [-0.3, 0.3, 3, 0.0, 0.0, 1]},
        "optimize": {"delta": 0.2, "p0": [0.0, 0.0], "max_iter": 2},
        "seed": 0,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "scan"
    assert main(["scan", "--config", str(path), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["results"]["n_feasible"] == 3
    out2 = tmp_path / "opt"
    assert main(["optimize", "--config", str(path), "--out", str(out2)]) == 0
    summary2 = json.loads((out2 / "summary.json").read_text())
    assert summary2["results"]["termination"] == "gradient_small"
    assert (out2 / "trajectory.csv").exists()


def test_deriv_csv_columns(tmp_path):
    cfg = {
        "experiment": "deriv",
        "domain": {"kind": "disk", "radius": 1.0},
        "hole": {"center": [0.4, 0.0], "radius": 0.1},
        "mesh": {"target_h": 0.045, "hole_refine_factor": 4.0},
        "deriv": {"theta": 0.5, "fd": False},
        "seed": 0,
    }
    out = tmp_path / "deriv"
    summary = run(cfg, str(out))
    with open(out / "deriv.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["domain_id", "p_x", "p_y", "delta", "theta", "arc_top",
                       "arc_bottom", "arc_sides", "total", "fd", "rel_err"]
    assert rows[1][0] == "disk(1.0)"
    assert summary["results"]["hadamard_total"] > 0  # toward the center
