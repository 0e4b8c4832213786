"""Projected gradient ascent of the hole position.

The gradient of the eigenvalue in the hole center is read off the Hadamard
boundary integral (one solve gives both components).  Candidate steps are
projected back onto the feasible set {dist(p, boundary) >= delta + margin}
by moving along the inward normal, and are accepted only if the eigenvalue
increases, with backtracking otherwise.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousProjection, InfeasibleStart
from .eigensolver import hole_flux, solve_lambda1
from .geometry import Hole, PuncturedDomain, SmoothDomain, project_to_boundary
from .meshing import generate_mesh
from .shape_analysis import hadamard_derivative

EX = np.array([1.0, 0.0])
EY = np.array([0.0, 1.0])


@dataclass
class Iterate:
    p: np.ndarray
    lambda1: float
    gradient: np.ndarray
    clearance: float
    step: float


@dataclass
class Trajectory:
    iterates: list = field(default_factory=list)
    termination: str = "max_iter"

    @property
    def p_star(self):
        return self.iterates[-1].p

    @property
    def lambda_star(self):
        return self.iterates[-1].lambda1


def _solve_at(domain, delta, p, target_h, factor, seed, tol):
    pd = PuncturedDomain(domain, Hole(tuple(p), delta))
    mesh = generate_mesh(pd, target_h, factor, seed=seed)
    sol = solve_lambda1(mesh, tol=tol)
    flux = hole_flux(sol, center=pd.hole.center_array, radius=delta)
    grad = np.array(
        [hadamard_derivative(sol, EX, flux), hadamard_derivative(sol, EY, flux)]
    )
    return sol.lambda1, grad, pd.clearance


def gradient_noise_floor(delta, target_h, factor=8.0, seed=0, tol=1e-10):
    """Gradient magnitude on the concentric disk, where the true gradient is 0."""
    disk = SmoothDomain.disk(1.0)
    lam, grad, _ = _solve_at(disk, delta, np.zeros(2), target_h, factor, seed, tol)
    return float(np.linalg.norm(grad))


def _project_feasible(domain, p, delta, margin):
    """Project p onto {dist(p, boundary) >= delta + margin}."""
    from .geometry import signed_distance

    dist = -signed_distance(domain, p)
    if dist >= delta + margin:
        return p
    try:
        z, inward = project_to_boundary(domain, p)
    except AmbiguousProjection:
        return p  # deep interior or degenerate: nothing to clip
    return z + (delta + margin) * inward


def optimize_hole(domain, delta, p0, max_iter=40, g_tol=None, step0=None,
                  shrink=0.5, margin=None, target_h=0.03,
                  hole_refine_factor=8.0, seed=0, tol=1e-10):
    """Maximize lambda1 over the hole center by projected gradient ascent.

    Stops when the gradient magnitude drops below g_tol (defaults to the
    measured noise floor of the concentric-disk configuration at the same
    resolution), when backtracking exhausts the step, or at max_iter.
    """
    p = np.asarray(p0, dtype=float)
    pd0_clearance = None
    try:
        pd0_clearance = PuncturedDomain(domain, Hole(tuple(p), delta)).clearance
    except Exception as exc:
        raise InfeasibleStart(f"starting hole is infeasible: {exc}") from exc
    if pd0_clearance <= 0:
        raise InfeasibleStart(f"starting clearance {pd0_clearance:.3e} <= 0")
    if margin is None:
        margin = 0.1 * delta**2
    if g_tol is None:
        g_tol = 2.0 * gradient_noise_floor(delta, target_h, hole_refine_factor,
                                           seed, tol)

    traj = Trajectory()
    lam, grad, clearance = _solve_at(domain, delta, p, target_h,
                                     hole_refine_factor, seed, tol)
    # default step covers a fraction of the domain per iterate, not of delta
    domain_scale = float(np.sqrt(max(domain.area, delta**2) / np.pi))
    step_scale = (step0 if step0 is not None
                  else 0.15 * domain_scale / max(np.linalg.norm(grad), g_tol))
    traj.iterates.append(Iterate(p.copy(), lam, grad.copy(), clearance, 0.0))

    for _ in range(max_iter):
        gnorm = np.linalg.norm(grad)
        if gnorm <= g_tol:
            traj.termination = "gradient_small"
            return traj
        s = step_scale
        accepted = False
        while s * gnorm >= 1e-6 * delta:
            cand = _project_feasible(domain, p + s * grad, delta, margin)
            if np.linalg.norm(cand - p) < 1e-14:
                break
            try:
                lam_new, grad_new, clr_new = _solve_at(
                    domain, delta, cand, target_h, hole_refine_factor, seed, tol
                )
            except Exception:
                s *= shrink
                continue
            if lam_new > lam:
                p, lam, grad, clearance = cand, lam_new, grad_new, clr_new
                traj.iterates.append(Iterate(p.copy(), lam, grad.copy(), clearance, s))
                accepted = True
                break
            s *= shrink
        if not accepted:
            traj.termination = (
                "boundary_stall" if s * gnorm >= 1e-6 * delta else "step_small"
            )
            return traj
    traj.termination = "max_iter"
    return traj


def _scan_worker(args):
    idx, domain, delta, p, target_h, factor, seed, tol = args
    pd = PuncturedDomain(domain, Hole(tuple(p), delta))
    mesh = generate_mesh(pd, target_h, factor, seed=seed)
    sol = solve_lambda1(mesh, tol=tol)
    return idx, sol.lambda1, pd.clearance


def landscape_scan(domain, delta, grid, target_h=0.03, hole_refine_factor=8.0,
                   seed=0, tol=1e-10, min_clearance=0.0, n_jobs=1):
    """Brute-force eigenvalue table over a rectangular grid of hole centers.

    ``grid`` is (x0, x1, nx, y0, y1, ny); infeasible nodes (clearance below
    ``min_clearance``) are skipped.  Returns the table and the argmax row.
    """
    x0, x1, nx, y0, y1, ny = grid
    xs = np.linspace(x0, x1, int(nx))
    ys = np.linspace(y0, y1, int(ny))
    if len(xs) > 1 and xs[1] - xs[0] < 2 * target_h - 1e-12:
        raise ValueError("grid spacing must be at least 2 * target_h")
    if len(ys) > 1 and ys[1] - ys[0] < 2 * target_h - 1e-12:
        raise ValueError("grid spacing must be at least 2 * target_h")
    jobs = []
    for yv in ys:
        for xv in xs:
            p = np.array([xv, yv])
            try:
                pd = PuncturedDomain(domain, Hole((xv, yv), delta))
            except Exception:
                continue
            if pd.clearance <= min_clearance:
                continue
            jobs.append((len(jobs), domain, delta, p, target_h,
                         hole_refine_factor, seed, tol))
    rows = [None] * len(jobs)
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            for idx, lam, clr in pool.map(_scan_worker, jobs):
                p = jobs[idx][3]
                rows[idx] = (float(p[0]), float(p[1]), lam, clr)
    else:
        for job in jobs:
            idx, lam, clr = _scan_worker(job)
            p = job[3]
            rows[idx] = (float(p[0]), float(p[1]), lam, clr)
    if not rows:
        return {"rows": [], "argmax": None}
    best = max(rows, key=lambda r: r[2])
    return {"rows": rows, "argmax": best}
