"""Derivative of the eigenvalue with respect to the hole position.

Translating the hole along a unit vector v changes the eigenvalue at the rate

    d lambda / dt = integral over the hole circle of g(z)^2 <v, nu(z)> dH1,

where g is the normal derivative of the eigenfunction along the exterior
normal nu of the ball.  The integral is evaluated by the periodic trapezoid
rule on the recovered flux samples; restricting the same quadrature to the
top/bottom/side arcs gives an exact decomposition of the total.

A central finite difference of two full solves provides an independent
oracle, and a two-parameter fit of lambda(r) against the small-hole
asymptotic lambda0 + a / (-log r + c) recovers the coefficient 2 pi u(x)^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FitDiverged, GeometryError
from .eigensolver import evaluate_u, hole_flux, solve_lambda1
from .geometry import Hole, PuncturedDomain
from .meshing import generate_domain_mesh, generate_mesh


@dataclass
class ShapeReport:
    """Hadamard derivative along an axis and its arc decomposition."""

    hadamard_total: float
    arc_top: float
    arc_bottom: float
    arc_sides: float
    direction: np.ndarray
    theta: float
    fd_value: float = None

    @property
    def decomposition_defect(self):
        parts = self.arc_top + self.arc_bottom + self.arc_sides
        scale = max(abs(self.hadamard_total), 1e-300)
        return abs(parts - self.hadamard_total) / scale


def _flux_quadrature(flux, v):
    """Per-sample contributions of the boundary integral along v."""
    w = flux.trapezoid_weights()
    nu = np.stack([np.cos(flux.angles), np.sin(flux.angles)], axis=1)
    return flux.values**2 * (nu @ np.asarray(v, dtype=float)) * w


def hadamard_derivative(sol, v, flux=None):
    """d lambda / dt for hole translation along the unit vector v."""
    if flux is None:
        flux = hole_flux(sol)
    return float(np.sum(_flux_quadrature(flux, v)))


def arc_integrals(sol, decomp, flux=None):
    """Hadamard integral along the decomposition axis, split by arc."""
    if flux is None:
        flux = hole_flux(sol, center=decomp.center, radius=decomp.radius)
    contrib = _flux_quadrature(flux, decomp.axis)
    nu = np.stack([np.cos(flux.angles), np.sin(flux.angles)], axis=1)
    pts = flux.center[None, :] + flux.radius * nu
    label = decomp.classify(pts)
    top = float(contrib[label == 1].sum())
    bottom = float(contrib[label == -1].sum())
    sides = float(contrib[label == 0].sum())
    return ShapeReport(
        hadamard_total=float(contrib.sum()),
        arc_top=top,
        arc_bottom=bottom,
        arc_sides=sides,
        direction=np.asarray(decomp.axis, dtype=float),
        theta=decomp.theta,
    )


@dataclass
class FDResult:
    """Central-difference derivative of the eigenvalue in the hole position."""

    value: float
    step: float
    lambda_plus: float
    lambda_minus: float
    noise: float = None
    lambda_center: float = None


def fd_derivative(pd, v, step=None, target_h=0.02, hole_refine_factor=8.0,
                  seed=0, tol=1e-10, estimate_noise=False):
    """Finite-difference oracle: two solves on freshly generated meshes.

    The step defaults to 1e-3 * delta and must stay within
    [1e-4, 1e-2] * delta.  Both shifted holes must keep positive clearance.
    With ``estimate_noise`` a third solve at the unshifted center is used to
    report the spread of the two one-sided slopes.
    """
    delta = pd.hole.radius
    if step is None:
        step = 1e-3 * delta
    if not 1e-4 * delta <= step <= 1e-2 * delta:
        raise GeometryError(
            f"fd step {step} outside the documented range [1e-4, 1e-2] * delta"
        )
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    p = pd.hole.center_array

    def lam_at(center):
        shifted = PuncturedDomain(pd.domain, Hole(tuple(center), delta))
        mesh = generate_mesh(shifted, target_h, hole_refine_factor, seed=seed)
        return solve_lambda1(mesh, tol=tol).lambda1

    lam_p = lam_at(p + step * v)
    lam_m = lam_at(p - step * v)
    value = (lam_p - lam_m) / (2.0 * step)
    noise = None
    lam_c = None
    if estimate_noise:
        lam_c = lam_at(p)
        d_plus = (lam_p - lam_c) / step
        d_minus = (lam_c - lam_m) / step
        noise = abs(d_plus - d_minus) / 2.0
    return FDResult(
        value=float(value),
        step=float(step),
        lambda_plus=float(lam_p),
        lambda_minus=float(lam_m),
        noise=noise,
        lambda_center=lam_c,
    )


@dataclass
class FlucherFit:
    """Fit of lambda(r) = lambda0 + a / (-log r + c) to punctured solves."""

    a_fit: float
    c_fit: float
    reference: float       # 2 pi u(x)^2 from the unpunctured solve
    lambda_base: float
    radii: np.ndarray
    lambdas: np.ndarray
    iterations: int


def fit_asymptotic_coefficients(radii, lambdas, lambda_base, max_iter=100):
    """Gauss-Newton fit of lambda(r) - lambda_base = a / (-log r + c).

    Returns (a, c, iterations); raises FitDiverged on degenerate designs
    (fewer than two distinct radii) or non-finite iterates.
    """
    radii = np.asarray(radii, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    ell = -np.log(radii)
    y = lambdas - lambda_base
    c = 0.5
    a = float(np.median(y * (ell + c)))
    it = 0
    for it in range(1, max_iter + 1):
        denom = ell + c
        if np.any(np.abs(denom) < 1e-12):
            raise FitDiverged("fit drove -log r + c through zero")
        r_vec = y - a / denom
        jac = np.stack([-1.0 / denom, a / denom**2], axis=1)
        jtj = jac.T @ jac
        if not np.all(np.isfinite(jtj)) or np.linalg.cond(jtj) > 1e12:
            raise FitDiverged("singular design matrix (degenerate radii?)")
        step_vec = np.linalg.solve(jtj, -jac.T @ r_vec)
        a += step_vec[0]
        c += step_vec[1]
        if not np.isfinite(a) or not np.isfinite(c):
            raise FitDiverged("fit produced non-finite parameters")
        if np.linalg.norm(step_vec) < 1e-12 * (1.0 + abs(a) + abs(c)):
            break
    else:
        raise FitDiverged(f"Gauss-Newton did not settle in {max_iter} iterations")
    return float(a), float(c), it


def flucher_fit(domain, x, radii, target_h=0.015, hole_refine_factor=4.0,
                seed=0, tol=1e-10, max_fit_iter=100):
    """Recover the small-hole asymptotic coefficient at the point x.

    Solves the unpunctured domain for lambda0 and u(x), then the punctured
    domain for every radius, and fits (a, c) by Gauss-Newton with the
    analytic Jacobian of the two-parameter model.
    """
    radii = np.asarray(sorted(radii, reverse=True), dtype=float)
    if len(radii) < 4:
        raise FitDiverged("need at least four radii")
    x = np.asarray(x, dtype=float)
    base_mesh = generate_domain_mesh(domain, target_h, seed=seed)
    base = solve_lambda1(base_mesh, tol=tol)
    u_x = evaluate_u(base, x)
    reference = float(2.0 * np.pi * u_x**2)

    lambdas = []
    for r in radii:
        pd = PuncturedDomain(domain, Hole(tuple(x), float(r)))
        mesh = generate_mesh(pd, target_h, hole_refine_factor, seed=seed)
        lambdas.append(solve_lambda1(mesh, tol=tol).lambda1)
    lambdas = np.array(lambdas)

    a, c, it = fit_asymptotic_coefficients(radii, lambdas, base.lambda1,
                                           max_iter=max_fit_iter)
    return FlucherFit(
        a_fit=a,
        c_fit=c,
        reference=reference,
        lambda_base=float(base.lambda1),
        radii=radii,
        lambdas=lambdas,
        iterations=it,
    )
