"""Eigensolver against Bessel oracles, plus the eigenfunction bounds."""

import numpy as np
import pytest

from holeopt import (Hole, Mesh, OutsideMesh, PuncturedDomain, assemble,
                     convergence_study, evaluate_u, generate_domain_mesh,
                     generate_mesh, hole_flux, outer_flux_min, signed_distance,
                     solve_lambda1)
from holeopt.meshing import INTERIOR
from oracles import (annulus_eigenfunction, annulus_first_root,
                     disk_eigenfunction_value, first_j0_zero)

# frozen oracle values (reproduced by the oracle tests below)
J01 = 2.404825557695773
J01_SQ = 5.783185962946785
ANNULUS_K_03 = 4.412394692776773


def test_oracles_reproduce_frozen_constants():
    assert first_j0_zero() == pytest.approx(J01, abs=1e-12)
    assert J01**2 == pytest.approx(J01_SQ, abs=1e-12)
    assert annulus_first_root(0.3) == pytest.approx(ANNULUS_K_03, abs=1e-10)


def _reference_triangle_mesh():
    return Mesh(
        vertices=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        triangles=np.array([[0, 1, 2]]),
        boundary_tags=np.zeros(3, dtype=np.int8),
        target_h=1.0,
        hole_h=1.0,
    )


def test_element_matrices_on_reference_triangle():
    k, m = assemble(_reference_triangle_mesh())
    k = k.toarray()
    m = m.toarray()
    # constants lie in the stiffness kernel; mass integrates to the area
    assert np.allclose(k.sum(axis=1), 0.0, atol=1e-14)
    assert m.sum() == pytest.approx(0.5, abs=1e-14)
    assert np.allclose(k, k.T) and np.allclose(m, m.T)


def test_stiffness_positive_on_interior_vector(disk_solution):
    mesh = disk_solution.mesh
    k = disk_solution.stiffness
    interior = np.flatnonzero(mesh.boundary_tags == INTERIOR)
    gen = np.random.default_rng(5)
    x = np.zeros(mesh.n_vertices)
    x[interior] = gen.standard_normal(len(interior))
    assert x @ (k @ x) > 0


def test_disk_eigenvalue_accuracy(disk_solution):
    assert disk_solution.lambda1 == pytest.approx(J01_SQ, rel=2e-3)


def test_solution_invariants(disk_solution):
    mesh = disk_solution.mesh
    u = disk_solution.u
    assert np.all(u[mesh.boundary_tags != INTERIOR] == 0.0)
    assert np.max(u) > 0
    assert np.min(u) >= -1e-8 * np.max(u)
    assert u @ (disk_solution.mass @ u) == pytest.approx(1.0, abs=1e-10)


def test_same_mesh_solve_is_deterministic(disk_solution):
    again = solve_lambda1(disk_solution.mesh)
    assert abs(again.lambda1 - disk_solution.lambda1) <= 1e-14 * disk_solution.lambda1


def test_annulus_eigenvalue_and_flux(annulus_bundle):
    pd, sol, flux = annulus_bundle
    k_sq = ANNULUS_K_03**2
    assert sol.lambda1 == pytest.approx(k_sq, rel=1e-2)
    spread = (flux.values.max() - flux.values.min()) / flux.values.mean()
    assert spread <= 0.02
    _, _, flux_exact = annulus_eigenfunction(0.3)
    assert flux.values.mean() == pytest.approx(flux_exact, rel=0.03)
    # total flux through the hole boundary is nonnegative
    assert np.sum(flux.values * flux.trapezoid_weights()) >= 0.0
    # flux is nonnegative up to the documented tolerance
    assert np.min(flux.values) >= -1e-3 * np.max(flux.values)


def test_domain_monotonicity(annulus_bundle, disk_solution):
    _, sol, _ = annulus_bundle
    # punctured eigenvalue dominates the unpunctured one far beyond mesh error
    assert sol.lambda1 >= disk_solution.lambda1


def test_evaluate_u(disk_solution, annulus_bundle):
    mesh = disk_solution.mesh
    i = int(np.argmax(disk_solution.u))
    assert evaluate_u(disk_solution, mesh.vertices[i]) == pytest.approx(
        disk_solution.u[i], abs=1e-14
    )
    assert evaluate_u(disk_solution, np.array([0.0, 0.0])) == pytest.approx(
        disk_eigenfunction_value(0.0, J01), rel=0.01
    )
    _, sol, flux = annulus_bundle
    hole_vertex = sol.mesh.vertices[flux.vertex_index[0]]
    assert abs(evaluate_u(sol, hole_vertex)) <= 1e-12
    with pytest.raises(OutsideMesh):
        evaluate_u(sol, np.array([2.5, 0.0]))
    with pytest.raises(OutsideMesh):
        evaluate_u(sol, np.array([0.0, 0.0]))  # inside the hole


def test_outer_flux_disk(disk_solution):
    # inward normal derivative of the normalized disk eigenfunction: j01/sqrt(pi)
    exact = J01 / np.sqrt(np.pi)
    assert outer_flux_min(disk_solution) == pytest.approx(exact, rel=0.02)


def test_convergence_study_disk(disk):
    def solve_at(h):
        return solve_lambda1(generate_domain_mesh(disk, h, seed=0)).lambda1

    out = convergence_study(solve_at, [0.12, 0.06, 0.03])
    assert 1.7 <= out["order"] <= 2.3
    assert out["extrapolated"] == pytest.approx(J01_SQ, rel=2e-3)


def test_convergence_study_degenerate_flagged():
    out = convergence_study(lambda h: 5.0, [0.1, 0.05, 0.025])
    assert out["order"] is None


def test_convergence_study_annulus(disk):
    def solve_at(h):
        pd = PuncturedDomain(disk, Hole((0.0, 0.0), 0.3))
        return solve_lambda1(generate_mesh(pd, h, 4.0, seed=0)).lambda1

    out = convergence_study(solve_at, [0.08, 0.04, 0.02])
    assert 1.7 <= out["order"] <= 2.3


def test_no_convergence_attaches_best(disk_solution):
    from holeopt import NoConvergence

    with pytest.raises(NoConvergence) as err:
        solve_lambda1(disk_solution.mesh, tol=1e-13, max_iter=1)
    best = err.value.best
    assert best is not None
    assert best.lambda1 == pytest.approx(J01_SQ, rel=0.05)


def test_flux_requires_tagged_boundary(disk_solution):
    from holeopt import SingularBoundaryMass

    with pytest.raises(SingularBoundaryMass):
        hole_flux(disk_solution)  # unpunctured mesh has no hole tag


def test_uniform_eigenvalue_bound(disk):
    """Eigenvalues over hole positions stay under the concentric cap + 1."""
    pd_cap = PuncturedDomain(disk, Hole((0.0, 0.0), 0.1))
    cap = solve_lambda1(generate_mesh(pd_cap, 0.05, 4.0, seed=0)).lambda1 + 1.0
    for delta in (0.1, 0.05):
        for px in np.linspace(-0.6, 0.6, 5):
            for py in np.linspace(-0.6, 0.6, 5):
                try:
                    pd = PuncturedDomain(disk, Hole((px, py), delta))
                except Exception:
                    continue
                lam = solve_lambda1(
                    generate_mesh(pd, min(0.05, 0.8 * delta), 2.0, seed=0),
                    tol=1e-8,
                ).lambda1
                assert lam <= cap


def test_lipschitz_boundary_bound(ctx, ellipse_solution, ellipse):
    """|u(x)| <= C dist(x, boundary) with C comparable to the unpunctured fit.

    Uses the small near-boundary hole; the uniform constant of the bound is a
    small-hole statement.
    """
    pd, sol, _ = ctx.near_boundary_solution(0.05)
    gen = np.random.default_rng(9)
    cand = gen.uniform([-1.4, -1.0], [1.4, 1.0], (3000, 2))
    sd = signed_distance(ellipse, cand)
    away = np.hypot(*(cand - pd.hole.center_array).T) > 0.2
    pts = cand[(sd < -1e-3) & away][:500]
    dist = -signed_distance(ellipse, pts)

    def fitted_c(solution):
        vals = np.array([evaluate_u(solution, q) for q in pts])
        return np.max(np.abs(vals) / dist)

    c_punctured = fitted_c(sol)
    c_base = fitted_c(ellipse_solution)
    assert c_punctured <= 2.0 * c_base


def test_interior_lower_bound(ctx, ellipse_solution, ellipse):
    """u >= (Hopf constant) * d / 8 on the band at distances [d, 2d]."""
    _, sol, _ = ctx.near_boundary_solution(0.05)
    lam_floor = outer_flux_min(ellipse_solution)
    assert lam_floor > 0
    d = 0.2
    gen = np.random.default_rng(13)
    cand = gen.uniform([-1.4, -1.0], [1.4, 1.0], (4000, 2))
    sd = signed_distance(ellipse, cand)
    band = cand[(-sd >= d) & (-sd <= 2 * d)][:150]
    assert len(band) == 150
    vals = np.array([evaluate_u(sol, q) for q in band])
    assert np.all(vals >= lam_floor * d / 8.0)
