"""Geometry queries against dense-sampling and winding oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holeopt import (AmbiguousProjection, GeometryError, Hole,
                     PuncturedDomain, SmoothDomain, arc_decomposition,
                     contains_ball, project_to_boundary, signed_distance)
from oracles import dense_nearest_point, winding_inside


def test_signed_distance_disk_trivials(disk):
    assert signed_distance(disk, (0.0, 0.0)) == pytest.approx(-1.0, abs=1e-10)
    assert signed_distance(disk, (2.0, 0.0)) == pytest.approx(1.0, abs=1e-10)


def test_signed_distance_ellipse_center(ellipse):
    # nearest point is (0, +-1); frozen from the dense-sampling oracle
    _, d = dense_nearest_point(ellipse, (0.0, 0.0))
    assert d == pytest.approx(1.0, abs=1e-8)
    assert signed_distance(ellipse, (0.0, 0.0)) == pytest.approx(-1.0, abs=1e-9)


def test_signed_distance_sign_matches_winding(star):
    t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    poly = star.curve(t)
    pts = rng = np.random.default_rng(3).uniform(-1.3, 1.3, (200, 2))
    sd = signed_distance(star, pts)
    for q, s in zip(pts, sd):
        inside = winding_inside(poly, q)
        if abs(s) > 1e-6:  # skip points too close to the boundary to classify
            assert inside == (s < 0)


def test_projection_trivials(disk, ellipse):
    z, n = project_to_boundary(disk, np.array([0.5, 0.0]))
    assert np.allclose(z, [1.0, 0.0], atol=1e-10)
    assert np.allclose(n, [-1.0, 0.0], atol=1e-10)
    z, n = project_to_boundary(ellipse, np.array([0.0, 0.8]))
    assert np.allclose(z, [0.0, 1.0], atol=1e-9)
    assert np.allclose(n, [0.0, -1.0], atol=1e-9)


def test_projection_star_on_symmetry_ray(star):
    r_top = star.boundary_radius(np.pi / 2)
    q = np.array([0.0, 0.9 * float(r_top)])
    z, _ = project_to_boundary(star, q)
    z_oracle, _ = dense_nearest_point(star, q)
    assert np.linalg.norm(z - z_oracle) < 1e-4
    assert abs(np.arctan2(z[1], z[0]) - np.pi / 2) < 1e-9


def test_projection_consistency_with_distance(ellipse):
    gen = np.random.default_rng(7)
    cand = gen.uniform([-1.4, -1.0], [1.4, 1.0], (40000, 2))
    sd = signed_distance(ellipse, cand)
    keep = (sd < -1e-3) & (-sd < 0.9 * ellipse.reach)
    pts = cand[keep][:10000]
    sd = sd[keep][:10000]
    assert len(pts) == 10000
    for q, s in zip(pts, sd):
        z, _ = project_to_boundary(ellipse, q)
        assert abs(np.linalg.norm(q - z) - (-s)) < 1e-8


def test_projection_ambiguous_at_center(disk):
    with pytest.raises(AmbiguousProjection):
        project_to_boundary(disk, np.array([0.0, 0.0]))


def test_projection_outside_raises(disk):
    with pytest.raises(GeometryError):
        project_to_boundary(disk, np.array([1.5, 0.0]))


def test_contains_ball_trivials(disk, ellipse):
    assert contains_ball(disk, Hole((0, 0), 0.3)) == pytest.approx(0.7, abs=1e-10)
    assert contains_ball(disk, Hole((0.8, 0), 0.3)) == pytest.approx(-0.1, abs=1e-10)
    # signed-distance oracle: dist((0, 0.9), boundary) = 0.1
    assert contains_ball(ellipse, Hole((0, 0.9), 0.05)) == pytest.approx(0.05, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(
    c=st.floats(-0.95, 0.95),
    delta=st.floats(0.01, 0.5),
)
def test_contains_ball_disk_iff(c, delta):
    disk = SmoothDomain.disk(1.0)
    clearance = contains_ball(disk, Hole((c, 0.0), delta))
    assert (clearance > 0) == (abs(c) < 1.0 - delta) or abs(
        abs(c) - (1.0 - delta)
    ) < 1e-12
    assert clearance == pytest.approx(1.0 - abs(c) - delta, abs=1e-12)


def test_punctured_domain_validates(disk):
    with pytest.raises(GeometryError):
        PuncturedDomain(disk, Hole((0.8, 0.0), 0.3))
    pd = PuncturedDomain(disk, Hole((0.0, 0.0), 0.3))
    assert pd.clearance == pytest.approx(0.7, abs=1e-10)


def test_hole_radius_must_be_positive():
    with pytest.raises(GeometryError):
        Hole((0.0, 0.0), 0.0)
    with pytest.raises(GeometryError):
        Hole((0.0, 0.0), -0.1)


def test_arc_decomposition_axis_and_measures(disk):
    pd = PuncturedDomain(disk, Hole((0.0, 0.5), 0.2))
    dec = arc_decomposition(pd, np.pi / 6)
    assert np.allclose(dec.axis, [0.0, -1.0], atol=1e-9)
    top, bottom, sides = dec.arc_measures
    assert top == pytest.approx(np.pi / 3)
    assert bottom == pytest.approx(np.pi / 3)
    assert sum(dec.arc_measures) == pytest.approx(2 * np.pi, abs=1e-12)
    # the top arc faces the domain interior: points near p + delta*axis
    probe = pd.hole.center_array + 0.2 * dec.axis
    assert dec.classify(probe[None, :])[0] == 1


def test_arc_measures_quarter_angle(disk):
    pd = PuncturedDomain(disk, Hole((0.0, 0.5), 0.2))
    dec = arc_decomposition(pd, np.pi / 4)
    assert dec.arc_measures[2] == pytest.approx(np.pi)


def test_arc_partition_random_configs(ellipse):
    gen = np.random.default_rng(11)
    done = 0
    while done < 100:
        p = gen.uniform([-1.0, -0.7], [1.0, 0.7])
        delta = gen.uniform(0.02, 0.08)
        theta = gen.uniform(0.05, 1.5)
        try:
            pd = PuncturedDomain(ellipse, Hole(tuple(p), delta))
            dec = arc_decomposition(pd, theta)
        except (GeometryError, AmbiguousProjection):
            continue
        top, bottom, sides = dec.arc_measures
        assert abs(top + bottom + sides - 2 * np.pi) < 1e-12
        ang = gen.uniform(0, 2 * np.pi, 512)
        pts = pd.hole.center_array + delta * np.stack(
            [np.cos(ang), np.sin(ang)], axis=1
        )
        labels = dec.classify(pts)
        nu = pts - pd.hole.center_array
        nu /= np.linalg.norm(nu, axis=1, keepdims=True)
        cosa = nu @ dec.axis
        assert np.all((labels == 1) == (cosa >= np.cos(theta)))
        assert np.all((labels == -1) == (cosa <= -np.cos(theta)))
        done += 1


def test_arc_decomposition_rejects_bad_theta(disk):
    pd = PuncturedDomain(disk, Hole((0.0, 0.5), 0.2))
    with pytest.raises(GeometryError):
        arc_decomposition(pd, 0.0)
    with pytest.raises(GeometryError):
        arc_decomposition(pd, np.pi / 2)


def test_invalid_star_profiles_rejected():
    with pytest.raises(GeometryError):
        SmoothDomain.fourier_star(1.0, [(2, 1.2)])  # radial profile dips <= 0
    with pytest.raises(GeometryError):
        SmoothDomain.disk(-1.0)
    with pytest.raises(GeometryError):
        SmoothDomain.ellipse(1.0, 0.0)


def test_curvature_and_reach(disk, ellipse):
    assert disk.max_curvature == pytest.approx(1.0, rel=1e-9)
    # ellipse max curvature a/b^2 at (a, 0)
    assert ellipse.max_curvature == pytest.approx(1.4, rel=1e-6)
    assert ellipse.reach == pytest.approx(1 / 1.4, rel=1e-6)
