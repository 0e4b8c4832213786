"""Mesh generation: quality invariants, determinism, refinement, export."""

import numpy as np
import pytest

from holeopt import (GeometryError, Hole, Mesh, PuncturedDomain,
                     check_mesh_invariants, generate_domain_mesh,
                     generate_mesh, mesh_statistics, write_vtk)
from holeopt.meshing import HOLE_BOUNDARY, INTERIOR, OUTER_BOUNDARY


@pytest.fixture(scope="module")
def disk_hole_mesh(disk):
    pd = PuncturedDomain(disk, Hole((0.0, 0.0), 0.3))
    return pd, generate_mesh(pd, 0.05, 4.0, seed=0)


def test_invariants_disk_hole(disk_hole_mesh):
    pd, mesh = disk_hole_mesh
    assert check_mesh_invariants(mesh, pd)
    assert np.all(mesh.triangle_areas() >= 1e-14)
    stats = mesh_statistics(mesh)
    assert stats["min_angle"] >= 20.0
    # boundary edges belong to exactly one triangle, interior to two
    t = mesh.triangles
    e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    e.sort(axis=1)
    _, counts = np.unique(e, axis=0, return_counts=True)
    assert set(np.unique(counts)) <= {1, 2}


def test_boundary_vertices_snapped(disk_hole_mesh):
    pd, mesh = disk_hole_mesh
    hole = mesh.boundary_tags == HOLE_BOUNDARY
    r = np.hypot(*(mesh.vertices[hole] - pd.hole.center_array).T)
    assert np.max(np.abs(r - 0.3)) <= 1e-10 * 0.3
    outer = mesh.boundary_tags == OUTER_BOUNDARY
    assert np.max(np.abs(np.hypot(*mesh.vertices[outer].T) - 1.0)) <= 1e-8


def test_zero_radius_hole_rejected(disk):
    with pytest.raises(GeometryError):
        PuncturedDomain(disk, Hole((0.0, 0.0), 0.0))


def test_target_h_must_resolve_hole(disk):
    pd = PuncturedDomain(disk, Hole((0.0, 0.0), 0.05))
    with pytest.raises(GeometryError):
        generate_mesh(pd, 0.08, 4.0)


def test_refine_factor_range(disk):
    pd = PuncturedDomain(disk, Hole((0.0, 0.0), 0.3))
    with pytest.raises(GeometryError):
        generate_mesh(pd, 0.05, 0.5)
    with pytest.raises(GeometryError):
        generate_mesh(pd, 0.05, 100.0)


def test_statistics_single_triangles():
    equi = Mesh(
        vertices=np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]]),
        triangles=np.array([[0, 1, 2]]),
        boundary_tags=np.zeros(3, dtype=np.int8),
        target_h=1.0,
        hole_h=1.0,
    )
    assert mesh_statistics(equi)["min_angle"] == pytest.approx(60.0, abs=1e-9)
    right = Mesh(
        vertices=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        triangles=np.array([[0, 1, 2]]),
        boundary_tags=np.zeros(3, dtype=np.int8),
        target_h=1.0,
        hole_h=1.0,
    )
    assert mesh_statistics(right)["min_angle"] == pytest.approx(45.0, abs=1e-9)


def test_disk_mesh_h_max(disk):
    mesh = generate_domain_mesh(disk, 0.05, seed=0)
    assert mesh_statistics(mesh)["h_max"] <= 1.5 * 0.05


def test_refinement_triples_vertex_count(disk):
    pd = PuncturedDomain(disk, Hole((0.0, 0.0), 0.3))
    coarse = generate_mesh(pd, 0.1 * 0.99, 4.0, seed=0)
    fine = generate_mesh(pd, 0.05 * 0.99, 4.0, seed=0)
    assert fine.n_vertices >= 3 * coarse.n_vertices


def test_determinism_bit_identical(disk):
    pd = PuncturedDomain(disk, Hole((0.2, 0.1), 0.25))
    a = generate_mesh(pd, 0.06, 4.0, seed=3)
    b = generate_mesh(pd, 0.06, 4.0, seed=3)
    assert np.array_equal(a.vertices, b.vertices)
    assert np.array_equal(a.triangles, b.triangles)
    assert np.array_equal(a.boundary_tags, b.boundary_tags)


def test_ellipse_fixture_quality(ellipse):
    pd = PuncturedDomain(ellipse, Hole((0.0, 0.9), 0.05))
    mesh = generate_mesh(pd, 0.02, 8.0, seed=0)
    stats = mesh_statistics(mesh)
    assert stats["min_angle"] >= 20.0
    # hole-adjacent edges resolve the graded size target_h / factor
    hole_idx = np.flatnonzero(mesh.boundary_tags == HOLE_BOUNDARY)
    be = mesh.boundary_edges()
    on_hole = be[np.isin(be, hole_idx).all(axis=1)]
    lengths = np.linalg.norm(
        mesh.vertices[on_hole[:, 0]] - mesh.vertices[on_hole[:, 1]], axis=1
    )
    assert np.max(lengths) <= 0.005


def test_star_domain_meshes(star):
    pd = PuncturedDomain(star, Hole((0.0, 0.0), 0.2))
    mesh = generate_mesh(pd, 0.06, 4.0, seed=0)
    assert mesh_statistics(mesh)["min_angle"] >= 20.0
    assert np.any(mesh.boundary_tags == HOLE_BOUNDARY)


def test_vtk_export(tmp_path, disk_hole_mesh):
    _, mesh = disk_hole_mesh
    path = tmp_path / "mesh.vtk"
    write_vtk(mesh, path, fields={"demo": np.arange(mesh.n_vertices, dtype=float)})
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# vtk DataFile")
    assert "ASCII" in lines[2]
    ip = lines.index(f"POINTS {mesh.n_vertices} double")
    ic = next(i for i, l in enumerate(lines) if l.startswith("CELLS "))
    assert lines[ic].split() == ["CELLS", str(mesh.n_triangles), str(4 * mesh.n_triangles)]
    it = lines.index(f"CELL_TYPES {mesh.n_triangles}")
    assert lines[it + 1].strip() == "5"
    assert f"POINT_DATA {mesh.n_vertices}" in lines
    assert any(l.startswith("SCALARS demo double") for l in lines)
    assert any(l.startswith("SCALARS boundary_tag double") for l in lines)
