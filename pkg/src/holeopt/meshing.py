"""Graded conforming triangulations driven by signed distance.

The generator is a distmesh-style relaxation: points repel along Delaunay
edges until the edge lengths match a local size field, while boundary points
slide on their curves and are re-snapped exactly every iteration.  Boundary
points are pre-seeded with the correct local spacing, the bulk starts from a
hex grid, and the graded collar around the hole starts from concentric rings,
so the relaxation only has to polish an already reasonable configuration.

The same engine meshes the punctured domains of the eigenvalue problem and
the model domains of the blowup lab (half-plane minus ball, parabola).
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from .errors import GeometryError, MeshFailure
from .geometry import PuncturedDomain

INTERIOR = 0
OUTER_BOUNDARY = 1
HOLE_BOUNDARY = 2
# extra tags used by the blowup-lab meshes
FLOOR = 3
CIRCLE = 4
TRUNCATION = 5

MIN_ANGLE_DEG = 20.0
MAX_RELAX_ITER = 500
_DPTOL_FACTOR = 1e-3   # stop when max displacement < factor * target_h
_TTOL = 0.10           # retriangulate when movement exceeds ttol * local h
_FSCALE = 1.2
_DELTAT = 0.2


# ---------------------------------------------------------------------------
# boundary curve abstractions
# ---------------------------------------------------------------------------


class _DomainCurve:
    """Closed outer curve of a SmoothDomain; points carry a parameter t."""

    closed = True

    def __init__(self, domain, tag):
        self.domain = domain
        self.tag = tag

    def seed(self, size_fn):
        dense = 16384
        t = np.linspace(0.0, 2 * np.pi, dense, endpoint=False)
        pts = self.domain.curve(t)
        seg = np.roll(pts, -1, axis=0) - pts
        ds = np.linalg.norm(seg, axis=1)
        s = np.concatenate([[0.0], np.cumsum(ds)])
        h = size_fn(pts)
        # arclength "ruler" in units of the local spacing
        units = np.concatenate([[0.0], np.cumsum(ds / h)])
        n = max(8, int(round(units[-1])))
        target = np.linspace(0.0, units[-1], n, endpoint=False)
        si = np.interp(target, units, s)
        ti = np.interp(si, s, np.concatenate([t, [2 * np.pi]]))
        return self.domain.curve(ti), ti

    def project(self, pts, params):
        t = np.asarray(params, dtype=float)
        q = np.asarray(pts, dtype=float)
        for _ in range(4):
            g = self.domain.curve(t)
            v = self.domain.curve_velocity(t)
            acc = self.domain.curve_acceleration(t)
            r = q - g
            f1 = -np.einsum("ij,ij->i", r, v)
            f2 = np.einsum("ij,ij->i", v, v) - np.einsum("ij,ij->i", r, acc)
            t = t - f1 / np.where(np.abs(f2) < 1e-30, 1e-30, f2)
        return self.domain.curve(t), t


class _Circle:
    """Full circle (hole boundary) of radius r about c."""

    closed = True

    def __init__(self, center, radius, tag):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.tag = tag

    def seed(self, size_fn):
        h = float(size_fn(self.center[None, :] + np.array([[self.radius, 0.0]]))[0])
        n = max(12, int(round(2 * np.pi * self.radius / h)))
        ang = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        pts = self.center + self.radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return pts, ang

    def project(self, pts, params):
        d = pts - self.center
        r = np.linalg.norm(d, axis=1, keepdims=True)
        r = np.where(r < 1e-300, 1e-300, r)
        out = self.center + self.radius * d / r
        return out, np.arctan2(out[:, 1] - self.center[1], out[:, 0] - self.center[0])


class _Arc:
    """Open circular arc, angles in [a0, a1] about c; endpoints are corners."""

    closed = False

    def __init__(self, center, radius, a0, a1, tag):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.a0, self.a1 = float(a0), float(a1)
        self.tag = tag

    def _point(self, ang):
        return self.center + self.radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)

    def seed(self, size_fn):
        dense = 4096
        ang = np.linspace(self.a0, self.a1, dense)
        pts = self._point(ang)
        h = size_fn(pts)
        ds = self.radius * np.diff(ang)
        units = np.concatenate([[0.0], np.cumsum(ds / (0.5 * (h[1:] + h[:-1])))])
        n = max(2, int(round(units[-1])))
        target = np.linspace(0.0, units[-1], n + 1)[1:-1]
        ai = np.interp(target, units, ang)
        return self._point(ai), ai

    def project(self, pts, params):
        d = pts - self.center
        ang = np.arctan2(d[:, 1], d[:, 0])
        # unwrap into the arc's angular window
        ang = np.where(ang < self.a0 - np.pi, ang + 2 * np.pi, ang)
        ang = np.where(ang > self.a1 + np.pi, ang - 2 * np.pi, ang)
        ang = np.clip(ang, self.a0, self.a1)
        return self._point(ang), ang


class _Segment:
    """Open straight segment from a to b; endpoints are corners."""

    closed = False

    def __init__(self, a, b, tag):
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.tag = tag

    def seed(self, size_fn):
        dense = 4096
        s = np.linspace(0.0, 1.0, dense)
        pts = self.a[None, :] + s[:, None] * (self.b - self.a)[None, :]
        h = size_fn(pts)
        ds = np.linalg.norm(self.b - self.a) * np.diff(s)
        units = np.concatenate([[0.0], np.cumsum(ds / (0.5 * (h[1:] + h[:-1])))])
        n = max(1, int(round(units[-1])))
        target = np.linspace(0.0, units[-1], n + 1)[1:-1]
        si = np.interp(target, units, s)
        return self.a[None, :] + si[:, None] * (self.b - self.a)[None, :], si

    def project(self, pts, params):
        ab = self.b - self.a
        s = ((pts - self.a) @ ab) / (ab @ ab)
        s = np.clip(s, 0.0, 1.0)
        return self.a[None, :] + s[:, None] * ab[None, :], s


class _Parabola:
    """Arc of y = y0 + M x^2 for x in [x0, x1]; endpoints are corners."""

    closed = False

    def __init__(self, m, y0, x0, x1, tag):
        self.m, self.y0 = float(m), float(y0)
        self.x0, self.x1 = float(x0), float(x1)
        self.tag = tag

    def _point(self, x):
        return np.stack([x, self.y0 + self.m * x**2], axis=-1)

    def seed(self, size_fn):
        dense = 4096
        x = np.linspace(self.x0, self.x1, dense)
        pts = self._point(x)
        ds = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        h = size_fn(pts)
        units = np.concatenate([[0.0], np.cumsum(ds / (0.5 * (h[1:] + h[:-1])))])
        n = max(1, int(round(units[-1])))
        target = np.linspace(0.0, units[-1], n + 1)[1:-1]
        xi = np.interp(target, units, x)
        return self._point(xi), xi

    def project(self, pts, params):
        x = np.asarray(params, dtype=float).copy()
        for _ in range(6):
            y = self.y0 + self.m * x**2
            dx = pts[:, 0] - x
            dy = pts[:, 1] - y
            f1 = -(dx + 2 * self.m * x * dy)
            f2 = 1 + 4 * self.m**2 * x**2 - 2 * self.m * dy
            x = x - f1 / np.where(np.abs(f2) < 1e-30, 1e-30, f2)
        x = np.clip(x, self.x0, self.x1)
        return self._point(x), x


# ---------------------------------------------------------------------------
# mesh container
# ---------------------------------------------------------------------------


@dataclass
class Mesh:
    """Conforming triangulation with per-vertex boundary tags."""

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_tags: np.ndarray
    target_h: float
    hole_h: float

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def triangle_areas(self):
        p = self.vertices
        t = self.triangles
        d1 = p[t[:, 1]] - p[t[:, 0]]
        d2 = p[t[:, 2]] - p[t[:, 0]]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def edges(self):
        """All unique edges as sorted vertex index pairs."""
        t = self.triangles
        e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def boundary_edges(self):
        """Edges owned by exactly one triangle."""
        t = self.triangles
        e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        eu, counts = np.unique(e, axis=0, return_counts=True)
        return eu[counts == 1]

    def min_angle_deg(self):
        return float(np.degrees(np.min(_triangle_angles(self.vertices, self.triangles))))


def _triangle_angles(p, t):
    a = p[t[:, 0]]
    b = p[t[:, 1]]
    c = p[t[:, 2]]
    la = np.linalg.norm(b - c, axis=1)
    lb = np.linalg.norm(a - c, axis=1)
    lc = np.linalg.norm(a - b, axis=1)

    def ang(opp, s1, s2):
        cosv = (s1**2 + s2**2 - opp**2) / (2 * s1 * s2)
        return np.arccos(np.clip(cosv, -1.0, 1.0))

    return np.stack([ang(la, lb, lc), ang(lb, la, lc), ang(lc, la, lb)], axis=1)


def mesh_statistics(mesh):
    """Exact per-triangle quality statistics of a mesh."""
    p, t = mesh.vertices, mesh.triangles
    angles = _triangle_angles(p, t)
    e = np.stack(
        [
            np.linalg.norm(p[t[:, 1]] - p[t[:, 0]], axis=1),
            np.linalg.norm(p[t[:, 2]] - p[t[:, 1]], axis=1),
            np.linalg.norm(p[t[:, 0]] - p[t[:, 2]], axis=1),
        ],
        axis=1,
    )
    areas = np.abs(mesh.triangle_areas())
    inradius = areas / (0.5 * e.sum(axis=1))
    return {
        "n_vertices": mesh.n_vertices,
        "n_triangles": mesh.n_triangles,
        "min_angle": float(np.degrees(angles.min())),
        "max_aspect": float((e.max(axis=1) / (2.0 * inradius)).max()),
        "h_max": float(e.max()),
        "h_min": float(e.min()),
    }


# ---------------------------------------------------------------------------
# relaxation engine
# ---------------------------------------------------------------------------


@dataclass
class _EngineSpec:
    sd_fn: object                 # signed distance of the meshed region
    size_fn: object               # local spacing field
    curves: list                  # boundary curve objects
    corners: np.ndarray           # fixed points, (k, 2)
    corner_tags: np.ndarray       # tag per corner
    interior_seeds: np.ndarray    # starting interior cloud, (m, 2)
    target_h: float
    max_iter: int = MAX_RELAX_ITER


def _relax(spec, seed=0):
    """Run the force relaxation; returns (points, tags) without triangles."""
    rng = np.random.default_rng(seed)
    pts_list = [spec.corners.reshape(-1, 2)]
    tags_list = [np.asarray(spec.corner_tags, dtype=np.int8)]
    kinds_list = [np.full(len(spec.corners), -1, dtype=np.int32)]
    params_list = [np.zeros(len(spec.corners))]
    for ci, curve in enumerate(spec.curves):
        cp, cpar = curve.seed(spec.size_fn)
        pts_list.append(cp)
        tags_list.append(np.full(len(cp), curve.tag, dtype=np.int8))
        kinds_list.append(np.full(len(cp), ci, dtype=np.int32))
        params_list.append(cpar)
    inter = spec.interior_seeds
    if len(inter):
        jitter = 0.01 * spec.size_fn(inter)[:, None] * rng.uniform(-1, 1, inter.shape)
        inter = inter + jitter
    pts_list.append(inter)
    tags_list.append(np.zeros(len(inter), dtype=np.int8))
    kinds_list.append(np.full(len(inter), -2, dtype=np.int32))
    params_list.append(np.zeros(len(inter)))

    p = np.vstack(pts_list)
    tags = np.concatenate(tags_list)
    kinds = np.concatenate(kinds_list)
    params = np.concatenate(params_list)
    n_bound = len(p) - len(inter)
    interior_mask = kinds == -2

    pold = p + 1e9
    tris = None
    bars = None
    for _ in range(spec.max_iter):
        move = np.linalg.norm(p - pold, axis=1)
        if tris is None or np.max(move / spec.size_fn(p)) > _TTOL:
            pold = p.copy()
            tris = _delaunay_inside(p, spec.sd_fn)
            e = np.vstack([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
            e.sort(axis=1)
            bars = np.unique(e, axis=0)
        vec = p[bars[:, 0]] - p[bars[:, 1]]
        ell = np.linalg.norm(vec, axis=1)
        hbar = spec.size_fn(0.5 * (p[bars[:, 0]] + p[bars[:, 1]]))
        l0 = hbar * _FSCALE * np.sqrt(np.sum(ell**2) / np.sum(hbar**2))
        f = np.maximum(l0 - ell, 0.0) / np.where(ell < 1e-300, 1e-300, ell)
        fvec = f[:, None] * vec
        force = np.zeros_like(p)
        np.add.at(force, bars[:, 0], fvec)
        np.add.at(force, bars[:, 1], -fvec)
        force[kinds == -1] = 0.0
        p_prev = p.copy()
        p = p + _DELTAT * force
        # snap sliding boundary points back onto their curves
        for ci, curve in enumerate(spec.curves):
            m = kinds == ci
            if np.any(m):
                p[m], params[m] = curve.project(p[m], params[m])
        # pull escaped interior points back inside
        sd = spec.sd_fn(p)
        out = interior_mask & (sd > -1e-12)
        if np.any(out):
            g = _numgrad(spec.sd_fn, p[out])
            inset = 0.3 * spec.size_fn(p[out])
            p[out] = p[out] - (sd[out] + inset)[:, None] * g
        disp = np.max(np.linalg.norm(p - p_prev, axis=1))
        if disp < _DPTOL_FACTOR * spec.target_h:
            break
    return p, tags, kinds, n_bound


def _numgrad(sd_fn, pts, eps=1e-7):
    d0 = sd_fn(pts)
    gx = (sd_fn(pts + np.array([eps, 0.0])) - d0) / eps
    gy = (sd_fn(pts + np.array([0.0, eps])) - d0) / eps
    g = np.stack([gx, gy], axis=1)
    norm = np.linalg.norm(g, axis=1, keepdims=True)
    return g / np.where(norm < 1e-12, 1.0, norm)


def _delaunay_inside(p, sd_fn):
    tri = Delaunay(p)
    t = tri.simplices
    cent = (p[t[:, 0]] + p[t[:, 1]] + p[t[:, 2]]) / 3.0
    keep = sd_fn(cent) < 0.0
    t = t[keep]
    # enforce counterclockwise orientation
    d1 = p[t[:, 1]] - p[t[:, 0]]
    d2 = p[t[:, 2]] - p[t[:, 0]]
    flip = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] < 0
    t[flip] = t[flip][:, [0, 2, 1]]
    return t


def _finalize(p, tags, kinds, spec, min_angle=MIN_ANGLE_DEG, drop_orphans=True):
    p, tags, tris = _drop_sliver_vertices(p, tags, spec.sd_fn, min_angle)
    used = np.zeros(len(p), dtype=bool)
    used[tris] = True
    if drop_orphans and not np.all(used):
        remap = -np.ones(len(p), dtype=np.int64)
        remap[used] = np.arange(np.count_nonzero(used))
        p = p[used]
        tags = tags[used]
        tris = remap[tris]
    return p, tags, tris


def _drop_sliver_vertices(p, tags, sd_fn, min_angle, rounds=4):
    """Remove interior vertices stuck in below-threshold triangles.

    The relaxation occasionally leaves a single interior point squeezed
    against a boundary; deleting it and re-triangulating restores quality.
    """
    tris = _delaunay_inside(p, sd_fn)
    for _ in range(rounds):
        ang = np.degrees(_triangle_angles(p, tris).min(axis=1))
        bad = tris[ang < min_angle]
        if len(bad) == 0:
            break
        cand = np.unique(bad)
        cand = cand[tags[cand] == INTERIOR]
        if len(cand) == 0:
            break
        keep = np.ones(len(p), dtype=bool)
        keep[cand] = False
        remap = -np.ones(len(p), dtype=np.int64)
        remap[keep] = np.arange(np.count_nonzero(keep))
        p = p[keep]
        tags = tags[keep]
        tris = _delaunay_inside(p, sd_fn)
    return p, tags, tris


def _quality_or_raise(mesh, context):
    angle = mesh.min_angle_deg()
    if angle < MIN_ANGLE_DEG:
        raise MeshFailure(
            f"{context}: minimum triangle angle {angle:.2f} deg "
            f"is below {MIN_ANGLE_DEG} deg"
        )
    areas = mesh.triangle_areas()
    if np.any(areas < 1e-14):
        raise MeshFailure(f"{context}: degenerate triangle (area < 1e-14)")


# ---------------------------------------------------------------------------
# size fields and seeding helpers
# ---------------------------------------------------------------------------


def _punctured_size_fn(target_h, hole_center, hole_radius, factor):
    c = np.asarray(hole_center, dtype=float)
    r = float(hole_radius)

    def h(q):
        q = np.atleast_2d(q)
        d = np.abs(np.hypot(q[:, 0] - c[0], q[:, 1] - c[1]) - r)
        return target_h * np.minimum(1.0, d / (4.0 * r) + 1.0 / factor)

    return h


def _radial_fast_sd(domain):
    """First-order signed distance via the radial profile (meshing only)."""

    def sd(q):
        q = np.atleast_2d(q)
        rho = np.hypot(q[:, 0], q[:, 1])
        phi = np.arctan2(q[:, 1], q[:, 0])
        rb = domain.boundary_radius(phi)
        drb = _radial_slope(domain, phi)
        scale = rb / np.hypot(rb, drb)
        return (rho - rb) * scale

    return sd


def _radial_slope(domain, phi):
    if domain.kind == "disk":
        return np.zeros_like(phi)
    if domain.kind == "ellipse":
        a, b = domain.a, domain.b
        denom = np.hypot(b * np.cos(phi), a * np.sin(phi))
        return (
            a * b * (b**2 - a**2) * np.sin(phi) * np.cos(phi) / denom**3
        )
    out = np.zeros_like(phi)
    for k, ak in domain.modes:
        out = out - ak * k * np.sin(k * phi)
    return out


def _hex_grid(bbox, spacing):
    (x0, x1), (y0, y1) = bbox
    dy = spacing * np.sqrt(3) / 2
    rows = int(np.ceil((y1 - y0) / dy)) + 1
    cols = int(np.ceil((x1 - x0) / spacing)) + 2
    ys = y0 + np.arange(rows) * dy
    xs = x0 + np.arange(cols) * spacing
    X, Y = np.meshgrid(xs, ys)
    X[1::2] += spacing / 2
    return np.stack([X.ravel(), Y.ravel()], axis=1)


def _onion_rings(center, radius, size_along, r_stop):
    """Concentric point rings from the circle outward until r_stop."""
    pts = []
    rho = radius
    k = 0
    while True:
        h_here = size_along(rho)
        rho = rho + 0.98 * h_here
        if rho > r_stop:
            break
        n = max(8, int(round(2 * np.pi * rho / size_along(rho))))
        offs = (0.5 if k % 2 else 0.0) * 2 * np.pi / n
        ang = offs + np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        pts.append(
            np.asarray(center)[None, :]
            + rho * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        )
        k += 1
    if not pts:
        return np.zeros((0, 2)), radius
    return np.vstack(pts), rho


# ---------------------------------------------------------------------------
# public generators
# ---------------------------------------------------------------------------


def generate_mesh(pd, target_h, hole_refine_factor=8.0, seed=0, max_iter=MAX_RELAX_ITER):
    """Triangulate the punctured domain with grading toward the hole.

    The local spacing is target_h * min(1, dist(q, hole boundary)/(4 delta)
    + 1/factor), so edges shrink by the refine factor at the hole.
    """
    if not isinstance(pd, PuncturedDomain):
        raise GeometryError("generate_mesh expects a PuncturedDomain")
    delta = pd.hole.radius
    if pd.clearance <= 0:
        raise GeometryError(f"hole is not strictly inside (clearance {pd.clearance:.3e})")
    if not target_h < delta:
        raise GeometryError(f"target_h {target_h} must be below the hole radius {delta}")
    if not 1.0 <= hole_refine_factor <= 64.0:
        raise GeometryError("hole_refine_factor must lie in [1, 64]")

    dom = pd.domain
    c = pd.hole.center_array
    size_fn = _punctured_size_fn(target_h, c, delta, hole_refine_factor)
    sd_dom = _radial_fast_sd(dom)

    def sd_fn(q):
        q = np.atleast_2d(q)
        ball = delta - np.hypot(q[:, 0] - c[0], q[:, 1] - c[1])
        return np.maximum(sd_dom(q), ball)

    def size_along(rho):
        return float(size_fn(c[None, :] + np.array([[rho, 0.0]]))[0])

    graded_stop = delta + 4 * delta * (1.0 - 1.0 / hole_refine_factor) + target_h
    rings, r_last = _onion_rings(c, delta, size_along, graded_stop)
    _, samples = dom._samples()
    bbox = (
        (samples[:, 0].min(), samples[:, 0].max()),
        (samples[:, 1].min(), samples[:, 1].max()),
    )
    bulk = _hex_grid(bbox, target_h)
    dist_hole = np.hypot(bulk[:, 0] - c[0], bulk[:, 1] - c[1])
    keep = dist_hole > r_last - 0.4 * target_h
    bulk = bulk[keep]
    inter = np.vstack([rings, bulk])
    margin = 0.5 * size_fn(inter)
    inter = inter[sd_fn(inter) < -margin]

    curves = [_DomainCurve(dom, OUTER_BOUNDARY), _Circle(c, delta, HOLE_BOUNDARY)]
    spec = _EngineSpec(
        sd_fn=sd_fn,
        size_fn=size_fn,
        curves=curves,
        corners=np.zeros((0, 2)),
        corner_tags=np.zeros(0, dtype=np.int8),
        interior_seeds=inter,
        target_h=target_h,
        max_iter=max_iter,
    )
    p, tags, kinds, _ = _relax(spec, seed=seed)
    # exact final snapping
    for ci, curve in enumerate(curves):
        m = kinds == ci
        for _ in range(3):
            p[m], _ = curve.project(p[m], _curve_params(curve, p[m]))
    p, tags, tris = _finalize(p, tags, kinds, spec)
    mesh = Mesh(
        vertices=p,
        triangles=tris,
        boundary_tags=tags,
        target_h=target_h,
        hole_h=target_h / hole_refine_factor,
    )
    _quality_or_raise(mesh, "generate_mesh")
    return mesh


def _curve_params(curve, pts):
    if isinstance(curve, _Circle):
        return np.arctan2(pts[:, 1] - curve.center[1], pts[:, 0] - curve.center[0])
    if isinstance(curve, _DomainCurve):
        from .geometry import _nearest_parameter

        t, _, _ = _nearest_parameter(curve.domain, pts)
        return t
    if isinstance(curve, _Arc):
        return np.arctan2(pts[:, 1] - curve.center[1], pts[:, 0] - curve.center[0])
    if isinstance(curve, _Segment):
        ab = curve.b - curve.a
        return np.clip(((pts - curve.a) @ ab) / (ab @ ab), 0.0, 1.0)
    if isinstance(curve, _Parabola):
        return pts[:, 0]
    raise TypeError(type(curve))


def generate_domain_mesh(domain, target_h, seed=0, max_iter=MAX_RELAX_ITER):
    """Uniform triangulation of the unpunctured domain (reference solves)."""

    def size_fn(q):
        q = np.atleast_2d(q)
        return np.full(len(q), float(target_h))

    sd_fn = _radial_fast_sd(domain)
    _, samples = domain._samples()
    bbox = (
        (samples[:, 0].min(), samples[:, 0].max()),
        (samples[:, 1].min(), samples[:, 1].max()),
    )
    bulk = _hex_grid(bbox, target_h)
    sd_vals = sd_fn(bulk)
    inter = bulk[sd_vals < -0.5 * target_h]
    curves = [_DomainCurve(domain, OUTER_BOUNDARY)]
    spec = _EngineSpec(
        sd_fn=sd_fn,
        size_fn=size_fn,
        curves=curves,
        corners=np.zeros((0, 2)),
        corner_tags=np.zeros(0, dtype=np.int8),
        interior_seeds=inter,
        target_h=target_h,
        max_iter=max_iter,
    )
    p, tags, kinds, _ = _relax(spec, seed=seed)
    m = kinds == 0
    for _ in range(3):
        p[m], _ = curves[0].project(p[m], _curve_params(curves[0], p[m]))
    p, tags, tris = _finalize(p, tags, kinds, spec)
    mesh = Mesh(vertices=p, triangles=tris, boundary_tags=tags,
                target_h=target_h, hole_h=target_h)
    _quality_or_raise(mesh, "generate_domain_mesh")
    return mesh


def check_mesh_invariants(mesh, pd=None):
    """Raise MeshFailure when a structural invariant is violated."""
    areas = mesh.triangle_areas()
    if np.any(areas < 1e-14):
        raise MeshFailure("non-positive triangle area")
    t = mesh.triangles
    e = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    e.sort(axis=1)
    _, counts = np.unique(e, axis=0, return_counts=True)
    if np.any(counts > 2):
        raise MeshFailure("non-conforming edge shared by more than two triangles")
    if mesh.min_angle_deg() < MIN_ANGLE_DEG:
        raise MeshFailure("minimum angle below 20 degrees")
    if pd is not None:
        c = pd.hole.center_array
        delta = pd.hole.radius
        hole = mesh.boundary_tags == HOLE_BOUNDARY
        if np.any(hole):
            r = np.hypot(*(mesh.vertices[hole] - c).T)
            if np.max(np.abs(r - delta)) > 1e-10 * delta:
                raise MeshFailure("hole boundary vertex off the circle")
        outer = mesh.boundary_tags == OUTER_BOUNDARY
        if np.any(outer):
            from .geometry import _nearest_parameter

            _, _, dist = _nearest_parameter(pd.domain, mesh.vertices[outer])
            if np.max(dist) > 1e-8:
                raise MeshFailure("outer boundary vertex off the curve")
    return True


# ---------------------------------------------------------------------------
# VTK export
# ---------------------------------------------------------------------------


def write_vtk(mesh, path, fields=None):
    """Legacy ASCII VTK export with boundary tags and optional vertex fields."""
    fields = dict(fields or {})
    fields.setdefault("boundary_tag", mesh.boundary_tags.astype(float))
    buf = io.StringIO()
    buf.write("# vtk DataFile Version 3.0\n")
    buf.write("holeopt mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n")
    n = mesh.n_vertices
    buf.write(f"POINTS {n} double\n")
    for x, y in mesh.vertices:
        buf.write(f"{x:.17g} {y:.17g} 0.0\n")
    m = mesh.n_triangles
    buf.write(f"CELLS {m} {4 * m}\n")
    for a, b, c in mesh.triangles:
        buf.write(f"3 {a} {b} {c}\n")
    buf.write(f"CELL_TYPES {m}\n")
    buf.write("\n".join(["5"] * m))
    buf.write("\n")
    buf.write(f"POINT_DATA {n}\n")
    for name, values in fields.items():
        buf.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
        for v in np.asarray(values, dtype=float):
            buf.write(f"{v:.17g}\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())
