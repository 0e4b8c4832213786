"""Planar domains with a circular hole.

A domain is a closed counterclockwise curve gamma(t), t in [0, 2*pi), from one
of three parametric families (disk, ellipse, Fourier star).  All families are
star-shaped about the origin and C-infinity, so curvature and normals come in
closed form and the nearest-point projection is well defined inside the
tubular neighborhood of the boundary.

Conventions used throughout the package:

* signed distance is negative inside the domain;
* the "axis" of a hole near the boundary is the unit vector from the nearest
  boundary point z(p) to the hole center p (it points into the domain);
* arc angles are measured from that axis, so the top arc of the hole circle
  is the part facing away from the outer boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousProjection, GeometryError

N_SAMPLES = 4096
_NEWTON_TOL = 1e-12
_NEWTON_MAX = 30


@dataclass
class SmoothDomain:
    """Closed C2 curve bounding the outer domain.

    Use the ``disk``, ``ellipse`` or ``fourier_star`` constructors; the raw
    constructor does not validate the shape.
    """

    kind: str
    radius: float = 0.0
    a: float = 0.0
    b: float = 0.0
    r0: float = 0.0
    modes: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def disk(cls, radius):
        if radius <= 0:
            raise GeometryError("disk radius must be positive")
        dom = cls(kind="disk", radius=float(radius))
        dom.validate()
        return dom

    @classmethod
    def ellipse(cls, a, b):
        if a <= 0 or b <= 0:
            raise GeometryError("ellipse semi-axes must be positive")
        dom = cls(kind="ellipse", a=float(a), b=float(b))
        dom.validate()
        return dom

    @classmethod
    def fourier_star(cls, r0, modes):
        """Radial graph r(phi) = r0 + sum a_k cos(k phi)."""
        modes = tuple((int(k), float(ak)) for k, ak in modes)
        if r0 <= 0:
            raise GeometryError("fourier_star base radius must be positive")
        dom = cls(kind="fourier_star", r0=float(r0), modes=modes)
        dom.validate()
        return dom

    # --- radial profile (all families are star-shaped about the origin) ---

    def boundary_radius(self, phi):
        phi = np.asarray(phi, dtype=float)
        if self.kind == "disk":
            return np.full_like(phi, self.radius)
        if self.kind == "ellipse":
            return self.a * self.b / np.hypot(self.b * np.cos(phi), self.a * np.sin(phi))
        r = np.full_like(phi, self.r0)
        for k, ak in self.modes:
            r = r + ak * np.cos(k * phi)
        return r

    # --- curve and derivatives ---

    def curve(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "disk":
            return np.stack([self.radius * np.cos(t), self.radius * np.sin(t)], axis=-1)
        if self.kind == "ellipse":
            return np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)
        r = self.boundary_radius(t)
        return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)

    def curve_velocity(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "disk":
            return np.stack([-self.radius * np.sin(t), self.radius * np.cos(t)], axis=-1)
        if self.kind == "ellipse":
            return np.stack([-self.a * np.sin(t), self.b * np.cos(t)], axis=-1)
        r = self.boundary_radius(t)
        dr = np.zeros_like(t)
        for k, ak in self.modes:
            dr = dr - ak * k * np.sin(k * t)
        c, s = np.cos(t), np.sin(t)
        return np.stack([dr * c - r * s, dr * s + r * c], axis=-1)

    def curve_acceleration(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "disk":
            return -self.curve(t)
        if self.kind == "ellipse":
            return np.stack([-self.a * np.cos(t), -self.b * np.sin(t)], axis=-1)
        r = self.boundary_radius(t)
        dr = np.zeros_like(t)
        ddr = np.zeros_like(t)
        for k, ak in self.modes:
            dr = dr - ak * k * np.sin(k * t)
            ddr = ddr - ak * k * k * np.cos(k * t)
        c, s = np.cos(t), np.sin(t)
        return np.stack(
            [(ddr - r) * c - 2.0 * dr * s, (ddr - r) * s + 2.0 * dr * c], axis=-1
        )

    def curvature(self, t):
        v = self.curve_velocity(t)
        a = self.curve_acceleration(t)
        speed = np.linalg.norm(v, axis=-1)
        return (v[..., 0] * a[..., 1] - v[..., 1] * a[..., 0]) / speed**3

    # --- cached sample tables ---

    def _samples(self):
        if "t" not in self._cache:
            t = np.linspace(0.0, 2.0 * np.pi, N_SAMPLES, endpoint=False)
            pts = self.curve(t)
            self._cache["t"] = t
            self._cache["pts"] = pts
            seg = np.roll(pts, -1, axis=0) - pts
            self._cache["spacing"] = float(np.max(np.linalg.norm(seg, axis=1)))
        return self._cache["t"], self._cache["pts"]

    @property
    def max_curvature(self):
        if "max_kappa" not in self._cache:
            t, _ = self._samples()
            self._cache["max_kappa"] = float(np.max(np.abs(self.curvature(t))))
        return self._cache["max_kappa"]

    @property
    def reach(self):
        """Tubular-neighborhood width estimate: inverse of the max curvature."""
        return 1.0 / self.max_curvature

    @property
    def area(self):
        """Enclosed area by the shoelace formula on the sample polyline."""
        if "area" not in self._cache:
            _, pts = self._samples()
            x, y = pts[:, 0], pts[:, 1]
            self._cache["area"] = float(
                0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
            )
        return self._cache["area"]

    def validate(self):
        """Check the C2 / simple-closed invariants on the sample polyline."""
        t, pts = self._samples()
        r = self.boundary_radius(t)
        if np.any(r <= 0):
            raise GeometryError("radial profile must stay positive")
        kappa = self.curvature(t)
        if not np.all(np.isfinite(kappa)):
            raise GeometryError("curvature is not finite at all samples")
        if _polyline_self_intersects(pts):
            raise GeometryError("boundary curve self-intersects")

    def is_inside(self, q):
        """Vectorized membership test (star-shaped radial comparison)."""
        q = np.atleast_2d(np.asarray(q, dtype=float))
        phi = np.arctan2(q[:, 1], q[:, 0])
        return np.hypot(q[:, 0], q[:, 1]) < self.boundary_radius(phi)


def _polyline_self_intersects(pts):
    """Proper-crossing test over all non-adjacent segment pairs (chunked)."""
    n = len(pts)
    p = pts
    q = np.roll(pts, -1, axis=0)
    d = q - p
    idx = np.arange(n)
    for start in range(0, n, 256):
        i = idx[start : start + 256]
        # j > i + 1, excluding the wrap pair (0, n-1)
        pi, di = p[i][:, None, :], d[i][:, None, :]
        rj = p[None, :, :] - pi
        cross_d = di[..., 0] * d[None, :, 1] - di[..., 1] * d[None, :, 0]
        t_num = rj[..., 0] * d[None, :, 1] - rj[..., 1] * d[None, :, 0]
        u_num = rj[..., 0] * di[..., 1] - rj[..., 1] * di[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            tt = t_num / cross_d
            uu = u_num / cross_d
        hit = (tt > 1e-12) & (tt < 1 - 1e-12) & (uu > 1e-12) & (uu < 1 - 1e-12)
        jj = idx[None, :]
        adjacent = (np.abs(jj - i[:, None]) <= 1) | (np.abs(jj - i[:, None]) >= n - 1)
        hit &= ~adjacent
        hit &= np.abs(cross_d) > 1e-14
        if np.any(hit):
            return True
    return False


@dataclass(frozen=True)
class Hole:
    """Circular hole B_delta(p)."""

    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise GeometryError(f"hole radius must be positive, got {self.radius}")

    @property
    def center_array(self):
        return np.array(self.center, dtype=float)


@dataclass
class PuncturedDomain:
    """Domain minus a circular hole, with a containment certificate."""

    domain: SmoothDomain
    hole: Hole
    clearance: float = field(init=False)

    def __post_init__(self):
        self.clearance = contains_ball(self.domain, self.hole)
        if self.clearance <= 0:
            raise GeometryError(
                f"hole of radius {self.hole.radius} at {self.hole.center} is not "
                f"contained in the domain (clearance {self.clearance:.3e})"
            )


# --- core queries ---


def _nearest_parameter(domain, q):
    """Sample argmin + Newton polish of t -> |q - gamma(t)|^2.

    ``q`` is (m, 2); returns (t, z, dist) arrays.
    """
    t_samp, pts = domain._samples()
    q = np.atleast_2d(np.asarray(q, dtype=float))
    d2 = (q[:, None, 0] - pts[None, :, 0]) ** 2 + (q[:, None, 1] - pts[None, :, 1]) ** 2
    imin = np.argmin(d2, axis=1)
    t = t_samp[imin]
    for _ in range(_NEWTON_MAX):
        g = domain.curve(t)
        v = domain.curve_velocity(t)
        acc = domain.curve_acceleration(t)
        r = q - g
        f1 = -np.einsum("ij,ij->i", r, v)
        f2 = np.einsum("ij,ij->i", v, v) - np.einsum("ij,ij->i", r, acc)
        f2 = np.where(np.abs(f2) < 1e-30, 1e-30, f2)
        step = f1 / f2
        # guard against jumps past the neighboring samples
        dt = 2.0 * np.pi / N_SAMPLES
        step = np.clip(step, -2 * dt, 2 * dt)
        t = t - step
        if np.max(np.abs(step)) < _NEWTON_TOL:
            break
    z = domain.curve(t)
    return t, z, np.linalg.norm(q - z, axis=1)


def signed_distance(domain, q):
    """Signed distance to the boundary, negative inside the domain.

    Accepts a single point or an (m, 2) array; total function (no errors).
    """
    q = np.asarray(q, dtype=float)
    single = q.ndim == 1
    q2 = np.atleast_2d(q)
    _, _, dist = _nearest_parameter(domain, q2)
    sd = np.where(domain.is_inside(q2), -dist, dist)
    return float(sd[0]) if single else sd


def project_to_boundary(domain, q):
    """Nearest boundary point z and the inward unit normal at the query.

    Raises AmbiguousProjection when the query lies at or beyond 0.9x the
    estimated reach, or when distinct boundary regions tie for the minimum
    distance (non-unique nearest point).
    """
    q = np.asarray(q, dtype=float)
    if not bool(domain.is_inside(q[None, :])[0]):
        raise GeometryError(f"projection query {q.tolist()} is outside the domain")
    t_samp, pts = domain._samples()
    d = np.hypot(q[0] - pts[:, 0], q[1] - pts[:, 1])
    dmin = float(np.min(d))
    if dmin >= 0.9 * domain.reach:
        raise AmbiguousProjection(
            f"query at distance {dmin:.4g} exceeds 0.9x reach {domain.reach:.4g}; "
            "nearest boundary point may not be unique"
        )
    # near-minimal samples must form one circularly contiguous arc of samples
    spacing = domain._cache["spacing"]
    close = np.flatnonzero(d <= dmin + spacing)
    if len(close) > 1:
        gaps = np.append(np.diff(close), close[0] + N_SAMPLES - close[-1])
        if np.count_nonzero(gaps > 2) > 1:
            raise AmbiguousProjection(
                f"two boundary regions tie for the minimum distance at {q.tolist()}"
            )
    _, z, dist = _nearest_parameter(domain, q[None, :])
    z = z[0]
    dist = float(dist[0])
    if dist <= 0:
        raise AmbiguousProjection("query lies on the boundary")
    normal = (q - z) / dist
    return z, normal


def contains_ball(domain, hole):
    """Clearance dist(p, boundary) - delta; positive iff the ball fits inside."""
    p = hole.center_array
    sd = signed_distance(domain, p)
    return float(-sd - hole.radius)


@dataclass
class ArcDecomposition:
    """Three arcs of the hole circle relative to the inward axis.

    Arc membership of a direction nu on the circle is decided by the angle
    alpha between nu and the axis: top |alpha| <= theta, bottom
    |alpha| >= pi - theta, sides in between.
    """

    theta: float
    axis: np.ndarray
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if not 0.0 < self.theta < np.pi / 2:
            raise GeometryError("theta must lie in (0, pi/2)")
        self.axis = np.asarray(self.axis, dtype=float)
        self.axis = self.axis / np.linalg.norm(self.axis)
        self.center = np.asarray(self.center, dtype=float)

    def classify(self, points):
        """Arc label (+1 top, -1 bottom, 0 sides) for points on the circle."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        nu = pts - self.center[None, :]
        nu = nu / np.linalg.norm(nu, axis=1, keepdims=True)
        c = nu @ self.axis
        out = np.zeros(len(pts), dtype=int)
        out[c >= np.cos(self.theta)] = 1
        out[c <= -np.cos(self.theta)] = -1
        return out

    @property
    def arc_measures(self):
        """Angular measures (top, bottom, sides); they sum to 2*pi."""
        return 2 * self.theta, 2 * self.theta, 2 * np.pi - 4 * self.theta

    def arc_intervals(self):
        """Closed angular intervals measured from the axis, in [-pi, pi]."""
        th = self.theta
        return {
            "top": [(-th, th)],
            "bottom": [(-np.pi, -np.pi + th), (np.pi - th, np.pi)],
            "sides": [(-np.pi + th, -th), (th, np.pi - th)],
        }


def arc_decomposition(pd, theta, axis=None):
    """Split the hole circle into top/bottom/side arcs about the inward axis.

    The axis defaults to the unit vector from z(p) to p.  An explicit axis
    supports configurations where the projection is ambiguous (for example a
    concentric hole used as a symmetry control).
    """
    p = pd.hole.center_array
    if axis is None:
        z, normal = project_to_boundary(pd.domain, p)
        axis = (p - z) / np.linalg.norm(p - z)
    return ArcDecomposition(
        theta=float(theta), axis=np.asarray(axis, float), center=p, radius=pd.hole.radius
    )
