"""P1 finite element solver for the first Dirichlet eigenpair.

The eigenproblem -lap u = lambda u with u = 0 on all tagged boundaries is
discretized with linear triangles and solved by inverse iteration (shift 0,
one sparse factorization).  The normal derivative on a tagged boundary is
recovered by the consistent-flux construction: the weak residual of the
solution, tested against the boundary nodal functions, equals the boundary
mass matrix applied to the flux density.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.spatial import cKDTree

from .errors import NoConvergence, OutsideMesh, SingularBoundaryMass
from .meshing import HOLE_BOUNDARY, INTERIOR, OUTER_BOUNDARY, Mesh


def assemble(mesh):
    """Stiffness and mass matrices over all vertices (CSR, symmetric)."""
    p = mesh.vertices
    t = mesh.triangles
    x = p[t, 0]
    y = p[t, 1]
    bmat = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    cmat = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area = 0.5 * np.abs(
        (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0])
        - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    )
    ke = (
        bmat[:, :, None] * bmat[:, None, :] + cmat[:, :, None] * cmat[:, None, :]
    ) / (4.0 * area[:, None, None])
    me = (np.ones((3, 3)) + np.eye(3))[None, :, :] * (area[:, None, None] / 12.0)
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    n = mesh.n_vertices
    k = sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    m = sp.coo_matrix((me.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    return k, m


@dataclass
class EigenSolution:
    """First eigenpair on a mesh, M-normalized and sign-fixed positive."""

    lambda1: float
    u: np.ndarray
    mesh: Mesh
    residual: float
    normalized: bool = True
    stiffness: sp.csr_matrix = field(default=None, repr=False)
    mass: sp.csr_matrix = field(default=None, repr=False)
    _locator: object = field(default=None, repr=False, compare=False)

    def interior_index(self):
        return np.flatnonzero(self.mesh.boundary_tags == INTERIOR)


def solve_lambda1(mesh, tol=1e-10, max_iter=400):
    """Smallest eigenpair of K u = lambda M u by shift-0 inverse iteration.

    Converged when successive eigenvalue estimates agree to tol (relative)
    and the algebraic residual |K u - lambda M u| with |u|_M = 1 is below
    10 * tol * lambda.
    """
    k_full, m_full = assemble(mesh)
    interior = np.flatnonzero(mesh.boundary_tags == INTERIOR)
    kii = k_full[interior][:, interior].tocsc()
    mii = m_full[interior][:, interior].tocsr()
    lu = spla.splu(kii)
    x = np.ones(len(interior))
    x = x / np.sqrt(x @ (mii @ x))
    lam_old = np.inf
    lam = np.inf
    best = None
    for it in range(max_iter):
        y = lu.solve(mii @ x)
        ny = np.sqrt(y @ (mii @ y))
        x = y / ny
        lam = x @ (kii @ x)
        res = np.linalg.norm(kii @ x - lam * (mii @ x))
        best = (lam, x, res)
        if abs(lam - lam_old) <= tol * lam and res <= 10.0 * tol * lam:
            break
        lam_old = lam
    else:
        sol = _package_solution(mesh, k_full, m_full, interior, *best)
        raise NoConvergence(
            f"inverse iteration did not converge in {max_iter} iterations "
            f"(residual {best[2]:.3e})",
            best=sol,
        )
    return _package_solution(mesh, k_full, m_full, interior, lam, x, res)


def _package_solution(mesh, k_full, m_full, interior, lam, x, res):
    u = np.zeros(mesh.n_vertices)
    u[interior] = x
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    return EigenSolution(
        lambda1=float(lam),
        u=u,
        mesh=mesh,
        residual=float(res),
        stiffness=k_full,
        mass=m_full,
    )


# ---------------------------------------------------------------------------
# point evaluation (walk locator)
# ---------------------------------------------------------------------------


class _Locator:
    def __init__(self, mesh):
        self.mesh = mesh
        t = mesh.triangles
        self.cent = mesh.vertices[t].mean(axis=1)
        self.tree = cKDTree(self.cent)
        edge_map = {}
        nbr = -np.ones((len(t), 3), dtype=np.int64)
        for ti, (a, b, c) in enumerate(t):
            for k, (i, j) in enumerate(((b, c), (c, a), (a, b))):
                key = (min(i, j), max(i, j))
                if key in edge_map:
                    tj, kj = edge_map[key]
                    nbr[ti, k] = tj
                    nbr[tj, kj] = ti
                else:
                    edge_map[key] = (ti, k)
        self.nbr = nbr

    def bary(self, ti, q):
        tri = self.mesh.triangles[ti]
        a, b, c = self.mesh.vertices[tri]
        mat = np.array([[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]])
        rhs = np.array([q[0] - a[0], q[1] - a[1]])
        st = np.linalg.solve(mat, rhs)
        return np.array([1.0 - st[0] - st[1], st[0], st[1]])

    def locate(self, q):
        q = np.asarray(q, dtype=float)
        ti = int(self.tree.query(q)[1])
        seen = 0
        while seen < 300:
            lam = self.bary(ti, q)
            if np.all(lam >= -1e-12):
                return ti, lam
            k = int(np.argmin(lam))
            nxt = self.nbr[ti, k]
            if nxt < 0:
                break
            ti = nxt
            seen += 1
        # walk got stuck (non-convex region): brute check nearby triangles
        _, cand = self.tree.query(q, k=min(64, len(self.cent)))
        for ti in np.atleast_1d(cand):
            lam = self.bary(int(ti), q)
            if np.all(lam >= -1e-10):
                return int(ti), lam
        raise OutsideMesh(f"point {q.tolist()} is outside the meshed region")


def evaluate_u(sol, q):
    """P1 interpolation of the eigenfunction at a point or (m, 2) array."""
    if sol._locator is None:
        sol._locator = _Locator(sol.mesh)
    q = np.asarray(q, dtype=float)
    if q.ndim == 1:
        ti, lam = sol._locator.locate(q)
        return float(sol.u[sol.mesh.triangles[ti]] @ lam)
    return np.array([evaluate_u(sol, qi) for qi in q])


def gradient_at(sol, q, patch=True):
    """P1 gradient at a point, averaged over the patch of its triangle(s).

    A probe on an edge or vertex belongs to several triangles; the patch is
    the union of their vertex patches, which keeps the average symmetric on
    mesh symmetry lines.
    """
    if sol._locator is None:
        sol._locator = _Locator(sol.mesh)
    loc = sol._locator
    q = np.asarray(q, dtype=float)
    ti, lam = loc.locate(q)
    mesh = sol.mesh
    if not patch:
        return _tri_gradient(mesh, sol.u, np.array([ti]))[0]
    owners = {ti}
    frontier = [ti]
    while frontier:
        t0 = frontier.pop()
        lam0 = loc.bary(t0, q)
        for k in range(3):
            if lam0[k] < 1e-9:
                nb = loc.nbr[t0, k]
                if nb >= 0 and nb not in owners and np.all(loc.bary(nb, q) >= -1e-9):
                    owners.add(int(nb))
                    frontier.append(int(nb))
    verts = np.unique(mesh.triangles[sorted(owners)])
    mask = np.isin(mesh.triangles, verts).any(axis=1)
    tids = np.flatnonzero(mask)
    grads = _tri_gradient(mesh, sol.u, tids)
    areas = np.abs(mesh.triangle_areas()[tids])
    return (grads * areas[:, None]).sum(axis=0) / areas.sum()


def _tri_gradient(mesh, u, tids):
    p = mesh.vertices
    t = mesh.triangles[tids]
    x = p[t, 0]
    y = p[t, 1]
    bmat = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    cmat = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area2 = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (
        y[:, 1] - y[:, 0]
    )
    uv = u[t]
    gx = np.sum(uv * bmat, axis=1) / area2
    gy = np.sum(uv * cmat, axis=1) / area2
    return np.stack([gx, gy], axis=1)


# ---------------------------------------------------------------------------
# consistent flux recovery
# ---------------------------------------------------------------------------


@dataclass
class HoleFlux:
    """Normal derivative density on the hole circle, ordered by angle.

    Values follow the exterior normal of the ball (pointing into the fluid
    domain), so they are nonnegative for the positive first eigenfunction.
    """

    values: np.ndarray
    angles: np.ndarray
    vertex_index: np.ndarray
    center: np.ndarray
    radius: float

    def trapezoid_weights(self):
        """Arc-length weights of the periodic angular samples."""
        ang = self.angles
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
        w = 0.5 * (gaps + np.roll(gaps, 1))
        return w * self.radius


def _boundary_mass_and_residual(sol, tag):
    mesh = sol.mesh
    idx = np.flatnonzero(mesh.boundary_tags == tag)
    if len(idx) == 0:
        raise SingularBoundaryMass(f"no vertices tagged {tag}")
    be = mesh.boundary_edges()
    on = np.isin(be, idx)
    be = be[on.all(axis=1)]
    if len(be) == 0:
        raise SingularBoundaryMass(f"no boundary edges with tag {tag}")
    pos = mesh.vertices
    ell = np.linalg.norm(pos[be[:, 0]] - pos[be[:, 1]], axis=1)
    if np.any(ell <= 0):
        raise SingularBoundaryMass("degenerate boundary edge")
    glob_to_loc = -np.ones(mesh.n_vertices, dtype=np.int64)
    glob_to_loc[idx] = np.arange(len(idx))
    i = glob_to_loc[be[:, 0]]
    j = glob_to_loc[be[:, 1]]
    rows = np.concatenate([i, j, i, j])
    cols = np.concatenate([i, j, j, i])
    vals = np.concatenate([ell / 3.0, ell / 3.0, ell / 6.0, ell / 6.0])
    bmass = sp.coo_matrix((vals, (rows, cols)), shape=(len(idx), len(idx))).tocsc()
    resid = sol.stiffness @ sol.u
    if sol.mass is not None and sol.lambda1:
        resid = resid - sol.lambda1 * (sol.mass @ sol.u)
    return idx, bmass, resid[idx]


def boundary_flux(sol, tag, inward=True):
    """Consistent flux on a tagged boundary.

    With ``inward=True`` the sign convention is the derivative along the
    normal pointing into the meshed region (nonnegative for a positive
    solution vanishing on that boundary).
    """
    idx, bmass, resid = _boundary_mass_and_residual(sol, tag)
    try:
        g = spla.spsolve(bmass, -resid if inward else resid)
    except RuntimeError as exc:  # pragma: no cover - singular factorization
        raise SingularBoundaryMass(str(exc)) from exc
    if not np.all(np.isfinite(g)):
        raise SingularBoundaryMass("flux solve produced non-finite values")
    return idx, g


def hole_flux(sol, center=None, radius=None):
    """Flux density on the hole boundary, ordered by angle about the center."""
    mesh = sol.mesh
    idx, g = boundary_flux(sol, HOLE_BOUNDARY, inward=True)
    if center is None:
        center = mesh.vertices[idx].mean(axis=0)
    center = np.asarray(center, dtype=float)
    d = mesh.vertices[idx] - center[None, :]
    if radius is None:
        radius = float(np.mean(np.linalg.norm(d, axis=1)))
    ang = np.arctan2(d[:, 1], d[:, 0])
    order = np.argsort(ang)
    return HoleFlux(
        values=g[order],
        angles=ang[order],
        vertex_index=idx[order],
        center=center,
        radius=float(radius),
    )


def outer_flux_min(sol):
    """Smallest inward normal derivative on the outer boundary (Hopf constant)."""
    _, g = boundary_flux(sol, OUTER_BOUNDARY, inward=True)
    return float(np.min(g))


# ---------------------------------------------------------------------------
# convergence study
# ---------------------------------------------------------------------------


def convergence_study(solve_at_h, h_list):
    """Observed order and Richardson extrapolation from a sequence of solves.

    ``solve_at_h`` maps a mesh size to an eigenvalue.  Returns a dict with the
    per-h table, consecutive-triple orders, and the extrapolated eigenvalue;
    ``order`` is None when the differences degenerate (flagged, not raised).
    """
    h_list = sorted(float(h) for h in h_list)
    if len(h_list) < 3:
        raise ValueError("need at least three mesh sizes")
    h_arr = np.array(sorted(h_list, reverse=True))
    lam = np.array([solve_at_h(h) for h in h_arr])
    orders = []
    for i in range(len(h_arr) - 2):
        d0 = lam[i] - lam[i + 1]
        d1 = lam[i + 1] - lam[i + 2]
        r = h_arr[i] / h_arr[i + 1]
        if d0 * d1 <= 0 or abs(d1) < 1e-300:
            orders.append(None)
        else:
            orders.append(float(np.log(d0 / d1) / np.log(r)))
    valid = [o for o in orders if o is not None]
    if valid:
        p_obs = valid[-1]
        r = h_arr[-2] / h_arr[-1]
        extrap = lam[-1] + (lam[-1] - lam[-2]) / (r**p_obs - 1.0)
    else:
        p_obs = None
        extrap = lam[-1]
    return {
        "h": h_arr,
        "lambda1": lam,
        "orders": orders,
        "order": p_obs,
        "extrapolated": float(extrap),
    }
