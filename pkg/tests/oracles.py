"""Independent oracles used to freeze expected values.

Everything here is deliberately dumb and separate from the library's own
numerics: a power-series Bessel J0 with bisection for its first zero, the
cross-product Bessel condition for the concentric annulus via mpmath, a
crossing-number point-in-polygon test, and dense-sampling nearest-point
searches on boundary curves.
"""

import mpmath as mp
import numpy as np


def bessel_j0_series(x):
    """J0 by its power series; ample accuracy for |x| < 10."""
    x = float(x)
    term = 1.0
    total = 1.0
    k = 0
    while abs(term) > 1e-18 and k < 60:
        k += 1
        term *= -(x * x / 4.0) / (k * k)
        total += term
    return total


def first_j0_zero():
    """First zero of J0 by bisection on the power series."""
    lo, hi = 2.0, 3.0
    flo = bessel_j0_series(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = bessel_j0_series(mid)
        if flo * fm <= 0:
            hi = mid
        else:
            lo = mid
            flo = fm
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def annulus_first_root(inner, outer=1.0):
    """First k with J0(k b) Y0(k a) - J0(k a) Y0(k b) = 0, by bisection."""
    a, b = inner, outer

    def cross(k):
        return float(
            mp.besselj(0, k * b) * mp.bessely(0, k * a)
            - mp.besselj(0, k * a) * mp.bessely(0, k * b)
        )

    ks = np.linspace(0.5, 20.0, 4000)
    vals = [cross(k) for k in ks]
    for i in range(len(ks) - 1):
        if vals[i] * vals[i + 1] < 0:
            lo, hi = ks[i], ks[i + 1]
            break
    else:
        raise RuntimeError("no sign change found")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cross(lo) * cross(mid) <= 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-14:
            break
    return 0.5 * (lo + hi)


def annulus_eigenfunction(inner, outer=1.0):
    """Normalized radial eigenfunction and its boundary flux at r = inner.

    Returns (k, u(r) callable, |u'(inner)|) with the L2 normalization over
    the annulus.
    """
    k = annulus_first_root(inner, outer)
    a = inner

    def raw(r):
        return mp.besselj(0, k * r) * mp.bessely(0, k * a) - mp.bessely(
            0, k * r
        ) * mp.besselj(0, k * a)

    norm2 = mp.quad(lambda r: raw(r) ** 2 * 2 * mp.pi * r, [a, outer])
    scale = 1.0 / mp.sqrt(norm2)
    sign = 1.0 if raw((a + outer) / 2) > 0 else -1.0

    def u(r):
        return float(sign * scale * raw(r))

    def du(r):
        val = -k * (
            mp.besselj(1, k * r) * mp.bessely(0, k * a)
            - mp.bessely(1, k * r) * mp.besselj(0, k * a)
        )
        return float(sign * scale * val)

    return float(k), u, abs(du(a))


def disk_eigenfunction_value(r, j01=None):
    """Normalized first eigenfunction of the unit disk at radius r."""
    if j01 is None:
        j01 = first_j0_zero()
    return float(mp.besselj(0, j01 * r) / (mp.sqrt(mp.pi) * mp.besselj(1, j01)))


def winding_inside(poly, q):
    """Crossing-number point-in-polygon test on a closed polyline."""
    x, y = q
    px = poly[:, 0]
    py = poly[:, 1]
    qx = np.roll(px, -1)
    qy = np.roll(py, -1)
    cond = (py <= y) != (qy <= y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_int = px + (y - py) * (qx - px) / (qy - py)
    crossings = np.count_nonzero(cond & (x_int > x))
    return crossings % 2 == 1


def dense_nearest_point(domain, q, n=200000):
    """Brute-force nearest boundary point by dense curve sampling."""
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    pts = domain.curve(t)
    d = np.hypot(pts[:, 0] - q[0], pts[:, 1] - q[1])
    i = int(np.argmin(d))
    return pts[i], float(d[i])
