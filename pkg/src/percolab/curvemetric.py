"""Metrics on curves and point sets.

Curves are finite polylines (sampled continuous curves up to monotone
reparametrization).  The curve metric is the discrete Frechet distance,
a computable upper bound of the reparametrization-infimum sup metric that
converges to it as the sampling refines.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EmptySet

INFINITY = complex("inf")


def as_polyline(points) -> np.ndarray:
    """Normalize to a complex ndarray with consecutive duplicates collapsed."""
    z = np.asarray(points, dtype=complex).ravel()
    if z.size == 0:
        raise EmptySet("polyline needs at least one point")
    if not np.all(np.isfinite(z.view(float))):
        raise ValueError("polyline coordinates must be finite")
    if z.size == 1:
        return z
    keep = np.empty(z.size, dtype=bool)
    keep[0] = True
    keep[1:] = z[1:] != z[:-1]
    return z[keep]


def curve_distance(curve_a, curve_b) -> float:
    """Discrete Frechet distance between two polylines.

    Symmetric, zero iff the deduplicated point sequences are equal, and an
    upper bound for the continuum inf-sup curve distance of the sampled
    curves.
    """
    p = as_polyline(curve_a)
    q = as_polyline(curve_b)
    n, m = p.size, q.size
    # pairwise |p_i - q_j| once; DP over the coupling lattice
    d = np.abs(p[:, None] - q[None, :])
    row = np.empty(m)
    row[0] = d[0, 0]
    for j in range(1, m):
        row[j] = max(row[j - 1], d[0, j])
    for i in range(1, n):
        prev_diag = row[0]
        row[0] = max(row[0], d[i, 0])
        for j in range(1, m):
            best = min(prev_diag, row[j], row[j - 1])
            prev_diag = row[j]
            row[j] = max(best, d[i, j])
    return float(row[m - 1])


def hausdorff_points(set_a, set_b) -> float:
    """Hausdorff distance between two finite nonempty point sets."""
    a = np.asarray(list(set_a), dtype=complex).ravel()
    b = np.asarray(list(set_b), dtype=complex).ravel()
    if a.size == 0 or b.size == 0:
        raise EmptySet("hausdorff_points needs nonempty sets")
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def hausdorff_curvesets(family_a, family_b) -> float:
    """Hausdorff distance between two finite curve families.

    The base metric on individual curves is curve_distance.
    """
    fa = [as_polyline(c) for c in family_a]
    fb = [as_polyline(c) for c in family_b]
    if not fa or not fb:
        raise EmptySet("hausdorff_curvesets needs nonempty families")
    d = np.array([[curve_distance(x, y) for y in fb] for x in fa])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def sphere_distance(u, v) -> float:
    """Geodesic distance for the conformal metric ds / (1 + |z|^2).

    The plane plus a point at infinity with this metric is isometric,
    via stereographic projection, to a sphere; the closed form below is
    that isometry's arc length.  INFINITY (complex inf) is accepted.
    """
    u_inf = u == INFINITY or (isinstance(u, complex) and math.isinf(abs(u)))
    v_inf = v == INFINITY or (isinstance(v, complex) and math.isinf(abs(v)))
    if u_inf and v_inf:
        return 0.0
    if u_inf or v_inf:
        w = complex(v if u_inf else u)
        return math.pi / 2 - math.atan(abs(w))
    u = complex(u)
    v = complex(v)
    chord = abs(u - v) / math.sqrt((1 + abs(u) ** 2) * (1 + abs(v) ** 2))
    return math.asin(min(1.0, chord))
