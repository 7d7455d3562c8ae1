"""Conformal-map atlas for a fixed domain catalogue.

Supported domains: disc, half_disc, rect, equilateral_triangle, polygon,
and half_plane (unbounded, conformal use only).  The atlas provides the
boundary correspondence with the upper half-plane H, which is all the
cross-ratio and hitting machinery needs: Mobius maps handle disc and
half-plane kinds in closed form, a Schwarz-Christoffel quadrature engine
handles the straight-edge kinds.

Boundary points are addressed by arc-length fraction t in [0, 1) measured
counterclockwise from a kind-specific anchor, which sidesteps prime-end
bookkeeping entirely (every catalogue boundary is a Jordan curve).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMarks, MapNotConverged

INF = float("inf")

_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Mobius maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MobiusMap:
    """z -> (a z + b) / (c z + d) with a d - b c != 0."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate Mobius coefficients")

    def __call__(self, z):
        if z == INF or (isinstance(z, complex) and cmath.isinf(z)):
            if self.c == 0:
                return INF
            return self.a / self.c
        num = self.a * z + self.b
        den = self.c * z + self.d
        if den == 0:
            return INF
        return num / den

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self after other (matrix product)."""
        return MobiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


def cayley() -> MobiusMap:
    """Standard map of H onto the unit disc, z -> (z - i)/(z + i)."""
    return MobiusMap(1, -1j, 1, 1j)


def halfplane_to_disc_marked(disc_a: complex, disc_b: complex) -> MobiusMap:
    """Mobius map of H onto the unit disc with 0 -> disc_a, infinity -> disc_b.

    Both targets must lie on the unit circle.  Built in the normal form
    psi(z) = e^{i theta0} ((z + 1) - z0) / ((z + 1) - conj(z0)) with
    |1 - z0| = 1 and Im z0 > 0.
    """
    if abs(abs(disc_a) - 1) > 1e-12 or abs(abs(disc_b) - 1) > 1e-12:
        raise ValueError("marked disc images must lie on the unit circle")
    if abs(disc_a - disc_b) < 1e-12:
        raise DegenerateMarks("disc images of the two marks coincide")
    theta0 = cmath.phase(disc_b)
    alpha = cmath.phase(disc_a / disc_b)
    beta = alpha / 2.0
    if math.sin(beta) >= 0:
        beta -= math.pi
    z0 = 1 - cmath.exp(1j * beta)
    # psi(z) = e^{i theta0} (z + (1 - z0)) / (z + (1 - conj(z0)))
    rot = cmath.exp(1j * theta0)
    psi = MobiusMap(rot, rot * (1 - z0), 1, 1 - z0.conjugate())
    if abs(psi(1j)) >= 1:
        raise MapNotConverged("orientation check failed for marked disc map")
    return psi


def disc_automorphism(alpha: complex, phi: float) -> MobiusMap:
    """w -> e^{i phi} (w - alpha)/(1 - conj(alpha) w), |alpha| < 1."""
    if abs(alpha) >= 1:
        raise ValueError("automorphism center must be inside the disc")
    rot = cmath.exp(1j * phi)
    return MobiusMap(rot, -rot * alpha, -alpha.conjugate(), 1)


def cross_ratio(x1, x2, x3, x4) -> float:
    """(x1-x2)(x3-x4) / ((x1-x3)(x2-x4)) on R u {inf}, by limits at inf.

    For four boundary preimages in counterclockwise (cyclically increasing)
    order the value lies in (0, 1).
    """
    xs = [x1, x2, x3, x4]
    inf_at = [i for i, x in enumerate(xs) if x == INF or x == -INF]
    if len(inf_at) > 1:
        raise ValueError("at most one preimage may be infinite")
    if not inf_at:
        eta = ((x1 - x2) * (x3 - x4)) / ((x1 - x3) * (x2 - x4))
    else:
        i = inf_at[0]
        f = [float(x) for x in xs]
        if i == 0:
            eta = (f[2] - f[3]) / (f[1] - f[3])
        elif i == 1:
            eta = -(f[2] - f[3]) / (f[0] - f[2])
        elif i == 2:
            eta = -(f[0] - f[1]) / (f[1] - f[3])
        else:
            eta = (f[0] - f[1]) / (f[0] - f[2])
    return float(eta)


# ---------------------------------------------------------------------------
# Gauss quadrature rules
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_GJ_CACHE: dict[float, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_jacobi(beta: float, n: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for weight (1 + x)^beta on [-1, 1] (alpha = 0).

    Golub-Welsch on the Jacobi recurrence; cached per exponent.
    """
    key = round(beta, 12)
    if key in _GJ_CACHE:
        return _GJ_CACHE[key]
    a, b = 0.0, beta
    k = np.arange(n)
    apb = a + b
    # recurrence coefficients alpha_k (diagonal), beta_k (off-diagonal^2)
    diag = np.empty(n)
    diag[0] = (b - a) / (apb + 2)
    kk = k[1:]
    diag[1:] = (b * b - a * a) / ((2 * kk + apb) * (2 * kk + apb + 2))
    off2 = np.empty(n - 1)
    off2[0] = 4 * (1 + a) * (1 + b) / ((apb + 2) ** 2 * (apb + 3))
    kk = k[2:]
    off2[1:] = (
        4 * kk * (kk + a) * (kk + b) * (kk + apb)
        / ((2 * kk + apb) ** 2 * (2 * kk + apb + 1) * (2 * kk + apb - 1))
    )
    jac = np.diag(diag) + np.diag(np.sqrt(off2), 1) + np.diag(np.sqrt(off2), -1)
    vals, vecs = np.linalg.eigh(jac)
    mu0 = 2.0 ** (apb + 1) * math.gamma(a + 1) * math.gamma(b + 1) / math.gamma(apb + 2)
    weights = mu0 * vecs[0, :] ** 2
    _GJ_CACHE[key] = (vals, weights)
    return vals, weights


# ---------------------------------------------------------------------------
# Schwarz-Christoffel engine
# ---------------------------------------------------------------------------


class SCMap:
    """Half-plane to polygon map f(z) = A + C * int prod (t - x_j)^(alpha_j - 1) dt.

    Finite prevertices only appear in the product; a vertex mapped from the
    point at infinity (if any) carries no factor.  All paths of integration
    stay in the closed upper half-plane, where principal powers are branch
    safe.
    """

    def __init__(self, prevertices, alphas, vertices, has_inf_vertex, inf_vertex=None):
        self.x = [float(v) for v in prevertices]
        self.alphas = [float(a) for a in alphas]
        self.has_inf_vertex = has_inf_vertex
        self.inf_vertex = inf_vertex  # image of the infinite prevertex
        self.vertices = [complex(v) for v in vertices]
        if sorted(self.x) != self.x:
            raise ValueError("prevertices must be ascending")
        # scale/translation from the first side
        raw = self._raw_integral(self.x[0], self.x[1], sing_left=0, sing_right=1)
        self.C = (self.vertices[1] - self.vertices[0]) / raw
        self.A = self.vertices[0]
        self._raw_vertex = [0j]
        for j in range(1, len(self.x)):
            self._raw_vertex.append(
                self._raw_vertex[-1]
                + self._raw_integral(self.x[j - 1], self.x[j], sing_left=j - 1, sing_right=j)
            )
        self._check_vertices()

    # -- integrand ---------------------------------------------------------

    def _product(self, t, skip=()):
        out = np.ones_like(t, dtype=complex)
        for j, (xj, aj) in enumerate(zip(self.x, self.alphas)):
            if j in skip:
                continue
            out *= (t - xj) ** (aj - 1.0)
        return out

    # -- quadrature over segments ------------------------------------------

    def _gj_piece(self, a, b, j):
        """Integral over [a, b] with the only nearby singularity at a = x_j."""
        beta = self.alphas[j] - 1.0
        nodes, weights = _gauss_jacobi(beta)
        half = (b - a) / 2.0
        t = a + half * (nodes + 1.0)
        vals = self._product(t, skip=(j,))
        return half ** (beta + 1.0) * np.sum(weights * vals)

    def _gl_piece(self, a, b):
        half = (b - a) / 2.0
        t = a + half * (_GL_NODES + 1.0)
        return half * np.sum(_GL_WEIGHTS * self._product(t))

    def _min_dist(self, a, b, skip=()):
        """Distance from the segment [a, b] to the nearest relevant prevertex."""
        best = INF
        for j, xj in enumerate(self.x):
            if j in skip:
                continue
            best = min(best, _point_segment_distance(complex(xj, 0.0), a, b))
        return best

    def _smooth_integral(self, a, b):
        """Compound Gauss-Legendre with no singular endpoint."""
        total = 0j
        stack = [(complex(a), complex(b), 0)]
        while stack:
            lo, hi, depth = stack.pop()
            seg = abs(hi - lo)
            if seg == 0:
                continue
            if depth > 52:
                raise MapNotConverged("quadrature subdivision did not converge")
            if self._min_dist(lo, hi) >= 0.5 * seg or seg < 1e-14:
                total += self._gl_piece(lo, hi)
            else:
                mid = (lo + hi) / 2.0
                stack.append((lo, mid, depth + 1))
                stack.append((mid, hi, depth + 1))
        return total

    def _from_prevertex(self, j, z):
        """Integral from x_j to z; handles the endpoint singularity at x_j."""
        a = complex(self.x[j], 0.0)
        if z == a:
            return 0j
        r_safe = min(
            (abs(self.x[i] - self.x[j]) for i in range(len(self.x)) if i != j),
            default=INF,
        )
        d = abs(z - a)
        if d <= 0.5 * r_safe:
            return self._gj_piece(a, z, j)
        cut = a + (z - a) * (0.5 * r_safe / d)
        return self._gj_piece(a, cut, j) + self._smooth_integral(cut, z)

    def _raw_integral(self, xa, xb, sing_left=None, sing_right=None):
        """Integral between two prevertices (both endpoints singular)."""
        mid = complex((xa + xb) / 2.0, 0.0)
        left = self._from_prevertex(sing_left, mid)
        right = self._from_prevertex(sing_right, mid)
        return left - right

    # -- public evaluation ---------------------------------------------------

    def eval(self, z):
        """Image of z in the closed upper half-plane."""
        z = complex(z)
        j = min(range(len(self.x)), key=lambda i: abs(z - self.x[i]))
        return self.A + self.C * (self._raw_vertex[j] + self._from_prevertex(j, z))

    def _check_vertices(self):
        scale = max(abs(v) for v in self.vertices) or 1.0
        for j in range(len(self.x)):
            img = self.A + self.C * self._raw_vertex[j]
            if abs(img - self.vertices[j]) > 1e-9 * scale:
                raise MapNotConverged(
                    f"vertex {j} placed at {img}, expected {self.vertices[j]}"
                )

    # -- boundary inversion ---------------------------------------------------

    def preimage_on_side(self, j_left, j_right, target_dist, side_start):
        """Real preimage on (x_jl, x_jr) with |f(x) - f(side_start vertex)| = target.

        Straight polygon sides make |f(x) - vertex| the arc length, which is
        strictly monotone on the side, so bisection is safe.
        """
        lo, hi = self.x[j_left], self.x[j_right]
        anchor = self.vertices[side_start]

        def g(x):
            return abs(self.eval(complex(x, 0.0)) - anchor) - target_dist

        return _bisect_monotone(g, lo, hi)

    def preimage_on_ray(self, target_dist, anchor_vertex, direction):
        """Preimage on the unbounded interval beyond the first/last prevertex.

        direction +1 searches (x_last, +inf), -1 searches (-inf, x_first).
        """
        x0 = self.x[-1] if direction > 0 else self.x[0]
        anchor = self.vertices[anchor_vertex]

        def g(u):
            # u in (0, 1); x = x0 + direction * u / (1 - u) covers the ray
            x = x0 + direction * u / (1.0 - u)
            return abs(self.eval(complex(x, 0.0)) - anchor) - target_dist

        u = _bisect_monotone(g, 1e-14, 1.0 - 1e-14)
        return x0 + direction * u / (1.0 - u)


def _point_segment_distance(p, a, b):
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0:
        return abs(p - a)
    t = max(0.0, min(1.0, ((p - a) * ab.conjugate()).real / denom))
    return abs(p - (a + t * ab))


def _bisect_monotone(g, lo, hi, iters=200):
    glo = g(lo)
    ghi = g(hi)
    span = abs(glo) + abs(ghi)
    if abs(glo) <= 1e-12 * span:
        return lo
    if abs(ghi) <= 1e-12 * span:
        return hi
    if glo * ghi > 0:
        raise MapNotConverged("bisection bracket does not straddle the target")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0:
            return mid
        if glo * gm < 0:
            hi = mid
        else:
            lo, glo = mid, gm
        if hi - lo < 1e-15 * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Elliptic helper for the rectangle parameter problem
# ---------------------------------------------------------------------------


def agm(a: float, b: float) -> float:
    # quadratic convergence; the cap guards the last-ulp oscillation
    for _ in range(40):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def elliptic_k(k: float) -> float:
    """Complete elliptic integral K(k) (modulus convention) via the AGM."""
    return math.pi / (2.0 * agm(1.0, math.sqrt(max(1e-300, 1.0 - k * k))))


def rectangle_modulus(aspect: float) -> float:
    """Solve 2 K(k) / K'(k) = aspect by bisection on k in (0, 1)."""
    lo, hi = 1e-12, 1.0 - 1e-12

    def g(k):
        return 2.0 * elliptic_k(k) / elliptic_k(math.sqrt(1.0 - k * k)) - aspect

    if g(lo) > 0 or g(hi) < 0:
        raise MapNotConverged(f"aspect {aspect} out of solvable range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Marked domains
# ---------------------------------------------------------------------------

CATALOGUE = ("disc", "half_disc", "rect", "equilateral_triangle", "polygon", "half_plane")


@dataclass(frozen=True)
class MarkedDomain:
    """A catalogue domain with 2-4 marked boundary points.

    Marks are stored as {name: t} with t the counterclockwise arc-length
    fraction of the full boundary; insertion order fixes the (z1, z2, ...)
    order used by cross-ratio and crossing operations and must be
    counterclockwise.  For kind 'half_plane' the mark values are real
    boundary coordinates (INF allowed) instead of fractions.
    """

    kind: str
    geometry: tuple = ()
    marks: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in CATALOGUE:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.marks and self.kind != "half_plane":
            ts = list(self.marks.values())
            if len(set(ts)) != len(ts):
                raise DegenerateMarks("marked points must be distinct")
            if not _cyclically_increasing(ts):
                raise DegenerateMarks("marks must be in counterclockwise order")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def disc(radius=1.0, center=0j, marks_at_angles=None):
        marks = {}
        if marks_at_angles:
            marks = {k: (v / _TWO_PI) % 1.0 for k, v in marks_at_angles.items()}
        return MarkedDomain("disc", (float(radius), complex(center)), marks)

    @staticmethod
    def half_disc(radius=1.0, marks=None):
        return MarkedDomain("half_disc", (float(radius),), dict(marks or {}))

    @staticmethod
    def rect(width, height, marks=None):
        return MarkedDomain("rect", (float(width), float(height)), dict(marks or {}))

    @staticmethod
    def equilateral_triangle(side, marks=None):
        return MarkedDomain("equilateral_triangle", (float(side),), dict(marks or {}))

    @staticmethod
    def polygon(vertices, marks=None):
        verts = tuple(complex(v) for v in vertices)
        if len(verts) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if _polygon_area(verts) <= 0:
            raise ValueError("polygon vertices must be counterclockwise")
        return MarkedDomain("polygon", verts, dict(marks or {}))

    @staticmethod
    def half_plane(marks=None):
        return MarkedDomain("half_plane", (), dict(marks or {}))

    # -- geometry -----------------------------------------------------------

    def _edges(self):
        """Boundary as straight edges / circular arcs for length bookkeeping."""
        if self.kind == "disc":
            r, c = self.geometry
            return [("arc", c, r, 0.0, _TWO_PI)]
        if self.kind == "half_disc":
            (r,) = self.geometry
            return [("seg", complex(-r, 0), complex(r, 0)), ("arc", 0j, r, 0.0, math.pi)]
        if self.kind == "rect":
            w, h = self.geometry
            vs = [0j, complex(w, 0), complex(w, h), complex(0, h)]
        elif self.kind == "equilateral_triangle":
            (side,) = self.geometry
            vs = [0j, complex(side, 0), complex(side / 2, side * math.sqrt(3) / 2)]
        elif self.kind == "polygon":
            vs = list(self.geometry)
        else:
            raise ValueError("half_plane has no finite boundary")
        return [("seg", vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def boundary_length(self) -> float:
        total = 0.0
        for e in self._edges():
            if e[0] == "seg":
                total += abs(e[2] - e[1])
            else:
                _, _, r, t0, t1 = e
                total += r * (t1 - t0)
        return total

    def boundary_point(self, t: float) -> complex:
        """Point at counterclockwise arc-length fraction t of the boundary."""
        if self.kind == "half_plane":
            return complex(t, 0.0)
        total = self.boundary_length()
        s = (t % 1.0) * total
        edges = self._edges()
        for i, e in enumerate(edges):
            last = i == len(edges) - 1
            if e[0] == "seg":
                ln = abs(e[2] - e[1])
                if s <= ln or last:
                    return e[1] + (e[2] - e[1]) * (min(s, ln) / ln)
            else:
                _, c, r, t0, t1 = e
                ln = r * (t1 - t0)
                if s <= ln or last:
                    return c + r * cmath.exp(1j * (t0 + min(s, ln) / r))
            s -= ln
        raise AssertionError("unreachable")

    def contains(self, z: complex) -> bool:
        z = complex(z)
        if self.kind == "disc":
            r, c = self.geometry
            return abs(z - c) < r
        if self.kind == "half_disc":
            (r,) = self.geometry
            return abs(z) < r and z.imag > 0
        if self.kind == "rect":
            w, h = self.geometry
            return 0 < z.real < w and 0 < z.imag < h
        if self.kind == "half_plane":
            return z.imag > 0
        verts = (
            list(self.geometry)
            if self.kind == "polygon"
            else [e[1] for e in self._edges()]
        )
        return _point_in_polygon(z, verts)

    def mark_point(self, name: str) -> complex:
        return self.boundary_point(self.marks[name])

    def min_feature_size(self) -> float:
        if self.kind == "disc":
            return 2.0 * self.geometry[0]
        if self.kind == "half_disc":
            return self.geometry[0]
        if self.kind == "rect":
            return min(self.geometry)
        if self.kind == "equilateral_triangle":
            return self.geometry[0] * math.sqrt(3) / 2
        if self.kind == "polygon":
            vs = self.geometry
            return min(abs(vs[i] - vs[(i + 1) % len(vs)]) for i in range(len(vs)))
        return INF

    # -- mark algebra ---------------------------------------------------------

    def with_point_on_arc(self, c_name, d_name, s, name="x", order=None):
        """New domain with an extra mark at fraction s of the ccw arc c -> d."""
        tc, td = self.marks[c_name], self.marks[d_name]
        span = (td - tc) % 1.0
        tx = (tc + s * span) % 1.0
        allmarks = dict(self.marks)
        allmarks[name] = tx
        order = order or list(allmarks)
        marks = {k: allmarks[k] for k in order}
        return MarkedDomain(self.kind, self.geometry, marks)

    def arc_param(self, z, c_name, d_name, samples=4096) -> float:
        """Arc-length fraction along the ccw arc c -> d nearest to point z."""
        tc, td = self.marks[c_name], self.marks[d_name]
        span = (td - tc) % 1.0
        ts = tc + span * np.linspace(0.0, 1.0, samples)
        pts = np.array([self.boundary_point(t % 1.0) for t in ts])
        i = int(np.argmin(np.abs(pts - complex(z))))
        # refine by projecting onto the two neighboring segments
        best_s, best_d = i / (samples - 1), abs(pts[i] - z)
        for j in (i - 1, i):
            if 0 <= j < samples - 1:
                a, b = pts[j], pts[j + 1]
                denom = abs(b - a) ** 2
                if denom == 0:
                    continue
                u = max(0.0, min(1.0, ((z - a) * (b - a).conjugate()).real / denom))
                p = a + u * (b - a)
                if abs(p - z) < best_d:
                    best_d = abs(p - z)
                    best_s = (j + u) / (samples - 1)
        return float(best_s)

    # -- half-plane boundary correspondence -----------------------------------

    def boundary_preimage(self, t) -> float:
        """Real half-plane preimage of the boundary point at fraction t.

        The correspondence is fixed per kind (not per mark set); ccw
        traversal of the boundary matches increasing position on R u {inf}.
        """
        if self.kind == "half_plane":
            return t  # marks are stored as real coordinates already
        if self.kind == "disc":
            theta = (t % 1.0) * _TWO_PI
            if theta == 0.0:
                return INF
            return -1.0 / math.tan(theta / 2.0)
        if self.kind == "half_disc":
            (r,) = self.geometry
            z = self.boundary_point(t)
            if abs(z) < 1e-14:
                return INF
            if abs(abs(z) - r) < 1e-9 * r and z.imag > 1e-9 * r:
                return -math.cos(cmath.phase(z))
            x = z.real / r
            if abs(x) < 1e-300:
                return INF
            return -(x + 1.0 / x) / 2.0
        return _sc_atlas(self).boundary_preimage(t)

    def map_from_halfplane(self, z):
        """Image in the domain of a point z in the closed half-plane."""
        if self.kind == "half_plane":
            return complex(z)
        if self.kind == "disc":
            r, c = self.geometry
            return c + r * cayley()(z)
        if self.kind == "half_disc":
            (r,) = self.geometry
            # invert w = -(x + 1/x)/2; the two roots multiply to 1, pick the
            # one in the closed upper unit half-disc
            w = complex(z)
            root = cmath.sqrt(w * w - 1.0)
            cand = [-w + root, -w - root]
            cand.sort(key=lambda x: (abs(x) > 1.0 + 1e-9, -x.imag))
            return r * cand[0]
        return _sc_atlas(self).eval_map(z)


def _cyclically_increasing(ts):
    n = len(ts)
    if n < 2:
        return True
    drops = sum(1 for i in range(n) if ts[(i + 1) % n] <= ts[i])
    return drops == 1


def _polygon_area(verts):
    area = 0.0
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        area += a.real * b.imag - b.real * a.imag
    return area / 2.0


def _point_in_polygon(z, verts):
    inside = False
    n = len(verts)
    x, y = z.real, z.imag
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if (a.imag > y) != (b.imag > y):
            xint = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
            if x < xint:
                inside = not inside
    return inside


# ---------------------------------------------------------------------------
# SC atlas objects per straight-edge domain
# ---------------------------------------------------------------------------


class _ScAtlas:
    """Boundary correspondence H <-> straight-edge domain via an SCMap."""

    def __init__(self, md: MarkedDomain):
        self.md = md
        if md.kind == "rect":
            w, h = md.geometry
            k = rectangle_modulus(w / h)
            self.scmap = SCMap(
                prevertices=[-1.0 / k, -1.0, 1.0, 1.0 / k],
                alphas=[0.5, 0.5, 0.5, 0.5],
                vertices=[complex(0, h), 0j, complex(w, 0), complex(w, h)],
                has_inf_vertex=False,
            )
            self.k = k
            # boundary edge j (ccw from origin) -> prevertex bracket spec
            self.edge_plan = {
                0: ("interval", 1, 2, 1),  # bottom: (x2, x3), anchor vertex idx 1
                1: ("interval", 2, 3, 2),  # right
                2: ("split_top", None, None, None),  # top, through infinity
                3: ("interval", 0, 1, 0),  # left: from (0,h) to (0,0)
            }
        elif md.kind == "equilateral_triangle":
            (side,) = md.geometry
            apex = complex(side / 2.0, side * math.sqrt(3) / 2.0)
            self.scmap = SCMap(
                prevertices=[0.0, 1.0],
                alphas=[1.0 / 3.0, 1.0 / 3.0],
                vertices=[0j, complex(side, 0)],
                has_inf_vertex=True,
                inf_vertex=apex,
            )
            self.edge_plan = {
                0: ("interval", 0, 1, 0),  # base
                1: ("ray", +1, 1, None),  # right side toward apex
                2: ("ray", -1, 0, None),  # left side from apex, searched from v0
            }
        elif md.kind == "polygon":
            verts = list(md.geometry)
            self.scmap = _solve_polygon(verts)
            self.edge_plan = None  # generic handling below
        else:
            raise ValueError(md.kind)

    # The boundary fraction t is converted to (edge index, distance along edge)
    # and then inverted through the prevertex bracket of that edge.
    def boundary_preimage(self, t) -> float:
        md = self.md
        edges = md._edges()
        total = md.boundary_length()
        s = (t % 1.0) * total
        for idx, e in enumerate(edges):
            ln = abs(e[2] - e[1])
            if s <= ln + 1e-12 * total:
                return self._edge_preimage(idx, min(s, ln), ln)
            s -= ln
        return self._edge_preimage(len(edges) - 1, abs(edges[-1][2] - edges[-1][1]), 1.0)

    def _edge_preimage(self, edge_idx, dist, edge_len) -> float:
        sc = self.scmap
        if self.md.kind == "polygon":
            nfin = len(sc.x)
            if edge_idx < nfin - 1:
                if dist < 1e-13:
                    return sc.x[edge_idx]
                if edge_len - dist < 1e-12 * edge_len:
                    return sc.x[edge_idx + 1]
                return sc.preimage_on_side(edge_idx, edge_idx + 1, dist, edge_idx)
            if edge_idx == nfin - 1:  # last finite vertex -> inf vertex
                if dist < 1e-13:
                    return sc.x[-1]
                if edge_len - dist < 1e-13:
                    return INF
                return sc.preimage_on_ray(dist, nfin - 1, +1)
            # inf vertex -> first vertex: search by distance from vertex 0
            if dist < 1e-13:
                return INF
            if edge_len - dist < 1e-13:
                return sc.x[0]
            return sc.preimage_on_ray(edge_len - dist, 0, -1)
        plan = self.edge_plan[edge_idx]
        if plan[0] == "interval":
            _, jl, jr, anchor = plan
            if dist < 1e-13:
                return sc.x[jl]
            if edge_len - dist < 1e-13:
                return sc.x[jr]
            return sc.preimage_on_side(jl, jr, dist, anchor)
        if plan[0] == "ray":
            _, direction, anchor, _ = plan
            if direction > 0:
                if dist < 1e-13:
                    return sc.x[-1]
                if edge_len - dist < 1e-13:
                    return INF
                return sc.preimage_on_ray(dist, anchor, +1)
            if dist < 1e-13:
                return INF
            if edge_len - dist < 1e-13:
                return sc.x[0]
            return sc.preimage_on_ray(edge_len - dist, anchor, -1)
        # rectangle top edge runs (x4, +inf) then (-inf, x1)
        w, h = self.md.geometry
        if dist < 1e-13:
            return sc.x[3]
        if dist < w / 2.0:
            return sc.preimage_on_ray(dist, 3, +1)
        if edge_len - dist < 1e-13:
            return sc.x[0]
        if dist > w / 2.0:
            return sc.preimage_on_ray(edge_len - dist, 0, -1)
        return INF

    def eval_map(self, z):
        return self.scmap.eval(z)


_SC_ATLAS_CACHE: dict[tuple, _ScAtlas] = {}


def _sc_atlas(md: MarkedDomain) -> _ScAtlas:
    key = (md.kind, md.geometry)
    if key not in _SC_ATLAS_CACHE:
        _SC_ATLAS_CACHE[key] = _ScAtlas(md)
    return _SC_ATLAS_CACHE[key]


def _solve_polygon(verts) -> SCMap:
    """Prevertex parameter problem for a simple ccw polygon, vertex n at infinity."""
    n = len(verts)
    alphas = []
    for j in range(n):
        prev_v = verts[(j - 1) % n]
        next_v = verts[(j + 1) % n]
        a1 = cmath.phase(prev_v - verts[j])
        a2 = cmath.phase(next_v - verts[j])
        interior = (a1 - a2) % _TWO_PI
        alphas.append(interior / math.pi)
    fin_alphas = alphas[:-1]
    sides = [abs(verts[j + 1] - verts[j]) for j in range(n - 1)]

    def prevertices_from(u):
        gaps = np.exp(np.concatenate([u, [0.0]]))
        gaps = 2.0 * gaps / gaps.sum()
        xs = -1.0 + np.concatenate([[0.0], np.cumsum(gaps)])
        return xs

    def residual(u):
        xs = prevertices_from(u)
        sc = SCMap.__new__(SCMap)
        sc.x = list(xs)
        sc.alphas = fin_alphas
        lens = []
        for j in range(n - 2):
            raw = sc._raw_integral(xs[j], xs[j + 1], sing_left=j, sing_right=j + 1)
            lens.append(abs(raw))
        return np.array(
            [lens[j] / lens[0] - sides[j] / sides[0] for j in range(1, n - 2)]
        )

    m = n - 3
    u = np.zeros(m)
    if m > 0:
        lam = 1e-3
        r = residual(u)
        for _ in range(80):
            if np.max(np.abs(r)) < 1e-12:
                break
            jac = np.empty((len(r), m))
            for i in range(m):
                du = np.zeros(m)
                du[i] = 1e-6
                jac[:, i] = (residual(u + du) - r) / 1e-6
            for _ in range(20):
                step = np.linalg.solve(jac.T @ jac + lam * np.eye(m), -jac.T @ r)
                r_new = residual(u + step)
                if np.linalg.norm(r_new) < np.linalg.norm(r):
                    u = u + step
                    r = r_new
                    lam = max(lam / 3.0, 1e-12)
                    break
                lam *= 10.0
            else:
                raise MapNotConverged("polygon prevertex solve stalled")
        if np.max(np.abs(r)) > 1e-10:
            raise MapNotConverged("polygon prevertex residual too large")
    xs = prevertices_from(u)
    return SCMap(
        prevertices=list(xs),
        alphas=fin_alphas,
        vertices=verts[:-1],
        has_inf_vertex=True,
        inf_vertex=verts[-1],
    )


# ---------------------------------------------------------------------------
# Cross-ratio and semiball images
# ---------------------------------------------------------------------------


def quad_cross_ratio(md: MarkedDomain) -> float:
    """Cross-ratio eta in (0, 1) of a 4-marked domain.

    The marks (in insertion order z1..z4, counterclockwise) are pulled back
    to the real line through the domain's half-plane correspondence and fed
    to the Mobius-invariant cross-ratio.
    """
    if len(md.marks) != 4:
        raise ValueError("quad_cross_ratio needs exactly 4 marks")
    xs = [md.boundary_preimage(t) for t in md.marks.values()]
    eta = cross_ratio(*xs)
    if not -1e-9 < eta < 1 + 1e-9:
        raise MapNotConverged(f"cross-ratio {eta} outside (0, 1)")
    return min(1.0, max(0.0, eta))


@dataclass(frozen=True)
class SemiBallImage:
    """Discretized image of the half-plane semicircle |z| = eps."""

    eps: float
    polyline: np.ndarray  # complex points from +eps to -eps (counterclockwise)

    def arc_fraction_of_crossing(self, p, q) -> float | None:
        """Fraction along the polyline where segment p->q first crosses it."""
        pts = self.polyline
        best = None
        lengths = np.abs(np.diff(pts))
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        for i in range(len(pts) - 1):
            hit = _segment_intersection(p, q, pts[i], pts[i + 1])
            if hit is not None:
                frac = (cum[i] + hit[1] * lengths[i]) / cum[-1]
                if best is None or hit[0] < best[0]:
                    best = (hit[0], frac)
        return None if best is None else best[1]


def semiball_image(base, eps: float, tol: float | None = None,
                   boundary_distance=None) -> SemiBallImage:
    """Image of {|z| = eps} in H under a base map defined on the closed arc.

    The polyline resolution follows the chord-error rule
    n >= max(64, ceil(pi / asin(tol / eps))); endpoints are checked to lie
    on the domain boundary when a boundary_distance callback is supplied.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if tol is None:
        tol = eps / 256.0
    tol = min(tol, eps)
    n = max(64, math.ceil(math.pi / math.asin(tol / eps)))
    theta = np.linspace(0.0, math.pi, n + 1)
    zs = eps * np.exp(1j * theta)
    fn = base if callable(base) else base.__call__
    pts = np.array([complex(fn(z)) for z in zs])
    if boundary_distance is not None:
        for endpoint in (pts[0], pts[-1]):
            if boundary_distance(endpoint) > 1e-8:
                raise MapNotConverged("semiball endpoint off the domain boundary")
    return SemiBallImage(eps, pts)


def _segment_intersection(p, q, a, b):
    """(s, u) with p+(q-p)s = a+(b-a)u on both segments, else None."""
    d1 = q - p
    d2 = b - a
    denom = d1.real * d2.imag - d1.imag * d2.real
    if denom == 0:
        return None
    w = a - p
    s = (w.real * d2.imag - w.imag * d2.real) / denom
    u = (w.real * d1.imag - w.imag * d1.real) / denom
    if -1e-12 <= s <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
        return (max(0.0, min(1.0, s)), max(0.0, min(1.0, u)))
    return None
