import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from percolab.curvemetric import (INFINITY, as_polyline, curve_distance,
                                  hausdorff_curvesets, hausdorff_points,
                                  sphere_distance)
from percolab.errors import EmptySet


def brute_frechet(p, q):
    """Exhaustive search over all monotone couplings."""
    p = [complex(z) for z in p]
    q = [complex(z) for z in q]
    best = [math.inf]

    def rec(i, j, cur):
        cur = max(cur, abs(p[i] - q[j]))
        if cur >= best[0]:
            return
        if i == len(p) - 1 and j == len(q) - 1:
            best[0] = cur
            return
        if i + 1 < len(p):
            rec(i + 1, j, cur)
        if j + 1 < len(q):
            rec(i, j + 1, cur)
        if i + 1 < len(p) and j + 1 < len(q):
            rec(i + 1, j + 1, cur)

    rec(0, 0, 0.0)
    return best[0]


class TestCurveDistance:
    def test_identical_curves(self):
        c = [0, 1 + 1j, 2]
        assert curve_distance(c, c) == 0.0

    def test_perpendicular_translation(self):
        seg = [0, 1, 2, 3]
        shifted = [z + 0.7j for z in seg]
        assert curve_distance(seg, shifted) == pytest.approx(0.7, abs=1e-15)

    def test_small_cases_match_brute_force(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            p = rng.normal(size=4) + 1j * rng.normal(size=4)
            q = rng.normal(size=3) + 1j * rng.normal(size=3)
            assert curve_distance(p, q) == pytest.approx(brute_frechet(p, q), abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(8)
        p = rng.normal(size=6) + 1j * rng.normal(size=6)
        q = rng.normal(size=5) + 1j * rng.normal(size=5)
        assert curve_distance(p, q) == curve_distance(q, p)

    def test_collinear_refinement_keeps_value(self):
        # on densely sampled curves, inserting collinear midpoints moves the
        # value by less than the sampling step
        t = np.linspace(0, 1, 60)
        p = t * 2.0 + 0.3j * np.sin(3 * t)
        q = t * 2.0 + 0.3j * np.sin(3 * t) + 0.15j
        refined = np.empty(2 * len(p) - 1, dtype=complex)
        refined[::2] = p
        refined[1::2] = 0.5 * (p[:-1] + p[1:])
        d0 = curve_distance(p, q)
        d1 = curve_distance(refined, q)
        spacing = np.max(np.abs(np.diff(p)))
        assert abs(d0 - d1) <= spacing

    def test_triangle_inequality(self):
        rng = np.random.default_rng(9)
        for _ in range(1000):
            a = rng.normal(size=4) + 1j * rng.normal(size=4)
            b = rng.normal(size=4) + 1j * rng.normal(size=4)
            c = rng.normal(size=4) + 1j * rng.normal(size=4)
            assert curve_distance(a, c) <= (
                curve_distance(a, b) + curve_distance(b, c) + 1e-12)


class TestHausdorff:
    def test_equal_sets(self):
        a = [0, 1j, 2]
        assert hausdorff_points(a, a) == 0.0

    def test_single_pair(self):
        assert hausdorff_points([0], [3 + 4j]) == pytest.approx(5.0)

    def test_matches_quadratic_brute_force(self):
        rng = np.random.default_rng(10)
        a = rng.normal(size=50) + 1j * rng.normal(size=50)
        b = rng.normal(size=50) + 1j * rng.normal(size=50)
        d1 = max(min(abs(x - y) for y in b) for x in a)
        d2 = max(min(abs(x - y) for x in a) for y in b)
        assert hausdorff_points(a, b) == pytest.approx(max(d1, d2), abs=1e-12)

    def test_empty_raises(self):
        with pytest.raises(EmptySet):
            hausdorff_points([], [1])

    def test_curveset_singletons_collapse_to_curve_distance(self):
        c1 = [0, 1, 2 + 1j]
        c2 = [0.5, 1.5 + 0.2j]
        assert hausdorff_curvesets([c1], [c2]) == pytest.approx(
            curve_distance(c1, c2))

    def test_curveset_families_match_pairing_oracle(self):
        rng = np.random.default_rng(11)
        fam1 = [rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(3)]
        fam2 = [rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(3)]
        d = np.array([[curve_distance(x, y) for y in fam2] for x in fam1])
        oracle = max(d.min(axis=1).max(), d.min(axis=0).max())
        assert hausdorff_curvesets(fam1, fam2) == pytest.approx(oracle)

    def test_equal_families(self):
        fam = [[0, 1], [1j, 2j]]
        assert hausdorff_curvesets(fam, fam) == 0.0

    def test_triangle_inequality_on_point_sets(self):
        rng = np.random.default_rng(12)
        for _ in range(300):
            a = rng.normal(size=5) + 1j * rng.normal(size=5)
            b = rng.normal(size=5) + 1j * rng.normal(size=5)
            c = rng.normal(size=5) + 1j * rng.normal(size=5)
            assert hausdorff_points(a, c) <= (
                hausdorff_points(a, b) + hausdorff_points(b, c) + 1e-12)


class TestSphereDistance:
    def test_coincident(self):
        assert sphere_distance(1 + 2j, 1 + 2j) == 0.0

    def test_zero_to_infinity(self):
        assert sphere_distance(0, INFINITY) == pytest.approx(math.pi / 2)

    def test_zero_one_matches_quadrature(self):
        # geodesic through 0 along the real axis: integral of dr/(1+r^2)
        from scipy.integrate import quad
        val, _ = quad(lambda r: 1.0 / (1.0 + r * r), 0.0, 1.0, epsabs=1e-12)
        assert sphere_distance(0, 1) == pytest.approx(val, abs=1e-8)

    def test_below_euclidean(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            u = complex(rng.normal(), rng.normal()) * 3
            v = complex(rng.normal(), rng.normal()) * 3
            assert sphere_distance(u, v) <= abs(u - v) + 1e-12

    def test_euclidean_equivalence_constant_in_disc(self):
        # on |z| <= R the metric is at least euclidean / (1 + R^2)
        rng = np.random.default_rng(14)
        R = 2.0
        for _ in range(400):
            u = complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) * R / 1.5
            v = complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) * R / 1.5
            if abs(u) <= R and abs(v) <= R:
                assert sphere_distance(u, v) >= abs(u - v) / (1 + R * R) - 1e-12

    def test_triangle_inequality(self):
        rng = np.random.default_rng(15)
        for _ in range(1000):
            pts = [complex(rng.normal(), rng.normal()) * 2 for _ in range(3)]
            a, b, c = pts
            assert sphere_distance(a, c) <= (
                sphere_distance(a, b) + sphere_distance(b, c) + 1e-12)

    @given(hst.floats(-50, 50), hst.floats(-50, 50))
    @settings(max_examples=100, deadline=None)
    def test_symmetry(self, x, y):
        u, v = complex(x, 1.0), complex(y, -2.0)
        assert sphere_distance(u, v) == sphere_distance(v, u)


def test_polyline_collapses_duplicates():
    p = as_polyline([1, 1, 2, 2, 3])
    assert list(p) == [1, 2, 3]
