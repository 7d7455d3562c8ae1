import math

import numpy as np
import pytest

from percolab.cardy import (GAMMA_1_3, GAMMA_2_3, GAMMA_4_3, HYP_AT_ONE,
                            cardy_phi, cardy_value, crossing_probability,
                            hitting_cdf, hyp2f1_cardy)
from percolab.conformal import MarkedDomain


def mp_hyp(eta):
    from mpmath import hyp2f1, mp
    mp.dps = 30
    return float(hyp2f1(mp.mpf(1) / 3, mp.mpf(2) / 3, mp.mpf(4) / 3, eta))


def euler_integral_hyp(eta):
    """Independent oracle: tanh-sinh quadrature of the Euler representation.

    2F1(a,b;c;z) = Gamma(c)/(Gamma(b)Gamma(c-b)) *
                   int_0^1 t^(b-1) (1-t)^(c-b-1) (1-z t)^(-a) dt
    for a=1/3, b=2/3, c=4/3.
    """
    from mpmath import gamma, mp, mpf, quad
    mp.dps = 30
    a, b, c = mpf(1) / 3, mpf(2) / 3, mpf(4) / 3
    val = quad(lambda t: t ** (b - 1) * (1 - t) ** (c - b - 1)
               * (1 - eta * t) ** (-a), [0, 1])
    return float(gamma(c) / (gamma(b) * gamma(c - b)) * val)


class TestGammaConstants:
    def test_stored_digits(self):
        assert GAMMA_1_3 == pytest.approx(math.gamma(1 / 3), abs=1e-15)
        assert GAMMA_2_3 == pytest.approx(math.gamma(2 / 3), abs=1e-15)
        assert GAMMA_4_3 == pytest.approx(math.gamma(4 / 3), abs=1e-15)


class TestHyp2f1:
    def test_at_zero(self):
        assert hyp2f1_cardy(0.0) == 1.0

    def test_at_one_gauss_summation(self):
        assert hyp2f1_cardy(1.0) == pytest.approx(
            GAMMA_4_3 * GAMMA_1_3 / GAMMA_2_3, rel=1e-15)
        assert HYP_AT_ONE == pytest.approx(
            math.gamma(4 / 3) * math.gamma(1 / 3) / math.gamma(2 / 3), rel=1e-15)

    def test_quarter_against_euler_integral(self):
        assert hyp2f1_cardy(0.25) == pytest.approx(
            euler_integral_hyp(0.25), abs=1e-10)

    def test_dense_grid_against_mpmath(self):
        for eta in np.linspace(1e-8, 1 - 1e-8, 41):
            assert hyp2f1_cardy(float(eta)) == pytest.approx(
                mp_hyp(float(eta)), rel=1e-12)

    def test_branch_overlap_band(self):
        # the direct series and the connection-formula branch agree on
        # the hand-off band
        from percolab.cardy import _euler_series, _gauss_series, HYP_AT_ONE
        for eta in np.linspace(0.6, 0.8, 21):
            direct = _gauss_series(float(eta))[0]
            w = 1.0 - float(eta)
            b_coef = GAMMA_4_3 * (-3.0 * GAMMA_2_3) / (GAMMA_1_3 * GAMMA_2_3)
            other = HYP_AT_ONE * float(eta) ** (-1 / 3) + \
                b_coef * w ** (1 / 3) * _euler_series(w)[0]
            assert direct == pytest.approx(other, rel=1e-12)

    def test_domain_check(self):
        with pytest.raises(ValueError):
            hyp2f1_cardy(1.5)


class TestCardyPhi:
    def test_endpoints_exact(self):
        assert cardy_phi(0.0) == 0.0
        assert cardy_phi(1.0) == 1.0

    def test_half_is_half(self):
        # verified via the duality Phi(eta) + Phi(1 - eta) = 1 by the
        # quadrature oracle, which forces Phi(1/2) = 1/2
        oracle = euler_integral_hyp(0.5)
        prefactor = GAMMA_2_3 / (GAMMA_4_3 * GAMMA_1_3)
        assert prefactor * 0.5 ** (1 / 3) * oracle == pytest.approx(0.5, abs=1e-10)
        assert cardy_phi(0.5) == pytest.approx(0.5, abs=1e-12)

    def test_duality_grid(self):
        grid = np.linspace(0.0, 1.0, 1001)
        worst = max(abs(cardy_phi(float(e)) + cardy_phi(float(1 - e)) - 1.0)
                    for e in grid)
        assert worst < 1e-10

    def test_monotone(self):
        vals = [cardy_phi(float(e)) for e in np.linspace(0, 1, 500)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_err_bound_budget(self):
        for eta in [1e-8, 0.1, 0.5, 0.69, 0.71, 0.9, 1 - 1e-8]:
            assert cardy_value(eta).err_bound <= 1e-10


class TestCrossingProbability:
    def test_square_corner_marks(self):
        md = MarkedDomain.rect(1.0, 1.0,
                               marks={"z1": 0.75, "z2": 0.0, "z3": 0.25, "z4": 0.5})
        assert crossing_probability(md) == pytest.approx(0.5, abs=1e-9)

    def test_disc_symmetric_marks(self):
        md = MarkedDomain.disc(marks_at_angles={
            "z1": 0.0, "z2": math.pi / 2, "z3": math.pi, "z4": 3 * math.pi / 2})
        assert crossing_probability(md) == pytest.approx(0.5, abs=1e-12)

    def test_rect_aspect2_matches_golden(self):
        from percolab import goldens
        gold = goldens.load()
        md = MarkedDomain.rect(2.0, 1.0, marks={
            "z1": 5 / 6, "z2": 0.0, "z3": 2 / 6, "z4": 3 / 6})
        assert crossing_probability(md) == pytest.approx(
            gold["phi"]["rect_aspect2_hard"], abs=1e-9)


class TestHittingCdf:
    def half_disc_acd(self):
        t_right = 2.0 / (2.0 + math.pi)
        t_top = (2.0 + math.pi / 2.0) / (2.0 + math.pi)
        return MarkedDomain.half_disc(1.0, marks={"a": t_top, "c": 0.0,
                                                  "d": t_right})

    def test_endpoints(self):
        md = self.half_disc_acd()
        assert hitting_cdf(md, 0.0) == 0.0
        assert hitting_cdf(md, 1.0) == 1.0

    def test_symmetric_midpoint(self):
        # start at the arc top, target the diameter: reflection symmetry
        md = self.half_disc_acd()
        assert hitting_cdf(md, 0.5) == pytest.approx(0.5, abs=1e-9)

    def test_monotone_and_continuous(self):
        md = self.half_disc_acd()
        grid = np.linspace(0.0, 1.0, 1001)
        vals = [hitting_cdf(md, float(s)) for s in grid]
        diffs = np.diff(vals)
        assert np.all(diffs >= -1e-12)
        assert np.max(diffs) < 0.02  # no jumps on this grid

    def test_monotone_for_random_mark_placements(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            angles = np.sort(rng.uniform(0, 2 * math.pi, size=3))
            md = MarkedDomain.disc(marks_at_angles={
                "a": float(angles[0]), "c": float(angles[1]),
                "d": float(angles[2])})
            grid = np.linspace(0, 1, 101)
            vals = [hitting_cdf(md, float(s)) for s in grid]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
            assert vals[0] == 0.0 and vals[-1] == 1.0

    def test_semiball_closed_form(self):
        # exit from the unit semi-ball started at the diameter midpoint:
        # the cross-ratio collapses to sin^2(pi s / 2)
        t_mid = 1.0 / (2.0 + math.pi)
        t_right = 2.0 / (2.0 + math.pi)
        md = MarkedDomain.half_disc(1.0, marks={"a": t_mid, "c": t_right,
                                                "d": 0.0})
        for s in np.linspace(0.01, 0.99, 23):
            expect = cardy_phi(math.sin(math.pi * s / 2.0) ** 2)
            assert hitting_cdf(md, float(s)) == pytest.approx(expect, abs=1e-9)
