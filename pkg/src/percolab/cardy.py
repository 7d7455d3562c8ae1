"""Crossing probabilities of conformal quadrilaterals.

The crossing probability of a quadrilateral with cross-ratio eta is

    Phi(eta) = Gamma(2/3) / (Gamma(4/3) Gamma(1/3)) * eta^(1/3)
               * 2F1(1/3, 2/3; 4/3; eta),

evaluated here without any special-function dependency: a direct Gauss
series for moderate eta, and the Euler/connection-formula branch near
eta = 1.  Hitting laws on a marked boundary arc reduce to Phi through
the quadrilateral (a, c, x(s), d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .conformal import MarkedDomain, quad_cross_ratio

# Gamma-function constants, precomputed once to full double precision.
GAMMA_1_3 = 2.678938534707747633
GAMMA_2_3 = 1.354117939426400417
GAMMA_4_3 = 0.892979511569249211

# prefactor Gamma(2/3) / (Gamma(4/3) Gamma(1/3)) = 3 Gamma(2/3) / Gamma(1/3)^2
PHI_PREFACTOR = GAMMA_2_3 / (GAMMA_4_3 * GAMMA_1_3)

# value of 2F1(1/3, 2/3; 4/3; 1) by Gauss summation:
# Gamma(4/3) Gamma(1/3) / (Gamma(1) Gamma(2/3))
HYP_AT_ONE = GAMMA_4_3 * GAMMA_1_3 / GAMMA_2_3

_SERIES_SPLIT = 0.7
_MAX_TERMS = 400


@dataclass(frozen=True)
class CardyValue:
    """Evaluated crossing probability with a truncation-error bound."""

    eta: float
    phi: float
    err_bound: float


def _gauss_series(eta: float) -> tuple[float, float]:
    """2F1(1/3, 2/3; 4/3; eta) by its power series; returns (value, errbound)."""
    total = 1.0
    term = 1.0
    n = 0
    while n < _MAX_TERMS:
        term *= (n + 1.0 / 3.0) * (n + 2.0 / 3.0) / ((n + 4.0 / 3.0) * (n + 1.0)) * eta
        total += term
        n += 1
        if abs(term) < 1e-17 * abs(total):
            break
    # geometric tail bound: successive ratios are below eta
    tail = abs(term) * eta / (1.0 - eta) if eta < 1.0 else abs(term) * n
    return total, tail


def _euler_series(w: float) -> tuple[float, float]:
    """2F1(1, 2/3; 4/3; w); used by the connection formula with w = 1 - eta."""
    total = 1.0
    term = 1.0
    n = 0
    while n < _MAX_TERMS:
        term *= (n + 2.0 / 3.0) / (n + 4.0 / 3.0) * w
        total += term
        n += 1
        if abs(term) < 1e-17 * abs(total):
            break
    tail = abs(term) * w / (1.0 - w) if w < 1.0 else abs(term) * n
    return total, tail


def hyp2f1_cardy(eta: float) -> float:
    """2F1(1/3, 2/3; 4/3; eta) for eta in [0, 1].

    Direct series for eta <= 0.7; for larger eta the connection formula

        2F1(1/3,2/3;4/3;z) = HYP_AT_ONE * z^(-1/3)
            - 3 Gamma(2/3)/Gamma(1/3)^2 * HYP_AT_ONE
              * ((1-z)/z)^(1/3) ... (rearranged below)

    is used, whose only series runs in 1 - eta.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    if eta <= _SERIES_SPLIT:
        return _gauss_series(eta)[0]
    if eta == 1.0:
        return HYP_AT_ONE
    w = 1.0 - eta
    g, _ = _euler_series(w)
    # connection formula at z -> 1 for parameters (1/3, 2/3; 4/3):
    # F(z) = A z^(-1/3) + B w^(1/3) 2F1(1, 2/3; 4/3; w),  w = 1 - z,
    # with A = HYP_AT_ONE and B = Gamma(4/3)Gamma(-1/3)/(Gamma(1/3)Gamma(2/3)).
    b_coef = GAMMA_4_3 * (-3.0 * GAMMA_2_3) / (GAMMA_1_3 * GAMMA_2_3)
    return HYP_AT_ONE * eta ** (-1.0 / 3.0) + b_coef * w ** (1.0 / 3.0) * g


def cardy_value(eta: float) -> CardyValue:
    """Crossing probability with an explicit truncation-error bound."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    if eta == 0.0:
        return CardyValue(eta, 0.0, 0.0)
    if eta == 1.0:
        return CardyValue(eta, 1.0, 0.0)
    if eta <= _SERIES_SPLIT:
        f, tail = _gauss_series(eta)
        phi = PHI_PREFACTOR * eta ** (1.0 / 3.0) * f
        err = PHI_PREFACTOR * tail + 4e-16
    else:
        w = 1.0 - eta
        g, tail = _euler_series(w)
        # Phi(eta) = 1 - prefactor * (eta (1-eta))^(1/3) * 2F1(1, 2/3; 4/3; 1-eta)
        phi = 1.0 - PHI_PREFACTOR * (eta * w) ** (1.0 / 3.0) * g
        err = PHI_PREFACTOR * tail + 4e-16
    return CardyValue(eta, min(max(phi, 0.0), 1.0), err)


def cardy_phi(eta: float) -> float:
    """The crossing probability Phi(eta); endpoints exact."""
    return cardy_value(eta).phi


def crossing_probability(md: MarkedDomain) -> float:
    """Phi of the cross-ratio of a 4-marked catalogue domain.

    The four marks, in counterclockwise order, bound the source arc
    (mark1 -> mark2) and the target arc (mark3 -> mark4).
    """
    return cardy_phi(quad_cross_ratio(md))


def hitting_cdf(md: MarkedDomain, s: float) -> float:
    """CDF of the first-hit position on the arc c -> d, at arc fraction s.

    The domain carries marks named 'a' (curve start) and 'c', 'd' (the
    target arc, counterclockwise from c to d).  The probability of hitting
    the sub-arc from c to x(s) is the difference of two crossing
    probabilities, which telescopes to 1 - Phi(eta(a, c, x(s), d)).
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"arc fraction must be in [0, 1], got {s}")
    for name in ("a", "c", "d"):
        if name not in md.marks:
            raise ValueError(f"hitting_cdf needs marks 'a', 'c', 'd'; missing {name!r}")
    if s == 0.0:
        return 0.0
    if s == 1.0:
        return 1.0
    quad = md.with_point_on_arc("c", "d", s, name="x", order=("a", "c", "x", "d"))
    return 1.0 - cardy_phi(quad_cross_ratio(quad))


def hitting_mean(md: MarkedDomain, npoints: int = 2001) -> float:
    """Mean hit fraction, by trapezoid quadrature of 1 - CDF."""
    h = 1.0 / (npoints - 1)
    total = 0.0
    prev = 1.0 - hitting_cdf(md, 0.0)
    for i in range(1, npoints):
        cur = 1.0 - hitting_cdf(md, i * h)
        total += 0.5 * (prev + cur) * h
        prev = cur
    return total
