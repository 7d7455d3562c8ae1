"""Estimates and test statistics for the Monte Carlo experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptySamples


@dataclass(frozen=True)
class EstimateRecord:
    """A Bernoulli (or mean) estimate with its normal-theory interval."""

    point_estimate: float
    std_error: float
    n_samples: int
    ci95: tuple
    method: str = "bernoulli"

    @staticmethod
    def from_hits(hits, method="bernoulli") -> "EstimateRecord":
        hits = np.asarray(hits)
        n = hits.size
        if n == 0:
            raise EmptySamples("estimate needs at least one sample")
        p = float(hits.mean())
        se = math.sqrt(max(p * (1.0 - p), 0.0) / n)
        return EstimateRecord(p, se, n, (p - 1.96 * se, p + 1.96 * se), method)


@dataclass(frozen=True)
class KSResult:
    statistic: float
    n_eff: float
    p_value_bound: float
    alpha: float
    slack: float
    decision: str  # "accept" | "reject"
    method: str


def kolmogorov_sf(x: float) -> float:
    """P(sup |B| > x) for the Kolmogorov distribution (asymptotic)."""
    if x <= 0:
        return 1.0
    total = 0.0
    for k in range(1, 101):
        term = 2.0 * (-1) ** (k - 1) * math.exp(-2.0 * k * k * x * x)
        total += term
        if abs(term) < 1e-16:
            break
    return min(1.0, max(0.0, total))


def kolmogorov_critical(alpha: float) -> float:
    """x with kolmogorov_sf(x) = alpha."""
    lo, hi = 1e-3, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if kolmogorov_sf(mid) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ks_1sample(samples, cdf, alpha: float = 0.01, slack: float = 0.0) -> KSResult:
    """One-sample KS against a callable CDF, with finite-size slack.

    The decision compares D against the asymptotic critical value divided
    by sqrt(n), plus the recorded slack for lattice bias.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise EmptySamples("KS test needs samples")
    f = np.array([cdf(v) for v in x])
    grid_hi = np.arange(1, n + 1) / n
    grid_lo = np.arange(0, n) / n
    d = float(max(np.max(np.abs(grid_hi - f)), np.max(np.abs(grid_lo - f))))
    crit = kolmogorov_critical(alpha) / math.sqrt(n)
    decision = "accept" if d <= crit + slack else "reject"
    p_bound = kolmogorov_sf(max(0.0, (d - slack)) * math.sqrt(n))
    return KSResult(d, float(n), p_bound, alpha, slack, decision, "ks-1sample")


def ks_2samp(x, y, alpha: float = 0.01, slack: float = 0.0) -> KSResult:
    """Two-sample KS statistic and decision."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    n, m = x.size, y.size
    if n == 0 or m == 0:
        raise EmptySamples("KS test needs nonempty samples")
    data = np.concatenate([x, y])
    order = np.argsort(data, kind="mergesort")
    steps = np.where(order < n, 1.0 / n, -1.0 / m)
    diffs = np.cumsum(steps)
    d = float(np.max(np.abs(diffs)))
    n_eff = n * m / (n + m)
    crit = kolmogorov_critical(alpha) / math.sqrt(n_eff)
    decision = "accept" if d <= crit + slack else "reject"
    p_bound = kolmogorov_sf(max(0.0, d - slack) * math.sqrt(n_eff))
    return KSResult(d, n_eff, p_bound, alpha, slack, decision, "ks-2sample")


def empirical_cdf(samples):
    """Right-continuous empirical CDF as a callable."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size

    def cdf(v):
        return float(np.searchsorted(x, v, side="right")) / n

    return cdf


def lag1_permutation_pvalue(series: np.ndarray, n_perm: int = 500,
                            seed: int = 0) -> float:
    """Permutation p-value for lag-1 dependence within short sequences.

    series has shape (runs, length); the statistic is the pooled lag-1
    product sum, and the null is generated by permuting each run's
    sequence independently.  Under exchangeability (i.i.d. increments)
    the observed statistic is a typical draw.
    """
    series = np.asarray(series, dtype=float)
    obs = float(np.sum(series[:, :-1] * series[:, 1:]))
    gen = np.random.default_rng(seed)
    hits = 0
    for _ in range(n_perm):
        perm = gen.permuted(series, axis=1)
        stat = float(np.sum(perm[:, :-1] * perm[:, 1:]))
        if abs(stat) >= abs(obs):
            hits += 1
    return (hits + 1) / (n_perm + 1)


def loglog_slope(ratios, probs, counts):
    """Weighted LS slope of log p against log ratio, with standard error.

    Weights follow the delta-method variance of log p-hat for binomial
    counts: var(log p) ~ (1 - p) / (n p).
    """
    r = np.log(np.asarray(ratios, dtype=float))
    p = np.asarray(probs, dtype=float)
    n = np.asarray(counts, dtype=float)
    if np.any(p <= 0):
        raise ValueError("zero probability in slope fit; increase n")
    y = np.log(p)
    w = n * p / (1.0 - p + 1e-12)
    wm_r = np.sum(w * r) / np.sum(w)
    wm_y = np.sum(w * y) / np.sum(w)
    sxx = np.sum(w * (r - wm_r) ** 2)
    slope = np.sum(w * (r - wm_r) * (y - wm_y)) / sxx
    se = math.sqrt(1.0 / sxx)
    return float(slope), float(se)
