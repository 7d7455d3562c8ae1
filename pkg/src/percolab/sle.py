"""Chordal Loewner evolution in the upper half-plane, kappa = 6 by default.

The discretization grows one vertical slit per step: over a step of
capacity tau at driving position W the uniformizing map is
h(z) = W + sqrt((z - W)^2 + 4 tau), normalized to z + 2 tau / z + O(1/z^2)
at infinity, so capacity is exactly additive along the chain.  The trace
tip is evaluated by backward composition of the inverse slit maps with the
closed-form slit-tip value at the innermost step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, rng
from .conformal import MarkedDomain, MobiusMap, halfplane_to_disc_marked
from .errors import ResolutionTooCoarse

KAPPA = 6.0


@dataclass(frozen=True)
class DrivingFunction:
    """Sampled driving path W_0 = 0, W_k - W_{k-1} ~ N(0, kappa dt)."""

    dt: float
    samples: np.ndarray
    seed: int | None = None
    kappa: float = KAPPA

    @property
    def total_time(self) -> float:
        return (len(self.samples) - 1) * self.dt


@dataclass(frozen=True)
class LoewnerState:
    """Composed slit-map chain with its trace in capacity time."""

    dt: float
    samples: np.ndarray  # driving values W_0..W_N
    trace: np.ndarray  # trace points, trace[0] = 0
    kappa: float = KAPPA

    @property
    def capacity_time(self) -> float:
        return (len(self.samples) - 1) * self.dt

    def map_forward(self, z: complex, upto: int | None = None) -> complex:
        """Evaluate the composed uniformizing map g_{t_n} at z."""
        n = len(self.samples) - 1 if upto is None else upto
        w = self.samples
        for k in range(1, n + 1):
            d = z - w[k]
            z = w[k] + _sqrt_upper(d * d + 4.0 * self.dt)
        return z


@dataclass(frozen=True)
class HullSnapshot:
    """State at a semi-ball stopping time."""

    stopping_index: int
    tip: complex
    driving_at_stop: float
    tau_j: float


def _sqrt_upper(z) -> complex:
    w = complex(z) ** 0.5
    if w.imag < 0:
        w = -w
    return w


def sample_driving(dt: float, total_time: float, seed: int,
                   kappa: float = KAPPA) -> DrivingFunction:
    """Seeded driving path on a uniform capacity grid (counter-based PRNG)."""
    if dt <= 0 or total_time < dt:
        raise ValueError("need dt > 0 and total_time >= dt")
    n = math.ceil(total_time / dt)
    gen = np.random.Generator(np.random.Philox(key=seed))
    steps = gen.standard_normal(n) * math.sqrt(kappa * dt)
    w = np.concatenate([[0.0], np.cumsum(steps)])
    return DrivingFunction(dt, w, seed, kappa)


def _tip_backward(wvals, dt, n) -> complex:
    """Tip after steps 1..n: inverse slit maps applied to the newest tip."""
    z = complex(wvals[n], 2.0 * math.sqrt(dt))
    for k in range(n - 1, 0, -1):
        d = z - wvals[k]
        z = wvals[k] + _sqrt_upper(d * d - 4.0 * dt)
    return z


def loewner_trace(w: DrivingFunction) -> LoewnerState:
    """Trace of the slit-map chain driven by w, in capacity parametrization."""
    n = len(w.samples) - 1
    trace = np.empty(n + 1, dtype=complex)
    trace[0] = 0.0
    for m in range(1, n + 1):
        trace[m] = _tip_backward(w.samples, w.dt, m)
    return LoewnerState(w.dt, np.asarray(w.samples, dtype=float), trace, w.kappa)


def capacity_coefficient(state: LoewnerState, upto: int | None = None) -> float:
    """The 1/z coefficient of the composed map, fitted at large |z|.

    Matches 2 * capacity time for an exact chain; the fit uses a complex
    least-squares expansion in powers of 1/z on the imaginary axis.
    """
    n = len(state.samples) - 1 if upto is None else upto
    scale = max(1.0, float(np.max(np.abs(state.trace[: n + 1]))),
                2.0 * math.sqrt(n * state.dt))
    radii = scale * np.geomspace(20.0, 160.0, 8)
    zs = 1j * radii
    vals = np.array([(state.map_forward(z, n) - z) * z for z in zs])
    basis = np.vander(1.0 / zs, N=6, increasing=True)
    coef, *_ = np.linalg.lstsq(basis, vals, rcond=None)
    return float(coef[0].real)


def first_exit_semiball(state: LoewnerState, eps: float,
                        from_index: int = 0) -> HullSnapshot:
    """First index past from_index where the recentred image trace leaves
    the semi-ball of radius eps.

    The image of the ongoing trace under the uniformizing map at the
    current stop, recentred so the current tip sits at 0, is the tip of
    the sub-chain of steps from_index+1, ..., n; the capacity increment
    tau_j obeys tau_j <= eps^2 / 2.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if state.dt > eps * eps / 200.0 * (1 + 1e-12):
        raise ResolutionTooCoarse(
            f"dt = {state.dt} too coarse for eps = {eps}; need dt <= eps^2/200")
    w = state.samples
    n_total = len(w) - 1
    i = from_index
    rel = w[i:] - w[i]
    for m in range(1, n_total - i + 1):
        z = _tip_backward(rel, state.dt, m)
        if abs(z) >= eps:
            n = i + m
            return HullSnapshot(n, complex(state.trace[n]), float(w[n]),
                                m * state.dt)
    raise ResolutionTooCoarse("trace ended inside the semi-ball; extend the driving")


def polygonal_approximation(state: LoewnerState, eps: float) -> np.ndarray:
    """Tips at successive semi-ball stopping times, joined by segments."""
    tips = [0.0 + 0.0j]
    idx = 0
    n_total = len(state.samples) - 1
    while True:
        try:
            snap = first_exit_semiball(state, eps, idx)
        except ResolutionTooCoarse:
            break
        tips.append(snap.tip)
        idx = snap.stopping_index
        if idx >= n_total:
            break
    return np.array(tips)


def stopping_increments(n_runs: int, eps: float, n_stops: int, root_seed: int,
                        kappa: float = KAPPA, dt: float | None = None):
    """Capacity and recentred-driving increments at successive stops.

    Runs the fixed-step chain with dt = eps^2/200 (the stopping-detection
    rule) for n_runs independent seeds; returns (tau, xi) arrays of shape
    (n_runs, n_stops).
    """
    if dt is None:
        dt = eps * eps / 200.0
    if dt > eps * eps / 200.0 * (1 + 1e-12):
        raise ResolutionTooCoarse("dt too coarse for the requested eps")
    seeds = np.array(
        [rng.derive_seed(root_seed, "sle-stop", i) & 0xFFFFFFFF for i in range(n_runs)],
        dtype=np.uint32,
    )
    tau, xi, status = _kernels.sle_stop_chain(seeds, eps, dt, n_stops, kappa)
    if np.any(status != 0):
        raise ResolutionTooCoarse("a stopping chain overran its step budget")
    return tau, xi


def exit_angles(n_runs: int, root_seed: int, eps: float = 1.0,
                tol: float | None = None, target_frac: float = 0.0625,
                kappa: float = KAPPA, max_n: int = 60000):
    """First-exit angles of the trace from the semi-ball of radius eps.

    Capacity steps are steered so each tip move is about target_frac of
    the distance to the circle, resolving the exit point to ~tol;
    returns (angles, capacities).
    """
    if tol is None:
        tol = 2e-3 * eps
    seeds = np.array(
        [rng.derive_seed(root_seed, "sle-hit", i) & 0xFFFFFFFF for i in range(n_runs)],
        dtype=np.uint32,
    )
    dt_max = eps * eps / 200.0
    ang, cap, status = _kernels.sle_hit_adaptive(
        seeds, eps, tol, target_frac, dt_max, kappa, max_n)
    if np.any(status != 0):
        raise ResolutionTooCoarse("an adaptive run overran its step budget")
    return ang, cap


def sle_hitting_sample(md: MarkedDomain, seed: int, tol: float = 2e-3,
                       kappa: float = KAPPA) -> float:
    """One hit fraction of the trace on the target arc c -> d of md.

    For the half-disc with the curve started at the diameter midpoint the
    trace is simulated in place (the domain is the semi-ball); for the
    disc the trace runs in the half-plane and is stopped on the preimage
    rays of the target arc.
    """
    fracs = sle_hitting_samples(md, 1, seed, tol=tol, kappa=kappa)
    return float(fracs[0])


def sle_hitting_samples(md: MarkedDomain, n_runs: int, root_seed: int,
                        tol: float = 2e-3, kappa: float = KAPPA):
    """Vectorized sle_hitting_sample; returns an array of arc fractions."""
    for name in ("a", "c", "d"):
        if name not in md.marks:
            raise ValueError("hitting needs marks 'a', 'c', 'd'")
    if md.kind == "half_disc":
        (radius,) = md.geometry
        a = md.mark_point("a")
        if abs(a) > 1e-9 * radius:
            raise ValueError("half-disc hitting starts at the diameter midpoint")
        if abs(md.mark_point("c") - radius) > 1e-9 or \
           abs(md.mark_point("d") + radius) > 1e-9:
            raise ValueError("half-disc target arc must be the semicircle c=+r, d=-r")
        ang, _ = exit_angles(n_runs, root_seed, eps=radius, tol=tol * radius,
                             kappa=kappa)
        return ang / math.pi
    if md.kind == "disc":
        return _disc_hitting(md, n_runs, root_seed, tol, kappa)
    raise ValueError("hitting samples support 'half_disc' and 'disc' domains")


def _disc_hitting(md: MarkedDomain, n_runs: int, root_seed: int, tol, kappa):
    r, center = md.geometry
    # aim the chordal curve at the midpoint of the target arc
    quad = md.with_point_on_arc("c", "d", 0.5, name="b")
    f = halfplane_to_disc_marked((md.mark_point("a") - center) / r,
                                 (quad.mark_point("b") - center) / r)
    finv = f.inverse()
    xc = float(complex(finv((md.mark_point("c") - center) / r)).real)
    xd = float(complex(finv((md.mark_point("d") - center) / r)).real)
    if not xc < 0 < xd:
        raise ValueError("unexpected boundary orientation for the disc target")
    seeds = np.array(
        [rng.derive_seed(root_seed, "sle-hit-rays", i) & 0xFFFFFFFF
         for i in range(n_runs)], dtype=np.uint32)
    xs, status = _kernels.sle_hit_rays(seeds, xc, xd, tol * min(-xc, xd),
                                       0.0625, kappa, 200000)
    if np.any(status != 0):
        raise ResolutionTooCoarse("a ray-hitting run overran its budget")
    fracs = np.empty(n_runs)
    tc = md.marks["c"]
    td = md.marks["d"]
    span = (td - tc) % 1.0
    for i, x in enumerate(xs):
        z = center + r * complex(f(float(x)))
        theta = math.atan2((z - center).imag, (z - center).real)
        t = (theta / (2 * math.pi)) % 1.0
        fracs[i] = ((t - tc) % 1.0) / span
    return fracs
