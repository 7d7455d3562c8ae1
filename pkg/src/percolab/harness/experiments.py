"""The main Monte Carlo experiments, built on the compiled kernels.

All estimators are pure functions of (configuration, root seed): sample i
draws its seed from rng.derive_seed(root_seed, stream, i), so worker count
and scheduling cannot change results.
"""

from __future__ import annotations

import math

import numpy as np

from .. import rng
from ..cardy import hitting_cdf
from ..conformal import MarkedDomain
from ..engine import (AnnulusSetup, CrossingSetup, WalkSetup, run_crossing_mc,
                      run_hitting_mc, run_strands_mc)
from ..errors import ConfigInvalid
from ..exploration import BoundaryArcTarget, CircleTarget
from ..hexlattice import build_delta_approximation
from ..sle import sle_hitting_samples
from .stats import EstimateRecord, KSResult, ks_1sample, ks_2samp, loglog_slope

_HALF_DISC_T = {  # boundary fractions of the unit half-disc (perimeter 2 + pi)
    "left_corner": 0.0,
    "right_corner": 2.0 / (2.0 + math.pi),
    "arc_top": (2.0 + math.pi / 2.0) / (2.0 + math.pi),
    "diameter_mid": 1.0 / (2.0 + math.pi),
}


def mc_crossing(md, delta: float, n: int, root_seed: int,
                stream: str = "crossing") -> EstimateRecord:
    """Probability of a blue crossing from arc z1z2 to arc z3z4.

    md is a 4-marked catalogue domain, or the string "lattice_rhombus:N"
    for the exactly self-dual axial rhombus of side N.
    """
    if n <= 0:
        raise ConfigInvalid("crossing needs n >= 1")
    if isinstance(md, str):
        if not md.startswith("lattice_rhombus"):
            raise ConfigInvalid(f"unknown domain spec {md!r}")
        side = int(md.split(":", 1)[1]) if ":" in md else round(1.0 / delta)
        setup = CrossingSetup.rhombus(side)
    else:
        dom = build_delta_approximation(md, delta)
        setup = CrossingSetup(dom, marks=tuple(md.marks))
    hits = run_crossing_mc(setup, n, root_seed, stream)
    return EstimateRecord.from_hits(hits, method="mc-crossing")


def hitting_domain(delta: float, a_frac: float | None = None) -> MarkedDomain:
    """Unit half-disc with curve start a on the semicircle, target = diameter.

    a_frac positions a on the semicircle (0.5 = top); the target arc runs
    counterclockwise from c at the left corner to d at the right corner.
    """
    if a_frac is None:
        a_frac = 0.5
    t_a = (2.0 + math.pi * a_frac) / (2.0 + math.pi)
    return MarkedDomain.half_disc(
        1.0, marks={"a": t_a, "c": 0.0, "d": _HALF_DISC_T["right_corner"]})


def mc_hitting(md: MarkedDomain, delta: float, n: int, root_seed: int,
               alpha: float = 0.01, slack: float = 0.0,
               stream: str = "hitting"):
    """Exploration first-hit positions on the arc c -> d of md.

    The walk aims at the e-vertex nearest the middle of the target arc and
    stops at its first contact with the arc.  Returns (samples, KSResult
    against the exact hitting CDF).
    """
    if n <= 0:
        raise ConfigInvalid("hitting needs n >= 1")
    for name in ("a", "c", "d"):
        if name not in md.marks:
            raise ConfigInvalid("hitting domain needs marks a, c, d")
    quad = md.with_point_on_arc("c", "d", 0.5, name="b", order=("a", "c", "b", "d"))
    dom = build_delta_approximation(quad, delta)
    a, b = dom.marked["a"], dom.marked["b"]
    vc, vd = dom.marked["c"], dom.marked["d"]
    nvert = len(dom.boundary_vertices)
    ic, idx_d = dom.boundary_index(vc), dom.boundary_index(vd)
    span = (idx_d - ic) % nvert
    arc_vertices = [dom.boundary_vertices[(ic + k) % nvert] for k in range(span + 1)]
    target = BoundaryArcTarget(arc_vertices, dom=dom, c_name="c", d_name="d")
    setup = WalkSetup(dom, a, b).with_boundary_target(target)
    samples = run_hitting_mc(setup, n, root_seed, stream)
    ks = ks_1sample(samples, lambda s: hitting_cdf(md, s), alpha=alpha, slack=slack)
    return samples, ks


def perc_semiball_hitting(n: int, root_seed: int, delta: float = 0.01,
                          big_radius: float = 2.0, stream: str = "semiball"):
    """Exploration exit positions from the unit semicircle, started at 0.

    The walk lives in a half-disc of radius big_radius (any radius > 1
    yields the same continuum law), aims at the top of the big arc, and
    stops where it first leaves the unit semi-ball; positions are angles
    over pi, counterclockwise from +1 to -1.
    """
    shape = MarkedDomain.half_disc(
        big_radius,
        marks={"a": 1.0 / (2.0 + math.pi), "b": (2.0 + math.pi / 2.0) / (2.0 + math.pi)},
    )
    dom = build_delta_approximation(shape, delta)
    a, b = dom.marked["a"], dom.marked["b"]
    setup = WalkSetup(dom, a, b).with_circle_target(CircleTarget(0j, 1.0))
    return run_hitting_mc(setup, n, root_seed, stream)


def semiball_cdf(s: float) -> float:
    """Exact exit-position CDF on the unit semicircle from the origin."""
    md = MarkedDomain.half_disc(
        1.0, marks={"a": _HALF_DISC_T["diameter_mid"],
                    "c": _HALF_DISC_T["right_corner"], "d": 0.0})
    return hitting_cdf(md, s)


def compare_hitting(perc_samples, sle_samples, alpha: float = 0.01,
                    slack: float = 0.0) -> KSResult:
    """Two-sample KS between percolation and Loewner-trace hit positions."""
    return ks_2samp(perc_samples, sle_samples, alpha=alpha, slack=slack)


def sle_semiball_hitting(n: int, root_seed: int, tol: float = 2e-3):
    """Loewner-trace exit positions from the unit semicircle (fractions)."""
    md = MarkedDomain.half_disc(
        1.0, marks={"a": _HALF_DISC_T["diameter_mid"],
                    "c": _HALF_DISC_T["right_corner"], "d": 0.0})
    return sle_hitting_samples(md, n, root_seed, tol=tol)


def arm_scaling(radius_pairs, n: int, root_seed: int, mesh: float = 1.0,
                center=0j, min_interior=6, min_boundary=3):
    """Annulus arm statistics over nested radius pairs.

    For each (r_in, r_out): the probability of at least `min_interior`
    interface strands crossing the full annulus, and of at least
    `min_boundary` alternating monochromatic arms crossing the half-plane
    semi-annulus (strand count >= min_boundary - 1).  Returns a dict with
    the per-ratio table and fitted log-log slopes.
    """
    rows = []
    for j, (r_in, r_out) in enumerate(radius_pairs):
        ratio = r_out / r_in
        interior = AnnulusSetup(center, r_in, r_out, mesh=mesh)
        strands = run_strands_mc(interior, n, root_seed, f"arms-int-{j}")
        p6 = float(np.mean(strands >= min_interior))
        boundary = AnnulusSetup(complex(0.0, -mesh), r_in, r_out, mesh=mesh,
                                half_plane=True)
        strands_b = run_strands_mc(boundary, n, root_seed, f"arms-bnd-{j}")
        p3 = float(np.mean(strands_b >= (min_boundary - 1)))
        rows.append({"ratio": ratio, "r_in": r_in, "r_out": r_out, "n": n,
                     "p_interior": p6, "p_boundary": p3})
    ratios = [row["ratio"] for row in rows]
    slope6, se6 = loglog_slope(ratios, [r["p_interior"] for r in rows],
                               [r["n"] for r in rows])
    slope3, se3 = loglog_slope(ratios, [r["p_boundary"] for r in rows],
                               [r["n"] for r in rows])
    return {
        "rows": rows,
        "interior_slope": slope6,
        "interior_slope_se": se6,
        "boundary_slope": slope3,
        "boundary_slope_se": se3,
    }
