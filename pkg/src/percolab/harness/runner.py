"""Experiment dispatch: config in, result files out."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .. import goldens
from ..conformal import MarkedDomain
from ..errors import ConfigInvalid, PercolabError
from . import experiments
from .manifest import (RunManifest, Stopwatch, config_hash, result_row,
                       write_results, write_samples)

DEFAULT_SEED = 20060314


def load_config(path) -> dict:
    text = Path(path).read_text()
    if str(path).endswith(".toml"):
        import tomllib

        return tomllib.loads(text)
    return json.loads(text)


def parse_domain(spec: dict):
    kind = spec.get("kind")
    if kind == "lattice_rhombus":
        side = spec.get("side")
        if not side:
            raise ConfigInvalid("lattice_rhombus needs 'side'")
        return f"lattice_rhombus:{int(side)}"
    marks = dict(spec.get("marks", {}))
    if kind == "disc":
        if "marks_deg" in spec:
            marks = {k: (math.radians(v) / (2 * math.pi)) % 1.0
                     for k, v in spec["marks_deg"].items()}
        return MarkedDomain("disc", (float(spec.get("radius", 1.0)),
                                     complex(spec.get("center", 0))), marks)
    if kind == "half_disc":
        return MarkedDomain.half_disc(spec.get("radius", 1.0), marks)
    if kind == "rect":
        w, h = float(spec["width"]), float(spec["height"])
        if "marks_at_corners" in spec:
            p = 2.0 * (w + h)
            corner_t = [0.0, w / p, (w + h) / p, (2 * w + h) / p]
            names = spec["marks_at_corners"]
            if len(names) != 4:
                raise ConfigInvalid("marks_at_corners needs 4 names")
            start = int(spec.get("first_corner", 0))
            marks = {names[i]: corner_t[(start + i) % 4] for i in range(4)}
        return MarkedDomain.rect(w, h, marks)
    if kind == "equilateral_triangle":
        return MarkedDomain.equilateral_triangle(spec["side"], marks)
    if kind == "polygon":
        verts = [complex(v[0], v[1]) for v in spec["vertices"]]
        return MarkedDomain.polygon(verts, marks)
    raise ConfigInvalid(f"unknown domain kind {kind!r}")


def run_experiment(config: dict, root_seed: int | None = None,
                   workers: int = 1, out_dir="percolab_out", check=False):
    """Dispatch one experiment; writes results.csv + manifest.json.

    Returns (exit_code, rows).  Exit code 0 on success, 3 when --check is
    set and a statistical acceptance fails.
    """
    try:
        exp = config["experiment"]
        kind = exp["kind"]
    except KeyError as e:
        raise ConfigInvalid(f"missing config key: {e}")
    seed = int(root_seed if root_seed is not None else exp.get("seed", DEFAULT_SEED))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    import numba

    numba.set_num_threads(max(1, int(workers)))
    gold = goldens.load()
    rows = []
    samples_out = None
    failed = False

    with Stopwatch() as clock:
        if kind == "crossing":
            md = parse_domain(config["domain"])
            n = int(exp["n"])
            delta = float(exp.get("delta", 0.0) or 0.0)
            est = experiments.mc_crossing(md, delta, n, seed)
            rows.append(result_row("crossing", "p_blue_crossing",
                                   est.point_estimate, est.std_error,
                                   est.ci95, est.n_samples))
            chk = config.get("check", {})
            target = chk.get("target")
            if check and target is not None:
                tol = max(float(chk.get("sigmas", 3.0)) * est.std_error,
                          float(chk.get("tol_abs", 0.0)))
                if abs(est.point_estimate - float(target)) > tol:
                    failed = True
        elif kind == "hitting":
            n = int(exp["n"])
            delta = float(exp["delta"])
            md = (parse_domain(config["domain"]) if "domain" in config
                  else experiments.hitting_domain(delta))
            slack = float(exp.get("slack", gold["ks_slack"]["hitting_half_disc"]))
            samples, ks = experiments.mc_hitting(md, delta, n, seed, slack=slack)
            samples_out = samples
            rows.append(result_row("hitting", "ks_statistic", ks.statistic,
                                   n=int(ks.n_eff),
                                   extra={"decision": ks.decision,
                                          "alpha": ks.alpha, "slack": ks.slack}))
            rows.append(result_row("hitting", "median_gap",
                                   float(np.mean(samples <= 0.5)) - 0.5,
                                   n=n))
            if check and ks.decision != "accept":
                failed = True
        elif kind == "sle":
            n = int(exp["n"])
            samples = experiments.sle_semiball_hitting(n, seed)
            samples_out = samples
            rows.append(result_row("sle", "mean_hit_fraction",
                                   float(np.mean(samples)), n=n))
        elif kind == "compare":
            n_perc = int(exp.get("n_perc", exp.get("n", 10000)))
            n_sle = int(exp.get("n_sle", exp.get("n", 10000)))
            delta = float(exp.get("delta", 0.01))
            big_r = float(exp.get("big_radius", 2.0))
            perc = experiments.perc_semiball_hitting(n_perc, seed, delta, big_r)
            sle = experiments.sle_semiball_hitting(n_sle, seed)
            slack = float(exp.get("slack", gold["ks_slack"]["compare_half_disc"]))
            ks = experiments.compare_hitting(perc, sle, slack=slack)
            samples_out = perc
            rows.append(result_row("compare", "ks_statistic", ks.statistic,
                                   n=int(ks.n_eff),
                                   extra={"decision": ks.decision,
                                          "alpha": ks.alpha, "slack": ks.slack}))
            if check and ks.decision != "accept":
                failed = True
        elif kind == "arms":
            n = int(exp["n"])
            pairs = [tuple(p) for p in exp.get(
                "radius_pairs", [[20.0, 40.0], [10.0, 40.0], [5.0, 40.0]])]
            res = experiments.arm_scaling(pairs, n, seed)
            for row in res["rows"]:
                rows.append(result_row(
                    "arms", f"p6_ratio_{row['ratio']:g}", row["p_interior"],
                    n=row["n"]))
                rows.append(result_row(
                    "arms", f"p3_boundary_ratio_{row['ratio']:g}",
                    row["p_boundary"], n=row["n"]))
            rows.append(result_row("arms", "interior_slope",
                                   res["interior_slope"],
                                   res["interior_slope_se"]))
            rows.append(result_row("arms", "boundary_slope",
                                   res["boundary_slope"],
                                   res["boundary_slope_se"]))
            if check:
                if not (res["interior_slope"] + 2 * res["interior_slope_se"] < -2.0):
                    failed = True
                if not (res["boundary_slope"] + 2 * res["boundary_slope_se"] < -1.0):
                    failed = True
        else:
            raise ConfigInvalid(f"unknown experiment kind {kind!r}")

    manifest = RunManifest(
        config_hash=config_hash(config),
        root_seed=seed,
        worker_count=int(workers),
        wall_clock=clock.elapsed,
        started_at=clock.started_at,
        params={k: v for k, v in exp.items()},
        goldens_version=gold["version"],
    )
    write_results(out / "results.csv", rows)
    manifest.write(out / "manifest.json")
    if samples_out is not None:
        write_samples(out / "samples.csv", samples_out)
    return (3 if failed else 0), rows
