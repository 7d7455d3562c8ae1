import json
import math
from pathlib import Path

import numpy as np
import pytest

from percolab import rng
from percolab.errors import ConfigInvalid, EmptySamples
from percolab.harness.experiments import (compare_hitting, hitting_domain,
                                          mc_crossing, mc_hitting)
from percolab.harness.manifest import config_hash
from percolab.harness.runner import parse_domain, run_experiment
from percolab.harness.stats import (EstimateRecord, empirical_cdf,
                                    kolmogorov_critical, kolmogorov_sf,
                                    ks_1sample, ks_2samp, loglog_slope)


class TestStats:
    def test_kolmogorov_sf_against_scipy(self):
        from scipy.special import kolmogorov
        for x in [0.3, 0.8, 1.0, 1.36, 1.63, 2.0]:
            assert kolmogorov_sf(x) == pytest.approx(float(kolmogorov(x)),
                                                     abs=1e-12)

    def test_critical_value_inverts_sf(self):
        for alpha in (0.05, 0.01):
            x = kolmogorov_critical(alpha)
            assert kolmogorov_sf(x) == pytest.approx(alpha, rel=1e-6)

    def test_ks2_identical_vectors(self):
        x = np.linspace(0, 1, 100)
        res = ks_2samp(x, x)
        assert res.statistic == 0.0
        assert res.decision == "accept"

    def test_ks2_detects_gross_mismatch(self):
        gen = np.random.default_rng(1)
        x = gen.uniform(0, 1, 2000)
        y = np.minimum(2 * gen.uniform(0, 1, 2000), 1.0)  # F(2s ^ 1)
        res = ks_2samp(x, y, alpha=0.01)
        assert res.decision == "reject"

    def test_ks2_matches_scipy(self):
        from scipy.stats import ks_2samp as scipy_ks
        gen = np.random.default_rng(2)
        x = gen.normal(size=300)
        y = gen.normal(size=211)
        assert ks_2samp(x, y).statistic == pytest.approx(
            float(scipy_ks(x, y).statistic), abs=1e-12)

    def test_ks1_single_sample_is_legal(self):
        res = ks_1sample([0.4], lambda s: s)
        assert 0 <= res.statistic <= 1

    def test_empty_samples_raise(self):
        with pytest.raises(EmptySamples):
            ks_2samp([], [1.0])

    def test_bernoulli_record_fields(self):
        est = EstimateRecord.from_hits(np.array([1, 0, 1, 1]))
        assert est.point_estimate == 0.75
        assert est.std_error == pytest.approx(
            math.sqrt(0.75 * 0.25 / 4))
        assert est.ci95[0] == pytest.approx(0.75 - 1.96 * est.std_error)

    def test_ci_coverage_on_synthetic_coin(self):
        # 95% interval covers p = 0.5 in at least 93% of 200 repetitions
        gen = np.random.default_rng(3)
        cover = 0
        for _ in range(200):
            hits = gen.integers(0, 2, size=400)
            est = EstimateRecord.from_hits(hits)
            if est.ci95[0] <= 0.5 <= est.ci95[1]:
                cover += 1
        assert cover >= 186

    def test_std_error_halves_when_n_quadruples(self):
        est1 = mc_crossing("lattice_rhombus:16", 1 / 16, 2000, 5)
        est2 = mc_crossing("lattice_rhombus:16", 1 / 16, 8000, 5)
        assert est2.std_error == pytest.approx(est1.std_error / 2, rel=0.2)

    def test_loglog_slope_recovers_power_law(self):
        ratios = [2.0, 4.0, 8.0]
        probs = [r ** -2.5 for r in ratios]
        slope, se = loglog_slope(ratios, probs, [10 ** 6] * 3)
        assert slope == pytest.approx(-2.5, abs=1e-6)


class TestCrossingExperiment:
    def test_rhombus_small_estimate_near_half(self):
        est = mc_crossing("lattice_rhombus:32", 1 / 32, 4000, 11)
        assert abs(est.point_estimate - 0.5) < 4 * est.std_error

    def test_n_zero_rejected(self):
        with pytest.raises(ConfigInvalid):
            mc_crossing("lattice_rhombus:8", 1 / 8, 0, 1)

    def test_determinism_across_thread_counts(self):
        import numba
        md = "lattice_rhombus:16"
        numba.set_num_threads(1)
        a = mc_crossing(md, 1 / 16, 3000, 21).point_estimate
        numba.set_num_threads(2)
        b = mc_crossing(md, 1 / 16, 3000, 21).point_estimate
        numba.set_num_threads(1)
        assert a == b


class TestRunner:
    def test_minimal_crossing_config(self, tmp_path):
        config = {
            "experiment": {"kind": "crossing", "n": 500},
            "domain": {"kind": "lattice_rhombus", "side": 12},
            "check": {"target": 0.5, "sigmas": 4.0},
        }
        code, rows = run_experiment(config, root_seed=5, workers=1,
                                    out_dir=tmp_path, check=True)
        assert code == 0
        text = (tmp_path / "results.csv").read_text()
        assert "p_blue_crossing" in text
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["config_hash"] == config_hash(config)
        assert manifest["root_seed"] == 5

    def test_byte_identical_across_worker_counts(self, tmp_path):
        config = {
            "experiment": {"kind": "crossing", "n": 2000},
            "domain": {"kind": "lattice_rhombus", "side": 16},
        }
        run_experiment(config, root_seed=9, workers=1,
                       out_dir=tmp_path / "w1")
        run_experiment(config, root_seed=9, workers=2,
                       out_dir=tmp_path / "w2")
        assert ((tmp_path / "w1" / "results.csv").read_bytes()
                == (tmp_path / "w2" / "results.csv").read_bytes())

    def test_unknown_kind_is_config_error(self, tmp_path):
        with pytest.raises(ConfigInvalid):
            run_experiment({"experiment": {"kind": "nope"}}, out_dir=tmp_path)

    def test_parse_domain_rect_corners(self):
        md = parse_domain({"kind": "rect", "width": 2.0, "height": 1.0,
                           "marks_at_corners": ["z1", "z2", "z3", "z4"],
                           "first_corner": 3})
        assert list(md.marks) == ["z1", "z2", "z3", "z4"]
        assert md.marks["z1"] == pytest.approx(5 / 6)

    def test_cli_goldens_prints_table(self, capsys):
        from percolab.harness.cli import main
        assert main(["goldens"]) == 0
        out = capsys.readouterr().out
        assert "rect_aspect2_hard" in out

    def test_cli_bad_config_exits_2(self, tmp_path):
        from percolab.harness.cli import main
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"experiment": {"kind": "hitting"}}))
        assert main(["crossing", "--config", str(cfg)]) == 2


class TestCompare:
    def test_identical_samples_d_zero(self):
        x = np.linspace(0.01, 0.99, 50)
        res = compare_hitting(x, x)
        assert res.statistic == 0.0

    def test_single_sample_hitting_is_legal(self):
        md = hitting_domain(0.05)
        samples, ks = mc_hitting(md, 0.05, 1, 3)
        assert len(samples) == 1
        assert 0 <= ks.statistic <= 1


class TestSeeding:
    def test_derive_seed_independent_of_order(self):
        a = [rng.derive_seed(5, "x", i) for i in range(10)]
        b = [rng.derive_seed(5, "x", i) for i in reversed(range(10))]
        assert a == list(reversed(b))
        assert len(set(a)) == 10

    def test_streams_do_not_collide(self):
        a = {rng.derive_seed(5, "x", i) for i in range(100)}
        b = {rng.derive_seed(5, "y", i) for i in range(100)}
        assert not a & b
