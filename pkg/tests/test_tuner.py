"""Cost model, marginal-optimality rounding, probe tuning, and the search-based reference tuner."""

import math

import numpy as np
import pytest

from sngraph import dataset
from sngraph.dataset import brute_force_knn
from sngraph.tuner import (
    CostConstants,
    TuneReport,
    construction_cost,
    golden_section_tune,
    marginal_optimal_r,
    optimize_r,
    probe_r_for,
)

# Frozen by hand: k' = 1.2^2 * 60 / ln(100000), checked against a 40-digit
# Decimal evaluation (7.5046086472881915...), and r_star = round(k' * ln(1e5)).
K_PRIME_EXAMPLE = 7.50460864728819
R_STAR_EXAMPLE = 86


class TestCostModel:
    def test_plug_in_value(self):
        k = CostConstants(c1=1, b1=0, c2=1, b2=0, c3=1, b3=0)
        # n = e makes ln n = 1: cost = e * (R + R^2/alpha + alpha*R^3) = 3e at R=alpha=1
        assert construction_cost(math.e, 1, 1.0, k) == pytest.approx(3.0 * math.e, rel=1e-12)

    def test_increasing_in_r(self):
        costs = [construction_cost(10_000, r, 1.5) for r in range(1, 200, 7)]
        assert all(b > a for a, b in zip(costs, costs[1:]))

    def test_alpha_argmin_matches_stationary_point(self):
        # d(cost)/d(alpha) = 0 at alpha^2 = c2 * ln n / (c3 * R)
        k = CostConstants(c2=2.0, c3=0.5)
        grid = np.arange(1.0, 6.0, 0.01)
        costs = [construction_cost(100_000, 3, float(a), k) for a in grid]
        best = grid[int(np.argmin(costs))]
        assert best == pytest.approx(3.917980000794666, abs=0.01)

    def test_homogeneous_in_constants(self):
        k1 = CostConstants(c1=0.3, b1=2.0, c2=1.7, b2=0.1, c3=0.9, b3=4.0)
        k2 = CostConstants(*(5.0 * v for v in (0.3, 2.0, 1.7, 0.1, 0.9, 4.0)))
        c1 = construction_cost(5_000, 17, 1.3, k1)
        assert construction_cost(5_000, 17, 1.3, k2) == pytest.approx(5.0 * c1, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            CostConstants(c1=-1.0)
        with pytest.raises(ValueError):
            CostConstants(b2=math.nan)
        with pytest.raises(ValueError):
            construction_cost(100, 0, 1.0)
        with pytest.raises(ValueError):
            construction_cost(100, 5, 0.5)


class TestMarginalOptimalR:
    def test_exact_arithmetic(self):
        # ln n = 10 exactly by passing n = e^10; k' = 5, alpha = 1 -> 50
        assert marginal_optimal_r(math.exp(10.0), 1.0, 5.0) == 50

    def test_clamps(self):
        assert marginal_optimal_r(1000, 1e6, 5.0) == 1
        assert marginal_optimal_r(10, 1.0, 1e9) == 9

    def test_frozen_example(self):
        assert marginal_optimal_r(100_000, 1.0, K_PRIME_EXAMPLE) == R_STAR_EXAMPLE

    def test_doubling_alpha_quarters_r(self):
        for k_prime in (3.0, 7.5, 40.0, 123.4):
            r1 = marginal_optimal_r(50_000, 1.0, k_prime)
            r2 = marginal_optimal_r(50_000, 2.0, k_prime)
            assert abs(r2 - r1 / 4.0) <= 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            marginal_optimal_r(1, 1.0, 5.0)
        with pytest.raises(ValueError):
            marginal_optimal_r(100, 0.9, 5.0)
        with pytest.raises(ValueError):
            marginal_optimal_r(100, 1.0, 0.0)


class TestProbeR:
    def test_exact_cubes_and_spot_values(self):
        assert probe_r_for(8) == 4
        assert probe_r_for(27) == 9
        assert probe_r_for(64) == 16
        assert probe_r_for(1000) == 100
        assert probe_r_for(10) == 5
        assert probe_r_for(200) == 35
        assert probe_r_for(4000) == 252

    def test_is_ceiling(self):
        for m in range(8, 3000, 13):
            r = probe_r_for(m)
            assert (r - 1) ** 3 < m * m <= r ** 3


class TestOptimizeR:
    def test_equal_alphas_return_rounded_mean_degree(self):
        ds = dataset.gen_uniform(400, 4, 1.0, seed=11)
        rep = optimize_r(ds, 1.25, 1.25, seed=3)
        assert rep.r_star == round(rep.r_bar)

    def test_report_identities(self):
        ds = dataset.gen_uniform(500, 6, 1.0, seed=12)
        rep = optimize_r(ds, 1.3, 1.1, seed=4)
        assert rep.r_probe == probe_r_for(500)
        k_expected = rep.alpha1 ** 2 * rep.r_bar / math.log(500)
        assert rep.k_prime == pytest.approx(k_expected, rel=1e-9)
        assert rep.r_star == marginal_optimal_r(500, rep.alpha2, rep.k_prime)

    def test_probe_subsample_rescales_logs(self):
        ds = dataset.gen_uniform(600, 4, 1.0, seed=13)
        rep = optimize_r(ds, 1.2, 1.2, seed=5, probe_subsample=200)
        assert rep.r_probe == probe_r_for(200)
        k_expected = 1.2 ** 2 * rep.r_bar / math.log(200)
        assert rep.k_prime == pytest.approx(k_expected, rel=1e-9)
        # r_star targets the full dataset size, not the probe size
        assert rep.r_star == marginal_optimal_r(600, 1.2, rep.k_prime)

    def test_deterministic(self):
        ds = dataset.gen_uniform(300, 4, 1.0, seed=14)
        a = optimize_r(ds, 1.2, 1.0, seed=6)
        b = optimize_r(ds, 1.2, 1.0, seed=6)
        assert a == b

    def test_json_has_exactly_the_six_fields(self):
        import json

        ds = dataset.gen_uniform(256, 4, 1.0, seed=15)
        rep = optimize_r(ds, 1.2, 1.5, seed=7)
        payload = json.loads(rep.to_json())
        assert sorted(payload) == ["alpha1", "alpha2", "k_prime", "r_bar", "r_probe", "r_star"]
        assert payload["r_star"] == rep.r_star

    def test_validation(self):
        ds = dataset.gen_uniform(100, 4, 1.0, seed=16)
        with pytest.raises(ValueError):
            optimize_r(ds, 0.9, 1.0)
        with pytest.raises(ValueError):
            optimize_r(ds, 1.0, 1.0, probe_subsample=4)
        with pytest.raises(ValueError):
            optimize_r(ds, 1.0, 1.0, probe_subsample=101)
        with pytest.raises(ValueError):
            optimize_r(dataset.gen_uniform(6, 4, 1.0, seed=1), 1.0, 1.0)


class TestGoldenSection:
    def test_finds_a_high_recall_cap(self):
        ds = dataset.gen_uniform(300, 4, 1.0, seed=20)
        queries = dataset.gen_uniform(30, 4, 1.0, seed=21)
        gt = brute_force_knn(ds, queries, k=5)
        rep = golden_section_tune(ds, queries, gt, alpha=1.2, l_search=20, k=5, r_lo=2, r_hi=40, seed=8)
        assert 2 <= rep.r_star <= 40
        evald = {r: rec for r, rec, _ in rep.evaluations}
        assert rep.recall == max(evald.values())
        assert rep.recall == evald[rep.r_star]
        # ties broken toward the sparser cap
        assert all(rep.r_star <= r for r, rec in evald.items() if rec == rep.recall)

    def test_deterministic_and_distinct_evaluations(self):
        ds = dataset.gen_uniform(200, 4, 1.0, seed=22)
        queries = dataset.gen_uniform(20, 4, 1.0, seed=23)
        gt = brute_force_knn(ds, queries, k=3)
        a = golden_section_tune(ds, queries, gt, 1.1, 15, 3, 2, 30, seed=9)
        b = golden_section_tune(ds, queries, gt, 1.1, 15, 3, 2, 30, seed=9)
        assert a.r_star == b.r_star
        assert [e[:2] for e in a.evaluations] == [e[:2] for e in b.evaluations]
        rs = [r for r, _, _ in a.evaluations]
        assert len(rs) == len(set(rs))

    def test_validation(self):
        ds = dataset.gen_uniform(50, 4, 1.0, seed=24)
        queries = dataset.gen_uniform(5, 4, 1.0, seed=25)
        gt = brute_force_knn(ds, queries, k=2)
        with pytest.raises(ValueError):
            golden_section_tune(ds, queries, gt, 1.0, 10, 2, 10, 10, seed=1)
        with pytest.raises(ValueError):
            golden_section_tune(ds, queries, gt, 1.0, 10, 2, 5, 50, seed=1)
