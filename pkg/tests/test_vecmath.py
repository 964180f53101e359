"""Tests for distance kernels, the incomplete beta function, and pruning probability.

The beta function is checked against an adaptive-quadrature oracle, the pruning
probability against a rejection-sampling Monte-Carlo oracle plus an exact 2-d
circular-segment area computation. Frozen constants below were produced by the
oracles in this file.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from sngraph import vecmath
from sngraph.vecmath import PruneGeometry

# I_0.75(1.5, 0.5): quadrature oracle and the closed form
# (pi/3 - sqrt(3)/4) / (pi/2) agree on this value.
I_075_15_05 = 0.3910022189557707

# Exact 2-d value of pruning_probability(ratio=0.5) from circular segment areas:
# (outer segment - inner segment) / annulus area, see test_matches_exact_2d_segment_area.
PI_HALF_D2 = 0.39152472515689996


def quad_reg_inc_beta(x: float, a: float, b: float) -> float:
    """Adaptive-quadrature oracle for the regularized incomplete beta function."""
    val, _ = quad(
        lambda t: t ** (a - 1.0) * (1.0 - t) ** (b - 1.0),
        0.0,
        x,
        epsabs=1e-14,
        epsrel=1e-13,
        limit=400,
    )
    lbeta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    return val / math.exp(lbeta)


class TestSqEuclidean:
    def test_orthogonal_unit_vectors(self):
        assert vecmath.sq_euclidean([1.0, 0.0], [0.0, 1.0]) == 2.0

    def test_identical_vectors(self):
        v = np.array([0.3, -2.5, 7.0])
        assert vecmath.sq_euclidean(v, v) == 0.0

    def test_against_scalar_loop(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            d = int(rng.integers(1, 40))
            a = rng.normal(size=d)
            b = rng.normal(size=d)
            expected = 0.0
            for i in range(d):
                expected += (float(a[i]) - float(b[i])) ** 2
            np.testing.assert_allclose(vecmath.sq_euclidean(a, b), expected, rtol=1e-12)

    def test_accumulates_in_double_precision(self):
        # float32 inputs whose squared differences underflow float32 addition
        a = np.array([1e4] + [0.0] * 64, dtype=np.float32)
        b = np.array([0.0] + [1.0] * 64, dtype=np.float32)
        got = vecmath.sq_euclidean(a, b)
        assert got == 1e8 + 64.0  # float32 accumulation would round the +64 away

    def test_shape_mismatch_raises(self):
        with pytest.raises(ValueError):
            vecmath.sq_euclidean([1.0, 2.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            vecmath.sq_euclidean(np.ones((2, 2)), np.ones((2, 2)))


class TestRegIncBeta:
    def test_endpoints(self):
        assert vecmath.reg_inc_beta(0.0, 2.0, 3.0) == 0.0
        assert vecmath.reg_inc_beta(1.0, 2.0, 3.0) == 1.0

    def test_frozen_value(self):
        np.testing.assert_allclose(vecmath.reg_inc_beta(0.75, 1.5, 0.5), I_075_15_05, atol=1e-12)

    def test_against_quadrature_oracle(self):
        for a in [0.5, 1.0, 1.5, 2.5, 4.5, 8.5, 12.5, 32.5]:
            for b in [0.5, 1.0, 2.0, 5.5]:
                for x in [1e-6, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9375, 0.99]:
                    got = vecmath.reg_inc_beta(x, a, b)
                    want = quad_reg_inc_beta(x, a, b)
                    assert abs(got - want) <= 1e-10, (x, a, b)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            vecmath.reg_inc_beta(-0.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            vecmath.reg_inc_beta(1.1, 1.0, 1.0)
        with pytest.raises(ValueError):
            vecmath.reg_inc_beta(0.5, 0.0, 1.0)
        with pytest.raises(ValueError):
            vecmath.reg_inc_beta(0.5, 1.0, -2.0)

    @given(
        # keep 1 - x exactly representable so the mirrored call sees the same point
        x=st.floats(1e-6, 1.0 - 1e-6),
        a=st.floats(0.05, 50.0),
        b=st.floats(0.05, 50.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_symmetry_and_range(self, x, a, b):
        v = vecmath.reg_inc_beta(x, a, b)
        assert 0.0 <= v <= 1.0
        mirrored = 1.0 - vecmath.reg_inc_beta(1.0 - x, b, a)
        assert abs(v - mirrored) <= 1e-9

    def test_monotone_in_x(self):
        xs = np.linspace(0.0, 1.0, 101)
        vals = [vecmath.reg_inc_beta(float(x), 4.5, 0.5) for x in xs]
        assert all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))


class TestPruneGeometry:
    def test_rejects_bad_ratio(self):
        with pytest.raises(ValueError):
            PruneGeometry(0.0, 2)
        with pytest.raises(ValueError):
            PruneGeometry(1.0, 2)
        with pytest.raises(ValueError):
            PruneGeometry(-0.5, 2)

    def test_rejects_bad_dim(self):
        with pytest.raises(ValueError):
            PruneGeometry(0.5, 1)


class TestPruningProbability:
    def test_matches_exact_2d_segment_area(self):
        # Independent oracle: in 2-d the pruned region is (outer circular
        # segment beyond the bisector) minus (inner segment), over the annulus.
        r = 0.5
        h = r / 2.0
        outer = math.acos(h) - h * math.sqrt(1.0 - h * h)
        inner = r * r * math.acos(h / r) - h * math.sqrt(r * r - h * h)
        exact = (outer - inner) / (math.pi * (1.0 - r * r))
        np.testing.assert_allclose(exact, PI_HALF_D2, atol=1e-15)
        got = vecmath.pruning_probability(PruneGeometry(0.5, 2))
        np.testing.assert_allclose(got, PI_HALF_D2, atol=1e-12)

    def test_matches_monte_carlo_2d(self):
        geom = PruneGeometry(0.5, 2)
        analytic = vecmath.pruning_probability(geom)
        mc, kept = vecmath.pruning_probability_mc(geom, 1_000_000, seed=7)
        assert kept > 500_000
        assert abs(analytic - mc) <= 0.005

    def test_monte_carlo_rejects_naive_variant(self):
        # The cap-at-full-distance variant is far outside sampling noise;
        # the bisector variant is the one the geometry actually produces.
        geom = PruneGeometry(0.5, 2)
        mc, kept = vecmath.pruning_probability_mc(geom, 1_000_000, seed=7)
        se = math.sqrt(mc * (1.0 - mc) / kept)
        assert abs(vecmath.pruning_probability(geom, bisector=True) - mc) <= 3 * se
        assert abs(vecmath.pruning_probability(geom, bisector=False) - mc) > 10 * se

    def test_small_ratio_limit_is_one_half(self):
        for d in (2, 8, 32):
            p = vecmath.pruning_probability(PruneGeometry(1e-9, d))
            np.testing.assert_allclose(p, 0.5, atol=1e-9)

    def test_bounds_all_dims(self):
        for d in range(2, 65):
            lo, hi = vecmath.pruning_probability_bounds(d)
            assert 0.0 < lo < hi == 0.5
            for ratio in np.linspace(0.01, 0.99, 25):
                p = vecmath.pruning_probability(PruneGeometry(float(ratio), d))
                assert lo < p < hi, (d, ratio, p)

    def test_2d_lower_bound_one_third(self):
        for ratio in np.linspace(0.001, 0.999, 100):
            p = vecmath.pruning_probability(PruneGeometry(float(ratio), 2))
            assert p >= 1.0 / 3.0

    def test_strictly_decreasing_in_ratio(self):
        for d in (2, 4, 8, 16, 64):
            ratios = np.linspace(0.01, 0.99, 50)
            vals = [vecmath.pruning_probability(PruneGeometry(float(r), d)) for r in ratios]
            assert all(b < a for a, b in zip(vals, vals[1:])), d

    def test_monte_carlo_deterministic(self):
        geom = PruneGeometry(0.3, 4)
        assert vecmath.pruning_probability_mc(geom, 20_000, seed=3) == \
            vecmath.pruning_probability_mc(geom, 20_000, seed=3)


class TestSampleUniformBall:
    def test_deterministic(self):
        a = vecmath.sample_uniform_ball(100, 5, 2.0, seed=11)
        b = vecmath.sample_uniform_ball(100, 5, 2.0, seed=11)
        np.testing.assert_array_equal(a, b)
        c = vecmath.sample_uniform_ball(100, 5, 2.0, seed=12)
        assert not np.array_equal(a, c)

    def test_inside_ball(self):
        pts = vecmath.sample_uniform_ball(10_000, 3, 1.5, seed=0)
        assert pts.shape == (10_000, 3)
        norms = np.linalg.norm(pts, axis=1)
        assert norms.max() <= 1.5 + 1e-12

    def test_radial_cdf(self):
        # For a uniform ball, (r / rho0)^d is Uniform(0,1), so its mean is 1/2.
        for d in (2, 8):
            pts = vecmath.sample_uniform_ball(100_000, d, 1.0, seed=5)
            u = np.linalg.norm(pts, axis=1) ** d
            assert abs(u.mean() - 0.5) <= 0.01

    def test_centered(self):
        pts = vecmath.sample_uniform_ball(100_000, 4, 1.0, seed=9)
        assert np.abs(pts.mean(axis=0)).max() <= 0.01

    def test_validation(self):
        with pytest.raises(ValueError):
            vecmath.sample_uniform_ball(0, 3, 1.0, seed=0)
        with pytest.raises(ValueError):
            vecmath.sample_uniform_ball(5, 3, 0.0, seed=0)
