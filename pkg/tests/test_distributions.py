import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hotstove.distributions import (
    DiscreteSymmetric,
    FiniteDiscrete,
    Laplace,
    Normal,
    normal_cdf,
    normal_pdf,
    sample,
    truncated_normal_mean_above,
    truncated_normal_mean_below,
)
from hotstove.quadrature import integrate
from hotstove.rng import derive_trial_rng, trial_keys, uniforms

SQRT_2_OVER_PI = math.sqrt(2 / math.pi)


def _many(dist, n, seed=11):
    u = uniforms(trial_keys(seed, np.arange(n, dtype=np.uint64)), 0)
    return np.asarray(dist.ppf(u))


class TestConstruction:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ValueError):
            FiniteDiscrete(((0.0, 0.5), (1.0, 0.4)))

    def test_symmetric_support_is_mirrored(self):
        d = DiscreteSymmetric(2.0, ((1.0, 0.25), (3.0, 0.25)))
        assert d.support == ((-1.0, 0.25), (1.0, 0.25), (3.0, 0.25), (5.0, 0.25))
        assert d.mean == 2.0

    def test_symmetric_rejects_zero_offset(self):
        with pytest.raises(ValueError):
            DiscreteSymmetric(0.0, ((0.0, 0.5),))

    @pytest.mark.parametrize("bad", [dict(variance=0.0), dict(variance=-1.0), dict(variance=math.inf)])
    def test_normal_variance(self, bad):
        with pytest.raises(ValueError):
            Normal(0.0, **bad)


class TestSample:
    def test_reproducible(self):
        a = [sample(Normal(), derive_trial_rng(3, 0)) for _ in range(1)]
        s1, s2 = derive_trial_rng(3, 0), derive_trial_rng(3, 0)
        assert [sample(Normal(), s1) for _ in range(20)] == [sample(Normal(), s2) for _ in range(20)]
        assert a[0] == sample(Normal(), derive_trial_rng(3, 0))

    def test_rademacher_support(self):
        x = _many(DiscreteSymmetric(0.0, ((1.0, 0.5),)), 10_000)
        assert set(np.unique(x)) == {-1.0, 1.0}

    def test_laplace_median(self):
        n = 100_000
        x = _many(Laplace(0.0, 1.0), n)
        assert abs(np.mean(x <= 0) - 0.5) < 3 * math.sqrt(0.25 / n)

    @pytest.mark.parametrize(
        "dist",
        [
            Normal(0.3, 2.0),
            Laplace(-1.0, 0.5),
            DiscreteSymmetric(1.0, ((1.0, 0.3), (3.0, 0.2))),
            FiniteDiscrete(((-1.0, 0.2), (0.5, 0.5), (2.0, 0.3))),
        ],
    )
    def test_mean_within_four_se(self, dist):
        n = 1_000_000
        x = _many(dist, n)
        assert abs(x.mean() - dist.mean) < 4 * math.sqrt(dist.variance / n)
        assert abs(x.var() / dist.variance - 1) < 0.02


class TestNormalHelpers:
    def test_pdf_at_zero(self):
        assert normal_pdf(0, 0, 1) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)

    def test_cdf_at_zero(self):
        assert normal_cdf(0, 0, 1) == 0.5

    def test_cdf_196(self):
        # oracle: mpmath ncdf(1.96) at 40 digits = 0.97500210485177956...
        assert normal_cdf(1.96, 0, 1) == pytest.approx(0.9750, abs=5e-4)
        assert normal_cdf(1.96, 0, 1) == pytest.approx(0.97500210485177956, abs=1e-12)

    def test_cdf_against_mpmath(self):
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 30
        for x in np.linspace(-8, 8, 81):
            assert abs(normal_cdf(float(x)) - float(mp.ncdf(x))) <= 1e-12

    @given(st.floats(-30, 30), st.floats(0.01, 100))
    def test_cdf_symmetry(self, x, var):
        assert normal_cdf(-x, 0, var) + normal_cdf(x, 0, var) == pytest.approx(1.0, abs=1e-15)

    def test_cdf_monotone(self):
        xs = np.linspace(-40, 40, 4001)
        vals = [normal_cdf(float(x)) for x in xs]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_pdf_integrates_to_one(self):
        res = integrate(lambda x: np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi), [-10, 0, 10])
        assert abs(res.value - 1.0) < 1e-8


class TestTruncatedMeans:
    def test_above_at_zero(self):
        assert truncated_normal_mean_above(0, 1) == pytest.approx(SQRT_2_OVER_PI, rel=1e-14)
        assert truncated_normal_mean_above(0, 1 / math.sqrt(2)) == pytest.approx(0.5641895835, abs=1e-10)

    def test_above_at_one(self):
        # oracle: rejection sampling at 1e7 draws gave 1.52515 (se 3.5e-4)
        assert truncated_normal_mean_above(1, 1) == pytest.approx(1.5251, abs=1e-3)

    def test_above_at_one_rejection_sampling(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal(2_000_000)
        tail = x[x > 1]
        se = tail.std() / math.sqrt(tail.size)
        assert abs(tail.mean() - truncated_normal_mean_above(1, 1)) < 4 * se

    def test_below(self):
        assert truncated_normal_mean_below(0, 1) == pytest.approx(-SQRT_2_OVER_PI, rel=1e-14)
        assert truncated_normal_mean_below(0, 5) == pytest.approx(-5 * SQRT_2_OVER_PI, rel=1e-14)

    @pytest.mark.parametrize("sd", [0.1, 1.0, 5.0])
    def test_total_expectation(self, sd):
        for c in np.linspace(-5, 5, 101):
            p = normal_cdf(c, 0, sd * sd)
            total = p * truncated_normal_mean_below(c, sd) + (1 - p) * truncated_normal_mean_above(c, sd)
            assert abs(total) < 1e-10

    def test_above_increasing_and_exceeds_c(self):
        cs = np.linspace(-20, 60, 2001)
        vals = [truncated_normal_mean_above(float(c), 1.0) for c in cs]
        assert all(v > c for v, c in zip(vals, cs))
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_tail_switch_is_continuous(self):
        lo = truncated_normal_mean_above(8.0 - 1e-9, 1.0)
        hi = truncated_normal_mean_above(8.0 + 1e-9, 1.0)
        assert hi - lo == pytest.approx(0, abs=1e-8)

    def test_far_tail_no_overflow(self):
        assert truncated_normal_mean_above(50, 1) == pytest.approx(50.01996, rel=1e-6)
        assert truncated_normal_mean_below(-50, 1) == pytest.approx(-50.01996, rel=1e-6)
