import itertools

import pytest
import numpy as np
from scipy import stats
from conformal_bands.nonparametric import (
    sign_interval,
    sign_test,
    signed_rank_null,
    walsh_averages,
    wilcoxon_interval,
    wilcoxon_signed_rank,
)


def enumerated_p_greater(values):
    values = np.asarray(values, dtype=float)
    values = values[values != 0]
    ranks = stats.rankdata(np.abs(values))
    observed = ranks[values > 0].sum()
    hits = 0
    for signs in itertools.product((0, 1), repeat=values.size):
        if ranks[np.array(signs, dtype=bool)].sum() >= observed - 1e-12:
            hits += 1
    return hits / 2 ** values.size


class TestSignTest:

    def test_counts_and_p_value(self):
        result = sign_test([1.0, 2.0, 3.0, -1.0, 0.0])
        assert (result.positives, result.nonzero, result.zeros) == (3, 4, 1)
        assert result.p_greater == pytest.approx(5 / 16)

    def test_all_zero(self):
        result = sign_test(np.zeros(6))
        assert result.p_greater == 1.0
        assert result.zeros == 6

    def test_interval_small_sample(self):
        assert sign_interval([3.0, 1.0, 5.0, 2.0, 4.0], 0.1).lo == 1.0
        assert sign_interval([3.0, 1.0, 5.0, 2.0, 4.0], 0.1).hi == 5.0

    def test_interval_unbounded_when_too_few(self):
        interval = sign_interval([1.0, 2.0, 3.0], 0.1)
        assert interval.lo == -np.inf and interval.hi == np.inf


class TestWilcoxon:

    def test_all_positive(self):
        result = wilcoxon_signed_rank([1.0, 2.0, 3.0, 4.0, 5.0])
        assert result.statistic == 15.0
        assert result.p_greater == pytest.approx(1 / 32)
        assert result.exact

    def test_null_pmf_sums_to_one(self):
        assert signed_rank_null(np.arange(1, 11)).sum() == pytest.approx(1.0)

    @pytest.mark.parametrize("values", [
        [0.3, -1.2, 2.5, 0.7, -0.1, 1.9],
        [1.0, 1.0, -2.0, 2.0, 3.0, -0.5, 0.0],
        [-4.0, -1.0, 2.0, -3.0, 5.0],
    ])
    def test_matches_sign_enumeration(self, values):
        assert wilcoxon_signed_rank(values).p_greater == pytest.approx(enumerated_p_greater(values))

    def test_normal_approximation_close_to_exact(self):
        values = np.random.default_rng(2).normal(0.2, 1.0, size=40)
        exact = wilcoxon_signed_rank(values)
        approx = wilcoxon_signed_rank(values, exact_max=0)
        assert not approx.exact
        assert approx.p_greater == pytest.approx(exact.p_greater, abs=0.01)

    def test_zeros_dropped(self):
        result = wilcoxon_signed_rank([0.0, 0.0, 1.0])
        assert (result.nonzero, result.zeros) == (1, 2)

    def test_all_zero_interval_contains_zero(self):
        values = np.zeros(12)
        assert wilcoxon_signed_rank(values).p_greater == 1.0
        assert wilcoxon_interval(values, 0.1).contains(0.0)

    def test_walsh_averages(self):
        assert np.array_equal(walsh_averages([1.0, 3.0]), [1.0, 2.0, 3.0])

    def test_interval_small_sample(self):
        interval = wilcoxon_interval([1.0, 2.0, 3.0, 4.0, 5.0], 0.1)
        assert (interval.lo, interval.hi) == (1.0, 5.0)

    def test_interval_covers_symmetric_center(self):
        values = 5.0 + np.random.default_rng(3).standard_t(3, size=60)
        assert wilcoxon_interval(values, 0.01).contains(5.0)
