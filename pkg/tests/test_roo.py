import pytest
import numpy as np
from conformal_bands import DataSet, RegressionAlgorithm, SplitConfig, evaluate_band, roo_relaxed, roo_split_conformal
from conformal_bands.roo import rank_one_out_halfwidths, relaxed_halfwidth
from conformal_bands.splitting import split_indices


class TestRankOneOut:

    def test_hand_enumeration(self):
        widths = rank_one_out_halfwidths(np.array([1.0, 2.0, 3.0, 4.0]), 0.5)
        assert widths[3] == 2.0
        assert widths[0] == 3.0
        assert 4.0 > widths[3]

    def test_matches_explicit_removal(self):
        scores = np.random.default_rng(1).exponential(size=25)
        scores[[3, 7]] = scores[5]
        widths = rank_one_out_halfwidths(scores, 0.2)
        m = int(np.ceil(25 * 0.8))
        for i in range(25):
            assert widths[i] == np.sort(np.delete(scores, i))[m - 1]

    def test_too_few_scores(self):
        assert np.all(np.isinf(rank_one_out_halfwidths(np.array([1.0, 2.0]), 0.1)))

    def test_relaxed_rank(self):
        assert relaxed_halfwidth(np.array([4.0, 1.0, 3.0, 2.0]), 0.5) == 3.0
        assert relaxed_halfwidth(np.array([1.0, 2.0]), 0.1) == np.inf


class TestRooBand:

    @pytest.fixture
    def data(self):
        rng = np.random.default_rng(12)
        x = rng.normal(size=(40, 2))
        return DataSet(x, x[:, 1] + rng.normal(size=40))

    def test_equal_residuals_cover_every_point(self):
        y = np.array([2.0, -2.0] * 4)
        data = DataSet(np.arange(8.0).reshape(-1, 1), y)
        band = roo_split_conformal(RegressionAlgorithm("zero"), data, 0.5)
        assert np.all(band.point_halfwidths == 2.0)
        lo, hi = band.in_sample_intervals()
        assert np.all((lo <= y) & (y <= hi))

    def test_each_row_uses_other_fold(self, data):
        cfg = SplitConfig(seed=4)
        band = roo_split_conformal(RegressionAlgorithm("ols"), data, 0.1, cfg)
        first, second = split_indices(data.n, cfg)
        assert np.all(band.point_models[second] == 0)
        assert np.all(band.point_models[first] == 1)

    def test_relaxed_contains_exact(self, data):
        exact = roo_split_conformal(RegressionAlgorithm("ols"), data, 0.1)
        relaxed = roo_relaxed(RegressionAlgorithm("ols"), data, 0.1)
        assert np.all(relaxed.point_halfwidths >= exact.point_halfwidths)

    def test_training_point_uses_own_halfwidth(self, data):
        band = roo_split_conformal(RegressionAlgorithm("ols"), data, 0.1)
        lo, hi = band.in_sample_intervals()
        interval = evaluate_band(band, data.x[5])
        assert (interval.lo, interval.hi) == pytest.approx((lo[5], hi[5]))

    def test_new_point_uses_relaxed_first_fold(self, data):
        band = roo_split_conformal(RegressionAlgorithm("ols"), data, 0.1)
        point = np.array([10.0, -10.0])
        interval = evaluate_band(band, point)
        center = band.mean_models[0](point)
        assert interval.hi - center == pytest.approx(band.halfwidths[0])

    def test_needs_four_rows(self):
        with pytest.raises(ValueError, match="n >= 4"):
            roo_split_conformal(RegressionAlgorithm("zero"), DataSet(np.zeros((3, 1)), np.zeros(3)), 0.1)
