import json

import pytest
import numpy as np
from conformal_bands import (
    CrossValidation, DataSet, LocoReport, RegressionAlgorithm, SplitConfig, fit, fit_loco_local, loco_global, loco_local,
    split_indices,
)
from conformal_bands.loco import excess_error, excess_error_image


@pytest.fixture
def signal():
    rng = np.random.default_rng(30)
    x = rng.normal(size=(200, 3))
    return DataSet(x, 5.0 * x[:, 0] + rng.normal(size=200))


class TestExcessErrorImage:

    def test_worked_example(self):
        assert excess_error_image(0.0, 2.0, 3.0, 1.0) == (0.0, 2.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_dense_grid(self, seed):
        rng = np.random.default_rng(seed)
        lo, hi = np.sort(rng.normal(scale=2.0, size=2))
        a, b = rng.normal(scale=2.0, size=2)
        w_lo, w_hi = excess_error_image(lo, hi, a, b)
        values = excess_error(np.linspace(lo, hi, 100001), a, b)
        assert w_lo == pytest.approx(values.min(), abs=1e-4)
        assert w_hi == pytest.approx(values.max(), abs=1e-4)
        assert w_lo <= values.min() + 1e-12 and values.max() <= w_hi + 1e-12


class TestLocoLocal:

    def test_unused_covariate_gives_zero(self):
        rng = np.random.default_rng(0)
        data = DataSet(rng.normal(size=(30, 2)), rng.normal(size=30))
        for w in loco_local(RegressionAlgorithm("zero"), data, 0.2):
            assert (w.w.lo, w.w.hi) == (0.0, 0.0)
            assert not w.above_zero

    def test_constant_covariate_gives_zero(self):
        rng = np.random.default_rng(1)
        x = np.column_stack([rng.normal(size=30), np.ones(30)])
        data = DataSet(x, x[:, 0] + rng.normal(size=30))
        for w in loco_local(RegressionAlgorithm("ols"), data, 0.2, columns=[1]):
            assert w.w.lo == pytest.approx(0.0, abs=1e-9)
            assert w.w.hi == pytest.approx(0.0, abs=1e-9)

    def test_infinite_band_is_flagged(self):
        rng = np.random.default_rng(2)
        data = DataSet(rng.normal(size=(8, 2)), rng.normal(size=8))
        result = loco_local(RegressionAlgorithm("ols"), data, 0.1)
        assert all(w.unbounded and w.w.lo == -np.inf for w in result)

    def test_one_interval_per_point_and_column(self, signal):
        result = loco_local(RegressionAlgorithm("ols"), signal, 0.1, columns=[0, 2])
        assert len(result) == 2 * signal.n
        assert {w.j for w in result} == {0, 2}

    def test_important_covariate_mostly_above_zero(self, signal):
        local = fit_loco_local(RegressionAlgorithm("ols"), signal, 0.1)
        result = local.in_sample()
        above = np.mean([w.above_zero for w in result if w.j == 0])
        noise = np.mean([w.above_zero for w in result if w.j == 2])
        assert above > 0.3
        assert noise < 0.05

    def test_new_points(self, signal):
        local = fit_loco_local(RegressionAlgorithm("ols"), signal, 0.1, columns=[0])
        result = local.at(np.zeros((4, 3)))
        assert len(result) == 4
        assert all(w.index is None for w in result)
        assert local.excess_errors(np.zeros((4, 3)), np.ones(4)).shape == (4, 1)

    def test_bad_column(self, signal):
        with pytest.raises(ValueError, match="Covariate index"):
            fit_loco_local(RegressionAlgorithm("ols"), signal, 0.1, columns=[3])


class TestLocoGlobal:

    def test_bonferroni_level(self, signal):
        report = loco_global(RegressionAlgorithm("ols"), signal, 0.1)
        assert report.tested == (0, 1, 2)
        assert report.adjusted_alpha == pytest.approx(0.1 / 3)
        assert report.n_calibration == 100

    def test_signal_detected(self, signal):
        report = loco_global(RegressionAlgorithm("ols"), signal, 0.1)
        strong = report.row(0)
        assert strong.theta > 0
        assert strong.z_lo > 0
        assert strong.wilcoxon_lo > 0
        assert strong.sign_lo > 0
        assert strong.wilcoxon_p < 0.01

    def test_explicit_selection(self, signal):
        report = loco_global(RegressionAlgorithm("ols"), signal, 0.1, selection=[2])
        assert report.tested == (2,)
        assert report.adjusted_alpha == pytest.approx(0.1)
        with pytest.raises(KeyError):
            report.row(0)

    def test_cross_validated_lasso_reuses_its_active_set(self, signal):
        alg = RegressionAlgorithm("lasso", tuning=CrossValidation((0.01, 1.0)))
        report = loco_global(alg, signal, 0.1, selection="lasso_cv")
        fit_rows, _ = split_indices(signal.n, SplitConfig())
        assert report.tested == tuple(fit(alg, signal.subset(fit_rows)).selected)

    def test_fixed_lambda_lasso_still_cross_validates_selection(self, signal):
        cfg = SplitConfig(seed=4)
        fixed = loco_global(RegressionAlgorithm("lasso", lam=50.0), signal, 0.1, cfg, selection="lasso_cv")
        reference = loco_global(RegressionAlgorithm("ols"), signal, 0.1, cfg, selection="lasso_cv")
        assert fixed.tested == reference.tested
        assert 0 in fixed.tested

    def test_cross_validated_selection(self, signal):
        report = loco_global(RegressionAlgorithm("ols"), signal, 0.1, SplitConfig(seed=4), selection="lasso_cv")
        assert 0 in report.tested

    def test_zero_differences(self):
        rng = np.random.default_rng(5)
        data = DataSet(rng.normal(size=(40, 2)), rng.normal(size=40))
        row = loco_global(RegressionAlgorithm("zero"), data, 0.1).row(0)
        assert (row.theta, row.stderr, row.z_p) == (0.0, 0.0, 1.0)
        assert row.sign_p == 1.0
        assert row.sign_zeros == 20
        assert row.wilcoxon_lo <= 0.0 <= row.wilcoxon_hi

    def test_serialization(self, signal):
        report = loco_global(RegressionAlgorithm("ols"), signal, 0.1)
        frame = report.to_frame()
        assert list(frame["name"]) == ["x1", "x2", "x3"]
        assert np.allclose(frame["adjusted_alpha"], 0.1 / 3)
        assert json.loads(report.to_json())["tested"] == [0, 1, 2]

    def test_rejects_invalid_p_value(self, signal):
        row = loco_global(RegressionAlgorithm("ols"), signal, 0.1).row(0)
        bad = row.__class__(**{**row.__dict__, "z_p": 1.5})
        with pytest.raises(ValueError, match="p-values must lie in"):
            LocoReport(0.1, 0.1, (0,), 100, (bad,))
