import pytest
import numpy as np
from conformal_bands import DataSet, RegressionAlgorithm, fit
from conformal_bands.stepwise import forward_path


class TestForwardStepwise:

    @pytest.fixture
    def data(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(40, 4))
        y = 0.5 + x @ np.array([0.0, 4.0, 0.0, 1.0]) + 0.3 * rng.normal(size=40)
        return DataSet(x, y)

    def test_first_step_takes_strongest_column(self, data):
        assert forward_path(data.x, data.y, 1) == [1]

    def test_full_path_reproduces_ols(self, data):
        stepwise = fit(RegressionAlgorithm("stepwise", steps=data.d), data)
        ols = fit(RegressionAlgorithm("ols"), data)
        assert np.allclose(stepwise.coef, ols.coef, atol=1e-10)
        assert stepwise.intercept == pytest.approx(ols.intercept, abs=1e-10)

    def test_zero_steps_is_intercept_only(self, data):
        model = fit(RegressionAlgorithm("stepwise", steps=0), data)
        assert np.all(model.coef == 0.0)
        assert model.intercept == pytest.approx(data.y.mean())
        assert model.selected == ()

    def test_steps_capped_by_columns(self, data):
        model = fit(RegressionAlgorithm("stepwise", steps=50), data)
        assert model.selected == (0, 1, 2, 3)

    def test_steps_capped_by_rows(self):
        rng = np.random.default_rng(2)
        data = DataSet(rng.normal(size=(5, 20)), rng.normal(size=5))
        assert len(forward_path(data.x, data.y, 20)) == 4

    def test_constant_columns_never_enter(self):
        x = np.column_stack([np.ones(10), np.arange(10.0)])
        assert forward_path(x, np.arange(10.0), 2) == [1]
