import pytest
import numpy as np
from conformal_bands import SettingSpec, generate
from conformal_bands.settings import autocorrelate, make_truth, setting_b_basis, skew_normal
from conformal_bands.splitting import make_rng


class TestSettingSpec:

    def test_defaults(self):
        spec = SettingSpec.default("D")
        assert (spec.n, spec.d, spec.s, spec.coef_magnitude) == (200, 2000, 100, 8.0)

    def test_override_caps_sparsity(self):
        assert SettingSpec.default("A", d=4).s == 4

    def test_unknown_setting(self):
        with pytest.raises(ValueError, match="Unknown setting"):
            SettingSpec.default("E")

    def test_sparsity_range(self):
        with pytest.raises(ValueError, match="Sparsity s"):
            SettingSpec("A", n=10, d=3, s=5)

    def test_setting_c_window(self):
        with pytest.raises(ValueError, match="autocorrelation window"):
            SettingSpec("C", n=10, d=3, s=3)

    def test_sine_is_one_dimensional(self):
        with pytest.raises(ValueError, match="one-dimensional"):
            SettingSpec("sine_hetero", n=10, d=2, s=1)


class TestGenerate:

    def test_shapes_and_determinism(self):
        spec = SettingSpec.default("A", n=30, d=5, s=5, seed=4, n_test=12)
        train, test, _ = generate(spec)
        again, _, _ = generate(spec)
        assert (train.n, train.d, test.n) == (30, 5, 12)
        assert np.array_equal(train.y, again.y)

    def test_seed_changes_draws_not_coefficients(self):
        spec = SettingSpec.default("A", n=20, d=5, s=5)
        first, _, truth_a = generate(spec.with_seed(1))
        second, _, truth_b = generate(spec.with_seed(2))
        assert not np.array_equal(first.y, second.y)
        assert truth_a is truth_b

    def test_setting_a_is_linear_in_support(self):
        truth = make_truth(SettingSpec.default("A", d=6, s=3, coef_magnitude=2.0))
        x = np.eye(6)
        assert np.allclose(np.abs(truth.mean(x)[:3]), 2.0)
        assert np.all(truth.mean(x)[3:] == 0.0)
        assert truth.support == (0, 1, 2)

    def test_setting_b_uses_three_spline_columns(self):
        truth = make_truth(SettingSpec.default("B", d=4, s=2))
        assert truth.coef.size == 6
        assert setting_b_basis().size == 3
        assert truth.noise_law == "t2"

    def test_setting_c_is_heteroskedastic(self):
        truth = make_truth(SettingSpec.default("C", d=6, s=6))
        x = truth.features(make_rng(0), 50000)
        assert not truth.homoskedastic
        assert abs(truth.mean(x).mean()) < 0.1
        assert np.all(truth.noise_scale(x) >= 1.0)

    def test_sine_noise_scales(self):
        hetero = make_truth(SettingSpec.default("sine_hetero"))
        homo = make_truth(SettingSpec.default("sine_homo"))
        x = np.array([[0.0], [np.pi]])
        assert np.allclose(hetero.noise_scale(x), [0.0, np.pi ** 2 / 20])
        assert np.allclose(homo.noise_scale(x), np.pi ** 2 / 20)

    def test_additive_components(self):
        truth = make_truth(SettingSpec.default("additive6"))
        x = np.zeros((1, 6))
        x[0, 1] = 0.5
        assert truth.mean(x)[0] == pytest.approx(1.0)

    def test_noise_quantiles(self):
        assert make_truth(SettingSpec.default("A", d=2, s=2)).noise_quantile(0.1) == pytest.approx(1.6448536)
        assert make_truth(SettingSpec.default("B", d=2, s=2)).noise_quantile(0.1) == pytest.approx(2.9199856)
        assert make_truth(SettingSpec.default("sine_hetero")).noise_quantile(0.1) is None


class TestFeatureLaws:

    def test_skew_normal_mean(self):
        draws = skew_normal(make_rng(1), 200000)
        delta = 5.0 / np.sqrt(26.0)
        assert draws.mean() == pytest.approx(delta * np.sqrt(2 / np.pi), abs=0.01)

    def test_autocorrelation_weights(self):
        x = np.random.default_rng(0).normal(size=(5, 5))
        mixed = autocorrelate(x)
        assert np.array_equal(mixed[:, 0], x[:, 0])
        assert np.allclose(mixed[:, 1], (0.4 * x[:, 1] + 0.2 * x[:, 0]) / 0.6)
        expected = (0.4 * x[:, 4] + 0.2 * (mixed[:, 3] + mixed[:, 2] + mixed[:, 1])) / 1.0
        assert np.allclose(mixed[:, 4], expected)


class TestMoments:

    DRAWS = 100000

    def test_setting_a_mean_and_signal_variance(self):
        truth = make_truth(SettingSpec.default("A"))
        assert truth.coef @ truth.coef == pytest.approx(10.0)
        sample = truth.draw(make_rng(3), self.DRAWS)
        stderr = sample.y.std() / np.sqrt(self.DRAWS)
        assert abs(sample.y.mean()) <= 3 * stderr
        assert np.var(truth.mean(sample.x)) == pytest.approx(10.0, rel=0.02)
        assert np.var(sample.y - truth.mean(sample.x)) == pytest.approx(1.0, rel=0.02)

    def test_setting_d_signal_variance(self):
        truth = make_truth(SettingSpec.default("D", d=150))
        x = truth.features(make_rng(4), 20000)
        assert np.var(truth.mean(x)) == pytest.approx(100 * 8.0 ** 2, rel=0.04)

    def test_setting_c_first_feature_channel(self):
        truth = make_truth(SettingSpec.default("C"))
        column = truth.features(make_rng(5), self.DRAWS)[:, 0]
        skew_mean = 5.0 / np.sqrt(26.0) * np.sqrt(2.0 / np.pi)
        expected = (0.0 + skew_mean + 0.5) / 3.0
        assert abs(column.mean() - expected) <= 4 * column.std() / np.sqrt(self.DRAWS)

    def test_setting_c_standardized_signal_is_centered(self):
        truth = make_truth(SettingSpec.default("C"))
        signal = truth.mean(truth.features(make_rng(6), self.DRAWS))
        assert abs(signal.mean()) <= 4 * signal.std() / np.sqrt(self.DRAWS)

    def test_sine_hetero_moments(self):
        truth = make_truth(SettingSpec.default("sine_hetero"))
        sample = truth.draw(make_rng(7), self.DRAWS)
        noise = sample.y - truth.mean(sample.x)
        assert abs(sample.y.mean()) <= 4 * sample.y.std() / np.sqrt(self.DRAWS)
        assert np.var(truth.mean(sample.x)) == pytest.approx(0.5, rel=0.02)
        # E[(pi X / 20)^2] with X ~ U(0, 2 pi)
        assert np.var(noise) == pytest.approx(np.pi ** 4 / 300, rel=0.03)

    def test_sine_homo_noise_variance(self):
        truth = make_truth(SettingSpec.default("sine_homo"))
        sample = truth.draw(make_rng(8), self.DRAWS)
        noise = sample.y - truth.mean(sample.x)
        assert np.var(noise) == pytest.approx((np.pi ** 2 / 20) ** 2, rel=0.02)
