"""End-to-end statistical checks; the Monte Carlo ones are marked slow."""
from dataclasses import replace

import pytest
import numpy as np
from conformal_bands import (
    DataSet,
    ParametricIntervals,
    RegressionAlgorithm,
    SettingSpec,
    SplitConfig,
    TrialGrid,
    fit,
    fit_loco_local,
    full_conformal,
    full_conformal_contains,
    generate,
    jackknife_band,
    loco_global,
    multi_split_conformal,
    roo_relaxed,
    roo_split_conformal,
    run_experiment,
    split_conformal,
)
from conformal_bands.algorithm import CrossValidation
from conformal_bands.full_conformal import FullConformalMethod
from conformal_bands.lasso import lambda_grid
from conformal_bands.metrics import covered
from conformal_bands.settings import make_truth

ALPHA = 0.1


def coverage(method, test):
    return covered(*method.predict_interval(test.x), test.y).mean()


def mean_length(method, test):
    lo, hi = method.predict_interval(test.x)
    return float(np.mean(hi - lo))


class TestRankOracle:

    def test_zero_estimator_matches_brute_force(self):
        rng = np.random.default_rng(2024)
        grid = TrialGrid(-4.0, 4.0, 161)
        for _ in range(200):
            n = int(rng.integers(1, 9))
            alpha = float(rng.uniform(0.05, 0.95))
            data = DataSet(rng.normal(size=(n, 1)), rng.normal(size=n))
            threshold = int(np.ceil((n + 1) * (1 - alpha) - 1e-10))
            values = grid.values()
            counts = np.array([np.sum(np.abs(data.y) <= abs(y)) + 1 for y in values])
            expected = values[counts <= threshold]
            result = full_conformal(RegressionAlgorithm("zero"), data, [0.0], alpha, grid)
            assert np.array_equal(result.points, expected)


class TestNestedness:

    @pytest.fixture
    def data(self):
        train, _, _ = generate(SettingSpec.default("A", n=60, d=4, s=4, seed=1))
        return train

    def test_bands_grow_as_alpha_shrinks(self, data):
        alg = RegressionAlgorithm("ols")
        points = data.x[:10]
        builders = [
            lambda a: split_conformal(alg, data, a, SplitConfig(seed=2)),
            lambda a: jackknife_band(alg, data, a),
            lambda a: FullConformalMethod(alg, data, a, TrialGrid(-15.0, 15.0, 301)),
            lambda a: multi_split_conformal(alg, data, a, 3, master_seed=4),
        ]
        for build in builders:
            wide_lo, wide_hi = build(0.05).predict_interval(points)
            narrow_lo, narrow_hi = build(0.3).predict_interval(points)
            assert np.all(wide_lo <= narrow_lo + 1e-12)
            assert np.all(narrow_hi <= wide_hi + 1e-12)

    def test_roo_grows_as_alpha_shrinks(self, data):
        wide = roo_split_conformal(RegressionAlgorithm("ols"), data, 0.05)
        narrow = roo_split_conformal(RegressionAlgorithm("ols"), data, 0.3)
        assert np.all(wide.point_halfwidths >= narrow.point_halfwidths)


@pytest.mark.slow
class TestMonteCarlo:

    @pytest.mark.parametrize("setting", ["A", "B", "C"])
    def test_finite_sample_validity(self, setting):
        algs = {
            "ols": RegressionAlgorithm("ols"),
            "lasso": RegressionAlgorithm("lasso", lam=0.1),
            "kernel": RegressionAlgorithm("kernel_smoother", bandwidth=3.0),
        }
        split_hits = {name: [] for name in algs}
        full_hits = {name: [] for name in algs}
        for rep in range(50):
            train, test, _ = generate(SettingSpec.default(setting, seed=rep))
            for name, alg in algs.items():
                split_hits[name].append(coverage(split_conformal(alg, train, ALPHA, SplitConfig(seed=rep)), test))
            full_hits["ols"].append(coverage(FullConformalMethod(algs["ols"], train, ALPHA), test))
            for name in ("lasso", "kernel"):
                inside = [full_conformal_contains(algs[name], train, x, y, ALPHA) for x, y in zip(test.x, test.y)]
                full_hits[name].append(np.mean(inside))
        for name in algs:
            assert 1 - ALPHA - 0.03 <= np.mean(split_hits[name]) <= 1 - ALPHA + 1 / 51 + 0.03, f"split {name}"
            assert 1 - ALPHA - 0.03 <= np.mean(full_hits[name]) <= 1 - ALPHA + 1 / 101 + 0.03, f"full {name}"

    def test_high_dimensional_ols(self):
        shorter = []
        full_cov = []
        parametric_cov = []
        for rep in range(20):
            train, test, _ = generate(SettingSpec.default("A", n=200, d=190, s=10, seed=rep))
            alg = RegressionAlgorithm("ols")
            full = FullConformalMethod(alg, train, ALPHA)
            parametric = ParametricIntervals(fit(alg, train), train, ALPHA)
            full_cov.append(coverage(full, test))
            parametric_cov.append(coverage(parametric, test))
            shorter.append(mean_length(full, test) < mean_length(parametric, test))
        assert 0.87 <= np.mean(full_cov) <= 0.93
        # the t interval is exact for a correct Gaussian linear model
        assert 0.85 <= np.mean(parametric_cov) <= 0.95
        assert np.mean(shorter) >= 0.8

    def test_ridge_split_coverage(self):
        values = []
        for rep in range(20):
            train, test, _ = generate(SettingSpec.default("A", n=200, d=190, s=10, seed=rep))
            alg = RegressionAlgorithm("ridge", lam=10.0, unscaled=True)
            values.append(coverage(split_conformal(alg, train, ALPHA, SplitConfig(seed=rep)), test))
        assert 0.87 <= np.mean(values) <= 0.93

    def test_multi_split_is_wider(self):
        wider = []
        for rep in range(50):
            train, test, _ = generate(SettingSpec.default("A", n=200, d=10, s=10, seed=rep))
            alg = RegressionAlgorithm("ols")
            multi = multi_split_conformal(alg, train, ALPHA, 5, master_seed=rep)
            single = split_conformal(alg, train, ALPHA, SplitConfig(seed=rep))
            lo_m, hi_m = multi.predict_interval(test.x)
            lo_s, hi_s = single.predict_interval(test.x)
            wider.append(np.median(hi_m - lo_m) >= np.median(hi_s - lo_s))
        assert np.mean(wider) >= 0.9

    def test_roo_in_sample_coverage(self):
        exact_ok, relaxed_ok = [], []
        for rep in range(50):
            train, _, _ = generate(SettingSpec.default("A", n=500, d=10, s=10, seed=rep))
            alg = RegressionAlgorithm("ols")
            lo, hi = roo_split_conformal(alg, train, ALPHA, SplitConfig(seed=rep)).in_sample_intervals()
            exact_ok.append(covered(lo, hi, train.y).mean() >= 1 - ALPHA - 0.03)
            lo, hi = roo_relaxed(alg, train, ALPHA, SplitConfig(seed=rep)).in_sample_intervals()
            relaxed_cov = covered(lo, hi, train.y).mean()
            relaxed_ok.append(1 - ALPHA - 0.03 <= relaxed_cov <= 1 - ALPHA + 6 / 500 + 0.03)
        assert np.mean(exact_ok) >= 0.95
        assert np.mean(relaxed_ok) >= 0.95

    def test_locally_weighted_sine(self):
        result = run_experiment("F3", reps=10, seed=0)
        weighted = result.row("sine_hetero", "split_weighted")
        plain = result.row("sine_hetero", "split")
        assert weighted.length < plain.length
        assert 0.87 <= weighted.coverage <= 0.93
        assert 0.87 <= plain.coverage <= 0.93
        spreads = {
            method: [r.coverage_spread for r in result.per_rep if r.method == method]
            for method in ("split", "split_weighted")
        }
        tighter = np.array(spreads["split_weighted"]) < np.array(spreads["split"])
        assert tighter.mean() >= 0.8

    def test_loco_global_finds_signals(self):
        base = SettingSpec.default("sparse_gauss", n=200, d=100, s=5)
        # a coefficient draw whose five signals are all clearly nonzero
        spec = next(
            candidate for candidate in (replace(base, truth_seed=t) for t in range(200))
            if np.all(np.abs(make_truth(candidate).coef) >= 1.0)
        )
        truth = make_truth(spec)
        found, straddle = [], []
        for rep in range(10):
            train, _, _ = generate(spec.with_seed(rep))
            alg = RegressionAlgorithm("lasso", tuning=CrossValidation(lambda_grid(train.x, train.y), seed=rep))
            report = loco_global(alg, train, ALPHA, SplitConfig(seed=rep), selection="lasso_cv")
            tested = set(report.tested)
            above = [j for j in truth.support if j in tested and report.row(j).wilcoxon_lo > 0]
            found.append(len(above) >= 4)
            spurious = [report.row(j) for j in tested if j not in truth.support]
            straddle.extend(r.wilcoxon_lo <= 0 <= r.wilcoxon_hi for r in spurious)
        assert np.mean(found) >= 0.8
        if straddle:
            assert np.mean(straddle) >= 0.8

    def test_loco_local_joint_validity(self):
        hits = []
        for rep in range(5):
            train, test, _ = generate(SettingSpec.default("additive6", seed=rep))
            local = fit_loco_local(RegressionAlgorithm("bspline_additive", df=5), train, ALPHA, SplitConfig(seed=rep))
            intervals = local.at(test.x)
            deltas = local.excess_errors(test.x, test.y)
            lo = np.array([w.w.lo for w in intervals]).reshape(train.d, test.n).T
            hi = np.array([w.w.hi for w in intervals]).reshape(train.d, test.n).T
            inside = (lo - 1e-9 <= deltas) & (deltas <= hi + 1e-9)
            hits.append(inside.all(axis=1).mean())
        assert np.mean(hits) >= 1 - ALPHA - 0.04

    def test_timing_order(self):
        result = run_experiment("T1", reps=2, seed=0, scale=0.5)
        times = {m: np.mean([r.wall_time for r in result.rows if r.method == m])
                 for m in ("split", "jackknife", "full")}
        assert times["split"] < times["full"]
        assert times["jackknife"] < times["full"]
