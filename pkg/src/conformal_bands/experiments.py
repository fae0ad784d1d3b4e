import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy

from .algorithm import CrossValidation, RegressionAlgorithm, fit
from .constants import CONDITIONAL_COVERAGE_BINS, DEFAULT_ALPHA, PI
from .full_conformal import FullConformalMethod
from .jackknife import jackknife_band
from .metrics import MetricRow, aggregate, binned_coverage, covered, evaluate, interval_lengths, rows_to_frame
from .oracles import oracle_bands
from .parametric import ParametricIntervals
from .scores import ConformityScore
from .settings import SettingSpec, generate
from .split_conformal import split_conformal
from .splitting import SplitConfig, derive_seeds

logger = logging.getLogger(__name__)

EXPERIMENTS = ("T1", "T2", "T3", "F1", "F2", "F3", "F6", "F7")

# setting names, n, d, s, coef_magnitude
EXPERIMENT_DESIGNS = {
    "T1": ("ABC", 100, 10, 10, 1.0),
    "T2": ("ABC", 500, 490, 10, 1.0),
    "T3": ("ABC", 500, 490, 10, 1.0),
    "F1": ("ABC", 200, 20, 5, 8.0),
    "F2": ("ABC", 200, 2000, 5, 8.0),
    "F6": ("D", 200, 2000, 100, 8.0),
    "F3": (("sine_hetero",), 1000, 1, 1, 1.0),
    "F7": (("sine_homo",), 1000, 1, 1, 1.0),
}

RIDGE_TABLE_LAMBDA = 10.0
LASSO_LAMBDAS = tuple(np.geomspace(8.0, 0.05, 8))
ELASTIC_NET_MIXING = 0.5
STEPWISE_STEPS = (1, 2, 3, 5, 8, 12, 20)
SPLINE_DF_GRID = (4, 5, 6, 8, 10, 12)
ORACLE_SPLINE_DF = 8
MIN_SCALED_N = 8
SINE_BIN_EDGES = np.linspace(0.0, 2.0 * PI, CONDITIONAL_COVERAGE_BINS + 1)
CURVE_COLUMNS = ["experiment", "setting", "curve", "x", "value"]


def scaled_spec(spec: SettingSpec, scale: float) -> SettingSpec:
    """Shrink n (and d, for designs with d > 20) by ``scale``; s and n_test are kept.

    Designs with d < n keep their gap n - d, and designs whose halves fit OLS
    keep n >= 2(d + 2), so OLS-based methods stay well posed.
    """
    if not 0 < scale <= 1:
        raise ValueError(f"scale must be in (0, 1], got {scale}")
    if scale == 1:
        return spec
    n = max(MIN_SCALED_N, int(round(spec.n * scale)))
    d = spec.d
    half_fit_floor = 2 * (spec.d + 2)
    if spec.n >= half_fit_floor:
        n = max(n, half_fit_floor)
    if d > 20:
        d = max(spec.s, 4, int(round(d * scale)))
        gap = spec.n - spec.d
        if gap > 0:
            d = max(1, min(d, n - gap))
    return replace(spec, n=n, d=d, s=min(spec.s, d))


def experiment_settings(experiment: str, scale: float = 1.0, truth_seed: int = 0) -> List[SettingSpec]:
    if experiment not in EXPERIMENT_DESIGNS:
        raise ValueError(f"Unknown experiment '{experiment}'. Must be one of {', '.join(EXPERIMENTS)}")
    names, n, d, s, magnitude = EXPERIMENT_DESIGNS[experiment]
    specs = [
        SettingSpec.default(name, n=n, d=d, s=s, coef_magnitude=magnitude, truth_seed=truth_seed) for name in names
    ]
    return [scaled_spec(spec, scale) for spec in specs]


@dataclass(frozen=True)
class MethodPlan:
    name: str
    build: Callable = field(repr=False, compare=False)
    tuning: float = float("nan")


def _method_seeds(rep_seed: int) -> Tuple[int, int]:
    split_seed, cv_seed = derive_seeds(rep_seed, 6)[4:]
    return split_seed, cv_seed


def _table_methods(experiment: str, alpha: float, split_seed: int) -> List[MethodPlan]:
    if experiment == "T3":
        alg = RegressionAlgorithm("ridge", lam=RIDGE_TABLE_LAMBDA, unscaled=True)
    else:
        alg = RegressionAlgorithm("ols")
    cfg = SplitConfig(seed=split_seed)
    plans = [
        MethodPlan("parametric", lambda train: ParametricIntervals(fit(alg, train), train, alpha)),
        MethodPlan("jackknife", lambda train: jackknife_band(alg, train, alpha)),
    ]
    if experiment != "T2":
        plans.append(MethodPlan("split", lambda train: split_conformal(alg, train, alpha, cfg)))
    plans.append(MethodPlan("full", lambda train: FullConformalMethod(alg, train, alpha)))
    return plans


def _grid_methods(alpha: float, split_seed: int) -> List[MethodPlan]:
    cfg = SplitConfig(seed=split_seed)
    plans = []

    def split_with(alg):
        return lambda train: split_conformal(alg, train, alpha, cfg)

    for lam in LASSO_LAMBDAS:
        plans.append(MethodPlan("split:lasso", split_with(RegressionAlgorithm("lasso", lam=lam)), lam))
    for lam in LASSO_LAMBDAS:
        alg = RegressionAlgorithm("elastic_net", lam=lam, mixing=ELASTIC_NET_MIXING)
        plans.append(MethodPlan("split:elastic_net", split_with(alg), lam))
    for steps in STEPWISE_STEPS:
        plans.append(MethodPlan("split:stepwise", split_with(RegressionAlgorithm("stepwise", steps=steps)), steps))
    return plans


def spline_cv(cv_seed: int) -> RegressionAlgorithm:
    return RegressionAlgorithm("bspline_additive", tuning=CrossValidation(SPLINE_DF_GRID, seed=cv_seed))


def _sine_methods(alpha: float, split_seed: int, cv_seed: int) -> List[MethodPlan]:
    alg = spline_cv(cv_seed)
    cfg = SplitConfig(seed=split_seed)
    weighted = ConformityScore("locally_weighted", mad_algorithm=spline_cv(cv_seed))
    return [
        MethodPlan("split", lambda train: split_conformal(alg, train, alpha, cfg)),
        MethodPlan("split_weighted", lambda train: split_conformal(alg, train, alpha, cfg, weighted)),
    ]


def _sine_curves(experiment, setting, name, method, test) -> List[dict]:
    lo, hi = method.predict_interval(test.x)
    coverage, length = binned_coverage(
        test.x[:, 0], covered(lo, hi, test.y), interval_lengths(lo, hi), SINE_BIN_EDGES
    )
    centers = 0.5 * (SINE_BIN_EDGES[:-1] + SINE_BIN_EDGES[1:])
    records = []
    for label, values in (("conditional_coverage", coverage), ("local_length", length)):
        for x, value in zip(centers, values):
            records.append(dict(experiment=experiment, setting=setting, curve=f"{name}:{label}", x=x, value=value))
    return records


def run_repetition(experiment: str, rep_seed: int, alpha: float, scale: float, truth_seed: int):
    split_seed, cv_seed = _method_seeds(rep_seed)
    rows: List[MetricRow] = []
    curves: List[dict] = []
    for template in experiment_settings(experiment, scale, truth_seed):
        spec = template.with_seed(rep_seed)
        train, test, truth = generate(spec)
        sine = experiment in ("F3", "F7")
        if sine:
            plans = _sine_methods(alpha, split_seed, cv_seed)
        elif experiment.startswith("T"):
            plans = _table_methods(experiment, alpha, split_seed)
        else:
            plans = _grid_methods(alpha, split_seed)
        for plan in plans:
            start = time.perf_counter()
            method = plan.build(train)
            row = evaluate(
                method,
                truth,
                test,
                train,
                experiment=experiment,
                setting=spec.setting,
                name=plan.name,
                tuning=plan.tuning,
                bin_edges=SINE_BIN_EDGES if sine else None,
            )
            rows.append(replace(row, wall_time=time.perf_counter() - start))
            if sine:
                curves.extend(_sine_curves(experiment, spec.setting, plan.name, method, test))
        if sine:
            oracle_alg = RegressionAlgorithm("bspline_additive", df=ORACLE_SPLINE_DF)
            for band in oracle_bands(truth, oracle_alg, spec, alpha):
                name = f"{band.kind}_oracle"
                rows.append(evaluate(band, truth, test, train, experiment=experiment, setting=spec.setting,
                                     name=name, bin_edges=SINE_BIN_EDGES))
    return rows, curves


def _run_task(task):
    return run_repetition(*task)


def optimism_curves(rows: Sequence[MetricRow]) -> List[dict]:
    records = []
    for row in rows:
        if np.isnan(row.tuning):
            continue
        for metric in ("coverage", "length", "test_error"):
            records.append(dict(
                experiment=row.experiment,
                setting=row.setting,
                curve=f"{row.method}:{metric}",
                x=row.relative_optimism,
                value=getattr(row, metric),
            ))
    return records


@dataclass
class ExperimentResult:
    experiment: str
    rows: List[MetricRow]
    curves: pd.DataFrame
    manifest: dict
    per_rep: List[MetricRow] = field(default_factory=list, repr=False)

    def metrics_frame(self, timing: bool = False) -> pd.DataFrame:
        return rows_to_frame(self.rows, timing=timing)

    def row(self, setting: str, method: str, tuning: Optional[float] = None) -> MetricRow:
        for r in self.rows:
            if r.setting == setting and r.method == method and (tuning is None or np.isclose(r.tuning, tuning)):
                return r
        raise KeyError(f"No row for setting={setting}, method={method}, tuning={tuning}")

    def write(self, out_dir, timing: bool = False) -> Dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "metrics": out / "metrics.csv",
            "curves": out / "curves.csv",
            "manifest": out / "manifest.json",
        }
        self.metrics_frame(timing).to_csv(paths["metrics"], index=False, float_format="%.10g")
        self.curves.to_csv(paths["curves"], index=False, float_format="%.10g")
        paths["manifest"].write_text(json.dumps(self.manifest, indent=2, sort_keys=True) + "\n")
        return paths


def _versions() -> dict:
    from . import __version__

    return {"conformal_bands": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "pandas": pd.__version__}


def run_experiment(
    experiment: str,
    reps: int,
    seed: int = 0,
    alpha: float = DEFAULT_ALPHA,
    scale: float = 1.0,
    jobs: int = 1,
) -> ExperimentResult:
    """Run ``reps`` repetitions of a table or figure experiment.

    Per-repetition seeds come from the master seed; the setting's coefficients
    are fixed by the master seed too. Output does not depend on ``jobs``.
    """
    if experiment not in EXPERIMENTS:
        raise ValueError(f"Unknown experiment '{experiment}'. Must be one of {', '.join(EXPERIMENTS)}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    settings = experiment_settings(experiment, scale, truth_seed=seed)
    rep_seeds = derive_seeds(seed, reps)
    tasks = [(experiment, rep_seed, alpha, scale, seed) for rep_seed in rep_seeds]
    logger.info("running %s: %d repetitions over %d settings (jobs=%d)", experiment, reps, len(settings), jobs)
    if jobs == 1:
        results = [_run_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    per_rep = [row for rows, _ in results for row in rows]
    rows = aggregate(per_rep)
    records = [record for _, curves in results for record in curves]
    curves = pd.DataFrame(records, columns=CURVE_COLUMNS)
    if not curves.empty:
        curves = curves.groupby(["experiment", "setting", "curve", "x"], sort=False, as_index=False)["value"].mean()
    optimism = pd.DataFrame(optimism_curves(rows), columns=CURVE_COLUMNS)
    curves = pd.concat([frame for frame in (curves, optimism) if not frame.empty] or [curves], ignore_index=True)
    manifest = {
        "experiment": experiment,
        "master_seed": int(seed),
        "rep_seeds": [int(s) for s in rep_seeds],
        "reps": reps,
        "alpha": alpha,
        "scale": scale,
        "settings": [asdict(spec) for spec in settings],
        "versions": _versions(),
    }
    return ExperimentResult(experiment, rows, curves, manifest, per_rep)
