"""Leave-one-covariate-out (LOCO) variable importance, local and global."""
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from .algorithm import CrossValidation, RegressionAlgorithm, fit
from .band import ConformalBand
from .dataset import DataSet
from .interval import Interval, _json_float
from .lasso import lambda_grid
from .nonparametric import sign_interval, sign_test, wilcoxon_interval, wilcoxon_signed_rank
from .quantiles import MiscoverageLevel, as_alpha
from .roo import roo_split_conformal
from .splitting import SplitConfig, split_indices

logger = logging.getLogger(__name__)


def excess_error(y, without_j, full):
    return np.abs(y - without_j) - np.abs(y - full)


def excess_error_image(lo: float, hi: float, without_j: float, full: float) -> Tuple[float, float]:
    """Exact range of y -> |y - a| - |y - b| over [lo, hi] (piecewise linear, kinks at a and b)."""
    candidates = [lo, hi] + [k for k in (without_j, full) if lo <= k <= hi]
    values = excess_error(np.array(candidates), without_j, full)
    return float(values.min()), float(values.max())


@dataclass(frozen=True)
class ExcessErrorInterval:
    j: int
    index: Optional[int]
    w: Interval
    unbounded: bool = False

    @property
    def above_zero(self) -> bool:
        return self.w.lo > 0

    def to_dict(self) -> dict:
        return {"j": self.j, "index": self.index, **self.w.to_dict(), "unbounded": self.unbounded}


def _image_interval(j, index, lo, hi, without_j, full) -> ExcessErrorInterval:
    if not (np.isfinite(lo) and np.isfinite(hi)):
        return ExcessErrorInterval(j, index, Interval(-np.inf, np.inf), unbounded=True)
    w_lo, w_hi = excess_error_image(lo, hi, without_j, full)
    return ExcessErrorInterval(j, index, Interval(w_lo, w_hi))


class LocoLocalFit:

    def __init__(self, band: ConformalBand, dropped: dict, columns: Sequence[int]):
        self.band = band
        self.dropped = dropped
        self.columns = tuple(columns)

    def _without(self, j: int, fold: int, x: np.ndarray) -> np.ndarray:
        return self.dropped[(j, fold)].predict(np.delete(x, j, axis=1) if x.shape[1] > 1 else np.zeros_like(x))

    def in_sample(self) -> List[ExcessErrorInterval]:
        lo, hi = self.band.in_sample_intervals()
        x = self.band.train_x
        folds = self.band.point_models
        full = np.empty(x.shape[0])
        for k, model in enumerate(self.band.mean_models):
            rows = folds == k
            full[rows] = model.predict(x[rows])
        result = []
        for j in self.columns:
            without = np.empty(x.shape[0])
            for k in range(len(self.band.mean_models)):
                rows = folds == k
                without[rows] = self._without(j, k, x[rows])
            result.extend(_image_interval(j, i, lo[i], hi[i], without[i], full[i]) for i in range(x.shape[0]))
        return result

    def at(self, x) -> List[ExcessErrorInterval]:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        lo, hi = self.band.predict_interval(x)
        full = self.band.mean_models[0].predict(x)
        result = []
        for j in self.columns:
            without = self._without(j, 0, x)
            result.extend(_image_interval(j, None, lo[i], hi[i], without[i], full[i]) for i in range(x.shape[0]))
        return result

    def excess_errors(self, x, y) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        full = self.band.mean_models[0].predict(x)
        return np.column_stack([excess_error(np.asarray(y), self._without(j, 0, x), full) for j in self.columns])


def fit_loco_local(
    alg: RegressionAlgorithm,
    data: DataSet,
    alpha,
    cfg: SplitConfig = SplitConfig(),
    columns: Optional[Sequence[int]] = None,
) -> LocoLocalFit:
    if data.d < 1:
        raise ValueError("LOCO needs at least one covariate")
    columns = list(range(data.d)) if columns is None else [int(j) for j in columns]
    for j in columns:
        if not 0 <= j < data.d:
            raise ValueError(f"Covariate index must be in [0, {data.d}), got {j}")
    band = roo_split_conformal(alg, data, alpha, cfg)
    folds = split_indices(data.n, cfg)
    dropped = {}
    for k, fold in enumerate(folds):
        fold_data = data.subset(fold)
        for j in columns:
            dropped[(j, k)] = fit(alg, fold_data.drop_column(j))
    return LocoLocalFit(band, dropped, columns)


def loco_local(
    alg: RegressionAlgorithm,
    data: DataSet,
    alpha,
    cfg: SplitConfig = SplitConfig(),
    columns: Optional[Sequence[int]] = None,
) -> List[ExcessErrorInterval]:
    return fit_loco_local(alg, data, alpha, cfg, columns).in_sample()


@dataclass(frozen=True)
class LocoRow:
    j: int
    name: str
    theta: float
    stderr: float
    z_lo: float
    z_hi: float
    z_p: float
    sign_p: float
    sign_p_two_sided: float
    sign_zeros: int
    sign_lo: float
    sign_hi: float
    wilcoxon_statistic: float
    wilcoxon_p: float
    wilcoxon_p_two_sided: float
    wilcoxon_lo: float
    wilcoxon_hi: float
    median: float


@dataclass(frozen=True)
class LocoReport:
    alpha: float
    adjusted_alpha: float
    tested: Tuple[int, ...]
    n_calibration: int
    rows: Tuple[LocoRow, ...] = field(default=())

    def __post_init__(self):
        for row in self.rows:
            for p in (row.z_p, row.sign_p, row.sign_p_two_sided, row.wilcoxon_p, row.wilcoxon_p_two_sided):
                if not 0.0 <= p <= 1.0:
                    raise ValueError(f"p-values must lie in [0, 1], got {p} for covariate {row.name}")

    def row(self, j: int) -> LocoRow:
        for r in self.rows:
            if r.j == j:
                return r
        raise KeyError(f"Covariate {j} was not tested")

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([asdict(r) for r in self.rows], columns=list(LocoRow.__dataclass_fields__))
        frame["adjusted_alpha"] = self.adjusted_alpha
        return frame

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "adjusted_alpha": self.adjusted_alpha,
            "tested": list(self.tested),
            "n_calibration": self.n_calibration,
            "rows": [{k: _json_float(v) if isinstance(v, float) else v for k, v in asdict(r).items()} for r in self.rows],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format="%.10g")


def default_lasso_selector(data: DataSet, seed: int = 0) -> RegressionAlgorithm:
    return RegressionAlgorithm("lasso", tuning=CrossValidation(lambda_grid(data.x, data.y), seed=seed))


def _select(selection, alg: RegressionAlgorithm, fit_data: DataSet, model, seed: int) -> Tuple[int, ...]:
    if selection is None or selection == "all":
        return tuple(range(fit_data.d))
    if selection == "lasso_cv":
        if alg.kind == "lasso" and alg.tuning is not None:
            return tuple(model.selected)
        return tuple(fit(default_lasso_selector(fit_data, seed), fit_data).selected)
    columns = tuple(sorted({int(j) for j in selection}))
    for j in columns:
        if not 0 <= j < fit_data.d:
            raise ValueError(f"Covariate index must be in [0, {fit_data.d}), got {j}")
    return columns


def _z_inference(deltas: np.ndarray, level_alpha: float):
    m = deltas.size
    theta = math.fsum(deltas) / m
    stderr = float(np.std(deltas, ddof=1)) if m > 1 else 0.0
    if stderr == 0.0:
        return theta, stderr, theta, theta, (0.0 if theta > 0 else 1.0)
    z = float(stats.norm.ppf(1.0 - level_alpha / 2.0))
    half = z * stderr / np.sqrt(m)
    p = float(stats.norm.sf(np.sqrt(m) * theta / stderr))
    return theta, stderr, theta - half, theta + half, p


def loco_global(
    alg: RegressionAlgorithm,
    data: DataSet,
    alpha,
    cfg: SplitConfig = SplitConfig(),
    selection: Union[None, str, Sequence[int]] = None,
) -> LocoReport:
    """Split-sample inference on the excess error of dropping each tested covariate.

    ``selection`` is None/"all" (every covariate), "lasso_cv" (active set of a
    cross-validated lasso on the fitting half) or an explicit list of indices.
    Intervals are at level 1 - alpha/|S|.
    """
    a = as_alpha(alpha)
    fit_rows, calibration_rows = split_indices(data.n, cfg)
    fit_data = data.subset(fit_rows)
    calibration = data.subset(calibration_rows)
    model = fit(alg, fit_data)
    tested = _select(selection, alg, fit_data, model, cfg.seed)
    adjusted = MiscoverageLevel(a).bonferroni(len(tested)).alpha if tested else a
    full_prediction = model.predict(calibration.x)
    rows = []
    for j in tested:
        reduced = fit(alg, fit_data.drop_column(j))
        deltas = excess_error(calibration.y, reduced.predict(calibration.drop_column(j).x), full_prediction)
        theta, stderr, z_lo, z_hi, z_p = _z_inference(deltas, adjusted)
        sign = sign_test(deltas)
        sign_ci = sign_interval(deltas, adjusted)
        wilcoxon = wilcoxon_signed_rank(deltas)
        wilcoxon_ci = wilcoxon_interval(deltas, adjusted)
        rows.append(LocoRow(
            j=j,
            name=f"x{j + 1}",
            theta=theta,
            stderr=stderr,
            z_lo=z_lo,
            z_hi=z_hi,
            z_p=z_p,
            sign_p=sign.p_greater,
            sign_p_two_sided=sign.p_two_sided,
            sign_zeros=sign.zeros,
            sign_lo=sign_ci.lo,
            sign_hi=sign_ci.hi,
            wilcoxon_statistic=wilcoxon.statistic,
            wilcoxon_p=wilcoxon.p_greater,
            wilcoxon_p_two_sided=wilcoxon.p_two_sided,
            wilcoxon_lo=wilcoxon_ci.lo,
            wilcoxon_hi=wilcoxon_ci.hi,
            median=float(np.median(deltas)),
        ))
        logger.debug("LOCO x%d: theta=%.4g, wilcoxon interval [%.4g, %.4g]", j + 1, theta, wilcoxon_ci.lo, wilcoxon_ci.hi)
    return LocoReport(a, adjusted, tested, calibration.n, tuple(rows))
