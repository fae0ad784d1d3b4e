import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .dataset import DataSet

MEAN_FIELDS = (
    "coverage",
    "length",
    "infinite_fraction",
    "test_error",
    "train_error",
    "relative_optimism",
    "mean_error",
    "coverage_spread",
    "wall_time",
)

GROUP_FIELDS = ("experiment", "setting", "method", "tuning")


@dataclass(frozen=True)
class MetricRow:
    """One method on one setting; means and their standard errors over ``reps`` repetitions.

    ``length`` averages the finite intervals only; ``infinite_fraction`` counts the rest.
    """

    experiment: str
    setting: str
    method: str
    coverage: float
    length: float
    infinite_fraction: float = 0.0
    test_error: float = float("nan")
    train_error: float = float("nan")
    relative_optimism: float = float("nan")
    mean_error: float = float("nan")
    coverage_spread: float = float("nan")
    wall_time: float = 0.0
    tuning: float = float("nan")
    reps: int = 1
    coverage_se: float = 0.0
    length_se: float = 0.0
    infinite_fraction_se: float = 0.0
    test_error_se: float = 0.0
    train_error_se: float = 0.0
    relative_optimism_se: float = 0.0
    mean_error_se: float = 0.0
    coverage_spread_se: float = 0.0
    wall_time_se: float = 0.0

    def __post_init__(self):
        self._validate()

    def _validate(self):
        if not 0.0 <= self.coverage <= 1.0:
            raise ValueError(f"coverage must be in [0, 1], got {self.coverage}")
        if not 0.0 <= self.infinite_fraction <= 1.0:
            raise ValueError(f"infinite_fraction must be in [0, 1], got {self.infinite_fraction}")
        if self.length < 0:
            raise ValueError(f"length must be >= 0, got {self.length}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")

    def to_dict(self) -> dict:
        return asdict(self)


def relative_optimism(test_error: float, train_error: float) -> float:
    if not test_error > 0:
        return float("nan")
    return (test_error - train_error) / test_error


def _mean(values) -> float:
    values = np.asarray(values, dtype=float)
    return math.fsum(values) / values.size if values.size else float("nan")


def interval_lengths(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Lengths with empty (NaN) intervals counted as 0 and unbounded ones as inf."""
    lengths = hi - lo
    return np.where(np.isnan(lengths), 0.0, lengths)


def covered(lo: np.ndarray, hi: np.ndarray, y: np.ndarray) -> np.ndarray:
    # NaN endpoints compare False, so empty intervals never cover
    return (lo <= y) & (y <= hi)


def binned_coverage(x: np.ndarray, hit: np.ndarray, lengths: np.ndarray, edges: np.ndarray):
    which = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(edges) - 2)
    coverage = np.full(len(edges) - 1, np.nan)
    length = np.full(len(edges) - 1, np.nan)
    for b in range(len(edges) - 1):
        rows = which == b
        if rows.any():
            coverage[b] = _mean(hit[rows])
            length[b] = _mean(lengths[rows])
    return coverage, length


def evaluate(
    method,
    truth,
    test: DataSet,
    train: Optional[DataSet] = None,
    experiment: str = "",
    setting: str = "",
    name: str = "",
    tuning: float = float("nan"),
    wall_time: float = 0.0,
    bin_edges: Optional[np.ndarray] = None,
) -> MetricRow:
    lo, hi = method.predict_interval(test.x)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    hit = covered(lo, hi, test.y)
    lengths = interval_lengths(lo, hi)
    finite = np.isfinite(lengths)
    prediction = method.predict(test.x)
    test_error = _mean(np.abs(test.y - prediction))
    train_error = _mean(np.abs(train.y - method.predict(train.x))) if train is not None else float("nan")
    mean_error = _mean(np.abs(prediction - truth.mean(test.x))) if truth is not None else float("nan")
    spread = float("nan")
    if bin_edges is not None:
        bin_cov, _ = binned_coverage(test.x[:, 0], hit, lengths, bin_edges)
        spread = float(np.nanmax(bin_cov) - np.nanmin(bin_cov))
    return MetricRow(
        experiment=experiment,
        setting=setting,
        method=name,
        coverage=_mean(hit),
        length=_mean(lengths[finite]) if finite.any() else 0.0,
        infinite_fraction=float(1.0 - _mean(finite)),
        test_error=test_error,
        train_error=train_error,
        relative_optimism=relative_optimism(test_error, train_error),
        mean_error=mean_error,
        coverage_spread=spread,
        wall_time=wall_time,
        tuning=tuning,
    )


def _group_key(row: MetricRow) -> Tuple:
    tuning = None if np.isnan(row.tuning) else row.tuning
    return row.experiment, row.setting, row.method, tuning


def _summarize(values: Sequence[float]) -> Tuple[float, float]:
    values = np.asarray([v for v in values if not np.isnan(v)], dtype=float)
    if values.size == 0:
        return float("nan"), float("nan")
    mean = math.fsum(values) / values.size
    if values.size < 2:
        return mean, 0.0
    variance = math.fsum((values - mean) ** 2) / (values.size - 1)
    return mean, math.sqrt(variance / values.size)


def aggregate(rows: Iterable[MetricRow]) -> List[MetricRow]:
    """Average per-repetition rows sharing (experiment, setting, method, tuning).

    Groups keep first-appearance order; each mean gets stderr = sd / sqrt(reps).
    """
    groups: Dict[Tuple, List[MetricRow]] = {}
    for row in rows:
        groups.setdefault(_group_key(row), []).append(row)
    result = []
    for members in groups.values():
        update = {"reps": len(members)}
        for name in MEAN_FIELDS:
            mean, se = _summarize([getattr(r, name) for r in members])
            if name in ("coverage", "infinite_fraction") and not np.isnan(mean):
                mean = min(max(mean, 0.0), 1.0)
            update[name] = mean
            update[f"{name}_se"] = se
        result.append(replace(members[0], **update))
    return result


def rows_to_frame(rows: Sequence[MetricRow], timing: bool = False) -> pd.DataFrame:
    columns = [f.name for f in fields(MetricRow)]
    if not timing:
        columns = [c for c in columns if c not in ("wall_time", "wall_time_se")]
    return pd.DataFrame([r.to_dict() for r in rows], columns=columns)
