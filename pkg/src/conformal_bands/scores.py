from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algorithm import FittedModel, RegressionAlgorithm, fit
from .constants import MAD_FLOOR_FRACTION
from .dataset import DataSet

ABSOLUTE = "absolute"
LOCALLY_WEIGHTED = "locally_weighted"


@dataclass(frozen=True)
class ConformityScore:
    kind: str = ABSOLUTE
    mad_algorithm: Optional[RegressionAlgorithm] = None

    def __post_init__(self):
        self._validate()

    def _validate(self):
        if self.kind not in (ABSOLUTE, LOCALLY_WEIGHTED):
            raise ValueError(f"Score kind must be '{ABSOLUTE}' or '{LOCALLY_WEIGHTED}', got '{self.kind}'")
        if self.kind == LOCALLY_WEIGHTED and self.mad_algorithm is None:
            raise ValueError("Locally-weighted scores require a mad_algorithm")
        if self.kind == ABSOLUTE and self.mad_algorithm is not None:
            raise ValueError("Absolute scores take no mad_algorithm")

    @property
    def weighted(self) -> bool:
        return self.kind == LOCALLY_WEIGHTED

    def __str__(self):
        return self.kind if not self.weighted else f"{self.kind}({self.mad_algorithm})"


@dataclass(frozen=True)
class SpreadModel:
    """Conditional mean-absolute-deviation estimate, floored away from zero."""

    model: FittedModel
    floor: float

    def predict(self, x) -> np.ndarray:
        return np.maximum(self.model.predict(x), self.floor)


def fit_spread(score: ConformityScore, mean_model: FittedModel, data: DataSet) -> Optional[SpreadModel]:
    if not score.weighted:
        return None
    abs_residuals = np.abs(data.y - mean_model.predict(data.x))
    mean_abs = float(abs_residuals.mean())
    floor = MAD_FLOOR_FRACTION * mean_abs if mean_abs > 0 else MAD_FLOOR_FRACTION
    model = fit(score.mad_algorithm, DataSet(data.x, abs_residuals))
    return SpreadModel(model, floor)


def spread_at(spread: Optional[SpreadModel], x) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if spread is None:
        return np.ones(x.shape[0])
    return spread.predict(x)


def conformity_scores(mean_model: FittedModel, spread: Optional[SpreadModel], data: DataSet) -> np.ndarray:
    return np.abs(data.y - mean_model.predict(data.x)) / spread_at(spread, data.x)
