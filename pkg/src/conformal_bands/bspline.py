from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import scipy.linalg
from scipy.interpolate import BSpline

from .algorithm import FittedModel

DEGREE = 3


@dataclass(frozen=True)
class SplineBasis:
    lo: float
    hi: float
    interior: Tuple[float, ...]

    @property
    def size(self) -> int:
        if self.hi <= self.lo:
            return 0
        return len(self.interior) + DEGREE

    def knots(self) -> np.ndarray:
        return np.concatenate([[self.lo] * (DEGREE + 1), self.interior, [self.hi] * (DEGREE + 1)])

    def design(self, values: np.ndarray) -> np.ndarray:
        """Cubic B-spline columns without the first basis function.

        Values outside [lo, hi] are clamped to the boundary.
        """
        values = np.asarray(values, dtype=float)
        if self.size == 0:
            return np.zeros((values.shape[0], 0))
        clamped = np.clip(values, self.lo, self.hi)
        full = BSpline.design_matrix(clamped, self.knots(), DEGREE).toarray()
        return full[:, 1:]


def quantile_basis(values: np.ndarray, df: int) -> SplineBasis:
    lo, hi = float(np.min(values)), float(np.max(values))
    n_interior = df - DEGREE
    if n_interior > 0 and hi > lo:
        probs = np.linspace(0.0, 1.0, n_interior + 2)[1:-1]
        interior = np.unique(np.quantile(values, probs))
        interior = interior[(interior > lo) & (interior < hi)]
    else:
        interior = np.array([])
    return SplineBasis(lo, hi, tuple(float(k) for k in interior))


def additive_design(x: np.ndarray, bases: List[SplineBasis]) -> np.ndarray:
    blocks = [basis.design(x[:, j]) for j, basis in enumerate(bases)]
    return np.hstack(blocks) if blocks else np.zeros((x.shape[0], 0))


def fit_bspline_additive(data, df: int) -> FittedModel:
    x, y = data.x, data.y
    bases = [quantile_basis(x[:, j], df) for j in range(data.d)]
    design = additive_design(x, bases)
    y_mean = y.mean()
    if design.shape[1] > 0:
        column_mean = design.mean(axis=0)
        weights = scipy.linalg.lstsq(design - column_mean, y - y_mean)[0]
        intercept = y_mean - column_mean @ weights
    else:
        weights = np.zeros(0)
        intercept = y_mean

    def predict(x_new):
        return intercept + additive_design(x_new, bases) @ weights

    return FittedModel(
        kind="bspline_additive",
        n_features=data.d,
        predictor=predict,
        intercept=float(intercept),
        params={"df": df},
    )
