from dataclasses import dataclass
from typing import Union

import numpy as np

from .constants import RANK_TOLERANCE

AUGMENTED = "augmented"
PLAIN = "plain"


@dataclass(frozen=True)
class MiscoverageLevel:
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        self._validate()

    def _validate(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")

    @property
    def coverage(self) -> float:
        return 1.0 - self.alpha

    def bonferroni(self, count: int) -> "MiscoverageLevel":
        if count < 1:
            raise ValueError(f"Bonferroni count must be >= 1, got {count}")
        return MiscoverageLevel(self.alpha / count)

    def __float__(self):
        return self.alpha


AlphaLike = Union[float, MiscoverageLevel]


def as_alpha(alpha: AlphaLike) -> float:
    if isinstance(alpha, MiscoverageLevel):
        return alpha.alpha
    return MiscoverageLevel(alpha).alpha


def quantile_rank(count: int, alpha: AlphaLike) -> int:
    """ceil(count * (1 - alpha)), robust to representation error in the product."""
    a = as_alpha(alpha)
    return int(np.ceil(count * (1.0 - a) - RANK_TOLERANCE))


def finite_sample_quantile(values, alpha: AlphaLike, rule: str = AUGMENTED) -> float:
    """Order-statistic quantile of a calibration sample.

    The augmented rule returns the k-th smallest value with
    k = ceil((m + 1)(1 - alpha)), or +inf when k exceeds m; the plain rule
    uses k = ceil(m (1 - alpha)).
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(values)):
        raise ValueError("sample values must be finite")
    m = values.size
    if rule == AUGMENTED:
        k = quantile_rank(m + 1, alpha)
    elif rule == PLAIN:
        k = quantile_rank(m, alpha)
    else:
        raise ValueError(f"rule must be '{AUGMENTED}' or '{PLAIN}', got '{rule}'")
    if k > m:
        return float("inf")
    k = max(k, 1)
    return float(np.sort(values, kind="stable")[k - 1])


def absolute_residuals(model, data) -> np.ndarray:
    if model.n_features != data.d:
        raise ValueError(f"dimension mismatch: model expects {model.n_features} features, data has {data.d}")
    return np.abs(data.y - model.predict(data.x))
