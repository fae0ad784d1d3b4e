import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algorithm import RegressionAlgorithm, fit
from .constants import DEFAULT_GRID_POINTS
from .dataset import DataSet
from .exceptions import FitError
from .interval import PredictionSet
from .linear import is_linear_smoother, smoother_matrix
from .quantiles import as_alpha, quantile_rank
from .scores import ConformityScore, conformity_scores, fit_spread

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialGrid:
    lo: float
    hi: float
    count: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        self._validate()

    def _validate(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError(f"Trial grid endpoints must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise ValueError(f"degenerate trial grid: need lo < hi, got lo={self.lo}, hi={self.hi}")
        if self.count < 2:
            raise ValueError(f"degenerate trial grid: need count >= 2, got {self.count}")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.count - 1)

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    @classmethod
    def default_for(cls, y, count: int = DEFAULT_GRID_POINTS) -> "TrialGrid":
        y = np.asarray(y, dtype=float)
        spread = float(np.ptp(y))
        if spread == 0:
            spread = 1.0
        return cls(float(y.min()) - spread, float(y.max()) + spread, count)


def conformal_p_count(scores: np.ndarray) -> int:
    """(n+1) pi(y): how many augmented scores are <= the test point's score."""
    return int(np.count_nonzero(scores <= scores[-1]))


def augmented_rank(alg: RegressionAlgorithm, data: DataSet, x: np.ndarray, y: float,
                   score: ConformityScore = ConformityScore()) -> int:
    augmented = data.augment(x, y)
    try:
        model = fit(alg, augmented)
        spread = fit_spread(score, model, augmented)
    except (np.linalg.LinAlgError, ArithmeticError, ValueError) as exc:
        raise FitError(f"fit failed at trial value y={y:.6g}: {exc}", trial_value=float(y)) from exc
    return conformal_p_count(conformity_scores(model, spread, augmented))


def full_conformal_contains(alg: RegressionAlgorithm, data: DataSet, x, y: float, alpha,
                            score: ConformityScore = ConformityScore()) -> bool:
    """Whether y belongs to the full conformal set at x, with one augmented fit."""
    x = np.asarray(x, dtype=float).reshape(-1)
    return augmented_rank(alg, data, x, float(y), score) <= quantile_rank(data.n + 1, as_alpha(alpha))


def linear_smoother_counts(alg: RegressionAlgorithm, data: DataSet, x: np.ndarray, trial: np.ndarray) -> np.ndarray:
    """(n+1) pi(y) for every trial value at once.

    Augmented residuals of a linear smoother are affine in the trial value:
    r(y) = a + b y with a = (I - H)(Y, 0) and b = (I - H) e_{n+1}.
    """
    augmented_x = np.vstack([data.x, x.reshape(1, -1)])
    try:
        hat = smoother_matrix(alg, augmented_x)
    except (np.linalg.LinAlgError, ArithmeticError, ValueError) as exc:
        raise FitError(f"fit failed on the augmented design: {exc}") from exc
    residual_maker = np.eye(data.n + 1) - hat
    offset = residual_maker[:, :-1] @ data.y
    slope = residual_maker[:, -1]
    scores = np.abs(offset[:, None] + slope[:, None] * trial[None, :])
    return np.count_nonzero(scores <= scores[-1], axis=0)


def full_conformal(
    alg: RegressionAlgorithm,
    data: DataSet,
    x,
    alpha,
    grid: Optional[TrialGrid] = None,
    score: ConformityScore = ConformityScore(),
) -> PredictionSet:
    """Accepts trial value y when (n+1) pi(y) <= ceil((1 - alpha)(n + 1)), refitting per y."""
    a = as_alpha(alpha)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != data.d:
        raise ValueError(f"dimension mismatch: point has {x.shape[0]} features, data has {data.d}")
    grid = TrialGrid.default_for(data.y) if grid is None else grid
    threshold = quantile_rank(data.n + 1, a)
    if is_linear_smoother(alg) and not score.weighted:
        trial = grid.values()
        accepted = trial[linear_smoother_counts(alg, data, x, trial) <= threshold]
    else:
        accepted = [y for y in grid.values() if augmented_rank(alg, data, x, y, score) <= threshold]
    result = PredictionSet(np.array(accepted), grid.step)
    if not result.contiguous:
        logger.warning("full conformal set at x=%s is not contiguous; reporting its hull", x.tolist())
    if result.is_empty:
        logger.warning("full conformal set at x=%s is empty on the trial grid", x.tolist())
    return result


class FullConformalMethod:

    def __init__(self, alg: RegressionAlgorithm, data: DataSet, alpha, grid: Optional[TrialGrid] = None,
                 score: ConformityScore = ConformityScore()):
        self.alg = alg
        self.data = data
        self.alpha = as_alpha(alpha)
        self.grid = TrialGrid.default_for(data.y) if grid is None else grid
        self.score = score
        self._center = fit(alg, data)

    def predict(self, x) -> np.ndarray:
        return self._center.predict(x)

    def predict_interval(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        lo = np.empty(x.shape[0])
        hi = np.empty(x.shape[0])
        for i, point in enumerate(x):
            hull = full_conformal(self.alg, self.data, point, self.alpha, self.grid, self.score).hull
            lo[i], hi[i] = (hull.lo, hull.hi) if not hull.empty else (np.nan, np.nan)
        return lo, hi
