import logging
import math
from typing import List

import numpy as np

from .algorithm import LARGER_IS_SMOOTHER, RegressionAlgorithm, fit
from .splitting import make_rng

logger = logging.getLogger(__name__)


def fold_assignment(n: int, folds: int, seed: int) -> List[np.ndarray]:
    if n < 2:
        raise ValueError(f"Cross-validation needs at least 2 rows, got n={n}")
    if n < folds:
        logger.debug("only %d rows for %d folds; using leave-one-out folds", n, folds)
        folds = n
    perm = make_rng(seed).permutation(n)
    return [np.sort(part) for part in np.array_split(perm, folds)]


def cv_errors(alg: RegressionAlgorithm, data) -> np.ndarray:
    """Mean squared held-out prediction error for every grid value."""
    tuning = alg.tuning
    parts = fold_assignment(data.n, tuning.folds, tuning.seed)
    errors = np.zeros(len(tuning.grid))
    for g, value in enumerate(tuning.grid):
        candidate = alg.with_value(value)
        squared = []
        for held_out in parts:
            train = np.setdiff1d(np.arange(data.n), held_out)
            model = fit(candidate, data.subset(train))
            squared.extend((data.y[held_out] - model.predict(data.x[held_out])) ** 2)
        errors[g] = math.fsum(squared) / data.n
    return errors


def cross_validate(alg: RegressionAlgorithm, data) -> RegressionAlgorithm:
    if alg.tuning is None:
        raise ValueError(f"Estimator {alg} is not configured for cross-validation")
    grid = alg.tuning.grid
    if len(grid) == 1:
        return alg.with_value(grid[0])
    errors = cv_errors(alg, data)
    best = np.min(errors)
    tied = [g for g in range(len(grid)) if np.isclose(errors[g], best, rtol=1e-12, atol=0.0)]
    smoother = max if LARGER_IS_SMOOTHER[alg.tuned_parameter] else min
    choice = smoother(tied, key=lambda g: grid[g])
    logger.debug("cross-validation picked %s=%s (error %.6g)", alg.tuned_parameter, grid[choice], errors[choice])
    return alg.with_value(grid[choice])
