import logging

import numpy as np

from .algorithm import FittedModel
from .lasso import standardize
from .linear import _linear_predictor, least_squares

logger = logging.getLogger(__name__)


def forward_path(x: np.ndarray, y: np.ndarray, steps: int):
    """Columns in the order forward stepwise adds them.

    Each step adds the column most correlated with the current least-squares
    residual; ties go to the lowest column index.
    """
    n, d = x.shape
    xs, _, _ = standardize(x)
    usable = np.ptp(x, axis=0) > 0
    limit = min(steps, int(usable.sum()), n - 1)
    active = []
    residual = y - y.mean()
    for _ in range(max(limit, 0)):
        score = np.abs(xs.T @ residual)
        score[~usable] = -np.inf
        score[active] = -np.inf
        j = int(np.argmax(score))
        if not np.isfinite(score[j]):
            break
        active.append(j)
        intercept, coef = least_squares(x[:, active], y)
        residual = y - intercept - x[:, active] @ coef
    return active


def fit_stepwise(data, steps: int) -> FittedModel:
    x, y = data.x, data.y
    active = forward_path(x, y, steps)
    coef = np.zeros(data.d)
    if active:
        intercept, sub = least_squares(x[:, active], y)
        coef[active] = sub
    else:
        intercept = float(y.mean())
    logger.debug("stepwise selected %s", active)
    return FittedModel(
        kind="stepwise",
        n_features=data.d,
        predictor=_linear_predictor(intercept, coef),
        intercept=float(intercept),
        coef=coef,
        selected=tuple(sorted(active)),
        params={"steps": steps},
    )
