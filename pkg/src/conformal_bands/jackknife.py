import logging

import numpy as np

from .algorithm import RegressionAlgorithm, fit
from .band import ConformalBand
from .dataset import DataSet
from .linear import smoother_matrix
from .quantiles import PLAIN, as_alpha, finite_sample_quantile
from .scores import ConformityScore, fit_spread, spread_at

logger = logging.getLogger(__name__)

LEVERAGE_LIMIT = 1.0 - 1e-8


def _has_deletion_formula(alg: RegressionAlgorithm) -> bool:
    # a fixed quadratic penalty keeps r_(-i) = r_i / (1 - h_ii) exact
    if alg.tuning is not None:
        return False
    return alg.kind in ("zero", "ols") or (alg.kind == "ridge" and alg.unscaled)


def leave_one_out_residuals(alg: RegressionAlgorithm, data: DataSet) -> np.ndarray:
    if _has_deletion_formula(alg) and data.n > data.d + 1:
        hat = smoother_matrix(alg, data.x)
        leverage = np.diag(hat)
        if np.all(leverage < LEVERAGE_LIMIT):
            return np.abs(data.y - hat @ data.y) / (1.0 - leverage)
    residuals = np.empty(data.n)
    rows = np.arange(data.n)
    for i in range(data.n):
        model = fit(alg, data.subset(np.delete(rows, i)))
        residuals[i] = abs(data.y[i] - model.predict(data.x[i])[0])
    return residuals


def jackknife_band(
    alg: RegressionAlgorithm, data: DataSet, alpha, score: ConformityScore = ConformityScore()
) -> ConformalBand:
    """Leave-one-out residual quantile around the full-data fit."""
    if data.n < 2:
        raise ValueError(f"Jackknife needs n >= 2, got n={data.n}")
    a = as_alpha(alpha)
    model = fit(alg, data)
    spread = fit_spread(score, model, data)
    scores = leave_one_out_residuals(alg, data) / spread_at(spread, data.x)
    halfwidth = finite_sample_quantile(scores, a, rule=PLAIN)
    logger.debug("jackknife halfwidth %.6g from %d leave-one-out fits", halfwidth, data.n)
    return ConformalBand("jackknife", a, (model,), (halfwidth,), (spread,), score=score.kind)
