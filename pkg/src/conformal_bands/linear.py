import numpy as np
import scipy.linalg

from .algorithm import FittedModel
from .exceptions import RankDeficientError


def _linear_predictor(intercept: float, coef: np.ndarray):
    coef = np.array(coef, dtype=float)

    def predict(x):
        return intercept + x @ coef

    return predict


def _varying_columns(x: np.ndarray) -> np.ndarray:
    spread = np.ptp(x, axis=0)
    return np.flatnonzero(spread > 0)


def fit_zero(data) -> FittedModel:
    return FittedModel(
        kind="zero",
        n_features=data.d,
        predictor=lambda x: np.zeros(x.shape[0]),
        intercept=0.0,
        coef=np.zeros(data.d),
    )


def least_squares(x: np.ndarray, y: np.ndarray):
    """OLS with an unpenalized intercept; constant columns get coefficient 0."""
    n, d = x.shape
    x_mean = x.mean(axis=0)
    y_mean = y.mean()
    coef = np.zeros(d)
    active = _varying_columns(x)
    if active.size > 0:
        xc = x[:, active] - x_mean[active]
        if n <= active.size:
            raise RankDeficientError(
                f"rank deficient: OLS needs n > d, got n={n}, d={active.size}; use ridge or lasso instead"
            )
        solution, _, rank, _ = scipy.linalg.lstsq(xc, y - y_mean)
        if rank < active.size:
            raise RankDeficientError(f"rank deficient: design has rank {rank} < {active.size} columns")
        coef[active] = solution
    intercept = y_mean - x_mean @ coef
    return intercept, coef


def fit_ols(data) -> FittedModel:
    intercept, coef = least_squares(data.x, data.y)
    return FittedModel(
        kind="ols",
        n_features=data.d,
        predictor=_linear_predictor(intercept, coef),
        intercept=float(intercept),
        coef=coef,
        train_x=data.x,
        train_y=data.y,
    )


def ridge_penalty(n: int, lam: float, unscaled: bool) -> float:
    return lam if unscaled else n * lam


def fit_ridge(data, lam: float, unscaled: bool = False) -> FittedModel:
    """Ridge with objective (1/2n)||y - b0 - X b||^2 + (lam/2)||b||^2.

    With unscaled=True the penalty is (1/2)(||y - b0 - X b||^2 + lam ||b||^2).
    """
    x, y = data.x, data.y
    n, d = x.shape
    x_mean = x.mean(axis=0)
    y_mean = y.mean()
    xc = x - x_mean
    penalty = ridge_penalty(n, lam, unscaled)
    gram = xc.T @ xc + penalty * np.eye(d)
    try:
        coef = scipy.linalg.solve(gram, xc.T @ (y - y_mean), assume_a="sym")
    except scipy.linalg.LinAlgError as exc:
        raise RankDeficientError(f"rank deficient: ridge system is singular with lam={lam}") from exc
    intercept = y_mean - x_mean @ coef
    return FittedModel(
        kind="ridge",
        n_features=d,
        predictor=_linear_predictor(intercept, coef),
        intercept=float(intercept),
        coef=coef,
        params={"lam": lam, "unscaled": unscaled},
        train_x=x,
        train_y=y,
    )


def is_linear_smoother(alg) -> bool:
    return alg.tuning is None and alg.kind in ("zero", "ols", "ridge")


def smoother_matrix(alg, x: np.ndarray) -> np.ndarray:
    """Hat matrix H of a zero, OLS or ridge fit on design x, intercept included."""
    n, d = x.shape
    if alg.kind == "zero":
        return np.zeros((n, n))
    centering = np.full((n, n), 1.0 / n)
    if alg.kind == "ridge":
        xc = x - x.mean(axis=0)
        gram = xc.T @ xc + ridge_penalty(n, alg.lam, alg.unscaled) * np.eye(d)
        try:
            return centering + xc @ scipy.linalg.solve(gram, xc.T, assume_a="sym")
        except scipy.linalg.LinAlgError as exc:
            raise RankDeficientError(f"rank deficient: ridge system is singular with lam={alg.lam}") from exc
    if alg.kind != "ols":
        raise ValueError(f"Estimator kind '{alg.kind}' is not a linear smoother")
    active = _varying_columns(x)
    if active.size == 0:
        return centering
    if n <= active.size:
        raise RankDeficientError(
            f"rank deficient: OLS needs n > d, got n={n}, d={active.size}; use ridge or lasso instead"
        )
    xc = x[:, active] - x[:, active].mean(axis=0)
    q, r, _ = scipy.linalg.qr(xc, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.count_nonzero(diag > diag[0] * max(n, active.size) * np.finfo(float).eps))
    if rank < active.size:
        raise RankDeficientError(f"rank deficient: design has rank {rank} < {active.size} columns")
    return centering + q @ q.T
