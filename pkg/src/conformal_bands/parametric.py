"""Classical Gaussian-linear-model prediction intervals for OLS and ridge fits."""
import numpy as np
import scipy.linalg
from scipy import stats

from .interval import Interval
from .linear import ridge_penalty
from .quantiles import as_alpha


class ParametricIntervals:
    """Precomputed pieces of the t-interval, evaluable at many points."""

    def __init__(self, model, data, alpha):
        if model.kind not in ("ols", "ridge"):
            raise ValueError(f"Parametric intervals need an ols or ridge fit, got '{model.kind}'")
        if model.coef is None:
            raise ValueError("Parametric intervals need a model carrying its coefficient vector")
        self.model = model
        self.alpha = as_alpha(alpha)
        x, y = data.x, data.y
        n, d = x.shape
        residual = y - model.predict(x)
        rss = float(residual @ residual)
        self.x_mean = x.mean(axis=0)
        xc = x - self.x_mean
        gram = xc.T @ xc
        if model.kind == "ols":
            if n <= d + 1:
                raise ValueError(f"OLS parametric interval needs n > d + 1, got n={n}, d={d}")
            self.dof = n - d - 1
            self.quad = scipy.linalg.pinvh(gram)
        else:
            penalty = ridge_penalty(n, model.params["lam"], model.params.get("unscaled", False))
            inverse = scipy.linalg.inv(gram + penalty * np.eye(d))
            self.quad = inverse @ gram @ inverse
            trace_hat = float(np.trace(gram @ inverse)) + 1.0
            self.dof = n - trace_hat
            if self.dof <= 0:
                raise ValueError(f"Ridge residual degrees of freedom must be positive, got {self.dof:.3f}")
        self.n = n
        self.sigma = np.sqrt(rss / self.dof)
        self.t_quantile = float(stats.t.ppf(1.0 - self.alpha / 2.0, self.dof))

    def halfwidths(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        centered = x - self.x_mean
        # intercept-variance term 1/n plus the slope quadratic form
        spread = 1.0 + 1.0 / self.n + np.einsum("ij,jk,ik->i", centered, self.quad, centered)
        return self.t_quantile * self.sigma * np.sqrt(spread)

    def predict(self, x) -> np.ndarray:
        return self.model.predict(x)

    def predict_interval(self, x):
        center = self.predict(x)
        width = self.halfwidths(x)
        return center - width, center + width


def parametric_interval(model, data, x, alpha) -> Interval:
    intervals = ParametricIntervals(model, data, alpha)
    lo, hi = intervals.predict_interval(np.asarray(x, dtype=float).reshape(1, -1))
    return Interval(lo[0], hi[0])
