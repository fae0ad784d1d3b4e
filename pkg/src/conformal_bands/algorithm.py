import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .constants import CD_MAX_SWEEPS, CD_TOLERANCE, DEFAULT_CV_FOLDS

logger = logging.getLogger(__name__)

KINDS = (
    "ols",
    "ridge",
    "lasso",
    "elastic_net",
    "stepwise",
    "kernel_smoother",
    "bspline_additive",
    "zero",
)

TUNED_PARAMETER = {
    "ridge": "lam",
    "lasso": "lam",
    "elastic_net": "lam",
    "stepwise": "steps",
    "kernel_smoother": "bandwidth",
    "bspline_additive": "df",
}

# whether a larger value of the tuned parameter means a smoother fit
LARGER_IS_SMOOTHER = {
    "lam": True,
    "steps": False,
    "bandwidth": True,
    "df": False,
}


@dataclass(frozen=True)
class CrossValidation:
    grid: Tuple[float, ...]
    folds: int = DEFAULT_CV_FOLDS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        self._validate()

    def _validate(self):
        if len(self.grid) == 0:
            raise ValueError("Cross-validation grid must be nonempty")
        if self.folds < 2:
            raise ValueError(f"Cross-validation needs folds >= 2, got {self.folds}")


@dataclass(frozen=True)
class RegressionAlgorithm:
    kind: str
    lam: float = 0.0
    mixing: float = 1.0
    steps: int = 1
    bandwidth: float = 1.0
    df: int = 5
    unscaled: bool = False
    tuning: Optional[CrossValidation] = None
    tol: float = CD_TOLERANCE
    max_sweeps: int = CD_MAX_SWEEPS

    def __post_init__(self):
        self._validate()

    def _validate(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown estimator kind '{self.kind}'. Must be one of {', '.join(KINDS)}")
        if self.lam < 0:
            raise ValueError(f"Penalty lam must be >= 0, got {self.lam}")
        if not (0.0 <= self.mixing <= 1.0):
            raise ValueError(f"Elastic net mixing must be in [0, 1], got {self.mixing}")
        if self.steps < 0 or int(self.steps) != self.steps:
            raise ValueError(f"Stepwise step count must be a non-negative integer, got {self.steps}")
        if self.bandwidth <= 0:
            raise ValueError(f"Kernel bandwidth must be > 0, got {self.bandwidth}")
        if self.df < 3 or int(self.df) != self.df:
            raise ValueError(f"Spline degrees of freedom must be an integer >= 3, got {self.df}")
        if self.tuning is not None:
            if self.kind not in TUNED_PARAMETER:
                raise ValueError(f"Estimator kind '{self.kind}' has no tuning parameter to cross-validate")
            parameter = TUNED_PARAMETER[self.kind]
            for value in self.tuning.grid:
                dataclasses.replace(self, tuning=None, **{parameter: _cast(parameter, value)})

    @property
    def tuned_parameter(self) -> Optional[str]:
        return TUNED_PARAMETER.get(self.kind)

    def with_value(self, value) -> "RegressionAlgorithm":
        parameter = self.tuned_parameter
        if parameter is None:
            raise ValueError(f"Estimator kind '{self.kind}' has no tuning parameter")
        return dataclasses.replace(self, tuning=None, **{parameter: _cast(parameter, value)})

    def hyperparameters(self) -> Dict[str, float]:
        if self.kind == "ridge":
            return {"lam": self.lam, "unscaled": self.unscaled}
        if self.kind == "lasso":
            return {"lam": self.lam}
        if self.kind == "elastic_net":
            return {"lam": self.lam, "mixing": self.mixing}
        if self.kind == "stepwise":
            return {"steps": self.steps}
        if self.kind == "kernel_smoother":
            return {"bandwidth": self.bandwidth}
        if self.kind == "bspline_additive":
            return {"df": self.df}
        return {}

    def __str__(self):
        params = ",".join(f"{k}={v}" for k, v in self.hyperparameters().items())
        tuning = f",cv={self.tuning.folds}" if self.tuning is not None else ""
        return f"{self.kind}:{params}{tuning}" if params or tuning else self.kind


def _cast(parameter: str, value):
    if parameter in ("steps", "df"):
        return int(round(value))
    return float(value)


@dataclass(frozen=True)
class FittedModel:
    kind: str
    n_features: int
    predictor: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    intercept: float = 0.0
    coef: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    selected: Optional[Tuple[int, ...]] = None
    params: Dict[str, float] = field(default_factory=dict)
    train_x: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    train_y: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def predict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[1] != self.n_features:
            raise ValueError(f"dimension mismatch: model expects {self.n_features} features, got {x.shape[1]}")
        return np.asarray(self.predictor(x), dtype=float).reshape(-1)

    def __call__(self, x) -> float:
        return float(self.predict(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def describe(self) -> dict:
        info = {"kind": self.kind, "params": dict(self.params), "intercept": float(self.intercept)}
        if self.coef is not None:
            info["coef"] = [float(c) for c in self.coef]
        if self.selected is not None:
            info["selected"] = [int(j) for j in self.selected]
        return info


def fit(alg: RegressionAlgorithm, data) -> FittedModel:
    from . import bspline, kernel_smoother, lasso, linear, stepwise
    from .cross_validation import cross_validate

    if alg.tuning is not None:
        alg = cross_validate(alg, data)

    if alg.kind == "zero":
        return linear.fit_zero(data)
    if alg.kind == "ols":
        return linear.fit_ols(data)
    if alg.kind == "ridge":
        return linear.fit_ridge(data, alg.lam, unscaled=alg.unscaled)
    if alg.kind == "lasso":
        return lasso.fit_elastic_net(data, alg.lam, 1.0, tol=alg.tol, max_sweeps=alg.max_sweeps)
    if alg.kind == "elastic_net":
        return lasso.fit_elastic_net(data, alg.lam, alg.mixing, tol=alg.tol, max_sweeps=alg.max_sweeps)
    if alg.kind == "stepwise":
        return stepwise.fit_stepwise(data, alg.steps)
    if alg.kind == "kernel_smoother":
        return kernel_smoother.fit_kernel_smoother(data, alg.bandwidth)
    if alg.kind == "bspline_additive":
        return bspline.fit_bspline_additive(data, alg.df)
    raise ValueError(f"Unknown estimator kind '{alg.kind}'")
