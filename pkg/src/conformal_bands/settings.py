"""Simulation settings: feature laws, mean functions and noise for the benchmark experiments."""
import functools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import stats

from .bspline import SplineBasis
from .constants import (
    PI,
    REFERENCE_DRAWS,
    SETTING_B_BASIS_PER_COORDINATE,
    SETTING_C_CURRENT_WEIGHT,
    SETTING_C_LAG_WEIGHT,
    SETTING_C_MAX_LAG,
    SINE_HOMO_SCALE,
    SKEW_NORMAL_SHAPE,
    T_NOISE_DF,
)
from .dataset import DataSet
from .splitting import derive_seeds, make_rng

logger = logging.getLogger(__name__)

SETTINGS = ("A", "B", "C", "D", "sine_hetero", "sine_homo", "additive6", "sparse_gauss")

# n, d, s, coef_magnitude, n_test
SETTING_DEFAULTS = {
    "A": (100, 10, 10, 1.0, 100),
    "B": (100, 10, 10, 1.0, 100),
    "C": (100, 10, 10, 1.0, 100),
    "D": (200, 2000, 100, 8.0, 100),
    "sine_hetero": (1000, 1, 1, 1.0, 5000),
    "sine_homo": (1000, 1, 1, 1.0, 5000),
    "additive6": (1000, 6, 3, 1.0, 1000),
    "sparse_gauss": (200, 500, 5, 2.0, 100),
}

REFERENCE_CHUNK = 5000
# Setting B spline boundary: central 98% of the N(0, 1) feature law
SPLINE_BOUNDARY_PROB = 0.01


@dataclass(frozen=True)
class SettingSpec:
    setting: str
    n: int
    d: int
    s: int
    coef_magnitude: float = 1.0
    seed: int = 0
    n_test: int = 100
    truth_seed: int = 0

    def __post_init__(self):
        self._validate()

    def _validate(self):
        if self.setting not in SETTINGS:
            raise ValueError(f"Unknown setting '{self.setting}'. Must be one of {', '.join(SETTINGS)}")
        if self.n < 1 or self.d < 1 or self.n_test < 1:
            raise ValueError(f"n, d and n_test must be >= 1, got n={self.n}, d={self.d}, n_test={self.n_test}")
        if not 0 <= self.s <= self.d:
            raise ValueError(f"Sparsity s must be in [0, d={self.d}], got {self.s}")
        if self.coef_magnitude < 0:
            raise ValueError(f"coef_magnitude must be >= 0, got {self.coef_magnitude}")
        if self.setting == "C" and self.d < SETTING_C_MAX_LAG + 1:
            raise ValueError(f"Setting C needs d >= {SETTING_C_MAX_LAG + 1} for its autocorrelation window, got {self.d}")
        if self.setting.startswith("sine") and self.d != 1:
            raise ValueError(f"Sine settings are one-dimensional, got d={self.d}")
        if self.setting == "additive6" and self.d != 6:
            raise ValueError(f"The additive six-covariate setting needs d=6, got d={self.d}")

    @classmethod
    def default(cls, setting: str, **overrides) -> "SettingSpec":
        if setting not in SETTING_DEFAULTS:
            raise ValueError(f"Unknown setting '{setting}'. Must be one of {', '.join(SETTINGS)}")
        n, d, s, magnitude, n_test = SETTING_DEFAULTS[setting]
        values = dict(setting=setting, n=n, d=d, s=s, coef_magnitude=magnitude, n_test=n_test)
        values.update(overrides)
        if "d" in overrides and "s" not in overrides:
            values["s"] = min(values["s"], values["d"])
        return cls(**values)

    def with_seed(self, seed: int) -> "SettingSpec":
        return replace(self, seed=int(seed))


@dataclass(frozen=True)
class Truth:
    setting: str
    d: int
    features: Callable[[np.random.Generator, int], np.ndarray] = field(repr=False)
    mean: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    noise: Callable[[np.random.Generator, int], np.ndarray] = field(repr=False)
    noise_scale: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    coef: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    support: Tuple[int, ...] = ()
    noise_law: Optional[str] = None

    @property
    def homoskedastic(self) -> bool:
        return self.noise_law is not None

    def draw(self, rng: np.random.Generator, size: int) -> DataSet:
        x = self.features(rng, size)
        y = self.mean(x) + self.noise_scale(x) * self.noise(rng, size)
        return DataSet(x, y)

    def noise_quantile(self, alpha: float) -> Optional[float]:
        if self.noise_law == "normal":
            return float(stats.norm.ppf(1.0 - alpha / 2.0))
        if self.noise_law == "t2":
            return float(stats.t.ppf(1.0 - alpha / 2.0, T_NOISE_DF))
        return None


def _normal_features(d):
    return lambda rng, size: rng.standard_normal((size, d))


def _normal_noise(rng, size):
    return rng.standard_normal(size)


def _t_noise(rng, size):
    return rng.standard_t(T_NOISE_DF, size)


def _unit_scale(x):
    return np.ones(x.shape[0])


def _signed_coefficients(rng, count, magnitude):
    return magnitude * rng.choice(np.array([-1.0, 1.0]), size=count)


def _linear_mean(support, coef, center=None, scale=None):
    support = np.asarray(support, dtype=int)

    def mean(x):
        active = x[:, support]
        if center is not None:
            active = (active - center[support]) / scale[support]
        return active @ coef

    return mean


def skew_normal(rng: np.random.Generator, size, shape: float = SKEW_NORMAL_SHAPE) -> np.ndarray:
    """SN(0, 1, shape) via delta |U0| + sqrt(1 - delta^2) U1."""
    delta = shape / np.sqrt(1.0 + shape ** 2)
    u0 = rng.standard_normal(size)
    u1 = rng.standard_normal(size)
    return delta * np.abs(u0) + np.sqrt(1.0 - delta ** 2) * u1


def autocorrelate(x: np.ndarray) -> np.ndarray:
    """Sequentially replace column j by a convex combination of itself and up to three earlier columns."""
    x = np.array(x, dtype=float)
    for j in range(1, x.shape[1]):
        lags = min(SETTING_C_MAX_LAG, j)
        total = SETTING_C_CURRENT_WEIGHT + lags * SETTING_C_LAG_WEIGHT
        mixed = SETTING_C_CURRENT_WEIGHT * x[:, j]
        for lag in range(1, lags + 1):
            mixed = mixed + SETTING_C_LAG_WEIGHT * x[:, j - lag]
        x[:, j] = mixed / total
    return x


def mixture_features(d: int):
    def draw(rng, size):
        component = rng.integers(0, 3, size=(size, d))
        normal = rng.standard_normal((size, d))
        skewed = skew_normal(rng, (size, d))
        bernoulli = rng.integers(0, 2, size=(size, d)).astype(float)
        raw = np.choose(component, [normal, skewed, bernoulli])
        return autocorrelate(raw)

    return draw


def _reference_moments(draw, d, mean_of_standardized, seed):
    def chunks():
        rng = make_rng(seed)
        remaining = REFERENCE_DRAWS
        while remaining > 0:
            size = min(REFERENCE_CHUNK, remaining)
            yield draw(rng, size)
            remaining -= size

    total = np.zeros(d)
    total_sq = np.zeros(d)
    for x in chunks():
        total += x.sum(axis=0)
        total_sq += (x ** 2).sum(axis=0)
    center = total / REFERENCE_DRAWS
    scale = np.sqrt(np.maximum(total_sq / REFERENCE_DRAWS - center ** 2, 0.0))
    scale = np.where(scale > 0, scale, 1.0)
    cubes = [math.fsum(np.abs(mean_of_standardized((x - center) / scale)) ** 3) for x in chunks()]
    return center, scale, math.fsum(cubes) / REFERENCE_DRAWS


def setting_b_basis() -> SplineBasis:
    edge = float(stats.norm.ppf(1.0 - SPLINE_BOUNDARY_PROB))
    return SplineBasis(-edge, edge, ())


def _spline_mean(support, coef):
    basis = setting_b_basis()
    support = np.asarray(support, dtype=int)
    per = SETTING_B_BASIS_PER_COORDINATE

    def mean(x):
        total = np.zeros(x.shape[0])
        for k, j in enumerate(support):
            total += basis.design(x[:, j]) @ coef[k * per:(k + 1) * per]
        return total

    return mean


def _additive_components():
    def mean(x):
        f1 = np.where(x[:, 0] < 0, np.sin(PI * (1.0 + x[:, 0])), 0.0)
        f2 = np.sin(PI * x[:, 1])
        f3 = np.where(x[:, 2] > 0, np.sin(PI * (1.0 + x[:, 2])), 0.0)
        return f1 + f2 + f3

    return mean


@functools.lru_cache(maxsize=16)
def _cached_truth(setting: str, d: int, s: int, magnitude: float, truth_seed: int) -> Truth:
    coef_seed, reference_seed = derive_seeds(truth_seed, 2)
    rng = make_rng(coef_seed)
    support = tuple(range(s))
    if setting in ("A", "D"):
        coef = _signed_coefficients(rng, s, magnitude)
        return Truth(setting, d, _normal_features(d), _linear_mean(support, coef), _normal_noise, _unit_scale,
                     coef, support, "normal")
    if setting == "B":
        coef = _signed_coefficients(rng, s * SETTING_B_BASIS_PER_COORDINATE, magnitude)
        return Truth(setting, d, _normal_features(d), _spline_mean(support, coef), _t_noise, _unit_scale,
                     coef, support, "t2")
    if setting == "C":
        coef = _signed_coefficients(rng, s, magnitude)
        draw = mixture_features(d)
        center, scale, third = _reference_moments(draw, d, _linear_mean(support, coef), reference_seed)
        mean = _linear_mean(support, coef, center, scale)
        third = third if third > 0 else 1.0
        logger.debug("setting C reference E|mu|^3 = %.6g", third)

        def scale_fn(x):
            return 1.0 + 2.0 * np.abs(mean(x)) ** 3 / third

        return Truth(setting, d, draw, mean, _t_noise, scale_fn, coef, support)
    if setting in ("sine_hetero", "sine_homo"):
        def features(rng_, size):
            return rng_.uniform(0.0, 2.0 * PI, size=(size, 1))

        def mean(x):
            return np.sin(x[:, 0])

        if setting == "sine_hetero":
            def scale_fn(x):
                return PI * np.abs(x[:, 0]) / 20.0

            return Truth(setting, 1, features, mean, _normal_noise, scale_fn, None, (0,))
        return Truth(setting, 1, features, mean, _normal_noise, lambda x: np.full(x.shape[0], SINE_HOMO_SCALE),
                     None, (0,))
    if setting == "additive6":
        def features(rng_, size):
            return rng_.uniform(-1.0, 1.0, size=(size, 6))

        return Truth(setting, 6, features, _additive_components(), _normal_noise, _unit_scale, None, (0, 1, 2),
                     "normal")
    # sparse_gauss: s coefficients drawn N(0, magnitude^2)
    coef = magnitude * rng.standard_normal(s)
    return Truth(setting, d, _normal_features(d), _linear_mean(support, coef), _normal_noise, _unit_scale,
                 coef, support, "normal")


def make_truth(spec: SettingSpec) -> Truth:
    return _cached_truth(spec.setting, spec.d, spec.s, float(spec.coef_magnitude), int(spec.truth_seed))


def generate(spec: SettingSpec) -> Tuple[DataSet, DataSet, Truth]:
    truth = make_truth(spec)
    train_seed, test_seed = derive_seeds(spec.seed, 2)
    train = truth.draw(make_rng(train_seed), spec.n)
    test = truth.draw(make_rng(test_seed), spec.n_test)
    return train, test, truth
