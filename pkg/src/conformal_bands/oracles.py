import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .algorithm import RegressionAlgorithm, fit
from .constants import SUPER_ORACLE_DRAWS
from .quantiles import PLAIN, as_alpha, finite_sample_quantile
from .settings import SettingSpec, Truth, generate
from .splitting import derive_seeds, make_rng

logger = logging.getLogger(__name__)

ORACLE_KINDS = ("super", "regular")
REGULAR_REPLICATIONS = 20
REGULAR_DRAWS = 10_000


@dataclass(frozen=True)
class OracleBand:
    kind: str
    center: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    halfwidth: float
    exact: bool = False

    def __post_init__(self):
        if self.kind not in ORACLE_KINDS:
            raise ValueError(f"Oracle kind must be one of {', '.join(ORACLE_KINDS)}, got '{self.kind}'")
        if not self.halfwidth >= 0:
            raise ValueError(f"Oracle halfwidth must be >= 0, got {self.halfwidth}")

    def predict(self, x) -> np.ndarray:
        return self.center(np.atleast_2d(np.asarray(x, dtype=float)))

    def predict_interval(self, x):
        center = self.predict(x)
        return center - self.halfwidth, center + self.halfwidth


def super_oracle_halfwidth(truth: Truth, alpha, draws: int = SUPER_ORACLE_DRAWS, seed: int = 0) -> Tuple[float, bool]:
    """q_alpha of |Y - mu(X)|: exact for known homoskedastic noise, else by Monte Carlo."""
    a = as_alpha(alpha)
    exact = truth.noise_quantile(a)
    if exact is not None:
        return exact, True
    rng = make_rng(seed)
    x = truth.features(rng, draws)
    errors = np.abs(truth.noise_scale(x) * truth.noise(rng, draws))
    return finite_sample_quantile(errors, a, rule=PLAIN), False


def regular_oracle_halfwidth(
    truth: Truth,
    alg: Optional[RegressionAlgorithm],
    n: int,
    alpha,
    seed: int = 0,
    replications: int = REGULAR_REPLICATIONS,
    draws: int = REGULAR_DRAWS,
) -> float:
    """q_{n,alpha} of |Y - mu_hat_n(X)| pooled over fresh fits and fresh test draws.

    ``alg=None`` stands for the perfect estimator mu_hat = mu.
    """
    a = as_alpha(alpha)
    errors = []
    for rep_seed in derive_seeds(seed, replications):
        rng = make_rng(rep_seed)
        center = truth.mean if alg is None else fit(alg, truth.draw(rng, n)).predict
        test = truth.draw(rng, draws)
        errors.append(np.abs(test.y - center(test.x)))
    return finite_sample_quantile(np.concatenate(errors), a, rule=PLAIN)


def oracle_bands(
    truth: Truth,
    alg: Optional[RegressionAlgorithm],
    spec: SettingSpec,
    alpha,
    replications: int = REGULAR_REPLICATIONS,
    draws: int = REGULAR_DRAWS,
) -> Tuple[OracleBand, OracleBand]:
    """(super, regular) oracle bands for one setting.

    The regular band is centred on the fit to the setting's own training set.
    """
    super_seed, regular_seed = derive_seeds(spec.seed, 4)[2:]
    q_super, exact = super_oracle_halfwidth(truth, alpha, seed=super_seed)
    q_regular = regular_oracle_halfwidth(truth, alg, spec.n, alpha, regular_seed, replications, draws)
    if alg is None:
        center = truth.mean
    else:
        train, _, _ = generate(spec)
        center = fit(alg, train).predict
    logger.debug("oracle halfwidths: super %.4g (exact=%s), regular %.4g", q_super, exact, q_regular)
    return OracleBand("super", truth.mean, q_super, exact), OracleBand("regular", center, q_regular)
