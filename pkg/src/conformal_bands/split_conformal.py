import logging
from typing import Optional, Sequence

import numpy as np

from .algorithm import RegressionAlgorithm, fit
from .band import ConformalBand, MultiSplitBand
from .dataset import DataSet
from .quantiles import AUGMENTED, PLAIN, MiscoverageLevel, as_alpha, finite_sample_quantile
from .scores import ConformityScore, conformity_scores, fit_spread
from .splitting import SplitConfig, derive_seeds, split_indices

logger = logging.getLogger(__name__)


def naive_band(alg: RegressionAlgorithm, data: DataSet, alpha, score: ConformityScore = ConformityScore()) -> ConformalBand:
    """In-sample residual quantile around the full-data fit (no coverage guarantee)."""
    a = as_alpha(alpha)
    model = fit(alg, data)
    spread = fit_spread(score, model, data)
    halfwidth = finite_sample_quantile(conformity_scores(model, spread, data), a, rule=PLAIN)
    return ConformalBand("naive", a, (model,), (halfwidth,), (spread,), score=score.kind)


def split_conformal(
    alg: RegressionAlgorithm,
    data: DataSet,
    alpha,
    cfg: SplitConfig = SplitConfig(),
    score: ConformityScore = ConformityScore(),
) -> ConformalBand:
    a = as_alpha(alpha)
    fit_rows, calibration_rows = split_indices(data.n, cfg)
    fit_data = data.subset(fit_rows)
    model = fit(alg, fit_data)
    spread = fit_spread(score, model, fit_data)
    scores = conformity_scores(model, spread, data.subset(calibration_rows))
    halfwidth = finite_sample_quantile(scores, a, rule=AUGMENTED)
    if np.isinf(halfwidth):
        logger.warning("split conformal band is infinite: alpha=%s too small for %d calibration points", a, scores.size)
    return ConformalBand("split", a, (model,), (halfwidth,), (spread,), score=score.kind)


def multi_split_conformal(
    alg: RegressionAlgorithm,
    data: DataSet,
    alpha,
    n_splits: int,
    seeds: Optional[Sequence[int]] = None,
    ratio: float = 0.5,
    master_seed: int = 0,
    score: ConformityScore = ConformityScore(),
) -> MultiSplitBand:
    a = as_alpha(alpha)
    if n_splits < 1:
        raise ValueError(f"Multi-split needs N >= 1, got {n_splits}")
    if seeds is None:
        seeds = derive_seeds(master_seed, n_splits)
    seeds = tuple(int(s) for s in seeds)
    if len(seeds) != n_splits:
        raise ValueError(f"Need {n_splits} seeds, got {len(seeds)}")
    if len(set(seeds)) != len(seeds):
        raise ValueError("Multi-split seeds must be distinct")
    level = MiscoverageLevel(a).bonferroni(n_splits)
    bands = tuple(
        split_conformal(alg, data, level, SplitConfig(seed=s, ratio=ratio), score) for s in seeds
    )
    return MultiSplitBand(a, bands, seeds)
