"""Rank-one-out split conformal: valid intervals at the training points themselves.

Each fold's model covers the rows of the other fold. A row's halfwidth is the
m-th smallest calibration score with its own score left out,
m = ceil(|calibration| (1 - alpha)). The relaxed variant uses a single
halfwidth per fold, the (ceil(|calibration| (1 - alpha)) + 1)-th smallest score.
"""
import numpy as np

from .algorithm import RegressionAlgorithm, fit
from .band import ConformalBand
from .dataset import DataSet
from .quantiles import as_alpha, quantile_rank
from .scores import ConformityScore, conformity_scores, fit_spread
from .splitting import SplitConfig, split_indices


def rank_one_out_halfwidths(scores: np.ndarray, alpha) -> np.ndarray:
    scores = np.asarray(scores, dtype=float)
    size = scores.size
    m = quantile_rank(size, alpha)
    ordered = np.sort(scores, kind="stable")
    position = np.searchsorted(ordered, scores, side="left")
    result = np.full(size, np.inf)
    if m > size - 1:
        return result
    below = m - 1 < position
    result[below] = ordered[m - 1]
    result[~below] = ordered[m]
    return result


def relaxed_halfwidth(scores: np.ndarray, alpha) -> float:
    scores = np.asarray(scores, dtype=float)
    m = quantile_rank(scores.size, alpha) + 1
    if m > scores.size:
        return float("inf")
    return float(np.sort(scores, kind="stable")[m - 1])


def _roo_band(variant, alg, data, alpha, cfg, score):
    a = as_alpha(alpha)
    if data.n < 4:
        raise ValueError(f"ROO split conformal needs n >= 4, got n={data.n}")
    folds = split_indices(data.n, cfg)
    models, spreads, relaxed = [], [], []
    point_halfwidths = np.empty(data.n)
    point_models = np.empty(data.n, dtype=int)
    for k, fold in enumerate(folds):
        other = folds[1 - k]
        fold_data = data.subset(fold)
        model = fit(alg, fold_data)
        spread = fit_spread(score, model, fold_data)
        scores = conformity_scores(model, spread, data.subset(other))
        fold_relaxed = relaxed_halfwidth(scores, a)
        if variant == "roo":
            point_halfwidths[other] = rank_one_out_halfwidths(scores, a)
        else:
            point_halfwidths[other] = fold_relaxed
        point_models[other] = k
        models.append(model)
        spreads.append(spread)
        relaxed.append(fold_relaxed)
    return ConformalBand(
        variant,
        a,
        tuple(models),
        tuple(relaxed),
        tuple(spreads),
        score=score.kind,
        point_halfwidths=point_halfwidths,
        point_models=point_models,
        train_x=np.array(data.x),
    )


def roo_split_conformal(
    alg: RegressionAlgorithm,
    data: DataSet,
    alpha,
    cfg: SplitConfig = SplitConfig(),
    score: ConformityScore = ConformityScore(),
) -> ConformalBand:
    return _roo_band("roo", alg, data, alpha, cfg, score)


def roo_relaxed(
    alg: RegressionAlgorithm,
    data: DataSet,
    alpha,
    cfg: SplitConfig = SplitConfig(),
    score: ConformityScore = ConformityScore(),
) -> ConformalBand:
    return _roo_band("roo_relaxed", alg, data, alpha, cfg, score)
