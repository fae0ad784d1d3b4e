import json
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .algorithm import FittedModel
from .interval import Interval, _json_float
from .scores import ABSOLUTE, SpreadModel, spread_at

logger = logging.getLogger(__name__)

VARIANTS = ("naive", "split", "jackknife", "roo", "roo_relaxed")


@dataclass(frozen=True)
class ConformalBand:
    """Band C(x) = [mu(x) - rho(x) d, mu(x) + rho(x) d].

    ROO variants carry one model per fold, the per-training-point halfwidths
    d_i (``point_halfwidths``, indexed by training row) and, for each training
    row, the fold whose model covers it (``point_models``). At new points they
    use the first model with its relaxed halfwidth.
    """

    variant: str
    alpha: float
    mean_models: Tuple[FittedModel, ...]
    halfwidths: Tuple[float, ...]
    spread_models: Tuple[Optional[SpreadModel], ...] = ()
    score: str = ABSOLUTE
    point_halfwidths: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    point_models: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    train_x: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mean_models", tuple(self.mean_models))
        object.__setattr__(self, "halfwidths", tuple(float(h) for h in self.halfwidths))
        if not self.spread_models:
            object.__setattr__(self, "spread_models", (None,) * len(self.mean_models))
        self._validate()

    def _validate(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"Unknown band variant '{self.variant}'. Must be one of {', '.join(VARIANTS)}")
        if len(self.mean_models) == 0:
            raise ValueError("A band needs at least one mean model")
        if len(self.halfwidths) != len(self.mean_models):
            raise ValueError(
                f"Need one halfwidth per model, got {len(self.halfwidths)} for {len(self.mean_models)} models"
            )
        if len(self.spread_models) != len(self.mean_models):
            raise ValueError("Need one (possibly absent) spread model per mean model")
        if any(np.isnan(h) or h < 0 for h in self.halfwidths):
            raise ValueError(f"Halfwidths must be >= 0 or +inf, got {self.halfwidths}")
        if self.variant in ("roo", "roo_relaxed") and self.point_halfwidths is None:
            raise ValueError("ROO bands need per-point halfwidths")

    @property
    def n_features(self) -> int:
        return self.mean_models[0].n_features

    @property
    def halfwidth(self) -> float:
        return self.halfwidths[0]

    def _bounds(self, model_index: int, x: np.ndarray, halfwidth: np.ndarray):
        center = self.mean_models[model_index].predict(x)
        width = spread_at(self.spread_models[model_index], x) * halfwidth
        width = np.where(np.isinf(halfwidth), np.inf, width)
        return center - width, center + width

    def predict(self, x) -> np.ndarray:
        return self.mean_models[0].predict(x)

    def predict_interval(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_features:
            raise ValueError(f"dimension mismatch: band expects {self.n_features} features, got {x.shape[1]}")
        return self._bounds(0, x, np.full(x.shape[0], self.halfwidths[0]))

    def in_sample_intervals(self):
        if self.point_halfwidths is None:
            raise ValueError(f"Band variant '{self.variant}' has no in-sample intervals")
        lo = np.empty(self.train_x.shape[0])
        hi = np.empty(self.train_x.shape[0])
        for k in range(len(self.mean_models)):
            rows = np.flatnonzero(self.point_models == k)
            lo[rows], hi[rows] = self._bounds(k, self.train_x[rows], self.point_halfwidths[rows])
        return lo, hi

    def training_index(self, x) -> Optional[int]:
        if self.train_x is None:
            return None
        matches = np.flatnonzero(np.all(self.train_x == np.asarray(x, dtype=float), axis=1))
        return int(matches[0]) if matches.size else None

    def to_dict(self) -> dict:
        info = {
            "variant": self.variant,
            "alpha": self.alpha,
            "score": self.score,
            "halfwidths": [_json_float(h) for h in self.halfwidths],
            "models": [m.describe() for m in self.mean_models],
        }
        if any(s is not None for s in self.spread_models):
            info["spread_models"] = [s.model.describe() if s is not None else None for s in self.spread_models]
        if self.point_halfwidths is not None:
            info["point_halfwidths"] = [_json_float(h) for h in self.point_halfwidths]
        return info

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def evaluate_band(band, x, index: Optional[int] = None) -> Interval:
    """Band value at a single point.

    For ROO bands a training point (given by ``index`` or recognized by exact
    row match) uses its own d_i; any other point uses the relaxed fold halfwidth.
    """
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if isinstance(band, ConformalBand) and band.point_halfwidths is not None:
        if index is None:
            index = band.training_index(x[0])
        if index is not None:
            k = int(band.point_models[index])
            lo, hi = band._bounds(k, x, np.array([band.point_halfwidths[index]]))
            return Interval(lo[0], hi[0])
    lo, hi = band.predict_interval(x)
    if np.isnan(lo[0]):
        return Interval.make_empty()
    return Interval(lo[0], hi[0])


@dataclass(frozen=True)
class MultiSplitBand:
    """Intersection of split bands, each built at miscoverage alpha / N."""

    alpha: float
    bands: Tuple[ConformalBand, ...]
    seeds: Tuple[int, ...]

    @property
    def n_features(self) -> int:
        return self.bands[0].n_features

    def predict(self, x) -> np.ndarray:
        return np.median(np.vstack([b.predict(x) for b in self.bands]), axis=0)

    def predict_interval(self, x):
        """Arrays (lo, hi); rows with an empty intersection get NaN endpoints."""
        bounds = [b.predict_interval(x) for b in self.bands]
        lo = np.max(np.vstack([b[0] for b in bounds]), axis=0)
        hi = np.min(np.vstack([b[1] for b in bounds]), axis=0)
        empty = lo > hi
        if empty.any():
            logger.warning("multi-split intersection is empty at %d of %d points", int(empty.sum()), empty.size)
            lo = np.where(empty, np.nan, lo)
            hi = np.where(empty, np.nan, hi)
        return lo, hi

    def to_dict(self) -> dict:
        return {
            "variant": "multi_split",
            "alpha": self.alpha,
            "seeds": list(self.seeds),
            "bands": [b.to_dict() for b in self.bands],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)
