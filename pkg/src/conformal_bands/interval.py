from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    empty: bool = False

    def __post_init__(self):
        if self.empty:
            object.__setattr__(self, "lo", float("nan"))
            object.__setattr__(self, "hi", float("nan"))
            return
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        self._validate()

    def _validate(self):
        if np.isnan(self.lo) or np.isnan(self.hi):
            raise ValueError(f"Interval endpoints must not be NaN, got [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"Interval must satisfy lo <= hi, got lo={self.lo}, hi={self.hi}")

    @classmethod
    def make_empty(cls) -> "Interval":
        return cls(0.0, 0.0, empty=True)

    @classmethod
    def around(cls, center: float, halfwidth: float) -> "Interval":
        if np.isinf(halfwidth):
            return cls(-np.inf, np.inf)
        return cls(center - halfwidth, center + halfwidth)

    @property
    def length(self) -> float:
        if self.empty:
            return 0.0
        return self.hi - self.lo

    @property
    def is_finite(self) -> bool:
        return not self.empty and np.isfinite(self.lo) and np.isfinite(self.hi)

    def contains(self, value: float) -> bool:
        if self.empty:
            return False
        return self.lo <= value <= self.hi

    def __contains__(self, value) -> bool:
        return self.contains(value)

    def contains_interval(self, other: "Interval") -> bool:
        if other.empty:
            return True
        if self.empty:
            return False
        return self.lo <= other.lo and other.hi <= self.hi

    def intersect(self, other: "Interval") -> "Interval":
        if self.empty or other.empty:
            return Interval.make_empty()
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return Interval.make_empty()
        return Interval(lo, hi)

    def to_dict(self):
        if self.empty:
            return {"lo": None, "hi": None, "empty": True}
        return {"lo": _json_float(self.lo), "hi": _json_float(self.hi), "empty": False}

    def __str__(self):
        if self.empty:
            return "∅"
        return f"[{self.lo:.6g}, {self.hi:.6g}]"


def _json_float(value: float):
    if np.isposinf(value):
        return "inf"
    if np.isneginf(value):
        return "-inf"
    return float(value)


@dataclass(frozen=True)
class PredictionSet:
    points: np.ndarray
    grid_step: float
    hull: Interval = field(init=False)
    contiguous: bool = field(init=False)

    def __post_init__(self):
        points = np.sort(np.array(self.points, dtype=float))
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        self._validate()
        if points.size == 0:
            object.__setattr__(self, "hull", Interval.make_empty())
            object.__setattr__(self, "contiguous", True)
        else:
            object.__setattr__(self, "hull", Interval(points[0], points[-1]))
            gaps = np.diff(points)
            object.__setattr__(self, "contiguous", bool(np.all(gaps <= 1.5 * self.grid_step)))

    def _validate(self):
        if not self.grid_step > 0:
            raise ValueError(f"grid_step must be positive, got {self.grid_step}")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("Accepted trial values must be finite")

    @property
    def is_empty(self) -> bool:
        return self.points.size == 0

    def contains(self, value: float, tolerance: Optional[float] = None) -> bool:
        if self.is_empty:
            return False
        tolerance = 0.5 * self.grid_step if tolerance is None else tolerance
        return bool(np.min(np.abs(self.points - value)) <= tolerance)

    def to_dict(self):
        return {
            "points": self.points.tolist(),
            "grid_step": self.grid_step,
            "hull": self.hull.to_dict(),
            "contiguous": self.contiguous,
        }

    def __repr__(self):
        return f"PredictionSet(hull={self.hull}, points={self.points.size}, contiguous={self.contiguous})"
