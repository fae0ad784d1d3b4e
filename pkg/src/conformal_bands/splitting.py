from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .constants import DEFAULT_SEED, DEFAULT_SPLIT_RATIO

MAX_SEED = 2 ** 64 - 1


def make_rng(seed: int) -> np.random.Generator:
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.Philox(int(seed)))


def derive_seeds(master_seed: int, count: int) -> List[int]:
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    if count == 0:
        return []
    state = np.random.SeedSequence(int(master_seed)).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]


@dataclass(frozen=True)
class SplitConfig:
    seed: int = DEFAULT_SEED
    ratio: float = DEFAULT_SPLIT_RATIO

    def __post_init__(self):
        self._validate()

    def _validate(self):
        if not 0 <= int(self.seed) <= MAX_SEED:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not (0.0 < self.ratio < 1.0):
            raise ValueError(f"ratio must be in (0, 1), got {self.ratio}")

    def fit_size(self, n: int) -> int:
        return int(min(max(np.floor(self.ratio * n), 1), n - 1))


def split_indices(n: int, cfg: SplitConfig = SplitConfig()) -> Tuple[np.ndarray, np.ndarray]:
    """Random partition of range(n) into a fitting fold I1 and a calibration fold I2.

    |I1| = floor(ratio * n), clipped so both folds are nonempty.
    """
    if n < 2:
        raise ValueError(f"Splitting needs n >= 2, got n={n}")
    n1 = cfg.fit_size(n)
    perm = make_rng(cfg.seed).permutation(n)
    return np.sort(perm[:n1]), np.sort(perm[n1:])
