import pytest
import numpy as np
from conformal_bands import SplitConfig, split_indices
from conformal_bands.splitting import derive_seeds, make_rng


class TestSplitConfig:

    def test_defaults(self):
        cfg = SplitConfig()
        assert cfg.seed == 0
        assert cfg.ratio == 0.5

    @pytest.mark.parametrize("ratio", [0.0, 1.0, -0.5])
    def test_bad_ratio(self, ratio):
        with pytest.raises(ValueError, match="ratio must be in"):
            SplitConfig(ratio=ratio)

    def test_bad_seed(self):
        with pytest.raises(ValueError, match="unsigned 64-bit"):
            SplitConfig(seed=-1)

    def test_fit_size_is_clipped(self):
        assert SplitConfig(ratio=0.01).fit_size(10) == 1
        assert SplitConfig(ratio=0.99).fit_size(10) == 9


class TestSplitIndices:

    def test_partition(self):
        first, second = split_indices(4, SplitConfig(seed=7))
        assert len(first) == 2 and len(second) == 2
        assert sorted(np.concatenate([first, second]).tolist()) == [0, 1, 2, 3]

    def test_odd_n_floors(self):
        first, second = split_indices(5, SplitConfig(seed=1))
        assert len(first) == 2
        assert len(second) == 3

    def test_deterministic(self):
        a = split_indices(50, SplitConfig(seed=11, ratio=0.3))
        b = split_indices(50, SplitConfig(seed=11, ratio=0.3))
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_seed_changes_split(self):
        a = split_indices(50, SplitConfig(seed=1))
        b = split_indices(50, SplitConfig(seed=2))
        assert not np.array_equal(a[0], b[0])

    def test_too_small(self):
        with pytest.raises(ValueError, match="n >= 2"):
            split_indices(1)


class TestSeeds:

    def test_derive_seeds_deterministic_and_distinct(self):
        seeds = derive_seeds(5, 10)
        assert seeds == derive_seeds(5, 10)
        assert len(set(seeds)) == 10
        assert all(0 <= s < 2 ** 64 for s in seeds)

    def test_make_rng_reproducible(self):
        assert make_rng(3).random() == make_rng(3).random()

    def test_largest_seed_accepted(self):
        make_rng(2 ** 64 - 1)
