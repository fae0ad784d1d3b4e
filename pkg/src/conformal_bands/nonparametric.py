from dataclasses import dataclass

import numpy as np
from scipy import stats

from .constants import WILCOXON_EXACT_MAX
from .interval import Interval


@dataclass(frozen=True)
class SignTestResult:
    positives: int
    nonzero: int
    zeros: int
    p_greater: float
    p_two_sided: float


def sign_test(values) -> SignTestResult:
    """Exact binomial sign test of H0: median <= 0; zeros are dropped and counted."""
    values = np.asarray(values, dtype=float)
    positives = int(np.count_nonzero(values > 0))
    negatives = int(np.count_nonzero(values < 0))
    nonzero = positives + negatives
    zeros = values.size - nonzero
    if nonzero == 0:
        return SignTestResult(0, 0, zeros, 1.0, 1.0)
    p_greater = float(stats.binom.sf(positives - 1, nonzero, 0.5))
    extreme = min(positives, negatives)
    p_two_sided = float(min(1.0, 2.0 * stats.binom.cdf(extreme, nonzero, 0.5)))
    return SignTestResult(positives, nonzero, zeros, p_greater, p_two_sided)


def sign_interval(values, alpha: float) -> Interval:
    ordered = np.sort(np.asarray(values, dtype=float))
    n = ordered.size
    # largest c with P(Binom(n, 1/2) <= c) <= alpha / 2
    c = int(stats.binom.ppf(alpha / 2.0, n, 0.5))
    if stats.binom.cdf(c, n, 0.5) > alpha / 2.0:
        c -= 1
    if c < 0:
        return Interval(-np.inf, np.inf)
    return Interval(ordered[c], ordered[n - 1 - c])


def signed_rank_null(ranks) -> np.ndarray:
    """Exact null pmf of the doubled positive-rank sum 2 W+.

    Each rank enters with a fair random sign. Ranks may be midranks (ties), so
    the distribution lives on doubled ranks to stay on an integer support.
    """
    doubled = np.rint(2.0 * np.asarray(ranks, dtype=float)).astype(int)
    pmf = np.zeros(int(doubled.sum()) + 1)
    pmf[0] = 1.0
    top = 0
    for r in doubled:
        shifted = np.zeros_like(pmf)
        shifted[r:top + r + 1] = pmf[:top + 1]
        pmf = 0.5 * (pmf + shifted)
        top += r
    return pmf


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float
    nonzero: int
    zeros: int
    p_greater: float
    p_two_sided: float
    exact: bool


def wilcoxon_signed_rank(values, exact_max: int = WILCOXON_EXACT_MAX) -> WilcoxonResult:
    """One- and two-sided Wilcoxon signed-rank test of H0: center <= 0.

    Zeros are dropped; tied magnitudes get midranks. The null distribution is
    exact up to ``exact_max`` nonzero values, else normal with continuity
    correction and tie-corrected variance.
    """
    values = np.asarray(values, dtype=float)
    nonzero_values = values[values != 0]
    m = nonzero_values.size
    zeros = values.size - m
    if m == 0:
        return WilcoxonResult(0.0, 0, zeros, 1.0, 1.0, True)
    ranks = stats.rankdata(np.abs(nonzero_values))
    statistic = float(ranks[nonzero_values > 0].sum())
    total = float(ranks.sum())
    if m <= exact_max:
        pmf = signed_rank_null(ranks)
        observed = int(np.rint(2 * statistic))
        p_greater = float(pmf[observed:].sum())
        p_less = float(pmf[:observed + 1].sum())
        p_two_sided = float(min(1.0, 2.0 * min(p_greater, p_less)))
        return WilcoxonResult(statistic, m, zeros, min(p_greater, 1.0), p_two_sided, True)
    mean = total / 2.0
    _, tie_counts = np.unique(np.abs(nonzero_values), return_counts=True)
    variance = m * (m + 1) * (2 * m + 1) / 24.0 - np.sum(tie_counts ** 3 - tie_counts) / 48.0
    sd = np.sqrt(variance)
    z_greater = (statistic - mean - 0.5) / sd
    z_less = (statistic - mean + 0.5) / sd
    p_greater = float(stats.norm.sf(z_greater))
    p_less = float(stats.norm.cdf(z_less))
    return WilcoxonResult(statistic, m, zeros, p_greater, float(min(1.0, 2.0 * min(p_greater, p_less))), False)


def walsh_averages(values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    i, j = np.triu_indices(values.size)
    return np.sort((values[i] + values[j]) / 2.0)


def wilcoxon_critical_count(n: int, alpha: float, exact_max: int = WILCOXON_EXACT_MAX) -> int:
    """Largest c with P(W+ <= c) <= alpha / 2 under the no-tie null; -1 if none."""
    if n <= exact_max:
        pmf = signed_rank_null(np.arange(1, n + 1))[::2]
        cdf = np.cumsum(pmf)
        admissible = np.flatnonzero(cdf <= alpha / 2.0 + 1e-15)
        return int(admissible[-1]) if admissible.size else -1
    mean = n * (n + 1) / 4.0
    sd = np.sqrt(n * (n + 1) * (2 * n + 1) / 24.0)
    return int(np.floor(mean - stats.norm.ppf(1.0 - alpha / 2.0) * sd - 0.5))


def wilcoxon_interval(values, alpha: float, exact_max: int = WILCOXON_EXACT_MAX) -> Interval:
    averages = walsh_averages(values)
    c = wilcoxon_critical_count(np.asarray(values).size, alpha, exact_max)
    if c < 0:
        return Interval(-np.inf, np.inf)
    return Interval(averages[c], averages[averages.size - 1 - c])
