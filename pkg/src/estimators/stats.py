"""
Confidence intervals and empirical total-variation distances.
"""

import math
from typing import Hashable, Sequence, Tuple

import numpy as np
from scipy import stats


def clopper_pearson(successes: int, trials: int, level: float = 0.95) -> Tuple[float, float]:
    """Exact binomial interval for ``successes`` out of ``trials``."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must lie in [0, {trials}], got {successes}")
    alpha = 1.0 - level
    lo = 0.0 if successes == 0 else float(
        stats.beta.ppf(alpha / 2, successes, trials - successes + 1)
    )
    hi = 1.0 if successes == trials else float(
        stats.beta.ppf(1 - alpha / 2, successes + 1, trials - successes)
    )
    return lo, hi


def normal_interval(mean: float, sd: float, n: int, level: float = 0.95) -> Tuple[float, float]:
    """mean ± z·sd/√n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    z = float(stats.norm.ppf(0.5 + level / 2))
    half = z * sd / math.sqrt(n)
    return mean - half, mean + half


def _codes(a: Sequence[Hashable], b: Sequence[Hashable]) -> Tuple[np.ndarray, np.ndarray, int]:
    labels: dict = {}
    ca = np.fromiter((labels.setdefault(x, len(labels)) for x in a), dtype=np.int64, count=len(a))
    cb = np.fromiter((labels.setdefault(x, len(labels)) for x in b), dtype=np.int64, count=len(b))
    return ca, cb, len(labels)


def empirical_tv(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """½ Σ |P̂_a(x) − P̂_b(x)| between two samples of hashable outcomes."""
    if len(a) == 0 or len(b) == 0:
        raise ValueError("Both samples must be non-empty")
    ca, cb, k = _codes(a, b)
    pa = np.bincount(ca, minlength=k) / len(ca)
    pb = np.bincount(cb, minlength=k) / len(cb)
    return float(0.5 * np.abs(pa - pb).sum())


def bootstrap_tv(
    a: Sequence[Hashable],
    b: Sequence[Hashable],
    resamples: int,
    rng: np.random.Generator,
    level: float = 0.95,
) -> Tuple[float, float]:
    """Percentile bootstrap interval for ``empirical_tv(a, b)``.

    Resampling with replacement is done on the category counts (multinomial),
    which is equivalent to resampling the individual outcomes.
    """
    if resamples < 1:
        raise ValueError(f"resamples must be >= 1, got {resamples}")
    ca, cb, k = _codes(a, b)
    pa = np.bincount(ca, minlength=k) / len(ca)
    pb = np.bincount(cb, minlength=k) / len(cb)
    draws_a = rng.multinomial(len(ca), pa, size=resamples) / len(ca)
    draws_b = rng.multinomial(len(cb), pb, size=resamples) / len(cb)
    tvs = 0.5 * np.abs(draws_a - draws_b).sum(axis=1)
    alpha = 1.0 - level
    lo, hi = np.quantile(tvs, [alpha / 2, 1 - alpha / 2])
    return float(lo), float(hi)
