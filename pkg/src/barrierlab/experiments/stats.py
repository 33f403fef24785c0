"""Small statistics helpers: Wilson intervals and index-ordered means."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.stats import binomtest


class Proportion(NamedTuple):
    successes: int
    n: int
    estimate: float
    low: float
    high: float


def wilson_interval(successes: int, n: int, confidence: float = 0.95) -> Proportion:
    """Point estimate with Wilson score interval; NaNs when n = 0."""
    if n == 0:
        return Proportion(0, 0, math.nan, math.nan, math.nan)
    ci = binomtest(int(successes), int(n)).proportion_ci(confidence, method="wilson")
    return Proportion(int(successes), int(n), successes / n, float(ci.low), float(ci.high))


class MeanEstimate(NamedTuple):
    mean: float
    stderr: float
    n: int


def mean_stderr(values) -> MeanEstimate:
    """Mean and standard error; numpy's pairwise summation over values in
    trial order keeps the result independent of how trials were scheduled."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return MeanEstimate(math.nan, math.nan, 0)
    mean = float(np.sum(v) / v.size)
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else math.nan
    return MeanEstimate(mean, se, int(v.size))
