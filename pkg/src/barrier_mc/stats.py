"""Small statistical helpers shared by the estimators and the checks."""
from __future__ import annotations

import math

import numpy as np


def mean_and_se(samples):
    """Sample mean and its standard error ``sd / sqrt(n)`` (``ddof=1``)."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n == 0:
        return math.nan, math.nan
    mean = float(x.mean())
    if n == 1:
        return mean, math.inf
    return mean, float(x.std(ddof=1) / math.sqrt(n))


def ratio_of_means(num, den):
    """Ratio of sample means with a delta-method standard error.

    Returns ``(ratio, se, den_mean, den_se)``; the ratio is NaN when the
    denominator mean vanishes.
    """
    a = np.asarray(num, dtype=float)
    b = np.asarray(den, dtype=float)
    n = a.size
    ma, mb = a.mean(), b.mean()
    _, se_b = mean_and_se(b)
    if mb == 0:
        return math.nan, math.nan, float(mb), se_b
    r = ma / mb
    resid = a - r * b
    var = float(np.sum(resid * resid) / (n - 1)) if n > 1 else math.inf
    return float(r), float(math.sqrt(var / n) / abs(mb)), float(mb), float(se_b)


def product_se(values, ses):
    """Standard error of a product of independent estimates (first order)."""
    values = np.asarray(values, dtype=float)
    ses = np.asarray(ses, dtype=float)
    prod = float(np.prod(values))
    if np.any(values == 0):
        return prod, math.nan
    return prod, abs(prod) * math.sqrt(float(np.sum((ses / values) ** 2)))


def ls_slope(x, y, se):
    """Least-squares slope of ``y`` on ``x`` and its standard error.

    The points are fitted with equal weights; the slope's standard error
    propagates the per-point errors ``se`` assuming independence.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    se = np.asarray(se, dtype=float)
    xc = x - x.mean()
    sxx = float(np.sum(xc * xc))
    slope = float(np.sum(xc * y) / sxx)
    return slope, math.sqrt(float(np.sum(xc * xc * se * se))) / sxx
