"""Least-squares slope on log-log axes."""

from dataclasses import dataclass
import math

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual_se: float
    n_points: int
    slope_se: float = 0.0


def fit_loglog_slope(points):
    """OLS of log y on log x. ``points`` is an iterable of (x, y) pairs, x, y > 0."""
    arr = np.asarray(list(points), dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2 or arr.shape[1] != 2:
        raise DomainError("need at least two (x, y) points")
    if np.any(~(arr > 0)):
        raise DomainError("log-log fit needs strictly positive coordinates")
    lx, ly = np.log(arr[:, 0]), np.log(arr[:, 1])
    n = lx.size
    xm, ym = lx.mean(), ly.mean()
    sxx = float(np.sum((lx - xm) ** 2))
    if sxx == 0.0:
        raise DomainError("x values must not all coincide")
    slope = float(np.sum((lx - xm) * (ly - ym)) / sxx)
    intercept = float(ym - slope * xm)
    resid = ly - (intercept + slope * lx)
    rse = math.sqrt(float(resid @ resid) / (n - 2)) if n > 2 else 0.0
    return SlopeFit(slope, intercept, rse, n, rse / math.sqrt(sxx))
