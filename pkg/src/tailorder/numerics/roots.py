"""Inversion of strictly monotone scalar functions."""

import math

from ..errors import DomainError, NoBracketError

MAX_DOUBLINGS = 60


def _bracket(f, target, lo, hi):
    """Grow [lo, hi] geometrically until target lies between f(lo) and f(hi)."""
    flo, fhi = f(lo), f(hi)
    increasing = fhi >= flo
    for _ in range(MAX_DOUBLINGS + 1):
        if min(flo, fhi) <= target <= max(flo, fhi):
            return lo, hi, flo, fhi
        if math.isnan(flo) or math.isnan(fhi):
            break
        width = hi - lo
        # target beyond f(hi) for increasing f (or below f(hi) for decreasing): push hi
        if (target > max(flo, fhi)) == increasing:
            lo, flo = hi, fhi
            hi = hi + 2.0 * width
            fhi = f(hi)
        else:
            hi, fhi = lo, flo
            lo = lo - 2.0 * width
            flo = f(lo)
    raise NoBracketError(f"could not bracket target {target!r} within {MAX_DOUBLINGS} doublings")


def invert_monotone(f, target, lo, hi, tol=1e-12):
    """Solve f(x) = target for a strictly monotone scalar function f.

    If [lo, hi] does not bracket the target it is widened geometrically,
    at most 60 doublings. Iterates are Illinois-style secant steps with a
    bisection step every third iteration. Stops once
    |f(x) - target| <= tol * max(1, |target|), or when the bracket has
    shrunk to adjacent floats (the best point found is returned).
    """
    if not hi > lo:
        raise DomainError("invert_monotone needs lo < hi")
    lo, hi, flo, fhi = _bracket(f, target, lo, hi)
    thresh = tol * max(1.0, abs(target))
    if abs(flo - target) <= thresh:
        return lo
    if abs(fhi - target) <= thresh:
        return hi
    glo, ghi = flo - target, fhi - target  # Illinois-weighted copies
    best_x, best_g = (lo, glo) if abs(glo) < abs(ghi) else (hi, ghi)
    last = 0
    for it in range(500):
        if it % 3 == 2 or glo == ghi:
            x = 0.5 * (lo + hi)
        else:
            x = hi - ghi * (hi - lo) / (ghi - glo)
            if not lo < x < hi:
                x = 0.5 * (lo + hi)
        if not lo < x < hi:
            return best_x
        fx = f(x)
        if math.isnan(fx):
            raise DomainError(f"function returned NaN at x={x!r}")
        if not min(flo, fhi) - thresh <= fx <= max(flo, fhi) + thresh:
            raise DomainError("function is not monotone on the bracket")
        gx = fx - target
        if abs(gx) < abs(best_g):
            best_x, best_g = x, gx
        if abs(gx) <= thresh:
            return x
        if (gx > 0) == (fhi - target > 0):
            hi, fhi, ghi = x, fx, gx
            if last == 1:
                glo *= 0.5
            last = 1
        else:
            lo, flo, glo = x, fx, gx
            if last == -1:
                ghi *= 0.5
            last = -1
    return best_x
