"""Archimedean generators psi with psi(0) = 1, decreasing to 0.

Besides psi itself every generator exposes ``psi_bar = 1 - psi`` computed
without cancellation (needed for upper-tail work, where psi is within 1e-6
of one) and ``log_psi`` (needed deep in the lower tail).
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import DomainError, UnsupportedOperationError
from .numerics import QuadratureSpec, gammainc_p, gammainc_q, integrate, invert_monotone, log_gammainc_q
from .numerics.special import _log_bessel_k_array
from .radial import ErlangOverFrailty, InverseGamma, KProduct, PointMass, PositiveStable, RadialLaw

_INV_TOL = 1e-12
_WQ = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-11, max_subdivisions=3000)


def _array_op(fn):
    """Let a method written for 1-d arrays accept scalars too."""

    def inner(self, s):
        arr = np.asarray(s, dtype=float)
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise DomainError(f"{fn.__name__} needs s >= 0")
        out = fn(self, np.atleast_1d(arr).ravel())
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    inner.__name__ = fn.__name__
    inner.__doc__ = fn.__doc__
    return inner


class Generator:
    """Base class; subclasses implement ``_psi``, ``_psi_bar`` and ``_log_psi`` on arrays."""

    def _log_psi(self, s):
        with np.errstate(divide="ignore"):
            return np.log(self._psi(s))

    @_array_op
    def psi(self, s):
        return self._psi(s)

    @_array_op
    def psi_bar(self, s):
        """1 - psi(s)."""
        return self._psi_bar(s)

    @_array_op
    def log_psi(self, s):
        return self._log_psi(s)

    @property
    def hint(self):
        """Rough location of psi^-1(1/2); seeds the inversion bracket."""
        return 1.0

    def psi_inverse(self, u):
        """psi^-1(u) for u in [0, 1]; returns inf at u = 0."""
        arr = np.asarray(u, dtype=float)
        out = np.array([self._inverse_one(float(v)) for v in np.atleast_1d(arr).ravel()])
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def psi_bar_inverse(self, v):
        """Solve 1 - psi(s) = v, accurate in relative terms for tiny v."""
        if not 0 <= v <= 1:
            raise DomainError("psi_bar_inverse needs v in [0, 1]")
        if v == 0:
            return 0.0
        if v == 1:
            return math.inf
        return _cached_bar_inverse(self, v)

    def _inverse_one(self, u):
        if not 0 <= u <= 1:
            raise DomainError(f"psi_inverse needs u in (0, 1], got {u!r}")
        if u == 1.0:
            return 0.0
        if u == 0.0:
            return math.inf
        if u > 0.5:
            return self.psi_bar_inverse(1.0 - u)
        return _cached_inverse(self, u)

    def d_monotone_violation(self, d, n_points=20):
        """Most negative (-1)^k Delta_h^k psi over k <= d on a log grid (0 when none)."""
        worst = 0.0
        grid = self.hint * np.logspace(-2, 1.5, n_points)
        # several step ratios so a kink between grid points is still straddled
        for s in grid:
            for ratio in (0.05, 0.2, 0.5):
                h = ratio * s
                vals = np.asarray(self.psi(s + h * np.arange(d + 1)), dtype=float)
                # orders 0..d: the last one is convexity of the (d-2)th derivative
                for k in range(d + 1):
                    diff = np.diff(vals[: k + 1], n=k)[0] if k else vals[0]
                    worst = min(worst, (-1) ** k * diff)
        return worst


@lru_cache(maxsize=65536)
def _cached_inverse(gen, u):
    t0 = math.log(gen.hint)
    t = invert_monotone(lambda t: float(gen.log_psi(math.exp(t))), math.log(u), t0 - 1.0, t0 + 1.0, tol=_INV_TOL)
    return math.exp(t)


@lru_cache(maxsize=65536)
def _cached_bar_inverse(gen, v):
    t0 = math.log(gen.hint)

    def f(t):
        pb = float(gen.psi_bar(math.exp(t)))
        return math.log(pb) if pb > 0 else -745.0

    t = invert_monotone(f, math.log(v), t0 - 1.0, t0 + 1.0, tol=_INV_TOL)
    return math.exp(t)


# ----------------------------------------------------------------------------
# Closed-form families
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ACIG(Generator):
    """Laplace transform of an inverse-Gamma(alpha) variable:
    psi(s) = 2 / Gamma(alpha) * s^(alpha/2) * K_alpha(2 sqrt(s)).
    """

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("ACIG needs alpha > 0")

    @property
    def hint(self):
        return max(self.alpha - 0.5, 0.1)

    def _log_psi(self, s):
        out = np.zeros_like(s)
        pos = s > 0
        if np.any(pos):
            sp = np.ascontiguousarray(s[pos])
            a = self.alpha
            out[pos] = math.log(2.0) - math.lgamma(a) + 0.5 * a * np.log(sp) + _log_bessel_k_array(a, 2.0 * np.sqrt(sp))
        return out

    def _psi(self, s):
        return np.exp(self._log_psi(s))

    def _psi_bar(self, s):
        psi = self._psi(s)
        out = 1.0 - psi
        near_one = (psi > 0.5) & (s > 0)
        for i in np.flatnonzero(near_one):
            out[i] = _acig_bar_quad(self.alpha, float(s[i]))
        return out

    def frailty_law(self):
        return InverseGamma(self.alpha)


@lru_cache(maxsize=65536)
def _acig_bar_quad(alpha, s):
    """E[1 - exp(-s/X)], X ~ Gamma(alpha, 1), integrated without cancellation."""
    lg = math.lgamma(alpha)

    def f(x):
        return -np.expm1(-s / x) * np.exp((alpha - 1.0) * np.log(x) - x - lg)

    pts = [p for p in (s, 1e-3 * alpha, alpha, 4.0 * alpha + 4.0) if p > 0]
    return integrate(f, 0.0, math.inf, QuadratureSpec(1e-300, 1e-13, 4000), points=sorted(set(pts)))


@dataclass(frozen=True)
class Joe2000(Generator):
    """psi(s) = int_s^inf exp(-v^alpha) dv / Gamma(1 + 1/alpha) = Q(1/alpha, s^alpha), 0 < alpha < 1."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise DomainError("Joe2000 needs 0 < alpha < 1")

    @property
    def hint(self):
        return 1.0

    def _psi(self, s):
        return gammainc_q(1.0 / self.alpha, s**self.alpha)

    def _psi_bar(self, s):
        return gammainc_p(1.0 / self.alpha, s**self.alpha)

    def _log_psi(self, s):
        return log_gammainc_q(1.0 / self.alpha, s**self.alpha)


@dataclass(frozen=True)
class GumbelGen(Generator):
    """psi(s) = exp(-s^(1/theta)), theta >= 1."""

    theta: float

    def __post_init__(self):
        if not self.theta >= 1:
            raise DomainError("GumbelGen needs theta >= 1")

    @property
    def hint(self):
        return math.log(2.0) ** self.theta

    def _psi(self, s):
        return np.exp(-(s ** (1.0 / self.theta)))

    def _psi_bar(self, s):
        return -np.expm1(-(s ** (1.0 / self.theta)))

    def _log_psi(self, s):
        return -(s ** (1.0 / self.theta))

    def _inverse_one(self, u):
        if not 0 <= u <= 1:
            raise DomainError(f"psi_inverse needs u in (0, 1], got {u!r}")
        if u == 0.0:
            return math.inf
        return (-math.log(u)) ** self.theta

    def psi_bar_inverse(self, v):
        if not 0 <= v <= 1:
            raise DomainError("psi_bar_inverse needs v in [0, 1]")
        if v == 1:
            return math.inf
        return (-math.log1p(-v)) ** self.theta

    def frailty_law(self):
        if self.theta == 1.0:
            return PointMass(1.0)
        return PositiveStable(1.0 / self.theta)


# ----------------------------------------------------------------------------
# Williamson d-transform
# ----------------------------------------------------------------------------


def _finite(v):
    # the mapped range reaches r = inf, where every integrand here vanishes
    return np.where(np.isfinite(v), v, 0.0)


def _williamson_parts(law, d, s, complement):
    """psi(s) (or 1 - psi(s) when ``complement``) for one s > 0.

    Integrates in t = log(r / s) so that both the kink at r = s and the
    polynomial or exponential decay of the radial tail become smooth,
    exponentially decaying integrands.
    """
    pts = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
    try:
        qs = [float(q) for q in law.quantile(np.array([0.5, 0.9, 0.99]))]
    except Exception:  # noqa: BLE001 - breakpoints are only a hint
        qs = []
    pts += [math.log(q / s) for q in qs if q > s]
    pts = sorted(p for p in pts if p > 0)
    try:
        law.pdf(s)
        has_pdf = True
    except UnsupportedOperationError:
        has_pdf = False
    if has_pdf:
        if complement:

            def f(t):
                with np.errstate(over="ignore", invalid="ignore"):
                    r = s * np.exp(t)
                    w = -np.expm1((d - 1) * np.log1p(-np.exp(-t)))
                    return _finite(w * r * law.pdf(r))

            return float(law.cdf(s)) + integrate(f, 0.0, math.inf, _WQ, points=pts)

        def f(t):
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                r = s * np.exp(t)
                w = np.exp((d - 1) * np.log1p(-np.exp(-t)))
                return _finite(w * r * law.pdf(r))

        return integrate(f, 0.0, math.inf, _WQ, points=pts)

    # Stieltjes form after integration by parts: int_s^inf S(r) (d-1)(1-s/r)^(d-2) s/r^2 dr
    if isinstance(law, PointMass) and law.r0 > s:
        pts = sorted(set(pts + [math.log(law.r0 / s)]))

    def g(t):
        with np.errstate(over="ignore", invalid="ignore"):
            r = s * np.exp(t)
            e = np.exp(-t)
            return _finite(np.asarray(law.survival(r)) * (d - 1) * (1.0 - e) ** (d - 2) * e)

    val = integrate(g, 0.0, math.inf, _WQ, points=pts)
    return 1.0 - val if complement else val


def williamson_transform(law, d, s):
    """Williamson d-transform psi(s) = int_s^inf (1 - s/r)^(d-1) dF_R(r)."""
    if d < 2 or int(d) != d:
        raise DomainError("d must be an integer >= 2")
    if float(law.cdf(0.0)) > 0:
        raise DomainError("radial law has an atom at zero")
    gen = WilliamsonGen(law, int(d))
    return gen.psi(s)


@dataclass(frozen=True)
class WilliamsonGen(Generator):
    """Generator obtained as the Williamson d-transform of a radial law."""

    law: RadialLaw
    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError("WilliamsonGen needs an integer d >= 2")
        try:
            atom = float(self.law.cdf(0.0))
        except UnsupportedOperationError:
            atom = 0.0
        if atom > 0:
            raise DomainError("radial law has an atom at zero")

    @property
    def hint(self):
        return float(self.law.scale)

    def _psi(self, s):
        out = np.empty_like(s)
        for i, si in enumerate(s):
            out[i] = _williamson_cached(self.law, self.d, float(si), False)
        return out

    def _psi_bar(self, s):
        out = np.empty_like(s)
        for i, si in enumerate(s):
            out[i] = _williamson_cached(self.law, self.d, float(si), True)
        return out


@lru_cache(maxsize=200000)
def _williamson_cached(law, d, s, complement):
    if s == 0.0:
        return 0.0 if complement else 1.0
    if s == math.inf:
        return 1.0 if complement else 0.0
    return _williamson_parts(law, d, s, complement)


def frailty_to_radial(d, H):
    """Law of E_d / H, E_d ~ Gamma(d, 1) independent of the frailty H."""
    if d < 2 or int(d) != d:
        raise DomainError("d must be an integer >= 2")
    if isinstance(H, InverseGamma):
        return KProduct(int(d), H.a)
    return ErlangOverFrailty(int(d), H)


# functional aliases


def psi(gen, s):
    return gen.psi(s)


def psi_inverse(gen, u):
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr <= 0) | (u_arr > 1)):
        if np.any(u_arr == 0):
            return gen.psi_inverse(u)
        raise DomainError("psi_inverse needs u in (0, 1]")
    return gen.psi_inverse(u)
