"""Positive laws used as radial variables (elliptical and simplex mixtures)
and as frailty variables (Archimedean mixtures).

Every law is an immutable dataclass. Query methods accept scalars or numpy
arrays. Module-level functions (``radial_cdf`` and friends) are thin
wrappers for callers that prefer a functional style.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
import math

import numpy as np

from .errors import DomainError, UnsupportedOperationError
from .numerics import (
    QuadratureSpec,
    gammainc_p,
    gammainc_q,
    integrate,
    invert_monotone,
    log_bessel_k,
    log_gammainc_p,
    log_gammainc_q,
)
from .numerics.special import _log_bessel_k_array
from .rng import as_generator

_QSPEC = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-11, max_subdivisions=4000)


class TailTag(str, Enum):
    REGULARLY_VARYING = "regularly-varying"
    GUMBEL_MDA = "gumbel-mda"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class UpperTailClass:
    """Upper-tail type of a law; ``index`` is the (negative) RV index when set."""

    tag: TailTag
    index: float | None = None

    def __post_init__(self):
        if self.tag is TailTag.REGULARLY_VARYING and not (self.index is not None and self.index < 0):
            raise DomainError("regularly varying tails need a negative index")


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")


def _wrap(fn):
    """Evaluate ``fn`` on an array and hand back a float for scalar input."""

    def inner(self, x):
        arr = np.asarray(x, dtype=float)
        out = fn(self, np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    inner.__name__ = fn.__name__
    inner.__doc__ = fn.__doc__
    return inner


class RadialLaw:
    """Base class. Subclasses override what they can do in closed form."""

    closed_quantile = False

    # -- distribution functions -------------------------------------------
    def cdf(self, x):
        raise UnsupportedOperationError(f"{self!r} has no distribution function; sample it instead")

    def survival(self, x):
        return 1.0 - self.cdf(x)

    def log_survival(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.survival(x))

    def pdf(self, x):
        raise UnsupportedOperationError(f"{self!r} has no density")

    @property
    def scale(self):
        """A typical magnitude, used to size grids and brackets."""
        return 1.0

    def quantile(self, p):
        arr = np.asarray(p, dtype=float)
        if np.any(~((arr > 0) & (arr < 1))):
            raise DomainError("quantile needs p in (0, 1)")
        out = np.array([_numeric_quantile(self, float(q)) for q in np.atleast_1d(arr)])
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def sample(self, rng, n):
        u = as_generator(rng).random(n)
        return np.asarray(self.quantile(np.clip(u, 1e-300, 1 - 1e-16)), dtype=float)

    # -- tail descriptors ----------------------------------------------------
    def lower_tail_index(self):
        """Index a with F in RV_a(0+), or None when the lower tail is not RV."""
        return None

    def upper_tail_class(self):
        return UpperTailClass(TailTag.GUMBEL_MDA)

    def aux_index(self):
        """RV index of the Gumbel auxiliary function a(x) at infinity, if known."""
        return None

    def mean(self):
        """E[R], or None when infinite or not known in closed form."""
        return None

    def scaled(self, c):
        _positive("scale factor", c)
        return Scaled(self, float(c))

    def __repr__(self):  # dataclass repr is used by subclasses
        return type(self).__name__


def _polish(law, q, p):
    """Smallest-ish x >= q with F(x) >= p (generalized inverse semantics)."""
    if law.cdf(q) >= p:
        return q
    step = max(abs(q), 1e-300) * 1e-15
    for _ in range(200):
        x = q + step
        if law.cdf(x) >= p:
            return x
        step *= 2.0
    return q


def _polish_closed(law, q, p):
    """Nudge closed-form quantiles up by a few ulps where rounding left F(q) < p."""
    arr = np.asarray(q, dtype=float)
    pp = np.broadcast_to(np.asarray(p, dtype=float), arr.shape)
    out = np.atleast_1d(arr).copy()
    pv = np.atleast_1d(pp)
    for _ in range(64):
        low = np.asarray(law.cdf(out), dtype=float) < pv
        if not np.any(low):
            break
        out[low] = np.nextafter(out[low], np.inf)
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


@lru_cache(maxsize=4096)
def _numeric_quantile(law, p):
    s = law.scale
    lo, hi = math.log(s) - 1.0, math.log(s) + 1.0
    # log scale on the short side keeps relative accuracy at both ends
    if p <= 0.5:
        t = invert_monotone(lambda t: _log_or_floor(law.cdf(math.exp(t))), math.log(p), lo, hi, tol=1e-13)
    else:
        t = invert_monotone(lambda t: -_log_or_floor(law.survival(math.exp(t))), -math.log1p(-p), lo, hi, tol=1e-13)
    return _polish(law, math.exp(t), p)


def _log_or_floor(v):
    return math.log(v) if v > 0 else -1e300


# ----------------------------------------------------------------------------
# Families
# ----------------------------------------------------------------------------


@dataclass(frozen=True, repr=True)
class PointMass(RadialLaw):
    r0: float

    closed_quantile = True

    def __post_init__(self):
        _positive("r0", self.r0)

    @property
    def scale(self):
        return self.r0

    @_wrap
    def cdf(self, x):
        return np.where(x >= self.r0, 1.0, 0.0)

    @_wrap
    def survival(self, x):
        return np.where(x >= self.r0, 0.0, 1.0)

    def quantile(self, p):
        arr = np.asarray(p, dtype=float)
        if np.any(~((arr > 0) & (arr < 1))):
            raise DomainError("quantile needs p in (0, 1)")
        return self.r0 if arr.ndim == 0 else np.full(arr.shape, self.r0)

    def sample(self, rng, n):
        as_generator(rng)
        return np.full(n, self.r0)

    def upper_tail_class(self):
        return UpperTailClass(TailTag.BOUNDED)

    def mean(self):
        return self.r0


@dataclass(frozen=True, repr=True)
class Gamma(RadialLaw):
    """Gamma(k, 1)."""

    k: float

    def __post_init__(self):
        _positive("k", self.k)

    @property
    def scale(self):
        return self.k

    @_wrap
    def cdf(self, x):
        return gammainc_p(self.k, np.maximum(x, 0.0))

    @_wrap
    def survival(self, x):
        return gammainc_q(self.k, np.maximum(x, 0.0))

    @_wrap
    def log_survival(self, x):
        return log_gammainc_q(self.k, np.maximum(x, 0.0))

    @_wrap
    def pdf(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp((self.k - 1.0) * np.log(x) - x - math.lgamma(self.k))
        return np.where(x > 0, out, 0.0)

    def sample(self, rng, n):
        return as_generator(rng).gamma(self.k, size=n)

    def lower_tail_index(self):
        return self.k

    def aux_index(self):
        return 0.0

    def mean(self):
        return self.k


@dataclass(frozen=True, repr=True)
class InverseGamma(RadialLaw):
    """H with 1/H ~ Gamma(a, 1)."""

    a: float

    def __post_init__(self):
        _positive("a", self.a)

    @property
    def scale(self):
        return 1.0 / self.a

    @_wrap
    def cdf(self, x):
        with np.errstate(divide="ignore"):
            return np.where(x > 0, gammainc_q(self.a, 1.0 / np.maximum(x, 1e-300)), 0.0)

    @_wrap
    def survival(self, x):
        with np.errstate(divide="ignore"):
            return np.where(x > 0, gammainc_p(self.a, 1.0 / np.maximum(x, 1e-300)), 1.0)

    @_wrap
    def pdf(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp(-(self.a + 1.0) * np.log(x) - 1.0 / x - math.lgamma(self.a))
        return np.where(x > 0, out, 0.0)

    def sample(self, rng, n):
        return 1.0 / as_generator(rng).gamma(self.a, size=n)

    def upper_tail_class(self):
        return UpperTailClass(TailTag.REGULARLY_VARYING, -self.a)

    def mean(self):
        return 1.0 / (self.a - 1.0) if self.a > 1 else None


@dataclass(frozen=True, repr=True)
class GenInvGammaT(RadialLaw):
    """R with R^2 ~ InverseGamma(nu/2, scale nu/2), i.e. R = sqrt(nu / (2 G)), G ~ Gamma(nu/2, 1).

    This is the normal-variance mixing variable of the Student t law; the
    radial part of a bivariate t vector is ``StudentTRadial``.
    """

    nu: float

    def __post_init__(self):
        _positive("nu", self.nu)

    @_wrap
    def cdf(self, x):
        with np.errstate(divide="ignore"):
            z = 0.5 * self.nu / np.maximum(x, 1e-300) ** 2
        return np.where(x > 0, gammainc_q(0.5 * self.nu, z), 0.0)

    @_wrap
    def survival(self, x):
        with np.errstate(divide="ignore"):
            z = 0.5 * self.nu / np.maximum(x, 1e-300) ** 2
        return np.where(x > 0, gammainc_p(0.5 * self.nu, z), 1.0)

    @_wrap
    def log_survival(self, x):
        with np.errstate(divide="ignore"):
            z = 0.5 * self.nu / np.maximum(x, 1e-300) ** 2
        return np.where(x > 0, log_gammainc_p(0.5 * self.nu, z), 0.0)

    @_wrap
    def pdf(self, x):
        h = 0.5 * self.nu
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            logf = math.log(2.0) + h * math.log(h) - math.lgamma(h) - (self.nu + 1.0) * np.log(x) - h / x**2
        return np.where(x > 0, np.exp(logf), 0.0)

    def sample(self, rng, n):
        g = as_generator(rng).gamma(0.5 * self.nu, size=n)
        return np.sqrt(self.nu / (2.0 * g))

    def upper_tail_class(self):
        return UpperTailClass(TailTag.REGULARLY_VARYING, -self.nu)

    def mean(self):
        if self.nu <= 1:
            return None
        h = 0.5 * self.nu
        return math.sqrt(h) * math.exp(math.lgamma(h - 0.5) - math.lgamma(h))


@dataclass(frozen=True, repr=True)
class StudentTRadial(RadialLaw):
    """Norm of a standard bivariate Student t vector: F(x) = 1 - (1 + x^2/nu)^(-nu/2)."""

    nu: float

    closed_quantile = True

    def __post_init__(self):
        _positive("nu", self.nu)

    @_wrap
    def cdf(self, x):
        x = np.maximum(x, 0.0)
        return -np.expm1(-0.5 * self.nu * np.log1p(x * x / self.nu))

    @_wrap
    def survival(self, x):
        x = np.maximum(x, 0.0)
        return np.exp(-0.5 * self.nu * np.log1p(x * x / self.nu))

    @_wrap
    def log_survival(self, x):
        x = np.maximum(x, 0.0)
        return -0.5 * self.nu * np.log1p(x * x / self.nu)

    @_wrap
    def pdf(self, x):
        x = np.maximum(x, 0.0)
        return x * np.exp(-(0.5 * self.nu + 1.0) * np.log1p(x * x / self.nu))

    def quantile(self, p):
        arr = np.asarray(p, dtype=float)
        if np.any(~((arr > 0) & (arr < 1))):
            raise DomainError("quantile needs p in (0, 1)")
        q = np.sqrt(self.nu * np.expm1(-2.0 / self.nu * np.log1p(-arr)))
        return _polish_closed(self, q, arr)

    def lower_tail_index(self):
        return 2.0

    def upper_tail_class(self):
        return UpperTailClass(TailTag.REGULARLY_VARYING, -self.nu)

    def mean(self):
        if self.nu <= 1:
            return None
        return 0.5 * math.sqrt(self.nu) * math.exp(
            math.lgamma(0.5) + math.lgamma(0.5 * (self.nu - 1.0)) - math.lgamma(0.5 * self.nu)
        )


@dataclass(frozen=True, repr=True)
class KProduct(RadialLaw):
    """Product of independent Gamma(d, 1) and Gamma(alpha, 1) variables (K-distribution)."""

    d: int
    alpha: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError("KProduct needs an integer d >= 2")
        _positive("alpha", self.alpha)

    @property
    def scale(self):
        return float(self.d * self.alpha)

    def _log_pdf(self, x):
        d, a = float(self.d), self.alpha
        const = math.log(2.0) - math.lgamma(d) - math.lgamma(a)
        return const + (0.5 * (a + d) - 1.0) * np.log(x) + _log_bessel_k_array(d - a, 2.0 * np.sqrt(x))

    @_wrap
    def pdf(self, x):
        out = np.zeros_like(x)
        pos = x > 0
        if np.any(pos):
            with np.errstate(invalid="ignore", over="ignore"):
                vals = np.exp(self._log_pdf(np.ascontiguousarray(x[pos])))
            out[pos] = np.where(np.isfinite(vals), vals, 0.0)
        return out

    def _integral(self, lo, hi):
        pts = [p for p in (1e-6 * self.scale, 1e-3 * self.scale, 0.1 * self.scale, self.scale, 4 * self.scale) if lo < p < hi]
        return integrate(self.pdf, lo, hi, _QSPEC, points=pts)

    @_wrap
    def cdf(self, x):
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            out[i] = _kproduct_cdf(self, float(xi))
        return out

    @_wrap
    def survival(self, x):
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            out[i] = _kproduct_survival(self, float(xi))
        return out

    def sample(self, rng, n):
        g = as_generator(rng)
        return g.gamma(float(self.d), size=n) * g.gamma(self.alpha, size=n)

    def lower_tail_index(self):
        return float(min(self.alpha, self.d))

    def aux_index(self):
        # survival ~ x^c exp(-2 sqrt(x)), so a(x) ~ sqrt(x)
        return 0.5

    def mean(self):
        return float(self.d * self.alpha)


@lru_cache(maxsize=65536)
def _kproduct_cdf(law, x):
    if x <= 0:
        return 0.0
    if x <= law.scale:
        return min(1.0, law._integral(0.0, x))
    return max(0.0, 1.0 - law._integral(x, math.inf))


@lru_cache(maxsize=65536)
def _kproduct_survival(law, x):
    if x <= 0:
        return 1.0
    if x <= law.scale:
        return max(0.0, 1.0 - law._integral(0.0, x))
    return law._integral(x, math.inf)


@dataclass(frozen=True, repr=True)
class Dagum(RadialLaw):
    """F(x) = [1 + (x/sigma)^(-alpha)]^(-beta)."""

    alpha: float
    beta: float
    sigma: float = 1.0

    closed_quantile = True

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("beta", self.beta)
        _positive("sigma", self.sigma)

    @property
    def scale(self):
        return self.sigma

    def _log_cdf(self, x):
        with np.errstate(divide="ignore", over="ignore"):
            return -self.beta * np.log1p((x / self.sigma) ** -self.alpha)

    @_wrap
    def cdf(self, x):
        return np.where(x > 0, np.exp(self._log_cdf(np.maximum(x, 1e-300))), 0.0)

    @_wrap
    def survival(self, x):
        return np.where(x > 0, -np.expm1(self._log_cdf(np.maximum(x, 1e-300))), 1.0)

    @_wrap
    def pdf(self, x):
        z = np.maximum(x, 1e-300) / self.sigma
        with np.errstate(over="ignore", divide="ignore"):
            logf = (
                math.log(self.alpha * self.beta / self.sigma)
                - (self.alpha + 1.0) * np.log(z)
                - (self.beta + 1.0) * np.log1p(z**-self.alpha)
            )
        return np.where(x > 0, np.exp(logf), 0.0)

    def quantile(self, p):
        arr = np.asarray(p, dtype=float)
        if np.any(~((arr > 0) & (arr < 1))):
            raise DomainError("quantile needs p in (0, 1)")
        q = self.sigma * np.expm1(-np.log(arr) / self.beta) ** (-1.0 / self.alpha)
        return _polish_closed(self, q, arr)

    def lower_tail_index(self):
        return self.alpha * self.beta

    def upper_tail_class(self):
        return UpperTailClass(TailTag.REGULARLY_VARYING, -self.alpha)

    def mean(self):
        if self.alpha <= 1:
            return None
        a, b = self.alpha, self.beta
        return self.sigma * math.exp(math.lgamma(b + 1.0 / a) + math.lgamma(1.0 - 1.0 / a) - math.lgamma(b))


@dataclass(frozen=True, repr=True)
class PositiveWeibull(RadialLaw):
    """F(x) = 1 - exp(-x^alpha)."""

    alpha: float

    closed_quantile = True

    def __post_init__(self):
        _positive("alpha", self.alpha)

    @_wrap
    def cdf(self, x):
        return -np.expm1(-np.maximum(x, 0.0) ** self.alpha)

    @_wrap
    def survival(self, x):
        return np.exp(-np.maximum(x, 0.0) ** self.alpha)

    @_wrap
    def log_survival(self, x):
        return -np.maximum(x, 0.0) ** self.alpha

    @_wrap
    def pdf(self, x):
        x = np.maximum(x, 1e-300)
        return self.alpha * x ** (self.alpha - 1.0) * np.exp(-(x**self.alpha))

    def quantile(self, p):
        arr = np.asarray(p, dtype=float)
        if np.any(~((arr > 0) & (arr < 1))):
            raise DomainError("quantile needs p in (0, 1)")
        q = (-np.log1p(-arr)) ** (1.0 / self.alpha)
        return _polish_closed(self, q, arr)

    def lower_tail_index(self):
        return self.alpha

    def aux_index(self):
        # a(x) ~ x^(1 - alpha) / alpha
        return 1.0 - self.alpha

    def mean(self):
        return math.gamma(1.0 + 1.0 / self.alpha)


@dataclass(frozen=True, repr=True)
class KotzRadial(RadialLaw):
    """Radial law of the symmetric Kotz type: density proportional to x^(2N-1) exp(-beta x^(2 xi)).

    Survival is Q(N/xi, beta x^(2 xi)) with Q the regularized upper
    incomplete gamma function.
    """

    N: float
    beta: float
    xi: float

    def __post_init__(self):
        _positive("N", self.N)
        _positive("beta", self.beta)
        _positive("xi", self.xi)

    @property
    def scale(self):
        return self.beta ** (-0.5 / self.xi)

    def _w(self, x):
        return self.beta * np.maximum(x, 0.0) ** (2.0 * self.xi)

    @_wrap
    def cdf(self, x):
        return gammainc_p(self.N / self.xi, self._w(x))

    @_wrap
    def survival(self, x):
        return gammainc_q(self.N / self.xi, self._w(x))

    @_wrap
    def log_survival(self, x):
        return log_gammainc_q(self.N / self.xi, self._w(x))

    @_wrap
    def pdf(self, x):
        a = self.N / self.xi
        x = np.maximum(x, 1e-300)
        logf = (
            math.log(2.0 * self.xi)
            + a * math.log(self.beta)
            - math.lgamma(a)
            + (2.0 * self.N - 1.0) * np.log(x)
            - self.beta * x ** (2.0 * self.xi)
        )
        return np.exp(logf)

    def sample(self, rng, n):
        g = as_generator(rng).gamma(self.N / self.xi, size=n)
        return (g / self.beta) ** (0.5 / self.xi)

    def lower_tail_index(self):
        return 2.0 * self.N

    def aux_index(self):
        # a(x) ~ x^(1 - 2 xi) / (2 beta xi)
        return 1.0 - 2.0 * self.xi

    def mean(self):
        a = self.N / self.xi
        return self.beta ** (-0.5 / self.xi) * math.exp(math.lgamma(a + 0.5 / self.xi) - math.lgamma(a))


@dataclass(frozen=True, repr=True)
class PositiveStable(RadialLaw):
    """Positive stable law with Laplace transform exp(-s^alpha), 0 < alpha <= 1 (sampling only)."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise DomainError("positive stable index must lie in (0, 1]")

    def sample(self, rng, n):
        if self.alpha == 1.0:
            return np.ones(n)
        g = as_generator(rng)
        a = self.alpha
        theta = g.uniform(0.0, math.pi, size=n)
        w = g.exponential(size=n)
        return (np.sin(a * theta) / np.sin(theta) ** (1.0 / a)) * (np.sin((1.0 - a) * theta) / w) ** ((1.0 - a) / a)

    def upper_tail_class(self):
        if self.alpha == 1.0:
            return UpperTailClass(TailTag.BOUNDED)
        return UpperTailClass(TailTag.REGULARLY_VARYING, -self.alpha)


@dataclass(frozen=True, repr=True)
class ErlangOverFrailty(RadialLaw):
    """Law of E_d / H with E_d ~ Gamma(d, 1) independent of H (sampling only)."""

    d: int
    H: RadialLaw

    def sample(self, rng, n):
        g = as_generator(rng)
        e = g.gamma(float(self.d), size=n)
        return e / self.H.sample(g, n)

    def mean(self):
        if isinstance(self.H, PointMass):
            return self.d / self.H.r0
        if isinstance(self.H, InverseGamma):
            return float(self.d * self.H.a)
        return None


@dataclass(frozen=True, repr=True)
class Scaled(RadialLaw):
    """Law of c * R."""

    base: RadialLaw
    c: float

    @property
    def closed_quantile(self):
        return self.base.closed_quantile

    @property
    def scale(self):
        return self.c * self.base.scale

    def cdf(self, x):
        return self.base.cdf(np.asarray(x, dtype=float) / self.c)

    def survival(self, x):
        return self.base.survival(np.asarray(x, dtype=float) / self.c)

    def log_survival(self, x):
        return self.base.log_survival(np.asarray(x, dtype=float) / self.c)

    def pdf(self, x):
        return self.base.pdf(np.asarray(x, dtype=float) / self.c) / self.c

    def quantile(self, p):
        return self.c * self.base.quantile(p)

    def sample(self, rng, n):
        return self.c * self.base.sample(rng, n)

    def lower_tail_index(self):
        return self.base.lower_tail_index()

    def upper_tail_class(self):
        return self.base.upper_tail_class()

    def aux_index(self):
        return self.base.aux_index()

    def mean(self):
        m = self.base.mean()
        return None if m is None else self.c * m


# ----------------------------------------------------------------------------
# Functional interface
# ----------------------------------------------------------------------------


def radial_cdf(law, x):
    if np.any(np.asarray(x) < 0):
        raise DomainError("radial_cdf needs x >= 0")
    return law.cdf(x)


def radial_survival(law, x):
    if np.any(np.asarray(x) < 0):
        raise DomainError("radial_survival needs x >= 0")
    return law.survival(x)


def radial_quantile(law, p):
    return law.quantile(p)


def radial_sample(law, rng, n):
    if n < 1:
        raise DomainError("sample size must be >= 1")
    return law.sample(rng, n)


def lower_tail_index(law):
    return law.lower_tail_index()


def upper_tail_class(law):
    return law.upper_tail_class()


def gumbel_aux(law, x):
    """Auxiliary function a(x) = int_x^inf S(t) dt / S(x) of a Gumbel-MDA law."""
    if law.upper_tail_class().tag is not TailTag.GUMBEL_MDA:
        raise DomainError(f"{law!r} is not in the Gumbel domain of attraction")
    if not x > 0:
        raise DomainError("gumbel_aux needs x > 0")
    ls0 = float(law.log_survival(x))
    if not math.isfinite(ls0):
        raise DomainError(f"survival vanishes at x={x!r}")

    def ratio(t):
        # the integrator's vectorization probe may land below x, where this overflows
        with np.errstate(over="ignore"):
            return np.exp(np.asarray(law.log_survival(t), dtype=float) - ls0)

    pts = [x * (1.0 + 10.0**k) for k in range(-6, 3)]
    return integrate(ratio, x, math.inf, QuadratureSpec(1e-14, 1e-10, 4000), points=pts)
