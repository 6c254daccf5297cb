"""Copula models: cdf, diagonal and survival diagonal, plus extreme-value tail formulas.

All models are exchangeable, so the survival diagonal
Ĉ(u, ..., u) = sum_{k=1}^d (-1)^(k+1) binom(d, k) [1 - C_k(1-u, ..., 1-u)]
only needs the k-dimensional margins on their diagonals.
"""

from dataclasses import dataclass
from math import comb
import math

import numpy as np
from scipy import special as sps

from .errors import BudgetError, DomainError, UnsupportedOperationError
from .generators import Generator, GumbelGen
from .numerics import QuadratureSpec, integrate

MAX_INCLUSION_EXCLUSION_D = 20
_D_MONOTONE_SLACK = 1e-10
_EQ = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-11, max_subdivisions=4000)


def _check_budget(d):
    if d > MAX_INCLUSION_EXCLUSION_D:
        raise BudgetError(f"inclusion-exclusion over 2^{d} margins exceeds the d <= {MAX_INCLUSION_EXCLUSION_D} budget")


def _check_dim(d):
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


# ----------------------------------------------------------------------------
# Pickands-type functions
# ----------------------------------------------------------------------------

_FAMILIES = ("logistic", "sum", "max")


@dataclass(frozen=True)
class PickandsFn:
    """Homogeneous order-1 function A with max(x) <= A(x) <= sum(x).

    ``family`` is one of ``logistic`` (A = (sum x_i^theta)^(1/theta)),
    ``sum`` (independence) or ``max`` (comonotone).
    """

    family: str
    d: int
    theta: float = 1.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown Pickands family {self.family!r}")
        object.__setattr__(self, "d", _check_dim(self.d))
        if self.family == "logistic" and not (self.theta >= 1 and math.isfinite(self.theta)):
            raise DomainError("logistic family needs finite theta >= 1")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise DomainError(f"A expects {self.d} coordinates, got {x.shape[-1]}")
        if np.any(x < 0):
            raise DomainError("A is defined on the nonnegative orthant")
        if self.family == "sum":
            return x.sum(axis=-1)
        if self.family == "max":
            return x.max(axis=-1)
        # scale by the max before powering so large theta cannot overflow
        m = x.max(axis=-1)
        safe = np.where(m > 0, m, 1.0)
        y = x / np.expand_dims(safe, -1)
        return np.where(m > 0, m * np.sum(y**self.theta, axis=-1) ** (1.0 / self.theta), 0.0)

    def restrict(self, k):
        """The margin A_I for any index set I with |I| = k (all families are exchangeable)."""
        if not 1 <= k <= self.d:
            raise DomainError(f"margin size must lie in [1, {self.d}]")
        if k == 1:
            return _UnitMargin()
        return PickandsFn(self.family, k, self.theta)

    def at_ones(self):
        """A(1, ..., 1)."""
        if self.family == "sum":
            return float(self.d)
        if self.family == "max":
            return 1.0
        return float(self.d) ** (1.0 / self.theta)


class _UnitMargin:
    """A_I for a single coordinate, A(x) = x."""

    def at_ones(self):
        return 1.0


def Logistic(theta, d):
    return PickandsFn("logistic", d, float(theta))


def SumA(d):
    return PickandsFn("sum", d)


def MaxA(d):
    return PickandsFn("max", d)


def ev_lower_tail_order(A):
    """kappa_L = A(1, ..., 1)."""
    return A.at_ones()


def ev_upper_lambda(A):
    """lambda_U = d - sum over |I| >= 2 of (-1)^|I| A_I(1, ..., 1)."""
    _check_budget(A.d)
    total = float(A.d)
    for k in range(2, A.d + 1):
        total -= (-1) ** k * comb(A.d, k) * A.restrict(k).at_ones()
    return total


# ----------------------------------------------------------------------------
# Models
# ----------------------------------------------------------------------------


class CopulaModel:
    """Base class for the supported copula families."""

    radially_symmetric = False

    def _cdf(self, u):
        raise NotImplementedError

    def _diag(self, u):
        return self._cdf(np.full(self.d, u))

    def _margin_diag(self, k, u):
        """C_k(u, ..., u) for the k-dimensional margin; k = d gives the diagonal."""
        raise UnsupportedOperationError(f"{self!r} exposes no lower-dimensional margins")

    def _survival_diag(self, u):
        if self.radially_symmetric:
            return self._diag(u)
        _check_budget(self.d)
        v = 1.0 - u
        total = 0.0
        for k in range(1, self.d + 1):
            # 1 - C_k(v...v): complementary form keeps precision when v is near 1
            total += (-1) ** (k + 1) * comb(self.d, k) * self._margin_co_diag(k, u, v)
        return min(max(total, 0.0), u)

    def _margin_co_diag(self, k, u, v):
        """1 - C_k(v, ..., v)."""
        return 1.0 - self._margin_diag(k, v)


@dataclass(frozen=True)
class Independence(CopulaModel):
    d: int = 2

    def __post_init__(self):
        object.__setattr__(self, "d", _check_dim(self.d))

    def _cdf(self, u):
        return float(np.prod(u))

    def _diag(self, u):
        return u**self.d

    def _survival_diag(self, u):
        return u**self.d


@dataclass(frozen=True)
class Comonotone(CopulaModel):
    d: int = 2

    def __post_init__(self):
        object.__setattr__(self, "d", _check_dim(self.d))

    def _cdf(self, u):
        return float(np.min(u))

    def _diag(self, u):
        return u

    def _survival_diag(self, u):
        return u


@dataclass(frozen=True)
class Archimedean(CopulaModel):
    """C(u) = psi(psi^-1(u_1) + ... + psi^-1(u_d))."""

    d: int
    gen: Generator
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "d", _check_dim(self.d))
        if not isinstance(self.gen, Generator):
            raise DomainError("Archimedean needs a Generator")
        if self.check:
            worst = self.gen.d_monotone_violation(self.d)
            if worst < -_D_MONOTONE_SLACK:
                raise DomainError(f"{self.gen!r} fails the {self.d}-monotone spot check (worst difference {worst:.3g})")

    def _cdf(self, u):
        if np.any(u == 0):
            return 0.0
        return float(self.gen.psi(float(np.sum(self.gen.psi_inverse(u)))))

    def _margin_diag(self, k, u):
        if u == 0:
            return 0.0
        return float(self.gen.psi(k * self.gen.psi_inverse(u)))

    def _diag(self, u):
        return self._margin_diag(self.d, u)

    def _margin_co_diag(self, k, u, v):
        s = self.gen.psi_bar_inverse(u)
        return float(self.gen.psi_bar(k * s))


@dataclass(frozen=True)
class ExtremeValue(CopulaModel):
    """C(u) = exp(-A(-log u_1, ..., -log u_d))."""

    A: PickandsFn

    @property
    def d(self):
        return self.A.d

    def _cdf(self, u):
        if np.any(u == 0):
            return 0.0
        return float(np.exp(-self.A(-np.log(u))))

    def _margin_diag(self, k, u):
        return u ** self.A.restrict(k).at_ones()

    def _diag(self, u):
        return u ** self.A.at_ones()

    def _margin_co_diag(self, k, u, v):
        return -math.expm1(self.A.restrict(k).at_ones() * math.log1p(-u))


def _check_rho(rho):
    if not -1 < rho < 1:
        raise DomainError(f"correlation must lie in (-1, 1), got {rho!r}")


def _conditional_cdf(z_hi, pdf, cond_cdf, anchor):
    """int_{-inf}^{z_hi} pdf(z) * cond_cdf(z) dz."""
    if z_hi == -math.inf:
        return 0.0
    pts = [p for p in (anchor - 4.0, anchor - 1.0, anchor) if p < z_hi]
    return integrate(lambda z: pdf(z) * cond_cdf(z), -math.inf, z_hi, _EQ, points=pts)


@dataclass(frozen=True)
class GaussianBiv(CopulaModel):
    rho: float

    d = 2
    radially_symmetric = True

    def __post_init__(self):
        _check_rho(self.rho)

    def _cdf(self, u):
        if np.any(u == 0):
            return 0.0
        if np.any(u == 1):
            return float(np.min(u))
        x1, x2 = sps.ndtri(u)
        sig = math.sqrt(1.0 - self.rho**2)
        val = _conditional_cdf(
            x2,
            lambda z: np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi),
            lambda z: sps.ndtr((x1 - self.rho * z) / sig),
            min(x1, x2),
        )
        return min(max(val, 0.0), float(np.min(u)))


@dataclass(frozen=True)
class StudentBiv(CopulaModel):
    rho: float
    nu: float

    d = 2
    radially_symmetric = True

    def __post_init__(self):
        _check_rho(self.rho)
        if not self.nu > 0:
            raise DomainError("StudentBiv needs nu > 0")

    def _cdf(self, u):
        if np.any(u == 0):
            return 0.0
        if np.any(u == 1):
            return float(np.min(u))
        nu, rho = self.nu, self.rho
        x1, x2 = sps.stdtrit(nu, u)
        lognorm = math.lgamma(0.5 * (nu + 1.0)) - math.lgamma(0.5 * nu) - 0.5 * math.log(nu * math.pi)

        def pdf(z):
            return np.exp(lognorm - 0.5 * (nu + 1.0) * np.log1p(z * z / nu))

        def cond(z):
            # X1 | X2 = z is t_{nu+1}, centred at rho z with squared scale (1-rho^2)(nu+z^2)/(nu+1)
            sc = np.sqrt((1.0 - rho**2) * (nu + z * z) / (nu + 1.0))
            return sps.stdtr(nu + 1.0, (x1 - rho * z) / sc)

        val = _conditional_cdf(x2, pdf, cond, min(x1, x2))
        return min(max(val, 0.0), float(np.min(u)))


@dataclass(frozen=True)
class KotzBiv(CopulaModel):
    """Bivariate elliptical copula with a Kotz-type radial law; Monte Carlo only."""

    rho: float
    N: float
    beta: float
    xi: float

    d = 2
    radially_symmetric = True

    def __post_init__(self):
        _check_rho(self.rho)
        for name in ("N", "beta", "xi"):
            if not getattr(self, name) > 0:
                raise DomainError(f"KotzBiv needs {name} > 0")

    def radial_law(self):
        from .radial import KotzRadial

        return KotzRadial(self.N, self.beta, self.xi)

    def _cdf(self, u):
        raise UnsupportedOperationError("KotzBiv has no analytic cdf; estimate it by Monte Carlo with the sampling module")

    def _diag(self, u):
        return self._cdf(u)


def gumbel_copula(theta, d=2):
    """Archimedean copula with the Gumbel generator."""
    return Archimedean(d, GumbelGen(theta))


# ----------------------------------------------------------------------------
# Functional interface
# ----------------------------------------------------------------------------


def copula_cdf(model, u):
    u = np.asarray(u, dtype=float)
    if u.shape != (model.d,):
        raise DomainError(f"expected a point in [0,1]^{model.d}, got shape {u.shape}")
    if np.any(~((u >= 0) & (u <= 1))):
        raise DomainError("copula arguments must lie in [0, 1]")
    return model._cdf(u)


def _diag_map(fn, u, name):
    arr = np.asarray(u, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DomainError(f"{name} needs u in (0, 1)")
    out = np.array([fn(float(v)) for v in np.atleast_1d(arr).ravel()])
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def diagonal(model, u):
    """C(u, ..., u); accepts a scalar or an array of u values."""
    return _diag_map(model._diag, u, "diagonal")


def survival_diagonal(model, u):
    """Ĉ(u, ..., u) = P(U_1 > 1-u, ..., U_d > 1-u)."""
    _check_budget(model.d)
    return _diag_map(model._survival_diag, u, "survival_diagonal")
