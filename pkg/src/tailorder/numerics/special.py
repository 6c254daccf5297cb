"""Special functions: log-gamma, incomplete gamma and the modified Bessel K.

Scalar kernels are prefixed with an underscore and compiled with numba when
available; the public wrappers validate arguments and accept scalars or
arrays.
"""

import math

import numpy as np

from .._jit import njit
from ..errors import DomainError

_EPS = 1e-16
_FPMIN = 1e-300
_MAXIT = 100000
_EULER = 0.5772156649015329


@njit
def _lgamma(x):
    return math.lgamma(x)


# --------------------------------------------------------------------------
# Incomplete gamma
# --------------------------------------------------------------------------


@njit
def _gser_log(a, x):
    """log P(a, x) by the power series (converges for all x, fast for x < a + 1)."""
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAXIT):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return math.log(total) - x + a * math.log(x) - math.lgamma(a)


@njit
def _gcf_log(a, x):
    """log Q(a, x) by the modified Lentz continued fraction (x >= a + 1)."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAXIT):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.log(h) - x + a * math.log(x) - math.lgamma(a)


@njit
def _log_gammainc_q(a, x):
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        p = math.exp(_gser_log(a, x))
        return math.log1p(-p)
    return _gcf_log(a, x)


@njit
def _log_gammainc_p(a, x):
    if x <= 0.0:
        return -math.inf
    if x < a + 1.0:
        return _gser_log(a, x)
    return math.log1p(-math.exp(_gcf_log(a, x)))


@njit
def _gammainc_q(a, x):
    if x <= 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - math.exp(_gser_log(a, x))
    return math.exp(_gcf_log(a, x))


@njit
def _gammainc_p(a, x):
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        return math.exp(_gser_log(a, x))
    return -math.expm1(_gcf_log(a, x))


# --------------------------------------------------------------------------
# Modified Bessel function of the second kind
# --------------------------------------------------------------------------


@njit
def _temme_gammas(mu):
    """(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2."""
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    gam2 = 0.5 * (gammi + gampl)
    if abs(mu) < 1e-3:
        # odd part of the Taylor series of 1/Gamma(1+x)
        m2 = mu * mu
        gam1 = -(_EULER - 0.0420026350340952 * m2 - 0.0421977345555443 * m2 * m2)
    else:
        gam1 = (gammi - gampl) / (2.0 * mu)
    return gam1, gam2, gampl, gammi


@njit
def _bessel_k_pair(mu, x):
    """K_mu(x), K_{mu+1}(x) for |mu| <= 1/2, scaled by exp(x) when x >= 2.

    Temme's series below x = 2, Steed's continued fraction above.
    """
    if x < 2.0:
        x2 = 0.5 * x
        pimu = math.pi * mu
        fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = mu * d
        fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
        gam1, gam2, gampl, gammi = _temme_gammas(mu)
        ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        total = ff
        e = math.exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        d = x2 * x2
        total1 = p
        for i in range(1, _MAXIT):
            ff = (i * ff + p + q) / (i * i - mu * mu)
            c *= d / i
            p /= i - mu
            q /= i + mu
            delta = c * ff
            total += delta
            total1 += c * (p - i * ff)
            if abs(delta) < abs(total) * _EPS:
                break
        return total, total1 * 2.0 / x
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d
    delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu * mu
    q = a1
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, _MAXIT):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) / s
    k1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, k1


@njit
def _bessel_k_scaled(nu, x):
    """exp(x) * K_nu(x)."""
    nu = abs(nu)
    nl = int(nu + 0.5)
    mu = nu - nl
    kmu, k1 = _bessel_k_pair(mu, x)
    for i in range(1, nl + 1):
        kt = (mu + i) * (2.0 / x) * k1 + kmu
        kmu = k1
        k1 = kt
    if x < 2.0:
        return kmu * math.exp(x)
    return kmu


@njit
def _bessel_k(nu, x):
    nu = abs(nu)
    if x < 2.0:
        nl = int(nu + 0.5)
        mu = nu - nl
        kmu, k1 = _bessel_k_pair(mu, x)
        for i in range(1, nl + 1):
            kt = (mu + i) * (2.0 / x) * k1 + kmu
            kmu = k1
            k1 = kt
        return kmu
    return _bessel_k_scaled(nu, x) * math.exp(-x)


@njit
def _log_bessel_k(nu, x):
    if x < 2.0:
        return math.log(_bessel_k(nu, x))
    return math.log(_bessel_k_scaled(nu, x)) - x


# --------------------------------------------------------------------------
# Array kernels
# --------------------------------------------------------------------------


@njit
def _bessel_k_array(nu, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _bessel_k(nu, x[i])
    return out


@njit
def _log_bessel_k_array(nu, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _log_bessel_k(nu, x[i])
    return out


@njit
def _gammainc_q_array(a, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _gammainc_q(a, x[i])
    return out


@njit
def _gammainc_p_array(a, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _gammainc_p(a, x[i])
    return out


@njit
def _log_gammainc_q_array(a, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _log_gammainc_q(a, x[i])
    return out


@njit
def _log_gammainc_p_array(a, x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _log_gammainc_p(a, x[i])
    return out


def _apply(scalar_kernel, array_kernel, param, x):
    if np.ndim(x) == 0:
        return scalar_kernel(float(param), float(x))
    arr = np.asarray(x, dtype=float)
    return array_kernel(float(param), arr.ravel()).reshape(arr.shape)


# --------------------------------------------------------------------------
# Public API
# --------------------------------------------------------------------------


def log_gamma(x):
    """Natural log of the gamma function for x > 0."""
    if np.ndim(x) == 0:
        if not x > 0:
            raise DomainError(f"log_gamma requires x > 0, got {x!r}")
        return math.lgamma(x)
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("log_gamma requires x > 0")
    return np.vectorize(math.lgamma, otypes=[float])(arr)


def _check_gamma_args(a, x):
    if not a > 0:
        raise DomainError(f"incomplete gamma requires a > 0, got {a!r}")
    if np.any(~(np.asarray(x) >= 0)):
        raise DomainError("incomplete gamma requires x >= 0")


def gammainc_q(a, x):
    """Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a)."""
    _check_gamma_args(a, x)
    return _apply(_gammainc_q, _gammainc_q_array, a, x)


def gammainc_p(a, x):
    """Regularized lower incomplete gamma P(a, x) = 1 - Q(a, x)."""
    _check_gamma_args(a, x)
    return _apply(_gammainc_p, _gammainc_p_array, a, x)


def log_gammainc_q(a, x):
    """log Q(a, x), finite far beyond the underflow point of Q itself."""
    _check_gamma_args(a, x)
    return _apply(_log_gammainc_q, _log_gammainc_q_array, a, x)


def log_gammainc_p(a, x):
    """log P(a, x)."""
    _check_gamma_args(a, x)
    return _apply(_log_gammainc_p, _log_gammainc_p_array, a, x)


def upper_incomplete_gamma(a, x):
    """Non-regularized upper incomplete gamma, Gamma(a, x) = int_x^inf t^(a-1) e^-t dt.

    >>> round(upper_incomplete_gamma(1.0, 1.0), 12) == round(math.exp(-1.0), 12)
    True
    """
    _check_gamma_args(a, x)
    lg = math.lgamma(a)
    return np.exp(_apply(_log_gammainc_q, _log_gammainc_q_array, a, x) + lg)


def bessel_k(nu, x):
    """Modified Bessel function of the second kind K_nu(x), real nu, x > 0."""
    if np.any(~(np.asarray(x) > 0)):
        raise DomainError("bessel_k requires x > 0")
    return _apply(_bessel_k, _bessel_k_array, nu, x)


def log_bessel_k(nu, x):
    """log K_nu(x); stays finite where K_nu(x) underflows."""
    if np.any(~(np.asarray(x) > 0)):
        raise DomainError("log_bessel_k requires x > 0")
    return _apply(_log_bessel_k, _log_bessel_k_array, nu, x)
