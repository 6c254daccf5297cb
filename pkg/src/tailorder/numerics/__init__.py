"""Numeric kernels: special functions, quadrature, monotone inversion, log-log fits."""

from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate
from .regression import SlopeFit, fit_loglog_slope
from .roots import invert_monotone
from .special import (
    bessel_k,
    gammainc_p,
    gammainc_q,
    log_bessel_k,
    log_gamma,
    log_gammainc_p,
    log_gammainc_q,
    upper_incomplete_gamma,
)

__all__ = [
    "DEFAULT_SPEC",
    "QuadratureSpec",
    "SlopeFit",
    "bessel_k",
    "fit_loglog_slope",
    "gammainc_p",
    "gammainc_q",
    "integrate",
    "invert_monotone",
    "log_bessel_k",
    "log_gamma",
    "log_gammainc_p",
    "log_gammainc_q",
    "upper_incomplete_gamma",
]
