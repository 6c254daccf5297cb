"""Tail orders: closed-form catalog, diagonal regression, lambda and the Gumbel-MDA ratio."""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from . import copulas as cm
from .errors import DomainError, EstimationError, EvaluationPointError
from .generators import ACIG, GumbelGen, Joe2000, WilliamsonGen
from .numerics import fit_loglog_slope
from .radial import TailTag

ANALYTIC_GRID = (1e-6, 1e-3, 20)
MC_GRID = (5e-3, 5e-2, 10)
METHODS = ("analytic-diagonal", "monte-carlo", "mda-ratio")
MIN_POINTS = 5


class GridTruncationWarning(UserWarning):
    """Grid points with a zero diagonal were dropped before the fit."""


def derived_measures(kappa):
    """(eta, chi_bar) = (1 / kappa, 2 / kappa - 1)."""
    if not kappa >= 1:
        raise DomainError(f"tail order must be >= 1, got {kappa!r}")
    return 1.0 / kappa, 2.0 / kappa - 1.0


@dataclass(frozen=True)
class TailOrderEstimate:
    kappa: float
    stderr: float
    side: str
    method: str
    grid: tuple
    lam: float | None = None
    raw_slope: float | None = None
    eta: float = field(init=False)
    chi_bar: float = field(init=False)

    def __post_init__(self):
        if self.side not in ("lower", "upper"):
            raise DomainError(f"side must be 'lower' or 'upper', got {self.side!r}")
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        eta, chi_bar = derived_measures(self.kappa)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "chi_bar", chi_bar)

    def as_dict(self):
        return {
            "kappa": self.kappa,
            "stderr": self.stderr,
            "side": self.side,
            "method": self.method,
            "grid": {"u_min": self.grid[0], "u_max": self.grid[1], "points": self.grid[2]},
            "lambda": self.lam,
            "raw_slope": self.raw_slope,
            "eta": self.eta,
            "chi_bar": self.chi_bar,
        }


@dataclass(frozen=True)
class CatalogEntry:
    model: str
    kappa_lower: float | None = None
    kappa_upper: float | None = None
    lambda_lower: float | None = None
    lambda_upper: float | None = None
    moment_index: float | None = None
    note: str = ""

    def as_dict(self):
        return {
            "model": self.model,
            "kappa_lower": self.kappa_lower,
            "kappa_upper": self.kappa_upper,
            "lambda_lower": self.lambda_lower,
            "lambda_upper": self.lambda_upper,
            "moment_index": self.moment_index,
            "note": self.note,
        }


def _in_range(value, lo, hi):
    """Drop values outside [lo, hi] (allowing rounding)."""
    if value is None:
        return None
    if lo - 1e-12 <= value <= hi + 1e-12:
        return float(min(max(value, lo), hi))
    return None


def tail_order_catalog(model):
    """Closed-form tail orders and parameters for the families with known results.

    Fields that are not determined for ``model`` stay ``None``.
    """
    d = model.d
    entry = dict(model=repr(model))
    if isinstance(model, cm.Independence):
        entry.update(kappa_lower=float(d), kappa_upper=float(d), note="independence")
    elif isinstance(model, cm.Comonotone):
        entry.update(kappa_lower=1.0, kappa_upper=1.0, lambda_lower=1.0, lambda_upper=1.0, note="comonotone")
    elif isinstance(model, cm.GaussianBiv):
        k = 2.0 / (1.0 + model.rho)
        entry.update(kappa_lower=k, kappa_upper=k, note="Gaussian: 2/(1+rho)")
    elif isinstance(model, cm.StudentBiv):
        entry.update(kappa_lower=1.0, kappa_upper=1.0, note="Student t: usual tail dependence")
    elif isinstance(model, cm.KotzBiv):
        k = (2.0 / (1.0 + model.rho)) ** model.xi
        entry.update(kappa_lower=k, kappa_upper=k, note="Kotz: (2/(1+rho))^xi")
    elif isinstance(model, cm.ExtremeValue):
        lam = cm.ev_upper_lambda(model.A)
        entry.update(kappa_lower=cm.ev_lower_tail_order(model.A), note="extreme value: kappa_L = A(1,...,1)")
        if lam > 1e-12:
            entry.update(kappa_upper=1.0, lambda_upper=lam)
        elif model.A.family == "sum" or (model.A.family == "logistic" and model.A.theta == 1.0):
            entry.update(kappa_upper=float(d))
    elif isinstance(model, cm.Archimedean):
        entry.update(_archimedean_entry(model.gen, d))
    k_lo = _in_range(entry.get("kappa_lower"), 1.0, d)
    k_up = _in_range(entry.get("kappa_upper"), 1.0, d)
    entry["kappa_lower"], entry["kappa_upper"] = k_lo, k_up
    if k_lo is None:
        entry["lambda_lower"] = None
    if k_up is None:
        entry["lambda_upper"] = None
    return CatalogEntry(**entry)


def _archimedean_entry(gen, d):
    if isinstance(gen, ACIG):
        return dict(
            kappa_upper=max(1.0, min(gen.alpha, d)),
            kappa_lower=math.sqrt(d),
            moment_index=gen.alpha,
            note="ACIG: kappa_U = max(1, min(alpha, d)), kappa_L = sqrt(d)",
        )
    if isinstance(gen, Joe2000):
        return dict(
            kappa_upper=1.0 + gen.alpha,
            kappa_lower=float(d) ** gen.alpha,
            moment_index=1.0 + gen.alpha,
            note="Joe2000: kappa_U = 1 + alpha, kappa_L = d^alpha",
        )
    if isinstance(gen, GumbelGen):
        out = dict(
            kappa_lower=float(d) ** (1.0 / gen.theta),
            moment_index=math.inf if gen.theta == 1.0 else 1.0 / gen.theta,
            note="Gumbel: psi ~ exp(-s^(1/theta)) gives kappa_L = d^(1/theta)",
        )
        lam = cm.ev_upper_lambda(cm.Logistic(gen.theta, d))
        if lam > 1e-12:
            out.update(kappa_upper=1.0, lambda_upper=lam)
        else:
            out.update(kappa_upper=float(d))
        return out
    if isinstance(gen, WilliamsonGen):
        law = gen.law
        out = dict(note=f"scale mixture over {law!r}")
        a = law.lower_tail_index()
        if a is not None:
            out["kappa_upper"] = max(1.0, min(a, d))
        tail = law.upper_tail_class()
        if tail.tag is TailTag.GUMBEL_MDA:
            beta = law.aux_index()
            if beta is not None and 0 < beta < 1:
                out["kappa_lower"] = float(d) ** (1.0 - beta)
        elif tail.tag is TailTag.REGULARLY_VARYING:
            # psi inherits RV_{-alpha} at infinity, so C(u..u)/u -> d^-alpha
            out.update(kappa_lower=1.0, lambda_lower=float(d) ** tail.index)
        return out
    return dict(note=f"no closed form for {gen!r}")


# ----------------------------------------------------------------------------
# Estimators
# ----------------------------------------------------------------------------


def make_grid(lo, hi, n):
    if not (0 < lo < hi < 1) or n < 2:
        raise DomainError("grid needs 0 < lo < hi < 1 and at least 2 points")
    return np.geomspace(lo, hi, int(n))


def _resolve_grid(grid, method):
    if grid is None:
        grid = MC_GRID if method == "monte-carlo" else ANALYTIC_GRID
    if isinstance(grid, tuple) and len(grid) == 3:
        return make_grid(*grid)
    g = np.sort(np.asarray(grid, dtype=float))
    if g.ndim != 1 or np.any((g <= 0) | (g >= 1)):
        raise DomainError("grid points must lie in (0, 1)")
    return g


def _evaluate(diag, u):
    try:
        y = np.asarray(diag(u), dtype=float)
        if y.shape == u.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(diag(float(v))) for v in u])


def estimate_tail_order_diagonal(diag, side="lower", grid=None, *, d=None, method="analytic-diagonal"):
    """Slope of log diag(u) against log u over a log-spaced grid.

    ``diag`` maps u to C(u, ..., u) (lower) or to the survival diagonal
    (upper). ``grid`` is an array of u values or a ``(lo, hi, n)`` tuple;
    the default depends on ``method``. The reported kappa is the slope
    clamped to [1, d] (to [1, inf) when ``d`` is not given).
    """
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}")
    u = _resolve_grid(grid, method)
    y = _evaluate(diag, u)
    keep = y > 0
    if not np.all(keep):
        warnings.warn(
            f"{np.count_nonzero(~keep)} grid point(s) with zero diagonal dropped; consider a coarser grid or more samples",
            GridTruncationWarning,
            stacklevel=2,
        )
    if np.count_nonzero(keep) < MIN_POINTS:
        raise EstimationError(f"only {np.count_nonzero(keep)} usable grid points, need {MIN_POINTS}")
    fit = fit_loglog_slope(list(zip(u[keep], y[keep])))
    hi = math.inf if d is None else float(d)
    kappa = min(max(fit.slope, 1.0), hi)
    return TailOrderEstimate(
        kappa=kappa,
        stderr=fit.slope_se,
        side=side,
        method=method,
        grid=(float(u[0]), float(u[-1]), int(u.size)),
        raw_slope=fit.slope,
    )


def estimate_lambda(diag, grid=None):
    """Mean of diag(u) / u over the three smallest grid points with a nonzero diagonal."""
    u = _resolve_grid(grid, "analytic-diagonal")
    y = _evaluate(diag, u)
    nz = np.flatnonzero(y > 0)
    if nz.size == 0:
        raise EstimationError("diagonal vanishes on the whole grid")
    pick = nz[:3]
    return float(np.mean(y[pick] / u[pick]))


def mda_gumbel_tail_order(law, rho, d, r):
    """log S(b r) / log S(r) with b = sqrt(d / (1 + (d - 1) rho)).

    Finite-r version of the elliptical tail-order limit for radial laws in
    the Gumbel domain of attraction.
    """
    if law.upper_tail_class().tag is not TailTag.GUMBEL_MDA:
        raise DomainError(f"{law!r} is not in the Gumbel domain of attraction")
    if int(d) != d or d < 2:
        raise DomainError("d must be an integer >= 2")
    if not (-1.0 / (d - 1) < rho <= 1):
        raise DomainError(f"rho must lie in (-1/(d-1), 1] for an exchangeable correlation, got {rho!r}")
    if not r > 0:
        raise DomainError("r must be positive")
    b = math.sqrt(d / (1.0 + (d - 1) * rho))
    ls_r = float(law.log_survival(r))
    ls_br = float(law.log_survival(b * r))
    if not (math.isfinite(ls_r) and math.isfinite(ls_br)):
        raise EvaluationPointError(f"radial survival underflows at r={r!r}; use a smaller r")
    if max(ls_r, ls_br) > math.log(1e-4):
        raise DomainError(f"r={r!r} is not in the tail (survival above 1e-4); use a larger r")
    return ls_br / ls_r


def estimate_model_tail_order(model, side="lower", *, method="analytic-diagonal", grid=None, n=None, rng=None):
    """Diagonal-regression estimate for a copula model, analytic or Monte Carlo."""
    if method == "analytic-diagonal":
        fn = cm.diagonal if side == "lower" else cm.survival_diagonal

        def diag(u):
            return fn(model, u)

    elif method == "monte-carlo":
        from .sampling import empirical_copula_diagonal, sample_copula

        if n is None or rng is None:
            raise DomainError("Monte Carlo estimation needs n and rng")
        sample = sample_copula(model, rng, n)

        def diag(u):
            return empirical_copula_diagonal(sample, u, side)

    else:
        raise DomainError(f"method must be analytic-diagonal or monte-carlo, got {method!r}")
    est = estimate_tail_order_diagonal(diag, side, grid, d=model.d, method=method)
    return est
