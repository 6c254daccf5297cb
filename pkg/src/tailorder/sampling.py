"""Seeded samplers for the stochastic representations, and empirical copula counts.

Scale-mixture model: X = R * S with S uniform on the simplex, so that
P(X_j > x) = psi(x) with psi the Williamson d-transform of R. The vector
U = psi(X) then has the Archimedean copula with generator psi. Note the
orientation: small X gives U near one.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import ndtri
from scipy.stats import rankdata

from .errors import DomainError, UnsupportedOperationError
from .generators import ACIG, Generator, Joe2000, WilliamsonGen
from .radial import Dagum, KotzRadial, KProduct, PointMass, RadialLaw
from .rng import RngStream, as_generator

MARGINS = ("uniform", "normal-scores", "raw")
TABLE_SIZE = 4096
TABLE_TAIL = 1e-7


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """n x d draws plus a tag saying what the margins are."""

    values: np.ndarray
    margin: str = "raw"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 2:
            raise DomainError(f"sample matrix must be n x d with n >= 1, d >= 2; got shape {v.shape}")
        if self.margin not in MARGINS:
            raise DomainError(f"unknown margin tag {self.margin!r}")
        if self.margin == "uniform" and np.any((v < 0) | (v > 1)):
            raise DomainError("uniform-tagged samples must lie in [0, 1]")
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]

    def __len__(self):
        return self.n


def _check_d(d):
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


def sample_simplex(rng, d, n):
    """Rows uniform on {x >= 0 : sum x = 1}, as normalized unit exponentials."""
    d, n = _check_d(d), _check_n(n)
    e = as_generator(rng).exponential(size=(n, d))
    s = e / e.sum(axis=1, keepdims=True)
    return SampleMatrix(s, "raw")


def sample_sphere(rng, d, n):
    """Rows uniform on the unit sphere in R^d."""
    d, n = _check_d(d), _check_n(n)
    z = as_generator(rng).standard_normal(size=(n, d))
    return SampleMatrix(z / np.linalg.norm(z, axis=1, keepdims=True), "raw")


# ----------------------------------------------------------------------------
# Archimedean samplers
# ----------------------------------------------------------------------------


class _PsiTable:
    """Monotone interpolant of psi over a log grid, with quadrature outside it.

    Interpolates log(1 - psi) where psi > 1/2 and log(psi) elsewhere, so
    both ends keep relative accuracy.
    """

    def __init__(self, gen, lo, hi, size=TABLE_SIZE):
        self.gen = gen
        self.lo, self.hi = lo, hi
        x = np.geomspace(lo, hi, size)
        lx = np.log(x)
        psi = np.asarray(gen.psi(x), dtype=float)
        upper = psi > 0.5
        self.split = float(lx[np.argmin(upper)]) if np.any(~upper) else float(lx[-1])
        self._bar = None
        self._low = None
        with np.errstate(divide="ignore"):
            if np.count_nonzero(upper) >= 2:
                k = np.flatnonzero(upper)
                k = np.append(k, k[-1] + 1) if k[-1] + 1 < size else k
                pb = np.asarray(gen.psi_bar(x[k]), dtype=float)
                ok = pb > 0
                self._bar = PchipInterpolator(lx[k][ok], np.log(pb[ok]), extrapolate=False)
            if np.count_nonzero(~upper) >= 2:
                k = np.flatnonzero(~upper)
                k = np.insert(k, 0, k[0] - 1) if k[0] > 0 else k
                ok = psi[k] > 0
                self._low = PchipInterpolator(lx[k][ok], np.log(psi[k][ok]), extrapolate=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        with np.errstate(divide="ignore"):
            lx = np.log(x)
        inside = (x >= self.lo) & (x <= self.hi)
        near = inside & (lx < self.split)
        far = inside & ~near
        if self._bar is not None and np.any(near):
            out[near] = -np.expm1(self._bar(lx[near]))
        elif np.any(near):
            out[near] = self.gen.psi(x[near])
        if self._low is not None and np.any(far):
            out[far] = np.exp(self._low(lx[far]))
        elif np.any(far):
            out[far] = self.gen.psi(x[far])
        outside = ~inside
        if np.any(outside):
            out[outside] = self.gen.psi(x[outside])
        # guard interpolation noise at the joins
        return np.clip(np.nan_to_num(out, nan=0.0), 0.0, 1.0)


def joe2000_radial(alpha):
    """Radial law whose Williamson 2-transform is the Joe2000(alpha) generator.

    -psi'(s) is proportional to exp(-s^alpha), so R^alpha ~ Gamma(1 + 1/alpha).
    """
    return KotzRadial(0.5 * (alpha + 1.0), 1.0, 0.5 * alpha)


@lru_cache(maxsize=32)
def _psi_evaluator(law, d):
    """Fast psi for the Williamson d-transform of ``law``."""
    if isinstance(law, PointMass):
        r0 = law.r0
        return lambda x: np.clip(1.0 - np.asarray(x) / r0, 0.0, None) ** (d - 1)
    if isinstance(law, KProduct) and law.d == d:
        gen = ACIG(law.alpha)
        return gen.psi
    if isinstance(law, KotzRadial) and d == 2 and law.beta == 1.0 and law.xi < 0.5 and law == joe2000_radial(2.0 * law.xi):
        return Joe2000(2.0 * law.xi).psi
    gen = WilliamsonGen(law, d)
    lo, hi = law.quantile(np.array([TABLE_TAIL, 1.0 - TABLE_TAIL]))
    return _PsiTable(gen, float(lo), float(hi))


def sample_archimedean_scale_mixture(law, d, rng, n):
    """U = psi(R * S) with S uniform on the simplex and psi the Williamson d-transform of R."""
    d, n = _check_d(d), _check_n(n)
    if not isinstance(law, RadialLaw):
        raise DomainError("law must be a RadialLaw")
    try:
        atom = float(law.cdf(0.0))
    except UnsupportedOperationError:
        atom = 0.0
    if atom > 0:
        raise DomainError("radial law has an atom at zero")
    g = as_generator(rng)
    r = law.sample(g, n)
    s = sample_simplex(g, d, n).values
    x = r[:, None] * s
    psi = _psi_evaluator(law, d)
    u = np.asarray(psi(x.ravel()), dtype=float).reshape(x.shape)
    return SampleMatrix(u, "uniform")


def sample_archimedean_frailty(H, psi_of_H, d, rng, n):
    """Given H = h, U_j = psi(E_j / h) with E_j i.i.d. unit exponentials.

    ``psi_of_H`` must be the Laplace transform of ``H``; a mismatched pair
    is not detected.
    """
    d, n = _check_d(d), _check_n(n)
    if not isinstance(psi_of_H, Generator):
        raise DomainError("psi_of_H must be a Generator")
    g = as_generator(rng)
    h = np.asarray(H.sample(g, n), dtype=float)
    e = g.exponential(size=(n, d))
    x = e / h[:, None]
    u = np.asarray(psi_of_H.psi(x.ravel()), dtype=float).reshape(x.shape)
    return SampleMatrix(np.clip(u, 0.0, 1.0), "uniform")


def sample_elliptical(rho, law, rng, n):
    """Bivariate R * A * U with U uniform on the circle and A = [[1, 0], [rho, sqrt(1 - rho^2)]]."""
    if not -1 < rho < 1:
        raise DomainError(f"correlation must lie in (-1, 1), got {rho!r}")
    n = _check_n(n)
    g = as_generator(rng)
    r = np.asarray(law.sample(g, n), dtype=float)
    w = sample_sphere(g, 2, n).values
    z1 = w[:, 0]
    z2 = rho * w[:, 0] + math.sqrt(1.0 - rho * rho) * w[:, 1]
    return SampleMatrix(r[:, None] * np.column_stack([z1, z2]), "raw")


def sample_copula(model, rng, n):
    """Uniform-margin draws from a copula model by its natural representation."""
    from . import copulas as cm
    from .radial import KotzRadial, StudentTRadial

    n = _check_n(n)
    if isinstance(model, cm.Independence):
        return SampleMatrix(as_generator(rng).random((n, model.d)), "uniform")
    if isinstance(model, cm.Comonotone):
        u = as_generator(rng).random(n)
        return SampleMatrix(np.repeat(u[:, None], model.d, axis=1), "uniform")
    if isinstance(model, cm.Archimedean):
        gen = model.gen
        if isinstance(gen, WilliamsonGen):
            return sample_archimedean_scale_mixture(gen.law, model.d, rng, n)
        if hasattr(gen, "frailty_law"):
            return sample_archimedean_frailty(gen.frailty_law(), gen, model.d, rng, n)
        if isinstance(gen, Joe2000) and model.d == 2:
            return sample_archimedean_scale_mixture(joe2000_radial(gen.alpha), 2, rng, n)
        raise UnsupportedOperationError(f"no sampler for generator {gen!r}")
    if isinstance(model, cm.GaussianBiv):
        return rank_transform(sample_elliptical(model.rho, KotzRadial(1.0, 0.5, 1.0), rng, n))
    if isinstance(model, cm.StudentBiv):
        return rank_transform(sample_elliptical(model.rho, StudentTRadial(model.nu), rng, n))
    if isinstance(model, cm.KotzBiv):
        return rank_transform(sample_elliptical(model.rho, model.radial_law(), rng, n))
    raise UnsupportedOperationError(f"no sampler for {model!r}")


# ----------------------------------------------------------------------------
# Empirical copula
# ----------------------------------------------------------------------------


def rank_transform(samples):
    """Pseudo-observations rank / (n + 1), column by column."""
    v = samples.values if isinstance(samples, SampleMatrix) else np.asarray(samples, dtype=float)
    u = rankdata(v, axis=0, method="average") / (v.shape[0] + 1.0)
    return SampleMatrix(u, "uniform")


def _as_uniform(samples):
    if not isinstance(samples, SampleMatrix):
        samples = SampleMatrix(np.asarray(samples, dtype=float), "uniform")
    if samples.margin != "uniform":
        samples = rank_transform(samples)
    return samples.values


def empirical_copula_diagonal(samples, u, side="lower"):
    """Share of rows with every coordinate <= u (lower) or > 1 - u (upper)."""
    arr = np.asarray(u, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DomainError("u must lie in (0, 1)")
    v = _as_uniform(samples)
    n = v.shape[0]
    flat = np.atleast_1d(arr).ravel()
    if side == "lower":
        key = np.sort(v.max(axis=1))
        counts = np.searchsorted(key, flat, side="right")
    elif side == "upper":
        key = np.sort(v.min(axis=1))
        counts = n - np.searchsorted(key, 1.0 - flat, side="right")
    else:
        raise DomainError(f"side must be 'lower' or 'upper', got {side!r}")
    out = counts / n
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def empirical_copula(samples, point):
    """Share of rows with U <= point componentwise."""
    v = _as_uniform(samples)
    p = np.asarray(point, dtype=float)
    if p.shape != (v.shape[1],):
        raise DomainError("point dimension does not match the samples")
    return float(np.mean(np.all(v <= p, axis=1)))


FIGURE1_N = 2000


def figure1_samples(seed, law=None, n=FIGURE1_N):
    """Dagum(0.6, 1.8, 1) simplex mixture in d = 2: (uniform margins, normal scores)."""
    law = law or Dagum(0.6, 1.8, 1.0)
    u = sample_archimedean_scale_mixture(law, 2, RngStream(int(seed), 0), n).values
    # psi(x) rounds to 1.0 for x below about 1e-16 * scale; keep the scores finite
    z = ndtri(np.clip(u, np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg))
    return u, z
