"""Acceptance checks, runnable as a suite (``quick`` or ``full``).

Targets are fixed constants. Fixtures only set the model parameters fed to
each check, so overriding one (say, an ACIG alpha) is a negative control:
the model drifts away from the target and the check must fail.
"""

from dataclasses import dataclass, field, fields, replace
import math
import time

import numpy as np
from scipy import stats

from . import copulas as cm
from .generators import ACIG, GumbelGen, Joe2000, WilliamsonGen, williamson_transform
from .radial import Dagum, InverseGamma, KProduct, KotzRadial, PointMass, PositiveStable, PositiveWeibull
from .rng import RngStream
from .sampling import (
    empirical_copula,
    empirical_copula_diagonal,
    figure1_samples,
    sample_archimedean_frailty,
    sample_archimedean_scale_mixture,
    sample_simplex,
    sample_sphere,
)
from .tailmetrics import estimate_lambda, estimate_tail_order_diagonal, make_grid, mda_gumbel_tail_order
from .numerics import fit_loglog_slope

SUITES = {"quick": 10**5, "full": 10**6}
KS_ALPHA01 = 1.63
FIGURE1_KS = 0.0365
RV1_GRID = (1e-6, 1e-3, 20)
# diagnostic only: the Dagum second-order term decays like s^(alpha beta - 1)
RV1_DEEP_GRID = (1e-14, 1e-10, 10)


@dataclass(frozen=True)
class Fixtures:
    gaussian_rhos: tuple = (0.0, 0.3, 0.5, 0.7)
    kotz_xis: tuple = (0.5, 1.0, 2.0)
    ev_pairs: tuple = ((1.0, 2), (2.0, 2), (2.0, 3))
    acig_cross: tuple = ((2, 1.5), (3, 2.5))
    acig_alphas: tuple = (1.5, 2.5)
    weibull_alpha: float = 1.5
    dagum: tuple = (0.6, 1.8)
    joe_alpha: float = 0.5
    gumbel_theta: float = 2.0

    @classmethod
    def with_overrides(cls, overrides):
        names = {f.name for f in fields(cls)}
        clean = {}
        for key, value in (overrides or {}).items():
            if key not in names:
                raise KeyError(f"unknown fixture {key!r}; known: {', '.join(sorted(names))}")
            clean[key] = tuple(tuple(v) if isinstance(v, list) else v for v in value) if isinstance(value, list) else value
        return replace(cls(), **clean)


NOMINAL = Fixtures()


@dataclass
class CriterionResult:
    cid: int
    name: str
    target: object
    observed: object
    tolerance: object
    passed: bool
    details: dict = field(default_factory=dict)
    duration: float = 0.0

    def as_dict(self):
        return {
            "id": self.cid,
            "name": self.name,
            "target": self.target,
            "observed": self.observed,
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
            "details": self.details,
            "duration_s": self.duration,
        }


def _slope(u, y):
    return fit_loglog_slope(list(zip(u, y))).slope


def _ks_uniform(x):
    return float(stats.kstest(x, "uniform").statistic)


# -- individual criteria -------------------------------------------------------


def c1_gaussian(fx, seed, n):
    grid = make_grid(1e-6, 1e-3, 20)
    obs, ok = [], True
    for rho_nom, rho in zip(NOMINAL.gaussian_rhos, fx.gaussian_rhos):
        m = cm.GaussianBiv(rho)
        k = estimate_tail_order_diagonal(lambda u: cm.diagonal(m, u), "lower", grid, d=2).raw_slope
        obs.append(k)
        ok &= abs(k - 2.0 / (1.0 + rho_nom)) <= 0.1
    return "Gaussian lower tail order 2/(1+rho)", [2.0 / (1.0 + r) for r in NOMINAL.gaussian_rhos], obs, 0.1, ok, {}


def c2_kotz(fx, seed, n):
    obs, ok = [], True
    for xi_nom, xi in zip(NOMINAL.kotz_xis, fx.kotz_xis):
        k = mda_gumbel_tail_order(KotzRadial(1.0, 1.0, xi), 0.5, 2, 50.0)
        obs.append(k)
        ok &= abs(k - (4.0 / 3.0) ** xi_nom) <= 0.01
    return "Kotz Gumbel-MDA ratio at r=50", [(4.0 / 3.0) ** x for x in NOMINAL.kotz_xis], obs, 0.01, ok, {}


def c3_ev(fx, seed, n):
    grid = make_grid(1e-6, 1e-3, 20)
    exact, reg, ok = [], [], True
    for (th_nom, d_nom), (th, d) in zip(NOMINAL.ev_pairs, fx.ev_pairs):
        A = cm.Logistic(th, int(d))
        target = float(d_nom) ** (1.0 / th_nom)
        k = cm.ev_lower_tail_order(A)
        m = cm.ExtremeValue(A)
        s = _slope(grid, cm.diagonal(m, grid))
        exact.append(k)
        reg.append(s)
        ok &= abs(k - target) <= 1e-12 and abs(s - target) <= 1e-8
    targets = [float(d) ** (1.0 / t) for t, d in NOMINAL.ev_pairs]
    return "EV lower tail order A(1,...,1)", targets, {"exact": exact, "regression": reg}, [1e-12, 1e-8], ok, {}


def c4_acig_cross(fx, seed, n):
    s = np.geomspace(1e-3, 1e2, 20)
    obs, ok = [], True
    for (d_nom, a_nom), (d, a) in zip(NOMINAL.acig_cross, fx.acig_cross):
        w = williamson_transform(KProduct(int(d), a), int(d), s)
        err = float(np.max(np.abs(w - ACIG(a_nom).psi(s))))
        obs.append(err)
        ok &= err <= 1e-6
    return "Williamson transform of K-product equals ACIG", 0.0, obs, 1e-6, ok, {}


def c5_acig_orders(fx, seed, n):
    grid = make_grid(1e-6, 1e-3, 20)
    up, lo, ok = [], [], True
    for a_nom, a in zip(NOMINAL.acig_alphas, fx.acig_alphas):
        m = cm.Archimedean(2, ACIG(a))
        ku = _slope(grid, cm.survival_diagonal(m, grid))
        kl = _slope(grid, cm.diagonal(m, grid))
        up.append(ku)
        lo.append(kl)
        ok &= abs(ku - min(a_nom, 2.0)) <= 0.1 and abs(kl - math.sqrt(2.0)) <= 0.1
    targets = {"upper": [min(a, 2.0) for a in NOMINAL.acig_alphas], "lower": math.sqrt(2.0)}
    return "ACIG upper and lower tail orders", targets, {"upper": up, "lower": lo}, 0.1, ok, {}


def c6_weibull(fx, seed, n):
    u = make_grid(5e-3, 5e-2, 10)
    sample = sample_archimedean_scale_mixture(PositiveWeibull(fx.weibull_alpha), 2, RngStream(seed, 6), n)
    k = estimate_tail_order_diagonal(
        lambda v: empirical_copula_diagonal(sample, v, "upper"), "upper", u, d=2, method="monte-carlo"
    ).raw_slope
    target = NOMINAL.weibull_alpha
    return "Positive-Weibull scale mixture upper order (MC)", target, k, 0.2, abs(k - target) <= 0.2, {"n": n}


def c7_dagum(fx, seed, n):
    a, b = fx.dagum
    a_nom, b_nom = NOMINAL.dagum
    sample = sample_archimedean_scale_mixture(Dagum(a, b, 1.0), 2, RngStream(seed, 7), n)
    u_lo = make_grid(5e-3, 5e-2, 10)
    lam = estimate_lambda(lambda v: empirical_copula_diagonal(sample, v, "lower"), u_lo)
    u_up = make_grid(5e-3, 5e-2, 10)
    ku = estimate_tail_order_diagonal(
        lambda v: empirical_copula_diagonal(sample, v, "upper"), "upper", u_up, d=2, method="monte-carlo"
    ).raw_slope
    ok = abs(lam - 2.0 ** (-a_nom)) <= 0.05 and abs(ku - a_nom * b_nom) <= 0.2
    return (
        "Dagum scale mixture: lambda_L and upper order (MC)",
        {"lambda_lower": 2.0 ** (-a_nom), "kappa_upper": a_nom * b_nom},
        {"lambda_lower": lam, "kappa_upper": ku},
        {"lambda_lower": 0.05, "kappa_upper": 0.2},
        ok,
        {"n": n},
    )


def c8_figure1(fx, seed, n):
    a, b = fx.dagum
    u1, z1 = figure1_samples(seed, law=Dagum(a, b, 1.0))
    u2, z2 = figure1_samples(seed, law=Dagum(a, b, 1.0))
    ks = [_ks_uniform(u1[:, j]) for j in range(2)]
    same = bool(np.array_equal(u1, u2) and np.array_equal(z1, z2))
    shape_ok = u1.shape == (2000, 2) and z1.shape == (2000, 2)
    ok = shape_ok and same and max(ks) <= FIGURE1_KS
    return "Dagum-simplex scatter: 2000x2, uniform margins, deterministic", FIGURE1_KS, {"ks": ks, "deterministic": same}, FIGURE1_KS, ok, {}


def c9_joe(fx, seed, n):
    grid = make_grid(1e-6, 1e-3, 20)
    m = cm.Archimedean(2, Joe2000(fx.joe_alpha))
    ku = _slope(grid, cm.survival_diagonal(m, grid))
    kl = _slope(grid, cm.diagonal(m, grid))
    a = NOMINAL.joe_alpha
    ok = abs(ku - (1.0 + a)) <= 0.05 and abs(kl - 2.0**a) <= 0.05
    return "Joe2000 upper and lower tail orders", {"upper": 1.0 + a, "lower": 2.0**a}, {"upper": ku, "lower": kl}, 0.05, ok, {}


def _frailty_vs_mixture(fx, seed, n):
    a = fx.acig_alphas[0]
    fr = sample_archimedean_frailty(InverseGamma(a), ACIG(a), 2, RngStream(seed, 101), n)
    mx = sample_archimedean_scale_mixture(KProduct(2, a), 2, RngStream(seed, 102), n)
    worst = 0.0
    for p in (0.2, 0.5, 0.8):
        for q in (0.2, 0.5, 0.8):
            c1, c2 = empirical_copula(fr, [p, q]), empirical_copula(mx, [p, q])
            se = math.sqrt((c1 * (1 - c1) + c2 * (1 - c2)) / n)
            worst = max(worst, abs(c1 - c2) / se)
    return worst


def c10_samplers(fx, seed, n):
    ks_bound = KS_ALPHA01 / math.sqrt(n)
    checks = {}
    s2 = sample_simplex(RngStream(seed, 11), 2, n).values
    s3 = sample_simplex(RngStream(seed, 12), 3, n).values
    checks["simplex_row_sum"] = float(np.max(np.abs(s3.sum(axis=1) - 1.0)))
    checks["simplex_d2_margin_ks"] = _ks_uniform(s2[:, 0])
    checks["kumaraswamy_ks"] = max(
        float(stats.kstest(s3[:, j], lambda x: 1.0 - (1.0 - np.clip(x, 0, 1)) ** 2).statistic) for j in range(3)
    )
    sph = sample_sphere(RngStream(seed, 13), 3, n).values
    checks["sphere_row_norm"] = float(np.max(np.abs(np.linalg.norm(sph, axis=1) - 1.0)))
    margin_ks = {}
    samplers = {
        "mixture_dagum": lambda: sample_archimedean_scale_mixture(Dagum(*fx.dagum, 1.0), 2, RngStream(seed, 14), n),
        "mixture_weibull": lambda: sample_archimedean_scale_mixture(PositiveWeibull(fx.weibull_alpha), 2, RngStream(seed, 15), n),
        "mixture_kproduct": lambda: sample_archimedean_scale_mixture(KProduct(2, fx.acig_alphas[0]), 2, RngStream(seed, 16), n),
        "frailty_gumbel": lambda: sample_archimedean_frailty(
            PositiveStable(1.0 / fx.gumbel_theta), GumbelGen(fx.gumbel_theta), 2, RngStream(seed, 17), n
        ),
        "frailty_acig": lambda: sample_archimedean_frailty(InverseGamma(fx.acig_alphas[0]), ACIG(fx.acig_alphas[0]), 2, RngStream(seed, 18), n),
        "frailty_independence": lambda: sample_archimedean_frailty(PointMass(1.0), GumbelGen(1.0), 2, RngStream(seed, 19), n),
    }
    for name, make in samplers.items():
        v = make().values
        margin_ks[name] = max(_ks_uniform(v[:, j]) for j in range(v.shape[1]))
    checks["margin_ks"] = margin_ks
    checks["frailty_vs_mixture_max_z"] = _frailty_vs_mixture(fx, seed, n)
    ok = (
        checks["simplex_row_sum"] <= 1e-12
        and checks["sphere_row_norm"] <= 1e-12
        and checks["simplex_d2_margin_ks"] <= ks_bound
        and checks["kumaraswamy_ks"] <= ks_bound
        and max(margin_ks.values()) <= ks_bound
        and checks["frailty_vs_mixture_max_z"] <= 4.0
    )
    tol = {"ks": ks_bound, "row": 1e-12, "agreement_z": 4.0}
    return "Sampler invariants", "pass", checks, tol, ok, {"n": n}


def c11_generators(fx, seed, n):
    us = np.array([1e-8, 1e-6, 1e-3, 0.1, 0.3, 0.5, 0.7, 0.9, 1 - 1e-3, 1 - 1e-6])
    gens = [
        ACIG(fx.acig_alphas[0]),
        ACIG(fx.acig_alphas[1]),
        Joe2000(fx.joe_alpha),
        GumbelGen(fx.gumbel_theta),
        WilliamsonGen(Dagum(*fx.dagum, 1.0), 2),
        WilliamsonGen(PositiveWeibull(fx.weibull_alpha), 2),
    ]
    rt = max(float(np.max(np.abs(g.psi(g.psi_inverse(us)) - us))) for g in gens)
    s = np.geomspace(*RV1_GRID)
    deep = np.geomspace(*RV1_DEEP_GRID)
    slopes, deep_slopes = {}, {}
    for g in gens[4:]:
        slopes[repr(g.law)] = _slope(s, g.psi_bar(s))
        deep_slopes[repr(g.law)] = _slope(deep, g.psi_bar(deep))
    ok = rt <= 1e-9 and all(abs(v - 1.0) <= 0.02 for v in slopes.values())
    return "Generator round trip and 1-psi in RV_1(0+)", {"round_trip": 0.0, "slope": 1.0}, {"round_trip": rt, "slopes": slopes}, {"round_trip": 1e-9, "slope": 0.02}, ok, {"slope_grid": list(RV1_GRID), "deep_grid_slopes": deep_slopes}


def c12_ordering(fx, seed, n):
    u = 1e-4
    vals = [
        cm.diagonal(cm.Comonotone(2), u),
        cm.diagonal(cm.Archimedean(2, GumbelGen(fx.gumbel_theta)), u),
        cm.diagonal(cm.Independence(2), u),
    ]
    ok = vals[0] > vals[1] > vals[2]
    return "Diagonal ordering comonotone > Gumbel(2) > independence", "strictly decreasing", vals, None, ok, {}


CRITERIA = [
    c1_gaussian,
    c2_kotz,
    c3_ev,
    c4_acig_cross,
    c5_acig_orders,
    c6_weibull,
    c7_dagum,
    c8_figure1,
    c9_joe,
    c10_samplers,
    c11_generators,
    c12_ordering,
]


def _n_for(cid, suite):
    """Sample size for Monte Carlo criteria: sampler checks always use 1e5."""
    if cid == 10:
        return 10**5
    return SUITES[suite]


def run_criterion(cid, suite="full", seed=1, fixtures=None):
    fx = fixtures or NOMINAL
    fn = CRITERIA[cid - 1]
    t0 = time.perf_counter()
    name, target, observed, tol, ok, details = fn(fx, seed, _n_for(cid, suite))
    return CriterionResult(cid, name, target, observed, tol, bool(ok), details, time.perf_counter() - t0)


def run_suite(suite="quick", seed=1, fixtures=None, only=None):
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}")
    ids = only or range(1, len(CRITERIA) + 1)
    return [run_criterion(i, suite, seed, fixtures) for i in ids]
