import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tailorder.errors import DomainError
from tailorder.generators import (
    ACIG,
    GumbelGen,
    Joe2000,
    WilliamsonGen,
    frailty_to_radial,
    psi,
    psi_inverse,
    williamson_transform,
)
from tailorder.numerics import fit_loglog_slope, integrate
from tailorder.radial import (
    Dagum,
    ErlangOverFrailty,
    Gamma,
    InverseGamma,
    KotzRadial,
    KProduct,
    PointMass,
    PositiveWeibull,
)
from tailorder.rng import RngStream

mp.mp.dps = 30

GENERATORS = [
    ACIG(0.7),
    ACIG(2.0),
    ACIG(3.3),
    Joe2000(0.5),
    Joe2000(0.2),
    GumbelGen(1.0),
    GumbelGen(2.5),
    WilliamsonGen(Dagum(0.6, 1.8, 1.0), 2),
    WilliamsonGen(PositiveWeibull(1.5), 3),
    WilliamsonGen(PointMass(2.0), 2),
]


def acig_oracle(alpha, s):
    """E[exp(-s/X)] with X ~ Gamma(alpha, 1), by mpmath quadrature."""
    a = mp.mpf(alpha)
    f = lambda x: mp.exp(-s / x) * x ** (a - 1) * mp.exp(-x) / mp.gamma(a)  # noqa: E731
    return mp.quad(f, [0, mp.mpf(s) / 10 + mp.mpf("1e-3"), 1, a, 4 * a + 10, mp.inf])


# -- psi -------------------------------------------------------------------------------


@pytest.mark.parametrize("gen", GENERATORS, ids=repr)
def test_psi_at_zero_is_one(gen):
    assert psi(gen, 0.0) == 1.0
    assert gen.psi_bar(0.0) == 0.0


def test_acig_example():
    assert psi(ACIG(2.0), 1.0) == pytest.approx(float(acig_oracle(2.0, 1.0)), rel=1e-8)
    assert psi(ACIG(2.0), 1.0) == pytest.approx(2 * float(mp.besselk(2, 2)), rel=1e-13)
    assert psi(ACIG(2.0), 1.0) == pytest.approx(0.50752, abs=1e-5)


@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.5, 2.5, 6.0])
@pytest.mark.parametrize("s", [1e-4, 0.3, 2.0, 25.0])
def test_acig_against_laplace_transform(alpha, s):
    gen = ACIG(alpha)
    ref = acig_oracle(alpha, s)
    assert gen.psi(s) == pytest.approx(float(ref), rel=1e-9)
    assert gen.psi_bar(s) == pytest.approx(float(1 - ref), rel=1e-8)


def test_joe2000_example():
    assert psi(Joe2000(0.5), 1.0) == pytest.approx(2 * math.exp(-1.0), rel=1e-14)
    quad = integrate(lambda v: np.exp(-np.sqrt(v)), 1.0, math.inf) / 2.0
    assert psi(Joe2000(0.5), 1.0) == pytest.approx(quad, rel=1e-10)


@pytest.mark.parametrize("alpha", [0.1, 0.35, 0.5, 0.8])
@pytest.mark.parametrize("s", [1e-6, 0.05, 1.0, 7.0, 40.0])
def test_joe2000_identity_against_integral_form(alpha, s):
    # int_s^inf exp(-v^alpha) dv / Gamma(1 + 1/alpha), straight from the definition
    a = mp.mpf(alpha)
    ref = mp.quad(lambda v: mp.exp(-(v**a)), [s, s + 1, s + 100, mp.inf]) / mp.gamma(1 + 1 / a)
    assert Joe2000(alpha).psi(s) == pytest.approx(float(ref), rel=1e-10)
    bar = mp.quad(lambda v: mp.exp(-(v**a)), [0, s]) / mp.gamma(1 + 1 / a)
    assert Joe2000(alpha).psi_bar(s) == pytest.approx(float(bar), rel=1e-10)


def test_gumbel_psi():
    g = GumbelGen(2.0)
    assert g.psi(4.0) == pytest.approx(math.exp(-2.0), rel=1e-15)
    assert g.psi_bar(1e-20) == pytest.approx(1e-10, rel=1e-12)


def test_joe_is_rescaled_acig():
    # psi_ACIG(1.5)(s) = psi_Joe2000(0.5)(4 s)
    s = np.geomspace(1e-5, 30, 15)
    assert np.allclose(ACIG(1.5).psi(s), Joe2000(0.5).psi(4 * s), rtol=1e-12, atol=0)


@pytest.mark.parametrize("gen", GENERATORS, ids=repr)
def test_psi_bar_and_log_psi_consistency(gen):
    s = gen.hint * np.geomspace(1e-3, 20, 12)
    p = gen.psi(s)
    assert np.allclose(p + gen.psi_bar(s), 1.0, atol=1e-12)
    pos = p > 1e-300
    assert np.allclose(gen.log_psi(s)[pos], np.log(p[pos]), rtol=1e-10, atol=1e-13)


def test_log_psi_far_tail():
    g = Joe2000(0.5)
    assert g.log_psi(1e6) == pytest.approx(float(mp.log(mp.gammainc(2, 1000, mp.inf, regularized=True))), rel=1e-12)
    a = ACIG(2.0)
    ref = mp.log(2 * 1e4 * mp.besselk(2, 2 * mp.sqrt(1e4)))
    assert a.log_psi(1e4) == pytest.approx(float(ref), rel=1e-12)


def test_psi_bar_small_s_no_cancellation():
    for gen in (ACIG(2.5), Joe2000(0.5), WilliamsonGen(Dagum(0.6, 1.8, 1.0), 2)):
        v = gen.psi_bar(1e-12)
        assert 0 < v < 1e-9


@pytest.mark.parametrize("gen", [ACIG(2.0), Joe2000(0.5), GumbelGen(2.0)], ids=repr)
def test_negative_s_rejected(gen):
    with pytest.raises(DomainError):
        gen.psi(-1.0)


def test_family_parameter_validation():
    for bad in (lambda: Joe2000(1.0), lambda: GumbelGen(0.9), lambda: WilliamsonGen(Gamma(1.0), 1)):
        with pytest.raises(DomainError):
            bad()


# -- inversion ----------------------------------------------------------------------------


def test_inverse_examples():
    for gen in GENERATORS:
        assert psi_inverse(gen, 1.0) == 0.0
    assert psi_inverse(GumbelGen(2.0), math.exp(-1)) == pytest.approx(1.0, rel=1e-15)
    s = psi_inverse(ACIG(2.0), 0.5)
    assert abs(ACIG(2.0).psi(s) - 0.5) <= 1e-9
    assert psi_inverse(ACIG(2.0), 0.0) == math.inf


@pytest.mark.parametrize("bad", [-0.1, 1.5])
def test_inverse_domain(bad):
    with pytest.raises(DomainError):
        psi_inverse(ACIG(2.0), bad)


U_GRID = np.concatenate([[1e-6, 1e-4, 1e-2], np.linspace(0.05, 0.95, 7), [1 - 1e-2, 1 - 1e-4, 1 - 1e-6]])


@pytest.mark.parametrize("gen", GENERATORS[:-1], ids=repr)
def test_round_trip(gen):
    s = gen.psi_inverse(U_GRID)
    assert np.max(np.abs(gen.psi(s) - U_GRID)) <= 1e-9


@pytest.mark.parametrize("gen", [ACIG(2.0), Joe2000(0.5), WilliamsonGen(Dagum(0.6, 1.8, 1.0), 2)], ids=repr)
def test_psi_bar_inverse_relative(gen):
    for v in (1e-12, 1e-8, 1e-3):
        s = gen.psi_bar_inverse(v)
        assert gen.psi_bar(s) == pytest.approx(v, rel=1e-9)


def test_point_mass_generator_round_trip():
    gen = WilliamsonGen(PointMass(2.0), 2)
    u = np.linspace(0.05, 0.95, 7)
    assert np.allclose(gen.psi(gen.psi_inverse(u)), u, atol=1e-9)


# -- Williamson transform ---------------------------------------------------------------------


def test_williamson_examples():
    assert williamson_transform(Dagum(0.6, 1.8, 1.0), 2, 0.0) == 1.0
    assert williamson_transform(PointMass(2.0), 2, 1.0) == pytest.approx(0.5, abs=1e-12)
    for s in (0.5, 1.0, 2.0):
        assert williamson_transform(KProduct(2, 1.5), 2, s) == pytest.approx(ACIG(1.5).psi(s), abs=1e-6)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("alpha", [1.5, 2.5])
def test_cross_construction(d, alpha):
    s = np.geomspace(1e-3, 1e2, 20)
    w = WilliamsonGen(KProduct(d, alpha), d).psi(s)
    assert np.max(np.abs(w - ACIG(alpha).psi(s))) <= 1e-6


@pytest.mark.parametrize("law,d", [(Gamma(2.0), 2), (PositiveWeibull(1.5), 3), (KotzRadial(1, 1, 1), 4)])
@pytest.mark.parametrize("s", [0.1, 1.0, 3.0])
def test_williamson_against_mpmath(law, d, s):
    # int_s^inf (1 - s/r)^(d-1) f(r) dr from the density
    f = lambda r: (1 - s / r) ** (d - 1) * law.pdf(float(r))  # noqa: E731
    ref = mp.quad(f, [s, s + 1, s + 5, s + 40])
    assert WilliamsonGen(law, d).psi(s) == pytest.approx(float(ref), rel=1e-8, abs=1e-14)


def test_williamson_rejects_atom_at_zero():
    with pytest.raises(DomainError):
        williamson_transform(Gamma(1.0), 1, 1.0)


@pytest.mark.parametrize("law", [Dagum(0.6, 1.8, 1.0), PositiveWeibull(1.5)], ids=repr)
def test_one_minus_psi_is_rv1(law):
    gen = WilliamsonGen(law, 2)
    s = np.geomspace(1e-6, 1e-3, 20)
    slope = fit_loglog_slope(list(zip(s, gen.psi_bar(s)))).slope
    # the Dagum case converges slowly (second-order term s^(alpha*beta - 1))
    tol = 0.02 if isinstance(law, PositiveWeibull) else 0.08
    assert slope == pytest.approx(1.0, abs=tol)


def test_dagum_rv1_tightens_deeper():
    gen = WilliamsonGen(Dagum(0.6, 1.8, 1.0), 2)
    slopes = []
    for lo, hi in [(1e-6, 1e-3), (1e-10, 1e-7), (1e-14, 1e-11)]:
        s = np.geomspace(lo, hi, 10)
        slopes.append(fit_loglog_slope(list(zip(s, gen.psi_bar(s)))).slope)
    assert slopes[0] < slopes[1] < slopes[2] < 1.0
    assert slopes[2] == pytest.approx(1.0, abs=0.02)


# -- monotonicity ------------------------------------------------------------------------------


@pytest.mark.parametrize("gen", GENERATORS, ids=repr)
def test_psi_nonincreasing(gen):
    rng = np.random.default_rng(4)
    pairs = np.sort(gen.hint * np.exp(rng.uniform(-8, 4, size=(1000, 2))), axis=1)
    if isinstance(gen, WilliamsonGen):
        pairs = pairs[:150]  # quadrature per point
    p = gen.psi(pairs)
    assert np.all(p[:, 0] >= p[:, 1])


def test_d_monotone_spot_check():
    assert ACIG(2.0).d_monotone_violation(5) == 0.0
    assert WilliamsonGen(Dagum(0.6, 1.8, 1.0), 3).d_monotone_violation(3) >= -1e-12
    # a 2-monotone generator is not 3-monotone
    assert WilliamsonGen(PointMass(1.0), 2).d_monotone_violation(3) < 0


@given(st.floats(0.2, 8.0), st.floats(1e-6, 1e3), st.floats(1e-6, 1e3))
@settings(max_examples=200, deadline=None)
def test_acig_monotone_random(alpha, s1, s2):
    lo, hi = min(s1, s2), max(s1, s2)
    g = ACIG(alpha)
    assert g.psi(lo) >= g.psi(hi)


# -- frailty bridge ----------------------------------------------------------------------------


def test_frailty_to_radial_examples():
    assert frailty_to_radial(2, InverseGamma(1.5)) == KProduct(2, 1.5)
    assert frailty_to_radial(3, InverseGamma(2.5)) == KProduct(3, 2.5)
    law = frailty_to_radial(2, PointMass(1.0))
    assert isinstance(law, ErlangOverFrailty)
    x = law.sample(RngStream(8), 10**5)
    assert abs(x.mean() - 2.0) <= 4 * x.std(ddof=1) / math.sqrt(x.size)


def test_frailty_to_radial_domain():
    with pytest.raises(DomainError):
        frailty_to_radial(1, InverseGamma(2.0))
