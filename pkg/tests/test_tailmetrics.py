import math
import warnings

import numpy as np
import pytest

from tailorder.copulas import (
    Archimedean,
    Comonotone,
    ExtremeValue,
    GaussianBiv,
    Independence,
    KotzBiv,
    Logistic,
    MaxA,
    StudentBiv,
    SumA,
    diagonal,
    gumbel_copula,
    survival_diagonal,
)
from tailorder.errors import DomainError, EstimationError, EvaluationPointError
from tailorder.generators import ACIG, Joe2000, WilliamsonGen
from tailorder.radial import Dagum, Gamma, GenInvGammaT, KotzRadial, PositiveWeibull, RadialLaw
from tailorder.rng import RngStream
from tailorder.tailmetrics import (
    ANALYTIC_GRID,
    MC_GRID,
    CatalogEntry,
    GridTruncationWarning,
    TailOrderEstimate,
    derived_measures,
    estimate_lambda,
    estimate_model_tail_order,
    estimate_tail_order_diagonal,
    make_grid,
    mda_gumbel_tail_order,
    tail_order_catalog,
)

# -- catalog ---------------------------------------------------------------------------------------


def test_catalog_examples():
    g = tail_order_catalog(GaussianBiv(0.5))
    assert g.kappa_lower == pytest.approx(4 / 3) and g.kappa_upper == pytest.approx(4 / 3)
    a = tail_order_catalog(Archimedean(2, ACIG(1.5)))
    assert a.kappa_upper == 1.5 and a.kappa_lower == pytest.approx(math.sqrt(2))
    assert a.moment_index == 1.5
    gu = tail_order_catalog(gumbel_copula(2.0, 2))
    assert gu.kappa_lower == pytest.approx(math.sqrt(2), rel=1e-15)


def test_catalog_families():
    assert tail_order_catalog(StudentBiv(0.3, 4.0)).kappa_upper == 1.0
    kotz = tail_order_catalog(KotzBiv(0.5, 1.0, 1.0, 1.5))
    assert kotz.kappa_lower == pytest.approx((4 / 3) ** 1.5)
    joe = tail_order_catalog(Archimedean(3, Joe2000(0.4)))
    assert joe.kappa_upper == pytest.approx(1.4) and joe.kappa_lower == pytest.approx(3**0.4)
    ev = tail_order_catalog(ExtremeValue(Logistic(2.0, 2)))
    assert ev.kappa_lower == pytest.approx(math.sqrt(2))
    assert ev.kappa_upper == 1.0 and ev.lambda_upper == pytest.approx(2 - math.sqrt(2))
    ind = tail_order_catalog(Independence(3))
    assert (ind.kappa_lower, ind.kappa_upper) == (3.0, 3.0)
    com = tail_order_catalog(Comonotone(2))
    assert com.lambda_lower == com.lambda_upper == 1.0


def test_catalog_scale_mixtures():
    dag = tail_order_catalog(Archimedean(2, WilliamsonGen(Dagum(0.6, 1.8, 1.0), 2)))
    assert dag.kappa_upper == pytest.approx(1.08)
    assert dag.kappa_lower == 1.0
    assert dag.lambda_lower == pytest.approx(2**-0.6)
    # Gumbel-MDA radial with a(x) in RV_beta, 0 < beta < 1: kappa_L = d^(1 - beta)
    kotz = tail_order_catalog(Archimedean(2, WilliamsonGen(KotzRadial(1, 1, 0.25), 2)))
    assert kotz.kappa_lower == pytest.approx(2**0.5)
    assert kotz.kappa_upper == 2.0  # index 2N clamped to d
    weib = tail_order_catalog(Archimedean(2, WilliamsonGen(PositiveWeibull(1.5), 2)))
    assert weib.kappa_upper == 1.5
    assert weib.kappa_lower is None  # aux index -0.5 lies outside (0, 1)
    small = tail_order_catalog(Archimedean(2, WilliamsonGen(Gamma(0.5), 2)))
    assert small.kappa_upper == 1.0


def test_catalog_leaves_undetermined_fields_absent():
    neg = tail_order_catalog(GaussianBiv(-0.5))
    assert neg.kappa_lower is None and neg.kappa_upper is None  # 2/(1 + rho) = 4 > d
    st = tail_order_catalog(StudentBiv(0.3, 4.0))
    assert st.lambda_lower is None
    kotz = tail_order_catalog(KotzBiv(0.0, 1.0, 1.0, 2.0))
    assert kotz.kappa_upper is None  # 2^2 = 4 > d
    d = tail_order_catalog(ExtremeValue(Logistic(2.0, 2))).as_dict()
    assert set(d) == {"model", "kappa_lower", "kappa_upper", "lambda_lower", "lambda_upper", "moment_index", "note"}


CATALOGED = [
    Independence(2),
    Independence(3),
    Comonotone(2),
    gumbel_copula(2.0, 2),
    gumbel_copula(1.5, 3),
    ExtremeValue(Logistic(2.0, 3)),
    ExtremeValue(SumA(2)),
    ExtremeValue(MaxA(3)),
    GaussianBiv(0.5),
    StudentBiv(0.5, 4.0),
    Archimedean(2, ACIG(1.5)),
    Archimedean(3, ACIG(2.5)),
    Archimedean(2, Joe2000(0.5)),
    Archimedean(2, WilliamsonGen(Dagum(0.6, 1.8, 1.0), 2)),
    Archimedean(2, WilliamsonGen(PositiveWeibull(1.5), 2)),
    Archimedean(2, WilliamsonGen(KotzRadial(1, 1, 0.25), 2)),
]

EXACT_LOWER = (Independence, Comonotone, ExtremeValue)


def _exact_lower(model):
    return isinstance(model, EXACT_LOWER) or (isinstance(model, Archimedean) and type(model.gen).__name__ == "GumbelGen")


@pytest.mark.parametrize("model", CATALOGED, ids=repr)
def test_catalog_estimator_agreement(model):
    entry = tail_order_catalog(model)
    for side, k in (("lower", entry.kappa_lower), ("upper", entry.kappa_upper)):
        if k is None:
            continue
        est = estimate_model_tail_order(model, side)
        tol = 1e-8 if side == "lower" and _exact_lower(model) else 0.1
        assert est.kappa == pytest.approx(k, abs=tol), side


@pytest.mark.parametrize("model", CATALOGED, ids=repr)
def test_catalog_ranges(model):
    e = tail_order_catalog(model)
    for k in (e.kappa_lower, e.kappa_upper):
        assert k is None or 1 <= k <= model.d
    for lam in (e.lambda_lower, e.lambda_upper):
        assert lam is None or 0 <= lam <= 1


def test_tail_orders_order_the_diagonals():
    u = 1e-4
    a = diagonal(Comonotone(2), u)
    b = diagonal(gumbel_copula(2.0, 2), u)
    c = diagonal(Independence(2), u)
    assert a > b > c


# -- diagonal regression ---------------------------------------------------------------------------


def test_estimator_examples():
    for d in (2, 3, 5):
        est = estimate_model_tail_order(Independence(d), "lower")
        assert est.kappa == pytest.approx(d, abs=1e-10)
    est = estimate_model_tail_order(gumbel_copula(2.0, 2), "lower")
    assert est.kappa == pytest.approx(math.sqrt(2), abs=1e-9)
    assert est.method == "analytic-diagonal"
    assert est.grid == pytest.approx((1e-6, 1e-3, 20))
    est = estimate_model_tail_order(GaussianBiv(0.5), "lower")
    assert est.kappa == pytest.approx(4 / 3, abs=0.1)


def test_joe2000_upper_order():
    m = Archimedean(2, Joe2000(0.5))
    est = estimate_tail_order_diagonal(lambda u: survival_diagonal(m, u), "upper", d=2)
    assert est.kappa == pytest.approx(1.5, abs=0.05)


def test_estimate_reports_clamped_and_raw():
    est = estimate_tail_order_diagonal(lambda u: u**3.4, "lower", d=3)
    assert est.kappa == 3.0
    assert est.raw_slope == pytest.approx(3.4, abs=1e-10)
    est = estimate_tail_order_diagonal(lambda u: np.sqrt(u), "lower")
    assert est.kappa == 1.0
    assert est.raw_slope == pytest.approx(0.5, abs=1e-10)


def test_estimate_accepts_scalar_only_diag():
    est = estimate_tail_order_diagonal(lambda u: float(u) ** 2, grid=(1e-4, 1e-2, 6))
    assert est.kappa == pytest.approx(2.0, abs=1e-12)
    assert est.stderr == pytest.approx(0.0, abs=1e-10)


def test_default_grids():
    assert ANALYTIC_GRID == (1e-6, 1e-3, 20)
    assert MC_GRID == (5e-3, 5e-2, 10)
    est = estimate_tail_order_diagonal(lambda u: u**2, method="monte-carlo")
    assert est.grid == pytest.approx(MC_GRID)
    g = make_grid(1e-6, 1e-3, 20)
    assert g[0] == pytest.approx(1e-6) and g[-1] == pytest.approx(1e-3) and g.size == 20
    assert np.allclose(np.diff(np.log(g)), np.log(1e3) / 19)


def test_truncation_warning_and_error():
    def diag(u):
        return np.where(u > 1e-2, u**2, 0.0)

    with pytest.warns(GridTruncationWarning):
        est = estimate_tail_order_diagonal(diag, grid=(1e-3, 1e-1, 12))
    assert est.kappa == pytest.approx(2.0, abs=1e-12)
    with pytest.warns(GridTruncationWarning), pytest.raises(EstimationError):
        estimate_tail_order_diagonal(diag, grid=(1e-4, 2e-2, 10))


def test_estimator_validation():
    with pytest.raises(DomainError):
        estimate_tail_order_diagonal(lambda u: u, method="bogus")
    with pytest.raises(DomainError):
        estimate_tail_order_diagonal(lambda u: u, grid=[0.0, 0.1, 0.2, 0.3, 0.4])
    with pytest.raises(DomainError):
        make_grid(1e-3, 1e-6, 5)
    with pytest.raises(DomainError):
        estimate_model_tail_order(Independence(2), method="monte-carlo")


def test_monte_carlo_estimate():
    est = estimate_model_tail_order(gumbel_copula(2.0, 2), "lower", method="monte-carlo", n=10**5, rng=RngStream(3))
    assert est.method == "monte-carlo"
    assert est.kappa == pytest.approx(math.sqrt(2), abs=0.1)
    ind = estimate_model_tail_order(Independence(2), "upper", method="monte-carlo", n=10**5, rng=RngStream(4))
    assert ind.kappa == pytest.approx(2.0, abs=0.15)


# -- lambda -------------------------------------------------------------------------------------


def test_lambda_examples():
    assert estimate_lambda(lambda u: diagonal(Comonotone(2), u)) == pytest.approx(1.0)
    grid = make_grid(*ANALYTIC_GRID)
    lam = estimate_lambda(lambda u: diagonal(Independence(2), u))
    assert 0 <= lam <= grid[-1]
    with pytest.raises(EstimationError):
        estimate_lambda(lambda u: np.zeros_like(u))


def test_lambda_skips_leading_zeros():
    def diag(u):
        return np.where(u > 1e-5, 0.5 * u, 0.0)

    grid = make_grid(*ANALYTIC_GRID)
    assert estimate_lambda(diag, grid) == pytest.approx(0.5)


def test_lambda_ev_upper():
    m = ExtremeValue(Logistic(2.0, 2))
    lam = estimate_lambda(lambda u: survival_diagonal(m, u))
    assert lam == pytest.approx(2 - math.sqrt(2), abs=1e-4)


# -- MDA-Gumbel ratio ------------------------------------------------------------------------------


def test_mda_examples():
    assert mda_gumbel_tail_order(KotzRadial(1, 1, 1), 0.5, 2, 50.0) == pytest.approx(4 / 3, abs=0.01)
    assert mda_gumbel_tail_order(KotzRadial(1, 1, 1), 0.0, 2, 50.0) == pytest.approx(2.0, abs=0.01)
    assert mda_gumbel_tail_order(KotzRadial(1, 1, 2), 0.5, 2, 50.0) == pytest.approx(16 / 9, abs=0.01)
    for law in (KotzRadial(1, 1, 1), KotzRadial(2.0, 0.3, 0.7), Gamma(2.0)):
        assert mda_gumbel_tail_order(law, 1.0, 2, 50.0) == 1.0


def test_mda_half_xi_converges_slowly():
    # the ratio tends to sqrt(4/3) but only logarithmically in r
    vals = [mda_gumbel_tail_order(KotzRadial(1, 1, 0.5), 0.5, 2, r) for r in (50.0, 1e3, 1e5)]
    assert vals[0] > vals[1] > vals[2] > math.sqrt(4 / 3)
    assert vals[2] - math.sqrt(4 / 3) < 0.001


def test_mda_multivariate_scale_factor():
    law = KotzRadial(1, 1, 1)
    b2 = 3 / (1 + 2 * 0.5)
    assert mda_gumbel_tail_order(law, 0.5, 3, 60.0) == pytest.approx(b2, abs=0.01)


@pytest.mark.parametrize("c", [0.2, 3.0, 10.0])
@pytest.mark.parametrize("law", [KotzRadial(1, 1, 1), KotzRadial(1.5, 0.8, 0.6), Gamma(2.0)], ids=repr)
def test_mda_scale_invariance(law, c):
    base = mda_gumbel_tail_order(law, 0.5, 2, 50.0)
    scaled = mda_gumbel_tail_order(law.scaled(c), 0.5, 2, 50.0 * c)
    assert abs(base - scaled) < 1e-3


def test_mda_errors():
    with pytest.raises(DomainError):
        mda_gumbel_tail_order(GenInvGammaT(4.0), 0.5, 2, 50.0)
    with pytest.raises(DomainError):
        mda_gumbel_tail_order(KotzRadial(1, 1, 1), 0.5, 2, 1.0)  # survival far above 1e-4
    # the built-in laws work with log survivals; a law with only a plain survival underflows
    class PlainExponential(RadialLaw):
        def survival(self, x):
            return np.exp(-np.asarray(x, dtype=float))

    with pytest.raises(EvaluationPointError, match="smaller r"):
        mda_gumbel_tail_order(PlainExponential(), 0.5, 2, 800.0)
    assert mda_gumbel_tail_order(PlainExponential(), 0.5, 2, 50.0) == pytest.approx(math.sqrt(4 / 3), rel=1e-12)
    assert math.isfinite(mda_gumbel_tail_order(KotzRadial(1, 1, 1), 0.5, 2, 1e6))
    with pytest.raises(DomainError):
        mda_gumbel_tail_order(KotzRadial(1, 1, 1), -0.7, 3, 50.0)


# -- derived measures --------------------------------------------------------------------------


def test_derived_measures_examples():
    assert derived_measures(1.0) == (1.0, 1.0)
    assert derived_measures(2.0) == (0.5, 0.0)
    eta, chi = derived_measures(4 / 3)
    assert eta == pytest.approx(0.75) and chi == pytest.approx(0.5)
    with pytest.raises(DomainError):
        derived_measures(0.9)


def test_estimate_record_invariants():
    est = TailOrderEstimate(kappa=1.25, stderr=0.01, side="upper", method="monte-carlo", grid=(5e-3, 5e-2, 10))
    assert est.eta == 1 / 1.25 and est.chi_bar == 2 / 1.25 - 1
    d = est.as_dict()
    assert d["grid"] == {"u_min": 5e-3, "u_max": 5e-2, "points": 10}
    assert d["lambda"] is None
    with pytest.raises(DomainError):
        TailOrderEstimate(kappa=0.5, stderr=0, side="lower", method="monte-carlo", grid=(0.1, 0.2, 2))
    with pytest.raises(DomainError):
        TailOrderEstimate(kappa=1.5, stderr=0, side="left", method="monte-carlo", grid=(0.1, 0.2, 2))


def test_catalog_entry_is_plain_record():
    e = CatalogEntry(model="x", kappa_lower=1.5, note="n")
    assert e.as_dict()["kappa_lower"] == 1.5
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        tail_order_catalog(Archimedean(2, ACIG(0.5)))
