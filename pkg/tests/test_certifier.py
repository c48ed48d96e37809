import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracconf.certifier import (
    CERTIFIED,
    EXACT_CASES,
    FALSIFIED,
    BoundaryLayerGrid,
    NotScalarPotentialError,
    ScalarPotential,
    class_membership_alpha,
    distance_function,
    flat_hardy,
    inverse_distance_power,
    lemma_s_identity_residual,
    mu_estimate,
    perturbation_certificate,
    t_d1s_verdict,
    ts_certificate,
    tsh_certificate,
    zero_hardy,
)
from diracconf.classifier import power_family_verdict
from diracconf.core import (
    SIGMA1,
    SIGMA2,
    DiracCoefficients,
    HermiticityError,
    Interval,
    Profile,
    UnitBall,
    UnitDisk,
)

UNIT = Interval(0.0, 1.0)
GOLDEN = (1 + math.sqrt(5)) / 2


@pytest.fixture(scope="module")
def grid_1d():
    return BoundaryLayerGrid(UNIT)


@pytest.fixture(scope="module")
def grid_ball():
    return BoundaryLayerGrid(UnitBall(), n_shells=32, n_ang=16)


def V(dom, lam, alpha=1.0):
    return ScalarPotential(inverse_distance_power(dom, lam, alpha))


def test_grid_shells_are_geometric(grid_1d):
    d = grid_1d.deltas
    assert d[0] == pytest.approx(0.1)
    assert d[-1] == pytest.approx(1e-6)
    assert np.all(np.diff(d) < 0)
    for delta, X in grid_1d.shells():
        assert np.allclose(UNIT.distance(X[:, 0]), delta)


@settings(max_examples=20)
@given(st.floats(0.0, 3.0).filter(lambda x: abs(x - GOLDEN) > 0.02))
def test_ts_matches_closed_form_eigenvalues(grid_1d, lam):
    """For V = lam sigma_1 / delta in 1D the certificate matrix is (lam^2 - 1 - lam sigma_3) / delta^2."""
    rep = ts_certificate(V(UNIT, lam), grid_1d)
    assert rep.outcome == (CERTIFIED if lam > GOLDEN else FALSIFIED)


def test_ts_falsified_report_has_witness(grid_1d):
    rep = ts_certificate(V(UNIT, 1.0), grid_1d)
    assert rep.outcome == FALSIFIED
    point, delta, eig = rep.witness
    assert eig < 0
    assert eig * delta**2 == pytest.approx(1.0 - 1.0 - 1.0, rel=1e-6)


def test_ts_certifies_strong_potential_on_ball(grid_ball):
    assert ts_certificate(V(UnitBall(), 1.0, 2.0), grid_ball).certified
    assert not ts_certificate(V(UnitBall(), 0.0), grid_ball).certified


@pytest.mark.parametrize("lam", [0.3, 1.0, 2.0])
def test_zero_hardy_reduces_to_ts(grid_1d, lam):
    a = tsh_certificate(V(UNIT, lam), zero_hardy(), grid_1d)
    b = ts_certificate(V(UNIT, lam), grid_1d)
    assert a.outcome == b.outcome


@pytest.mark.parametrize("lam", [0.3, 0.45, 0.5, 0.55, 1.0])
def test_flat_hardy_certificate_matches_threshold(grid_1d, lam):
    rep = tsh_certificate(V(UNIT, lam), None, grid_1d)
    assert rep.certified == power_family_verdict(0.0, lam, 0.0)


def test_flat_hardy_rejects_positive_offset_on_convex_domain():
    with pytest.raises(ValueError):
        flat_hardy(UnitBall(), h0=1.0)


@settings(max_examples=15)
@given(st.floats(0.0, 2.0), st.floats(0.0, 1.0), st.sampled_from([1.0, 0.8]))
def test_perturbation_condition_matches_eigenvalues(grid_ball, lam, w, C):
    """Smallest eigenvalue of C(1/(4 delta^2) + V^2 - comm) - W^2 is (C (lam - 1/2)^2 - w^2)/delta^2."""
    margin = C * (lam - 0.5) ** 2 - w**2
    if abs(margin) < 0.01:
        return

    def W(X, d):
        return (w / d)[:, None, None] * np.eye(4)

    rep = perturbation_certificate(V(UnitBall(), lam), W, flat_hardy(UnitBall()), C, grid_ball)
    assert rep.certified == (margin > 0)
    assert rep.inequality == ("E:P.1" if C == 1.0 else "E:P.2")


def test_perturbation_at_exact_balance_is_certified(grid_ball):
    W = lambda X, d: (0.5 / d)[:, None, None] * np.eye(4)
    rep = perturbation_certificate(V(UnitBall(), 1.0), W, flat_hardy(UnitBall()), 1.0, grid_ball)
    assert rep.certified
    assert rep.tag == "T:P(i)"


def test_non_scalar_potential_rejected(grid_1d):
    coeffs = DiracCoefficients(1, (SIGMA2,), lambda x: np.eye(2) / max(min(x[0], 1 - x[0]), 1e-12))
    with pytest.raises(NotScalarPotentialError):
        ts_certificate(coeffs, grid_1d)


def test_non_hermitian_potential_rejected(grid_1d):
    coeffs = DiracCoefficients(1, (SIGMA2,), lambda x: 1j * SIGMA1)
    with pytest.raises(HermiticityError):
        ts_certificate(coeffs, grid_1d)


@pytest.fixture(scope="module")
def grid_disk():
    return BoundaryLayerGrid(UnitDisk())


def test_membership_inverse_square(grid_disk):
    r = class_membership_alpha(inverse_distance_power(UnitDisk(), 1.0, 2.0), 2.0, grid_disk)
    assert r.member


def test_membership_rejects_weak_growth(grid_disk):
    r = class_membership_alpha(inverse_distance_power(UnitDisk(), 1.0, 0.5), 2.0, grid_disk)
    assert not r.member
    assert "lower" in r.failed


def test_membership_rejects_wild_gradient(grid_disk):
    r = class_membership_alpha(distance_function(UnitDisk(), Profile("sin_inv")), 2.0, grid_disk)
    assert not r.member


@pytest.mark.parametrize(
    "prof,mu",
    [(Profile("constant", (1.0,)), 0.0), (Profile("one_plus"), 0.0), (Profile("ell_osc"), 1 / math.sqrt(3))],
    ids=["constant", "one_plus", "ell_osc"],
)
def test_mu_estimate(grid_disk, prof, mu):
    """ell_osc = 2 + sin ln t gives |ell'| t / ell = |cos u| / (2 + sin u), maximal 1/sqrt(3)."""
    est = mu_estimate(distance_function(UnitDisk(), prof), grid_disk)
    assert not est.rejected
    assert est.mu == pytest.approx(mu, abs=1e-3)


def test_mu_estimate_rejects_ell_below_one(grid_disk):
    est = mu_estimate(distance_function(UnitDisk(), Profile("constant", (0.5,))), grid_disk)
    assert est.rejected
    assert est.witness is not None


def test_t_d1s_thresholds():
    assert t_d1s_verdict(0.0, 0.5, True)
    assert not t_d1s_verdict(0.0, 0.49, True)
    assert t_d1s_verdict(0.5, 0.76, False)
    assert not t_d1s_verdict(0.5, 0.75, False)
    with pytest.raises(ValueError):
        t_d1s_verdict(-0.1, 1.0, False)


@pytest.mark.parametrize("case", EXACT_CASES, ids=lambda c: "/".join(map(str, c)))
def test_identity_residual_exact_cases(case):
    """Potentials and weights for which the difference scheme is exact up to rounding."""
    r = lemma_s_identity_residual(*case, grid_step=0.02)
    assert r.residual <= 1e-10 * max(1.0, r.scale)
