import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from diracconf.classifier import LC, LP
from diracconf.magnetic2d import (
    ConstantField,
    InverseDistanceGaugeField,
    PCMField,
    TabulatedField,
    diamagnetic_check,
    field_from_gauge,
    fiber_problem,
    m_of_j,
    partial_wave_verdict,
    susy_factorization_residual,
    t_m2_certificate,
    transversal_gauge,
)

radii = st.floats(0.0, 0.999)


def smooth_table():
    r = np.linspace(0.0, 0.9995, 4001)
    return TabulatedField(r, 1.0 + r**2 + 0.5 * np.sin(3 * r))


FIELDS = [ConstantField(1.3), ConstantField(-0.7), PCMField(0.75), InverseDistanceGaugeField(0.6), smooth_table()]
IDS = ["const", "const_neg", "pcm", "inverse_distance", "tabulated"]


def gauge_oracle(B, r):
    """a(r) = (1/r) int_0^r y B(y) dy by adaptive quadrature."""
    if r == 0.0:
        return 0.0
    val, _ = quad(lambda y: y * float(B.B(y)), 0.0, r, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val / r


@pytest.mark.parametrize("B", FIELDS, ids=IDS)
@settings(max_examples=25)
@given(r=radii)
def test_gauge_matches_quadrature(B, r):
    g = transversal_gauge(B)
    assert math.isclose(float(g(r)), gauge_oracle(B, r), rel_tol=1e-8, abs_tol=1e-10)


@pytest.mark.parametrize("B", FIELDS, ids=IDS)
@settings(max_examples=25)
@given(r=radii)
def test_field_recovered_from_gauge(B, r):
    g = transversal_gauge(B)
    ref = float(B.B(r))
    for method in ("analytic", "fd"):
        got = float(field_from_gauge(g, np.array([r]), method)[0])
        assert abs(got - ref) <= 1e-8 * max(1.0, abs(ref)), method


def test_m_of_j_half_integers():
    assert [m_of_j(j) for j in (-2, -1, 0, 1)] == [-1.5, -0.5, 0.5, 1.5]
    assert m_of_j(0, free_plane=True) == -0.5


@given(st.floats(-3, 3), st.integers(-8, 7), st.floats(0.01, 0.99))
def test_fiber_reflection_symmetry(B0, j, r):
    """Reversing the field and j -> -1 - j flips the sign of the sigma_1 coefficient."""
    a = fiber_problem(transversal_gauge(ConstantField(B0)), j).potential.v1(r)
    b = fiber_problem(transversal_gauge(ConstantField(-B0)), -1 - j).potential.v1(r)
    assert math.isclose(a, -b, rel_tol=1e-12, abs_tol=1e-12)


def test_fiber_reflection_symmetry_of_verdicts():
    plus = {row.j: row for row in partial_wave_verdict(ConstantField(2.0), 3, method="numeric").rows}
    minus = {row.j: row for row in partial_wave_verdict(ConstantField(-2.0), 3, method="numeric").rows}
    for j, row in plus.items():
        if -1 - j in minus:
            other = minus[-1 - j]
            assert (row.at0.cls, row.at1.cls) == (other.at0.cls, other.at1.cls)


@pytest.mark.parametrize("alpha,ok", [(0.25, False), (0.4, False), (0.49, False), (0.5, True), (0.75, True), (1.0, True)])
def test_boundary_field_certificate(alpha, ok):
    assert t_m2_certificate(PCMField(alpha)).ok is ok


def test_boundary_field_certificate_rejects_bounded_field():
    assert not t_m2_certificate(ConstantField(5.0)).ok


def test_constant_field_fibers_are_limit_circle_at_boundary():
    t = partial_wave_verdict(ConstantField(1.0), 2)
    assert t.short == "NotESA"
    assert all(row.at0.cls == LP for row in t.rows if abs(row.m_j) >= 0.5)
    assert any(row.at1.cls == LC for row in t.rows)


def test_pcm_below_threshold_fails_on_fiber_minus_one():
    t = partial_wave_verdict(PCMField(0.25), 2)
    assert t.short == "NotESA"
    assert t.failing_fiber == -1
    assert t.tag == "P:CM"


def test_partial_wave_rejects_empty_range():
    with pytest.raises(ValueError):
        partial_wave_verdict(PCMField(1.0), 0)


def test_tabulated_field_validation():
    with pytest.raises(ValueError):
        TabulatedField([0.1, 0.2, 0.3, 0.4], [1, 1, 1, 1])


def test_susy_residual_shrinks_with_grid():
    g = transversal_gauge(PCMField(0.75))
    coarse = susy_factorization_residual(g, 0.02)
    fine = susy_factorization_residual(g, 0.01)
    assert fine.plus < coarse.plus / 3
    assert fine.minus < coarse.minus / 3


@pytest.mark.parametrize("B", [ConstantField(0.0), ConstantField(3.0), PCMField(0.75)], ids=["zero", "const", "pcm"])
def test_diamagnetic_inequality(B):
    assert all(c.holds for c in diamagnetic_check(transversal_gauge(B)))
