import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diracconf.core import (
    ALPHA,
    BETA,
    PAULI,
    Constant,
    Fourier,
    HermiticityError,
    Interval,
    PotentialSpec1D,
    Profile,
    Tabulated,
    UnitBall,
    UnitDisk,
    Zero,
    anticommutation_defect,
    anticommutator,
    dirac_matrices,
    gauge_remove_v2,
    pauli_compose,
    pauli_decompose,
    power_both_ends,
    power_law,
    require_hermitian,
    scalar_matrix,
)

reals = st.floats(-1e3, 1e3, allow_nan=False)


@given(reals, reals, reals, reals)
def test_pauli_round_trip(v0, v1, v2, v3):
    back = pauli_decompose(pauli_compose(v0, v1, v2, v3))
    scale = max(1.0, abs(v0), abs(v1), abs(v2), abs(v3))
    assert np.allclose(back, (v0, v1, v2, v3), rtol=0, atol=1e-13 * scale)


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=4, max_size=4))
def test_pauli_decompose_rebuilds_any_hermitian(z):
    M = np.array(z, dtype=complex).reshape(2, 2)
    H = M + M.conj().T
    assert np.allclose(pauli_compose(*pauli_decompose(H)), H, atol=1e-12)


def test_pauli_decompose_rejects_non_hermitian():
    with pytest.raises(HermiticityError):
        pauli_decompose(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(ValueError):
        pauli_decompose(np.eye(3))


def test_require_hermitian_gate():
    require_hermitian(PAULI[1])
    with pytest.raises(HermiticityError):
        require_hermitian(PAULI[1] + 1e-9 * np.array([[0, 1], [0, 0]]))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_anticommutation_table(d):
    A = dirac_matrices(d)
    S = scalar_matrix(d)
    assert anticommutation_defect(list(A)) == 0.0
    assert anticommutation_defect(list(A) + [S]) == 0.0
    for M in (*A, S):
        require_hermitian(M, tol=0.0)


def test_dirac_alpha_beta_structure():
    assert anticommutation_defect(list(ALPHA) + [BETA]) == 0.0
    i, j, k = PAULI
    assert np.allclose(i @ j, 1j * k)
    assert np.allclose(anticommutator(i, j), 0)
    with pytest.raises(ValueError):
        dirac_matrices(4)


def test_power_law_values_and_asymptotics():
    c = power_law(0.7, 1.0, 0.0, +1)
    x = np.array([1e-3, 1e-2, 0.05])
    assert np.allclose(c(x), 0.7 / x)
    both = power_both_ends(0.5, Interval(0.0, 1.0))
    assert math.isclose(both(0.25), 0.5 / 0.25 + 0.5 / 0.75)


PROFILES = [
    Profile("constant", (1.5,)),
    Profile("power", (0.7, 1.5)),
    Profile("log", (0.3,)),
    Profile("sin_inv"),
    Profile("osc_log", (0.4,)),
    Profile("ell_osc"),
    Profile("one_plus"),
    Profile("log_corrected", (0.5, 0.2)),
]


@pytest.mark.parametrize("prof", PROFILES, ids=lambda p: p.kind)
@given(t=st.floats(0.02, 0.09))
def test_profile_derivative_and_antiderivative(prof, t):
    h = 1e-6 * t
    fd = (prof.value(t + h) - prof.value(t - h)) / (2 * h)
    assert math.isclose(float(prof.deriv(t)), float(fd), rel_tol=1e-5, abs_tol=1e-5)
    fa = (prof.antideriv(t + h) - prof.antideriv(t - h)) / (2 * h)
    assert math.isclose(float(fa), float(prof.value(t)), rel_tol=1e-5, abs_tol=1e-5)


def test_zero_and_constant_flags():
    assert Zero().is_zero
    assert Constant(0.0).is_zero
    assert not Constant(1.0).is_zero
    assert Constant(2.0).integral(0.0, 0.5) == 1.0


def test_tabulated_validates_input():
    with pytest.raises(ValueError):
        Tabulated([0, 1, 0.5, 2], [1, 2, 3, 4])
    t = Tabulated(np.linspace(0, 1, 11), np.linspace(0, 1, 11) ** 2)
    assert math.isclose(t.integral(0, 1), 1 / 3, rel_tol=1e-6)


@given(
    st.floats(-2, 2),
    st.lists(st.tuples(st.floats(-3, 3), st.floats(0.5, 20), st.floats(0, 6.3)), min_size=1, max_size=3),
)
def test_gauge_removal_phase_is_primitive_of_v2(c0, terms):
    v2 = Fourier(c0, *map(tuple, zip(*terms)))
    dom = Interval(0.0, 1.0)
    pot, phase = gauge_remove_v2(PotentialSpec1D(v2=v2), dom)
    assert pot.v2.is_zero
    x0, x1 = 0.3, 0.7
    h = 1e-5
    for x in (x0, x1):
        fd = (phase(x + h) - phase(x - h)) / (2 * h)
        assert math.isclose(fd, float(v2(x)), rel_tol=1e-6, abs_tol=1e-6)


def test_gauge_removal_rejects_non_integrable_interior():
    from diracconf.core import Callable1D

    bad = Callable1D(lambda x: math.nan if x > 0.4 else 0.0)
    with pytest.raises(ValueError, match="not locally integrable"):
        gauge_remove_v2(PotentialSpec1D(v2=bad), Interval(0.0, 1.0))


@pytest.mark.parametrize("dom", [UnitDisk(), UnitBall()])
def test_domain_distance(dom):
    pts = dom.layer_points(0.01, 8)
    assert np.allclose(dom.distance(pts), 0.01)
