import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracconf.core import Interval, PotentialSpec1D, Zero, power_law
from diracconf.radial import (
    LogAmplitudeTrajectory,
    RadialDiracProblem,
    count_l2_solutions,
    improper_integral_diverges,
    integrate_frame,
    tail_l2_class,
)

UNIT = Interval(0.0, 1.0)


def mass_problem(lam):
    """v1 = lam / x near 0; solutions behave like x^(+-lam), so |Psi|^2 ~ x^(-2 lam) dominates."""
    pot = PotentialSpec1D(v1=power_law(lam, 1.0, 0.0, +1))
    return RadialDiracProblem(UNIT, pot)


@settings(max_examples=12)
@given(st.floats(0.0, 2.0))
def test_frame_stays_orthonormal(lam):
    fr = integrate_frame(mass_problem(lam), "a", delta_min=1e-6)
    assert fr.complete
    assert fr.max_ortho_defect < 1e-10


@pytest.mark.parametrize("lam", [0.2, 0.8, 1.3])
def test_dominant_exponent_matches_power_solution(lam):
    c = count_l2_solutions(mass_problem(lam), "a")
    assert abs(c.dominant.p - (-2 * lam)) < 0.02
    assert c.count == (2 if lam < 0.5 else 1)


def synthetic(p, complete=True):
    delta = np.geomspace(0.1, 1e-8, 400)
    return LogAmplitudeTrajectory("a", 1 - delta, delta, np.zeros_like(delta), 0.5 * p * np.log(delta),
                                  np.zeros((400, 2)), complete, 1e-8)


@given(st.floats(-3.0, 1.0))
def test_tail_class_on_exact_power(p):
    t = tail_l2_class(synthetic(p), margin=0.01)
    assert abs(t.p - p) < 1e-9
    if p > -1 + 0.01:
        assert t.verdict == "SquareIntegrable"
    elif p <= -1 - 0.01:
        assert t.verdict == "NotSquareIntegrable"
    else:
        assert t.verdict == "Inconclusive"


def test_tail_class_incomplete_is_inconclusive():
    assert tail_l2_class(synthetic(-2.0, complete=False)).verdict == "Inconclusive"


@given(st.floats(0.0, 2.5))
def test_divergence_detector_is_sound_on_powers(a):
    r = improper_integral_diverges(lambda t: t**-a, 0.1)
    if r.status == "Divergent":
        assert a >= 1.0
    if r.status == "Convergent":
        assert a < 1.0
        assert math.isclose(r.value, 0.1 ** (1 - a) / (1 - a), rel_tol=1e-3)


@pytest.mark.parametrize("a,status", [(0.5, "Convergent"), (1.0, "Divergent"), (1.5, "Divergent")])
def test_divergence_detector_decides_clear_cases(a, status):
    assert improper_integral_diverges(lambda t: t**-a, 0.1).status == status


def test_divergence_detector_log_route_handles_huge_integrands():
    r = improper_integral_diverges(None, 0.1, log_f=lambda d: 1.0 / d)
    assert r.status == "Divergent"


def test_log_divergence_is_not_called_convergent():
    r = improper_integral_diverges(lambda t: 1.0 / (t * math.log(1 / t)), 0.1)
    assert r.status != "Convergent"


def test_problem_shift_defaults():
    from diracconf.core import Constant

    assert mass_problem(1.0).shift("a") == 0j
    electric = RadialDiracProblem(UNIT, PotentialSpec1D(v0=Constant(1.0)))
    assert electric.shift("a") == 1j
    q = RadialDiracProblem(UNIT, PotentialSpec1D(v0=Zero(), v1=power_law(1.0, 1.0, 0.0, +1)), zeta=0.3)
    assert q.shift("b") == 0.3
