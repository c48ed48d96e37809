"""Limit-point / limit-circle classification and essential self-adjointness verdicts.

Rules per endpoint, in order:
  1. closed form: read the leading coefficient behaviour lam_j / delta^alpha_j of
     v0, v1, v3 and apply the power-family threshold lam0^2 <= lam1^2 + lam3^2 - 1/4;
  2. integral criterion on exp(2|g|), g = int v1, when v0 = v3 = 0;
  3. numerical count of square-integrable solutions.
The whole operator is essentially self-adjoint iff both endpoints are limit point.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from .core import Asymptotic, gauge_remove_v2
from .radial import (
    BOUNDARY_BAND,
    DEFAULT_DELTA_MIN,
    DEFAULT_MARGIN,
    IntegralResult,
    RadialDiracProblem,
    count_l2_solutions,
    improper_integral_diverges,
)

log = logging.getLogger(__name__)

LP, LC, INC = "LimitPoint", "LimitCircle", "Inconclusive"
ESA, NOT_ESA = "EssentiallySelfAdjoint", "NotEssentiallySelfAdjoint"

CLOSED_FORM, INTEGRAL, NUMERIC = "ClosedFormRule", "IntegralCriterion", "NumericalSolutionCount"
METHODS = ("auto", "closed_form", "integral", "numeric")

CITATION_TAGS = (
    "T:W", "P:M(i)", "P:M(ii)", "P:M(iii)", "C:SMF", "L:NES", "T:M2", "P:CM", "L:PW",
    "T:S", "T:SH", "T:P(i)", "T:P(ii)", "T:D1S(i)", "T:D1S(ii)", "CO.5", "Comment3", "Numeric",
)

SHORT = {ESA: "ESA", NOT_ESA: "NotESA", INC: "Inconclusive"}


@dataclass(frozen=True)
class EndpointClassification:
    endpoint: str
    cls: str
    method: str
    tag: str
    evidence: dict = field(default_factory=dict)
    margin_flag: bool = False
    margin: Optional[float] = None  # signed distance of the exponent from critical


@dataclass(frozen=True)
class EsaVerdict:
    verdict: str
    endpoints: tuple
    tag: str
    note: str = ""

    @property
    def short(self) -> str:
        return SHORT[self.verdict]

    @property
    def margin_flag(self) -> bool:
        return any(e.margin_flag for e in self.endpoints)


# ---------------------------------------------------------------------------
# exact threshold formulas
# ---------------------------------------------------------------------------


def _exact(x: float) -> Fraction:
    return Fraction(x) if not isinstance(x, Fraction) else x


def power_family_verdict(lam0: float, lam1: float, lam3: float) -> bool:
    """lam0^2 <= lam1^2 + lam3^2 - 1/4, in exact rational arithmetic on the given floats."""
    l0, l1, l3 = _exact(lam0), _exact(lam1), _exact(lam3)
    return l0 * l0 <= l1 * l1 + l3 * l3 - Fraction(1, 4)


def em_threshold_verdict(lam_m: float, lam_s: float, lam_e: float, rtol: float = 0.0) -> bool:
    """lam_e^2 <= lam_m^2 + lam_s^2 - 1/4 (exact; rtol relaxes the comparison for rounded inputs)."""
    lhs = _exact(lam_e) ** 2
    rhs = _exact(lam_m) ** 2 + _exact(lam_s) ** 2 - Fraction(1, 4)
    if rtol:
        return float(lhs - rhs) <= rtol * max(1.0, float(abs(rhs)))
    return lhs <= rhs


def smf_margin(lam0: float, lam1: float, lam3: float) -> float:
    """Signed exponent distance 2*mu - 1, mu^2 = lam1^2 + lam3^2 - lam0^2 (negative below threshold)."""
    mu2 = lam1 * lam1 + lam3 * lam3 - lam0 * lam0
    return 2.0 * math.sqrt(mu2) - 1.0 if mu2 > 0 else -1.0


# ---------------------------------------------------------------------------
# endpoint rules
# ---------------------------------------------------------------------------


def _rule_closed_form(p: RadialDiracProblem, endpoint: str) -> Optional[EndpointClassification]:
    e = p.domain.endpoint(endpoint)
    if math.isinf(e):
        return EndpointClassification(endpoint, LP, CLOSED_FORM, "T:W",
                                      {"rule": "1D Dirac systems are limit point at infinity"})
    pot = p.potential
    a0, a1, a3 = (c.asymptotics(e) for c in (pot.v0, pot.v1, pot.v3))
    if any(a is None for a in (a0, a1, a3)):
        return None
    if any(a.near_critical for a in (a0, a1, a3)):
        return EndpointClassification(endpoint, INC, CLOSED_FORM, "P:M(iii)",
                                      {"rule": "log-corrected near-critical family: no verdict"})
    if pot.v1.is_zero and pot.v3.is_zero:
        return EndpointClassification(endpoint, LC, CLOSED_FORM, "L:NES",
                                      {"rule": "electric-only potential; solutions bounded at a finite endpoint"})
    if all(a.bounded for a in (a0, a1, a3)):
        return EndpointClassification(endpoint, LC, CLOSED_FORM, "T:W",
                                      {"rule": "regular endpoint (bounded coefficients)"})

    def order(a: Asymptotic) -> float:
        return -math.inf if a.bounded else a.order

    o0, o1, o3 = order(a0), order(a1), order(a3)
    if o1 > 1.0 and o0 < 1.0 and o3 < 1.0:
        return EndpointClassification(endpoint, LP, CLOSED_FORM, "P:M(ii)",
                                      {"rule": "|v1| >> 1/(2 delta)", "order_v1": o1})
    if max(o0, o1, o3) <= 1.0:
        l0, l1, l3 = a0.singular_part(1.0), a1.singular_part(1.0), a3.singular_part(1.0)
        lp = power_family_verdict(l0, l1, l3)
        if l0 == 0.0 and l3 == 0.0:
            tag = "P:M(ii)" if lp else "P:M(iii)"
        else:
            tag = "C:SMF"
        return EndpointClassification(
            endpoint, LP if lp else LC, CLOSED_FORM, tag,
            {"rule": "lam0^2 <= lam1^2 + lam3^2 - 1/4", "lam0": l0, "lam1": l1, "lam3": l3},
            margin=smf_margin(l0, l1, l3),
        )
    return None


def _distance_chart(p: RadialDiracProblem, endpoint: str):
    e = p.domain.endpoint(endpoint)
    side = 1.0 if endpoint == "a" else -1.0
    return e, side


def _rule_integral(p: RadialDiracProblem, endpoint: str, delta0: float) -> Optional[EndpointClassification]:
    pot = p.potential
    if not (pot.v0.is_zero and pot.v3.is_zero) or not p.is_finite(endpoint):
        return None
    e, side = _distance_chart(p, endpoint)
    L = p.domain.length
    d0 = min(delta0, 0.5 * L)
    x_ref = e + side * d0
    v1 = pot.v1

    def log_f(d):
        g = v1.integral(e + side * d, x_ref)
        return 2.0 * abs(g)

    res: IntegralResult = improper_integral_diverges(None, d0, log_f=log_f)
    ev = {"integral": res.status, "value": res.value, "refinements": res.refinements, "reason": res.reason}
    if res.status == "Divergent":
        return EndpointClassification(endpoint, LP, INTEGRAL, "P:M(i)", ev)
    if res.status == "Convergent":
        return EndpointClassification(endpoint, LC, INTEGRAL, "P:M(i)", ev)
    return None


def _rule_numeric(p: RadialDiracProblem, endpoint: str, delta_min: float, margin: float) -> EndpointClassification:
    c = count_l2_solutions(p, endpoint, delta_min=delta_min, margin=margin)
    ev = {
        "count": c.count,
        "p_dominant": c.dominant.p,
        "p_subdominant": c.subdominant.p,
        "ci_dominant": c.dominant.ci,
        "zeta": str(c.zeta),
        "note": c.note or c.dominant.note,
    }
    pm = c.dominant.p
    flag = bool(np.isfinite(pm) and abs(pm + 1.0) < BOUNDARY_BAND)
    mval = float(-(pm + 1.0)) if np.isfinite(pm) else None
    if c.inconclusive:
        return EndpointClassification(endpoint, INC, NUMERIC, "Numeric", ev, True, mval)
    return EndpointClassification(endpoint, LP if c.count == 1 else LC, NUMERIC, "Numeric", ev, flag, mval)


def endpoint_class(
    p: RadialDiracProblem,
    endpoint: str,
    method: str = "auto",
    delta_min: float = DEFAULT_DELTA_MIN,
    delta0: float = 0.1,
    margin: float = DEFAULT_MARGIN,
) -> EndpointClassification:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if not p.potential.v2.is_zero and method != "numeric":
        raise ValueError("endpoint_class expects a gauge-normalised problem (v2 = 0); call gauge_remove_v2")
    if method in ("auto", "closed_form"):
        r = _rule_closed_form(p, endpoint)
        if r is not None or method == "closed_form":
            return r or EndpointClassification(endpoint, INC, CLOSED_FORM, "T:W", {"rule": "family not recognised"})
    if method in ("auto", "integral"):
        r = _rule_integral(p, endpoint, delta0)
        if r is not None or method == "integral":
            return r or EndpointClassification(endpoint, INC, INTEGRAL, "P:M(i)", {"rule": "not applicable or undecided"})
    return _rule_numeric(p, endpoint, delta_min, margin)


def combine_endpoints(ca: EndpointClassification, cb: EndpointClassification) -> EsaVerdict:
    """The whole-operator verdict as a pure function of the two endpoint classes."""
    eps = (ca, cb)
    lc = [c for c in eps if c.cls == LC]
    if lc:
        return EsaVerdict(NOT_ESA, eps, lc[0].tag, note=f"limit circle at {lc[0].endpoint}")
    if any(c.cls == INC for c in eps):
        bad = [c.endpoint for c in eps if c.cls == INC]
        return EsaVerdict(INC, eps, next(c.tag for c in eps if c.cls == INC), note=f"undecided at {', '.join(bad)}")
    tags = [c.tag for c in eps if c.tag != "T:W"] or ["T:W"]
    return EsaVerdict(ESA, eps, tags[-1], note="limit point at both endpoints")


def esa_verdict_1d(
    p: RadialDiracProblem,
    method: str = "auto",
    delta_min: float = DEFAULT_DELTA_MIN,
    delta0: float = 0.1,
    margin: float = DEFAULT_MARGIN,
    gauge_normalize: bool = True,
) -> EsaVerdict:
    if gauge_normalize and not p.potential.v2.is_zero:
        pot, _ = gauge_remove_v2(p.potential, p.domain)
        p = RadialDiracProblem(p.domain, pot, p.zeta, p.m, p.label)
    ca = endpoint_class(p, "a", method, delta_min, delta0, margin)
    cb = endpoint_class(p, "b", method, delta_min, delta0, margin)
    return combine_endpoints(ca, cb)


# ---------------------------------------------------------------------------
# Chernoff-type family on the line
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChernoffReport:
    alpha: float
    verdict: EsaVerdict
    psi_plus_l2: bool
    psi_minus_l2: bool
    tails: dict
    analytic: bool


def _chernoff_G(alpha: float, theta_max_gap: float = 1e-13, n: int = 4001):
    """G(theta) = int_0^theta cos^(alpha-2) t dt, i.e. int_0^x dy / a_alpha(y) with x = tan theta.

    Returned as a spline in u = ln(pi/2 - theta) covering gaps down to theta_max_gap.
    """
    # main body by adaptive quadrature, tail by composite Simpson in u
    from scipy.integrate import quad

    d_top = 0.5
    G_top, _ = quad(lambda t: math.cos(t) ** (alpha - 2.0), 0.0, math.pi / 2 - d_top, epsabs=1e-13, epsrel=1e-12)
    u = np.linspace(math.log(theta_max_gap), math.log(d_top), n)
    d = np.exp(u)
    integrand = np.sin(d) ** (alpha - 2.0) * d  # |d theta| = gap du
    cum = cumulative_simpson(integrand, x=u, initial=0.0)
    G = G_top + (cum[-1] - cum)
    return CubicSpline(u, G)


def chernoff_example_verdict(alpha: float, delta0: float = 0.4) -> ChernoffReport:
    """Growth-family a_alpha = (1 + x^2)^(alpha/2), deficiency solutions
    Psi_pm^2 = a^-1 exp(+-int_0^x dy/a). Tails at +-infinity via x = tan(theta).

    By oddness of G, Psi_+ at -infinity behaves like Psi_- at +infinity. The
    operator is essentially self-adjoint iff neither Psi_+ nor Psi_- is in L^2,
    i.e. each fails at one of the two infinite ends at least.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    Gs = _chernoff_G(alpha)

    def tail(sign: float) -> IntegralResult:
        # integrand in the gap d = pi/2 - theta: a^-1 e^(sign G) sec^2 theta = sin(d)^(alpha-2) e^(sign G)
        def log_f(d):
            return (alpha - 2.0) * math.log(math.sin(d)) + sign * float(Gs(math.log(d)))

        return improper_integral_diverges(None, delta0, log_f=log_f)

    t_plus, t_minus = tail(+1.0), tail(-1.0)
    tails = {
        "psi_plus_at_+inf": t_plus.status,
        "psi_plus_at_-inf": t_minus.status,
        "psi_minus_at_+inf": t_minus.status,
        "psi_minus_at_-inf": t_plus.status,
    }
    if "Inconclusive" in (t_plus.status, t_minus.status):
        v = EsaVerdict(INC, (), "Comment3", note="tail integral undecided")
        return ChernoffReport(alpha, v, False, False, tails, alpha <= 1.0)
    plus_l2 = t_plus.status == "Convergent" and t_minus.status == "Convergent"
    minus_l2 = plus_l2  # mirror images of each other
    verdict = NOT_ESA if (plus_l2 or minus_l2) else ESA
    v = EsaVerdict(verdict, (), "Comment3",
                   note="deficiency solutions square-integrable" if plus_l2 else "deficiency solutions not in L^2")
    return ChernoffReport(alpha, v, plus_l2, minus_l2, tails, alpha <= 1.0)
