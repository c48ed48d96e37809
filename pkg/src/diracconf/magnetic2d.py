"""Rotationally symmetric magnetic fields on the unit disk.

Transversal gauge A = a(r) e_theta with a(r) = (1/r) int_0^r y B(y) dy, radial
fibers sigma_2 D_r + sigma_1 (a(r) - m_j/r) (+ sigma_3 v_s + v_e) on (0, 1),
the boundary-field certificate |B| >= 1/(2 delta^2), and finite-difference checks
of the supersymmetric factorisation D_-+ D_+- = Pi^2 -+ B.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.special import spence

from .classifier import (
    ESA,
    INC,
    LC,
    LP,
    NOT_ESA,
    EndpointClassification,
    EsaVerdict,
    endpoint_class,
    combine_endpoints,
)
from .core import Asymptotic, Coefficient, Interval, PotentialSpec1D, Sum, Zero, power_law
from .radial import DEFAULT_DELTA_MIN, RadialDiracProblem

log = logging.getLogger(__name__)

UNIT = Interval(0.0, 1.0)
_SMALL_R = 1e-3


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantField:
    B0: float

    def B(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.B0)

    def B_delta(self, d):
        return self.B(d)


@dataclass(frozen=True)
class PCMField:
    """B(r) = alpha / (1 - r)^2."""

    alpha: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("PCMFamily needs alpha >= 0")

    def B(self, r):
        r = np.asarray(r, dtype=float)
        return self.alpha / (1.0 - r) ** 2

    def B_delta(self, d):
        """Field at distance d = 1 - r from the boundary (no cancellation)."""
        return self.alpha / np.asarray(d, dtype=float) ** 2


@dataclass(frozen=True)
class InverseDistanceGaugeField:
    """The field whose transversal gauge is a(r) = lam_m r / (1 - r)."""

    lam_m: float

    def B(self, r):
        r = np.asarray(r, dtype=float)
        # a/r + a' = lam/(1-r) + lam/(1-r)^2
        return self.lam_m / (1.0 - r) + self.lam_m / (1.0 - r) ** 2

    def B_delta(self, d):
        d = np.asarray(d, dtype=float)
        return self.lam_m / d + self.lam_m / d**2


class TabulatedField:
    def __init__(self, r: Sequence[float], B: Sequence[float]):
        r = np.asarray(r, dtype=float)
        B = np.asarray(B, dtype=float)
        if r[0] != 0.0 or np.any(np.diff(r) <= 0) or r[-1] >= 1.0 or r.shape != B.shape:
            raise ValueError("TabulatedField needs increasing radii starting at 0 and below 1")
        self.r, self.values = r, B
        self._spl = CubicSpline(r, B)

    def B(self, r):
        return self._spl(np.asarray(r, dtype=float))

    def __repr__(self):
        return f"TabulatedField(n={self.r.size})"


MagneticField2D = object  # any of the field classes above


# ---------------------------------------------------------------------------
# Transversal gauge as a radial coefficient
# ---------------------------------------------------------------------------


class TransversalGauge(Coefficient):
    """a(r) = (1/r) int_0^r y B(y) dy, with value, derivative, antiderivative and endpoint asymptotics."""

    def __init__(self, field_: object, provenance: str):
        self.field = field_
        self.provenance = provenance

    # subclasses implement a(r), a'(r), a(r)/r, primitive of a
    def a(self, r):
        raise NotImplementedError

    def a_over_r(self, r):
        r = np.asarray(r, dtype=float)
        return self.a(r) / r

    def __call__(self, x):
        v = self.a(np.asarray(x, dtype=float))
        return float(v) if np.ndim(v) == 0 else v

    def B(self, r):
        return self.field.B(r)


class ConstantGauge(TransversalGauge):
    def __init__(self, f: ConstantField):
        super().__init__(f, "analytic")
        self.B0 = f.B0

    def a(self, r):
        return 0.5 * self.B0 * np.asarray(r, dtype=float)

    def a_over_r(self, r):
        return np.full_like(np.asarray(r, dtype=float), 0.5 * self.B0)

    def derivative(self, x):
        v = np.full_like(np.asarray(x, dtype=float), 0.5 * self.B0)
        return float(v) if np.ndim(v) == 0 else v

    def integral(self, x0, x1):
        return 0.25 * self.B0 * (x1 * x1 - x0 * x0)

    def asymptotics(self, endpoint):
        return Asymptotic.bounded_()

    @property
    def is_zero(self):
        return self.B0 == 0.0


def _pcm_series_over_r(r):
    # (1/r^2)(r/(1-r) + ln(1-r)) = sum_{k>=2} (1 - 1/k) r^(k-2)
    k = np.arange(2, 12)
    return np.sum((1.0 - 1.0 / k)[None, :] * np.power.outer(np.atleast_1d(r), k - 2), axis=1)


class PCMGauge(TransversalGauge):
    def __init__(self, f: PCMField):
        super().__init__(f, "analytic")
        self.alpha = f.alpha

    def a_over_r(self, r):
        r = np.asarray(r, dtype=float)
        rr = np.atleast_1d(r)
        out = np.empty_like(rr)
        small = rr < _SMALL_R
        big = ~small
        out[small] = _pcm_series_over_r(rr[small]) if small.any() else 0.0
        rb = rr[big]
        out[big] = (rb / (1.0 - rb) + np.log1p(-rb)) / rb**2
        out = self.alpha * out
        return out.reshape(r.shape) if r.ndim else float(out[0])

    def a(self, r):
        r = np.asarray(r, dtype=float)
        return r * self.a_over_r(r)

    def derivative(self, x):
        # a' = B - a/r
        x = np.asarray(x, dtype=float)
        v = self.field.B(x) - self.a_over_r(x)
        return float(v) if np.ndim(v) == 0 else v

    def integral(self, x0, x1):
        # int a dr = alpha * (-ln(1-r) - Li2(r)), Li2(r) = spence(1 - r)
        def F(r):
            return self.alpha * (-math.log1p(-r) - float(spence(1.0 - r)))

        return F(x1) - F(x0)

    def asymptotics(self, endpoint):
        if endpoint == 1.0 and self.alpha != 0.0:
            return Asymptotic(1.0, self.alpha)  # alpha/(1-r) plus an integrable log term
        return Asymptotic.bounded_()

    @property
    def is_zero(self):
        return self.alpha == 0.0


class InverseDistanceGauge(TransversalGauge):
    def __init__(self, f: InverseDistanceGaugeField):
        super().__init__(f, "analytic")
        self.lam = f.lam_m

    def a(self, r):
        r = np.asarray(r, dtype=float)
        return self.lam * r / (1.0 - r)

    def a_over_r(self, r):
        return self.lam / (1.0 - np.asarray(r, dtype=float))

    def derivative(self, x):
        v = self.lam / (1.0 - np.asarray(x, dtype=float)) ** 2
        return float(v) if np.ndim(v) == 0 else v

    def integral(self, x0, x1):
        F = lambda r: self.lam * (-math.log1p(-r) - r)  # noqa: E731
        return F(x1) - F(x0)

    def asymptotics(self, endpoint):
        if endpoint == 1.0 and self.lam != 0.0:
            return Asymptotic(1.0, self.lam)
        return Asymptotic.bounded_()

    @property
    def is_zero(self):
        return self.lam == 0.0


class QuadratureGauge(TransversalGauge):
    """Gauge of a tabulated (or arbitrary) field by adaptive quadrature."""

    def __init__(self, f):
        super().__init__(f, "quadrature")

    def _flux(self, r: float) -> float:
        if r == 0.0:
            return 0.0
        v, _ = quad(lambda y: y * float(self.field.B(y)), 0.0, r, epsabs=1e-14, epsrel=1e-12, limit=200)
        return v

    def a(self, r):
        r = np.asarray(r, dtype=float)
        flat = np.array([self._flux(float(s)) / s if s > 0 else 0.0 for s in np.ravel(r)])
        return flat.reshape(r.shape) if r.ndim else float(flat[0])

    def a_over_r(self, r):
        r = np.asarray(r, dtype=float)
        flat = np.array([
            self._flux(float(s)) / s**2 if s > 1e-6 else 0.5 * float(self.field.B(0.0)) for s in np.ravel(r)
        ])
        return flat.reshape(r.shape) if r.ndim else float(flat[0])

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        v = self.field.B(x) - self.a_over_r(x)
        return float(v) if np.ndim(v) == 0 else v

    def asymptotics(self, endpoint):
        return Asymptotic.bounded_() if endpoint == 0.0 else None


def transversal_gauge(B) -> TransversalGauge:
    if isinstance(B, ConstantField):
        return ConstantGauge(B)
    if isinstance(B, PCMField):
        return PCMGauge(B)
    if isinstance(B, InverseDistanceGaugeField):
        return InverseDistanceGauge(B)
    return QuadratureGauge(B)


def field_from_gauge(g: TransversalGauge, r, method: str = "analytic") -> np.ndarray:
    """B = a/r + a'. method='fd' uses Richardson-extrapolated central differences of a."""
    r = np.asarray(r, dtype=float)
    if method == "analytic" and g.provenance == "analytic":
        return g.a_over_r(r) + np.asarray(g.derivative(r))
    def central(x):
        h = 1e-3 * np.minimum(np.maximum(x, 1e-3), 1.0 - x)
        d1 = (g.a(x + h) - g.a(x - h)) / (2 * h)
        d2 = (g.a(x + h / 2) - g.a(x - h / 2)) / h
        return g.a_over_r(x) + (4 * d2 - d1) / 3.0

    r_small = 1e-4
    out = central(np.maximum(r, r_small))
    if np.any(r < r_small):
        # near the centre 2a/r = B(0) + (2/3) B'(0) r + ..., extrapolated to r = 0,
        # then linear in r up to r_small
        eps = 1e-5
        b0 = 2.0 * (2.0 * g.a_over_r(np.array(eps))) - 2.0 * g.a_over_r(np.array(2 * eps))
        b1 = central(np.array(r_small))
        out = np.where(r < r_small, b0 + (b1 - b0) * r / r_small, out)
    return out


# ---------------------------------------------------------------------------
# Fibers
# ---------------------------------------------------------------------------


def m_of_j(j: int, free_plane: bool = False) -> float:
    return (2 * j - 1) / 2 if free_plane else (2 * j + 1) / 2


def fiber_problem(
    g: TransversalGauge,
    j: int,
    v_s: Optional[Coefficient] = None,
    v_e: Optional[Coefficient] = None,
    free_plane: bool = False,
) -> RadialDiracProblem:
    """sigma_2 D_r + sigma_1 (a(r) - m_j/r) + sigma_3 v_s + v_e on (0,1).

    free_plane=True gives the whole-plane free Dirac fibers (m_j = (2j-1)/2 on (0, inf)).
    """
    m = m_of_j(j, free_plane)
    centrifugal = power_law(-m, 1.0, 0.0, +1)
    v1 = Sum.of(g, centrifugal)
    pot = PotentialSpec1D(v0=v_e or Zero(), v1=v1, v3=v_s or Zero())
    if free_plane:
        from .core import HalfLine

        return RadialDiracProblem(HalfLine(0.0), pot, None, m, f"free plane j={j}")
    return RadialDiracProblem(UNIT, pot, None, m, f"fiber j={j}")


@dataclass(frozen=True)
class FiberRow:
    j: int
    m_j: float
    at0: EndpointClassification
    at1: EndpointClassification
    verdict: EsaVerdict


@dataclass(frozen=True)
class FiberVerdictTable:
    rows: tuple
    aggregate: str
    tag: str
    j_range: int
    failing_fiber: Optional[int]
    heuristic_ok: bool
    note: str = ""

    @property
    def short(self) -> str:
        return {ESA: "ESA", NOT_ESA: "NotESA", INC: "Inconclusive"}[self.aggregate]


def _fiber_order(j_range: int) -> list[int]:
    js = list(range(-j_range, j_range))
    return sorted(js, key=lambda j: (abs(m_of_j(j)), m_of_j(j)))


def partial_wave_verdict(
    B,
    j_range: int = 16,
    v_s: Optional[Coefficient] = None,
    v_e: Optional[Coefficient] = None,
    method: str = "auto",
    delta_min: float = DEFAULT_DELTA_MIN,
    jobs: int = 1,
    margin: Optional[float] = None,
) -> FiberVerdictTable:
    """Classify fibers j in [-j_range, j_range - 1] (ordered by |m_j|)."""
    if j_range < 1:
        raise ValueError("j_range must be >= 1")
    g = transversal_gauge(B)
    order = _fiber_order(j_range)
    kw = {"delta_min": delta_min}
    if margin is not None:
        kw["margin"] = margin

    def one(j):
        p = fiber_problem(g, j, v_s, v_e)
        c0 = endpoint_class(p, "a", method, **kw)
        c1 = endpoint_class(p, "b", method, **kw)
        return FiberRow(j, m_of_j(j), c0, c1, combine_endpoints(c0, c1))

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            rows = list(ex.map(one, order))
    else:
        rows = [one(j) for j in order]
    # heuristic: classes at r = 1 should not change across the outer fibers
    outer = [r.at1.cls for r in rows[-4:]]
    heuristic_ok = len(set(outer)) == 1 and outer[0] != INC
    failing = next((r for r in rows if r.verdict.verdict == NOT_ESA), None)
    if failing is not None:
        tag = "P:CM" if failing.at1.cls == LC else failing.verdict.tag
        return FiberVerdictTable(tuple(rows), NOT_ESA, tag, j_range, failing.j, heuristic_ok,
                                 f"fiber j={failing.j} is limit circle at r={'1' if failing.at1.cls == LC else '0'}")
    undecided = next((r for r in rows if r.verdict.verdict == INC), None)
    if undecided is not None:
        return FiberVerdictTable(tuple(rows), INC, "L:PW", j_range, undecided.j, heuristic_ok,
                                 f"fiber j={undecided.j} undecided")
    if not heuristic_ok:
        return FiberVerdictTable(tuple(rows), INC, "L:PW", j_range, None, False,
                                 "outer fibers disagree at r=1; monotonicity heuristic fails")
    tag = "T:M2" if rows[0].at1.cls == LP else "L:PW"
    return FiberVerdictTable(tuple(rows), ESA, tag, j_range, None, True,
                             f"all {len(rows)} tested fibers limit point at both ends (heuristic beyond the range)")


def fiber_exponent_at_boundary(B, j: int = -1, delta_min: float = DEFAULT_DELTA_MIN) -> float:
    """Fitted growth exponent p of the dominant solution at r = 1 (critical value -1)."""
    from .radial import count_l2_solutions

    p = fiber_problem(transversal_gauge(B), j)
    return count_l2_solutions(p, "b", delta_min=delta_min).dominant.p


def bisect_fiber_threshold(lo: float = 0.25, hi: float = 1.0, tol: float = 0.005, j: int = -1) -> float:
    """Bisection in alpha (PCMFamily) on the sign of p + 1 of fiber j at r = 1."""
    f_lo = fiber_exponent_at_boundary(PCMField(lo), j) + 1.0
    f_hi = fiber_exponent_at_boundary(PCMField(hi), j) + 1.0
    if f_lo * f_hi > 0:
        raise ValueError("no sign change of p + 1 in the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = fiber_exponent_at_boundary(PCMField(mid), j) + 1.0
        if f_mid * f_lo > 0:
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Boundary-field certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TM2Result:
    ok: bool
    sign: int
    min_ratio: float
    sign_change_at: Optional[float] = None


def t_m2_certificate(B, delta0: float = 0.1, n: int = 200, rtol: float = 1e-12) -> TM2Result:
    """|B| >= 1/(2 delta^2) with constant sign on 200 log-spaced points of 0 < 1 - r < delta0."""
    if not 0.0 < delta0 < 1.0:
        raise ValueError("delta0 must lie in (0, 1)")
    d = np.logspace(math.log10(delta0), math.log10(delta0) - 8.0, n)
    vals = np.asarray(B.B_delta(d) if hasattr(B, "B_delta") else B.B(1.0 - d), dtype=float)
    signs = np.sign(vals)
    if np.any(signs == 0) or np.any(signs != signs[0]):
        k = int(np.argmax(signs != signs[0])) if np.any(signs != signs[0]) else int(np.argmax(signs == 0))
        return TM2Result(False, 0, float("nan"), float(1.0 - d[k]))
    ratio = np.abs(vals) * 2.0 * d**2
    return TM2Result(bool(np.all(ratio >= 1.0 - rtol)), int(signs[0]), float(ratio.min()))


# ---------------------------------------------------------------------------
# Cylinder fibers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CylinderFibers:
    xi: float
    gauge: TransversalGauge

    def fiber(self, j: int) -> RadialDiracProblem:
        from .core import Constant

        return fiber_problem(self.gauge, j, v_s=Constant(self.xi) if self.xi else None)

    def verdicts(self, j_range: int = 4, method: str = "auto") -> list:
        out = []
        for j in _fiber_order(j_range):
            p = self.fiber(j)
            out.append((j, combine_endpoints(endpoint_class(p, "a", method), endpoint_class(p, "b", method)).verdict))
        return out


def cylinder_fiber(B, xi: float) -> CylinderFibers:
    """Fibers of s1 (D1 - A1) + s2 (D2 - A2) + s3 xi: xi enters as a bounded v3 term."""
    return CylinderFibers(float(xi), transversal_gauge(B))


# ---------------------------------------------------------------------------
# Supersymmetric factorisation and diamagnetic inequality on a grid
# ---------------------------------------------------------------------------

_CENTRES = ((0.0, 0.0), (0.25, 0.1), (-0.2, 0.3), (0.1, -0.35), (-0.3, -0.2))
_RADII = (0.6, 0.4, 0.35, 0.3, 0.4)
_WAVES = ((0.0, 0.0), (3.0, -1.0), (0.0, 4.0), (-2.0, 2.0), (5.0, 1.0))


def bump_functions(X: np.ndarray, Y: np.ndarray) -> list[np.ndarray]:
    """Five smooth compactly supported functions with supports inside r <= 0.7."""
    out = []
    for (cx, cy), R, (kx, ky) in zip(_CENTRES, _RADII, _WAVES):
        rho2 = ((X - cx) ** 2 + (Y - cy) ** 2) / R**2
        bump = np.where(rho2 < 1.0, (1.0 - rho2) ** 8, 0.0)
        out.append(bump * np.exp(1j * (kx * X + ky * Y)))
    return out


def _grid(h: float, half: float = 0.75):
    n = int(round(half / h))
    x = np.arange(-n, n + 1) * h
    X, Y = np.meshgrid(x, x, indexing="ij")
    return X, Y


_R_CLIP = 0.9  # test functions live in r <= 0.7; the gauge is not needed beyond this


def _potential_components(g: TransversalGauge, X, Y):
    r = np.hypot(X, Y)
    inside = r < _R_CLIP
    aor = np.where(inside, g.a_over_r(np.minimum(r, _R_CLIP)), 0.0)
    return -Y * aor, X * aor  # A1, A2


def _field_on_grid(g: TransversalGauge, X, Y):
    r = np.hypot(X, Y)
    return np.where(r < _R_CLIP, np.asarray(g.B(np.minimum(r, _R_CLIP)), dtype=float), 0.0)


def _cdiff(f, h, axis):
    out = np.zeros_like(f)
    sl = [slice(None)] * 2
    sp, sm, sc = list(sl), list(sl), list(sl)
    sp[axis], sm[axis], sc[axis] = slice(2, None), slice(None, -2), slice(1, -1)
    out[tuple(sc)] = (f[tuple(sp)] - f[tuple(sm)]) / (2 * h)
    return out


def _Dpm(f, A1, A2, h, sign):
    """D_pm f = (D1 - A1) f +- i (D2 - A2) f with D = -i d (centred differences)."""
    P1 = -1j * _cdiff(f, h, 0) - A1 * f
    P2 = -1j * _cdiff(f, h, 1) - A2 * f
    return P1 + sign * 1j * P2


def _peierls_laplacian(f, g, X, Y, h):
    """(D1 - A1)^2 + (D2 - A2)^2 with link variables exp(-i h A(midpoint))."""
    out = np.zeros_like(f)
    c = f[1:-1, 1:-1]
    # axis 0 (x1)
    Xp, Ym = X[1:-1, 1:-1] + h / 2, Y[1:-1, 1:-1]
    A1p, _ = _potential_components(g, Xp, Ym)
    A1m, _ = _potential_components(g, X[1:-1, 1:-1] - h / 2, Ym)
    t1 = np.exp(-1j * h * A1p) * f[2:, 1:-1] - 2 * c + np.exp(1j * h * A1m) * f[:-2, 1:-1]
    # axis 1 (x2)
    _, A2p = _potential_components(g, X[1:-1, 1:-1], Y[1:-1, 1:-1] + h / 2)
    _, A2m = _potential_components(g, X[1:-1, 1:-1], Y[1:-1, 1:-1] - h / 2)
    t2 = np.exp(-1j * h * A2p) * f[1:-1, 2:] - 2 * c + np.exp(1j * h * A2m) * f[1:-1, :-2]
    out[1:-1, 1:-1] = -(t1 + t2) / h**2
    return out


@dataclass(frozen=True)
class SusyResidual:
    h: float
    plus: float  # max |D_+ D_- f - (Pi^2 + B) f|
    minus: float  # max |D_- D_+ f - (Pi^2 - B) f|


def susy_factorization_residual(g: TransversalGauge, h: float) -> SusyResidual:
    """Compare the composite centred-difference D_-+ D_+- with an independent
    link-variable magnetic Laplacian shifted by -+ B, on five test functions."""
    if h <= 0:
        raise ValueError("grid step must be positive")
    X, Y = _grid(h)
    A1, A2 = _potential_components(g, X, Y)
    Bv = _field_on_grid(g, X, Y)
    inner = (slice(3, -3), slice(3, -3))
    plus = minus = 0.0
    for f in bump_functions(X, Y):
        lap = _peierls_laplacian(f, g, X, Y, h)
        mp = _Dpm(_Dpm(f, A1, A2, h, -1), A1, A2, h, +1)  # D_+ D_-
        pm = _Dpm(_Dpm(f, A1, A2, h, +1), A1, A2, h, -1)  # D_- D_+
        plus = max(plus, float(np.max(np.abs((mp - (lap + Bv * f))[inner]))))
        minus = max(minus, float(np.max(np.abs((pm - (lap - Bv * f))[inner]))))
    return SusyResidual(h, plus, minus)


def susy_convergence(g: TransversalGauge, h0: float = 0.02, levels: int = 4) -> dict:
    res = [susy_factorization_residual(g, h0 / 2**k) for k in range(levels)]
    order_p = [math.log2(a.plus / b.plus) for a, b in zip(res, res[1:])]
    order_m = [math.log2(a.minus / b.minus) for a, b in zip(res, res[1:])]
    return {"residuals": res, "order_plus": order_p, "order_minus": order_m}


@dataclass(frozen=True)
class DiamagneticCheck:
    lhs: float  # |<f, B f>|
    rhs: float  # ||Pi_1 f||^2 + ||Pi_2 f||^2
    holds: bool


def diamagnetic_check(g: TransversalGauge, h: float = 0.005) -> list[DiamagneticCheck]:
    """|<f, B f>| <= ||(D1 - A1) f||^2 + ||(D2 - A2) f||^2 with discrete norms."""
    X, Y = _grid(h)
    Bv = _field_on_grid(g, X, Y)
    out = []
    for f in bump_functions(X, Y):
        A1m, _ = _potential_components(g, X[:-1, :] + h / 2, Y[:-1, :])
        _, A2m = _potential_components(g, X[:, :-1], Y[:, :-1] + h / 2)
        d1 = (np.exp(-1j * h * A1m) * f[1:, :] - f[:-1, :]) / h
        d2 = (np.exp(-1j * h * A2m) * f[:, 1:] - f[:, :-1]) / h
        rhs = (np.sum(np.abs(d1) ** 2) + np.sum(np.abs(d2) ** 2)) * h * h
        lhs = abs(np.sum(np.conj(f) * Bv * f) * h * h)
        out.append(DiamagneticCheck(float(lhs), float(rhs), bool(lhs <= rhs)))
    return out
