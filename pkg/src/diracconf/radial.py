"""Overflow-safe integration of 2x2 radial Dirac systems toward singular endpoints.

The system (s2 D + s1 w1 + s2 v2 + s3 v3 + v0 - zeta) Psi = 0 with D = -i d/dx and
w1 = v1 (angular and magnetic terms are folded into v1 by the fiber builders)
reads Psi' = K(x) Psi with

    K = [[-(w1 + i v2), -(v0 - v3 - zeta)],
         [  v0 + v3 - zeta,  w1 - i v2    ]].

Integration runs in the log-distance variable s = -ln(delta/L). Solutions are
kept as exp(rho) * unit spinor; renormalisation happens at marks spaced 0.1 in s.
Two solutions at once (a frame) are re-orthonormalised by QR at the same marks,
which keeps the subdominant solution resolvable.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy import stats
from scipy.integrate import IntegrationWarning, quad, solve_ivp

from .core import HalfLine, Interval, PotentialSpec1D

log = logging.getLogger(__name__)

DEFAULT_DELTA_MIN = 1e-8
DEFAULT_RTOL = 1e-10
DEFAULT_MARGIN = 0.01  # see README: needed to resolve 0.49/0.51 on the power family
BOUNDARY_BAND = 0.1  # fitted exponent within this of critical -> margin flag
MARK_SPACING = 0.1
FIT_DECADES = 2.0
MIN_FIT_SAMPLES = 16


@dataclass(frozen=True)
class RadialDiracProblem:
    domain: Union[Interval, HalfLine]
    potential: PotentialSpec1D
    zeta: Optional[complex] = None
    m: Optional[float] = None
    label: str = ""

    def shift(self, endpoint: str = "b") -> complex:
        if self.zeta is not None:
            return complex(self.zeta)
        if math.isinf(self.domain.endpoint(endpoint)):
            return 1j
        return 0j if self.potential.v0.is_zero else 1j

    def K(self, x: float, zeta: complex) -> np.ndarray:
        p = self.potential
        v0, w, v2, v3 = float(p.v0(x)), float(p.v1(x)), float(p.v2(x)), float(p.v3(x))
        return np.array(
            [[-(w + 1j * v2), -(v0 - v3 - zeta)], [v0 + v3 - zeta, w - 1j * v2]], dtype=complex
        )

    def is_finite(self, endpoint: str) -> bool:
        return math.isfinite(self.domain.endpoint(endpoint))


# ---------------------------------------------------------------------------
# Charts: x(s), dx/ds, relative distance, log-Jacobian of dx/d(delta)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Chart:
    kind: str  # "a", "b", "inf"
    e: float
    L: float

    @staticmethod
    def make(dom, endpoint: str) -> "_Chart":
        e = dom.endpoint(endpoint)
        if math.isinf(e):
            return _Chart("inf", dom.a, 1.0)
        L = dom.length if isinstance(dom, Interval) else 1.0
        return _Chart(endpoint, e, L)

    def x(self, s: float) -> float:
        if self.kind == "b":
            return self.e - self.L * math.exp(-s)
        if self.kind == "a":
            return self.e + self.L * math.exp(-s)
        th = math.exp(-s)
        return self.e + math.cos(th) / math.sin(th)

    def dxds(self, s: float) -> float:
        if self.kind == "b":
            return self.L * math.exp(-s)
        if self.kind == "a":
            return -self.L * math.exp(-s)
        th = math.exp(-s)
        return th / math.sin(th) ** 2

    def s_of(self, x: float) -> float:
        if self.kind == "b":
            return -math.log((self.e - x) / self.L)
        if self.kind == "a":
            return -math.log((x - self.e) / self.L)
        return -math.log(math.atan2(1.0, x - self.e))

    def logjac(self, s: float) -> float:
        """ln |dx/d(delta)| with delta = exp(-s); zero for finite endpoints."""
        if self.kind == "inf":
            return -2.0 * math.log(math.sin(math.exp(-s)))
        return 0.0


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


@dataclass
class LogAmplitudeTrajectory:
    endpoint: str
    x: np.ndarray
    delta: np.ndarray  # relative distance (or angle for infinity)
    logjac: np.ndarray
    rho: np.ndarray
    u: np.ndarray  # (n, 2) unit spinors
    complete: bool
    delta_min: float
    message: str = ""

    @property
    def status(self) -> str:
        return "Complete" if self.complete else "Incomplete"


@dataclass
class FrameTrajectory:
    endpoint: str
    x: np.ndarray
    delta: np.ndarray
    logjac: np.ndarray
    rho_dom: np.ndarray
    rho_sub: np.ndarray
    max_ortho_defect: float
    complete: bool
    delta_min: float
    message: str = ""


def _march(problem, endpoint, x0, y0, delta_min, rtol, renorm, max_nfev):
    """Shared stepping loop. renorm(y) -> (y_new, increments) is applied at each mark."""
    chart = _Chart.make(problem.domain, endpoint)
    zeta = problem.shift(endpoint)
    ncols = y0.shape[1]
    s0 = chart.s_of(x0)
    s_end = -math.log(delta_min)
    if s0 >= s_end:
        raise ValueError("starting point already inside delta_min of the endpoint")

    def rhs(s, y):
        x = chart.x(s)
        K = problem.K(x, zeta)
        return (K @ y.reshape(2, ncols)).ravel() * chart.dxds(s)

    marks = list(np.arange(s0, s_end, MARK_SPACING)) + [s_end]
    if len(marks) > 1 and marks[-1] - marks[-2] < 1e-9:
        marks.pop(-2)
    y = y0.astype(complex)
    rows = []
    y, inc = renorm(y)
    rows.append((marks[0], inc))
    complete, msg, nfev = True, "", 0
    for s_a, s_b in zip(marks[:-1], marks[1:]):
        try:
            sol = solve_ivp(rhs, (s_a, s_b), y.ravel(), method="RK45", rtol=rtol, atol=rtol * 1e-3,
                            max_step=MARK_SPACING)
        except (FloatingPointError, ValueError, OverflowError) as exc:
            raise RuntimeError(f"coefficient evaluation failed near s={s_a:.3f}: {exc}") from exc
        nfev += sol.nfev
        if sol.status != 0 or not np.all(np.isfinite(sol.y[:, -1])):
            complete, msg = False, f"step-size underflow or non-finite state at s={s_a:.3f}: {sol.message}"
            break
        y, inc = renorm(sol.y[:, -1].reshape(2, ncols))
        rows.append((s_b, inc))
        if nfev > max_nfev:
            complete, msg = False, f"evaluation budget exhausted at s={s_b:.3f}"
            break
    return chart, rows, complete, msg


def integrate_to_endpoint(
    problem: RadialDiracProblem,
    x0: float,
    psi0,
    endpoint: str,
    delta_min: float = DEFAULT_DELTA_MIN,
    rtol: float = DEFAULT_RTOL,
    max_nfev: int = 2_000_000,
) -> LogAmplitudeTrajectory:
    """Integrate one solution from x0 toward the endpoint as (rho, u)."""
    psi0 = np.asarray(psi0, dtype=complex).reshape(2, 1)
    n0 = float(np.linalg.norm(psi0))
    if n0 == 0.0:
        raise ValueError("initial spinor must be non-zero")
    state = {"rho": math.log(n0)}
    psi0 = psi0 / n0
    samples = []

    def renorm(y):
        n = float(np.linalg.norm(y))
        if samples:
            state["rho"] += math.log(n)
        u = y / n
        samples.append((state["rho"], u[:, 0].copy()))
        return u, None

    chart, rows, complete, msg = _march(problem, endpoint, x0, psi0, delta_min, rtol, renorm, max_nfev)
    s = np.array([r[0] for r in rows])
    return LogAmplitudeTrajectory(
        endpoint=endpoint,
        x=np.array([chart.x(v) for v in s]),
        delta=np.exp(-s),
        logjac=np.array([chart.logjac(v) for v in s]),
        rho=np.array([r for r, _ in samples]),
        u=np.array([u for _, u in samples]),
        complete=complete,
        delta_min=delta_min,
        message=msg,
    )


_Y0 = np.array([[0.8, -0.6], [0.6 * np.exp(0.3j), 0.8 * np.exp(0.3j)]], dtype=complex)


def integrate_frame(
    problem: RadialDiracProblem,
    endpoint: str,
    x0: Optional[float] = None,
    delta_min: float = DEFAULT_DELTA_MIN,
    rtol: float = DEFAULT_RTOL,
    max_nfev: int = 2_000_000,
) -> FrameTrajectory:
    """Integrate a generic 2-frame with QR re-orthonormalisation at every mark."""
    if x0 is None:
        x0 = problem.domain.midpoint
    acc = {"dom": 0.0, "sub": 0.0, "defect": 0.0}
    out = []

    def renorm(Y):
        Q, R = np.linalg.qr(Y)
        ph = np.diag(R) / np.abs(np.diag(R))
        Q = Q * ph[None, :]
        if out:
            acc["dom"] += math.log(abs(R[0, 0]))
            acc["sub"] += math.log(abs(R[1, 1]))
        acc["defect"] = max(acc["defect"], float(np.max(np.abs(Q.conj().T @ Q - np.eye(2)))))
        out.append((acc["dom"], acc["sub"]))
        return Q, None

    chart, rows, complete, msg = _march(problem, endpoint, x0, _Y0, delta_min, rtol, renorm, max_nfev)
    s = np.array([r[0] for r in rows])
    return FrameTrajectory(
        endpoint=endpoint,
        x=np.array([chart.x(v) for v in s]),
        delta=np.exp(-s),
        logjac=np.array([chart.logjac(v) for v in s]),
        rho_dom=np.array([a for a, _ in out]),
        rho_sub=np.array([b for _, b in out]),
        max_ortho_defect=acc["defect"],
        complete=complete,
        delta_min=delta_min,
        message=msg,
    )


# ---------------------------------------------------------------------------
# Tail classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailClass:
    verdict: str  # SquareIntegrable | NotSquareIntegrable | Inconclusive
    p: float = float("nan")
    ci: tuple = (float("nan"), float("nan"))
    depth_decades: float = 0.0
    n_samples: int = 0
    margin: float = DEFAULT_MARGIN
    note: str = ""

    @property
    def near_critical(self) -> bool:
        return bool(np.isfinite(self.p) and abs(self.p + 1.0) < BOUNDARY_BAND)


def _classify_tail(delta, y, complete, delta_min, margin, note=""):
    if not complete:
        return TailClass("Inconclusive", margin=margin, note=note or "trajectory incomplete")
    ld = np.log(delta)
    win = ld <= ld[-1] + FIT_DECADES * math.log(10.0)
    n = int(win.sum())
    depth = float((ld[0] - ld[-1]) / math.log(10.0))
    if n < MIN_FIT_SAMPLES:
        return TailClass("Inconclusive", n_samples=n, depth_decades=depth, margin=margin,
                         note=f"only {n} samples in the fit window")
    fit = stats.linregress(ld[win], y[win])
    p = float(fit.slope)
    half = 2.0 * float(fit.stderr)
    if p > -1.0 + margin:
        v = "SquareIntegrable"
    elif p <= -1.0 - margin:
        v = "NotSquareIntegrable"
    else:
        v = "Inconclusive"
        note = note or "fitted exponent inside the borderline margin"
    return TailClass(v, p, (p - half, p + half), depth, n, margin, note)


def tail_l2_class(t: LogAmplitudeTrajectory, margin: float = DEFAULT_MARGIN) -> TailClass:
    """Fit |Psi|^2 ~ delta^p over the last two decades and classify."""
    return _classify_tail(t.delta, 2.0 * t.rho + t.logjac, t.complete, t.delta_min, margin, t.message)


@dataclass(frozen=True)
class L2Count:
    count: int
    dominant: TailClass
    subdominant: TailClass
    inconclusive: bool
    zeta: complex
    max_ortho_defect: float
    note: str = ""


def count_l2_solutions(
    problem: RadialDiracProblem,
    endpoint: str,
    x0: Optional[float] = None,
    delta_min: float = DEFAULT_DELTA_MIN,
    margin: float = DEFAULT_MARGIN,
) -> L2Count:
    """How many of the two solution classes are square-integrable near the endpoint."""
    fr = integrate_frame(problem, endpoint, x0, delta_min)
    dom = _classify_tail(fr.delta, 2.0 * fr.rho_dom + fr.logjac, fr.complete, delta_min, margin, fr.message)
    sub = _classify_tail(fr.delta, 2.0 * fr.rho_sub + fr.logjac, fr.complete, delta_min, margin, fr.message)
    nsi = sum(t.verdict == "NotSquareIntegrable" for t in (dom, sub))
    count = 2 - nsi
    note = ""
    if count == 0:
        # both classes fail; possible only for real zeta; the endpoint is not limit circle
        count, note = 1, "no square-integrable solution at this real spectral shift"
    incon = dom.verdict == "Inconclusive" or sub.verdict == "Inconclusive"
    return L2Count(count, dom, sub, incon, problem.shift(endpoint), fr.max_ortho_defect, note)


# ---------------------------------------------------------------------------
# Divergence of improper integrals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegralResult:
    status: str  # Divergent | Convergent | Inconclusive
    value: float = float("nan")
    log_partials: tuple = ()
    refinements: int = 0
    reason: str = ""


_LOG_BIG = math.log(1e12)


def improper_integral_diverges(
    f: Optional[Callable[[float], float]],
    delta0: float,
    log_f: Optional[Callable[[float], float]] = None,
    n_max: int = 40,
) -> IntegralResult:
    """Decide whether int_0^delta0 f(delta) d delta diverges at delta -> 0.

    f is a function of the distance to the endpoint. log_f may be supplied
    instead to keep huge integrands representable. Truncated integrals I_n run
    to cutoffs delta0 * 2^-n.
    """
    if log_f is None:
        if f is None:
            raise ValueError("need f or log_f")

        def log_f(d):
            v = f(d)
            return math.log(v) if v > 0 else -math.inf

    logI = []
    total = -math.inf
    reason = ""
    for n in range(1, n_max + 1):
        u_hi = math.log(delta0) - (n - 1) * math.log(2.0)
        u_lo = u_hi - math.log(2.0)
        try:
            probe = [log_f(math.exp(u)) + u for u in np.linspace(u_lo, u_hi, 9)]
        except (ValueError, OverflowError, ZeroDivisionError) as exc:
            return IntegralResult("Inconclusive", log_partials=tuple(logI), refinements=n - 1,
                                  reason=f"integrand failed at shell {n}: {exc}")
        if any(math.isnan(v) for v in probe):
            return IntegralResult("Inconclusive", log_partials=tuple(logI), refinements=n - 1,
                                  reason=f"nan integrand at shell {n}")
        M = max(probe)
        if M == math.inf:
            return IntegralResult("Divergent", math.inf, tuple(logI), n, "integrand overflow")
        if M == -math.inf:
            shell_log = -math.inf
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", IntegrationWarning)
                q, _ = quad(lambda u: math.exp(log_f(math.exp(u)) + u - M), u_lo, u_hi, limit=100,
                            epsabs=0.0, epsrel=1e-11)
            if not (q >= 0.0 and math.isfinite(q)):
                return IntegralResult("Inconclusive", log_partials=tuple(logI), refinements=n,
                                      reason=f"quadrature failure at shell {n}")
            shell_log = M + math.log(q) if q > 0 else -math.inf
        total = float(np.logaddexp(total, shell_log))
        logI.append(total)
        if total > _LOG_BIG:
            return IntegralResult("Divergent", math.exp(min(total, 700.0)), tuple(logI), n, "I_n > 1e12")

    I = np.exp(np.array(logI))
    # Convergent: relative increments below 1e-8 for 4 consecutive n
    rel = np.diff(I) / np.where(I[1:] > 0, I[1:], 1.0)
    run = 0
    for k, r in enumerate(rel):
        run = run + 1 if r < 1e-8 else 0
        if run >= 4:
            return IntegralResult("Convergent", float(I[-1]), tuple(logI), k + 2, "increments below 1e-8")
    # Divergent: log-log slope over the last 6 refinements
    x = np.arange(n_max - 5, n_max + 1) * math.log(2.0)
    slope = float(np.polyfit(x, np.array(logI[-6:]), 1)[0]) if np.all(np.isfinite(logI[-6:])) else 0.0
    # a positive slope alone is not enough: delta^-a with a slightly below 1 still has one,
    # so the increments must also have stopped decaying
    inc_all = np.diff(I)
    mean_ratio = float((inc_all[-1] / inc_all[-10]) ** (1 / 9)) if inc_all[-10] > 0 else 0.0
    if slope > 0.02 and mean_ratio >= 1.0 - 1e-6:
        return IntegralResult("Divergent", math.inf, tuple(logI), n_max,
                              f"log-log slope {slope:.4f} > 0.02, increment ratio {mean_ratio:.6f}")
    # Convergent: geometric tail of the increments (ratio stable and <= 0.95)
    inc = np.diff(I)[-7:]
    if np.all(inc > 0):
        ratios = inc[1:] / inc[:-1]
        if ratios.max() <= 0.95 and ratios.max() - ratios.min() <= 0.05:
            r = float(ratios[-1])
            return IntegralResult("Convergent", float(I[-1] + inc[-1] * r / (1 - r)), tuple(logI), n_max,
                                  f"geometric increments, ratio {r:.3f}")
    elif np.all(inc == 0):
        return IntegralResult("Convergent", float(I[-1]), tuple(logI), n_max, "increments vanish")
    return IntegralResult("Inconclusive", float(I[-1]), tuple(logI), n_max,
                          reason or f"slope {slope:.4f}, increments neither negligible nor geometric")
