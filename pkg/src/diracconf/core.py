"""Matrix algebra, domains, potential coefficients and scalar-potential primitives.

Units: hbar = c = 1, the mass term is dropped (bounded, irrelevant for
self-adjointness questions).

Coefficients of a 1D Dirac potential are represented by small immutable
objects that know their value, derivative, antiderivative and their leading
behaviour at an endpoint. The leading behaviour (``Asymptotic``) is what the
closed-form rules of the classifier read.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

I2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA1, SIGMA2, SIGMA3)

_Z2 = np.zeros((2, 2), dtype=complex)
I4 = np.eye(4, dtype=complex)
BETA = np.block([[I2, _Z2], [_Z2, -I2]])
ALPHA = tuple(np.block([[_Z2, s], [s, _Z2]]) for s in PAULI)

HERMITIAN_TOL = 1e-12


class HermiticityError(ValueError):
    """Raised when a matrix that must be Hermitian is not."""


def hermitian_defect(H: np.ndarray) -> float:
    H = np.asarray(H)
    return float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0


def require_hermitian(H: np.ndarray, tol: float = HERMITIAN_TOL, what: str = "matrix") -> None:
    d = hermitian_defect(H)
    if d > tol:
        raise HermiticityError(f"{what} is not Hermitian: max |H - H^*| = {d:.3e} > {tol:.1e}")


def pauli_decompose(H: np.ndarray) -> tuple[float, float, float, float]:
    """Return (v0, v1, v2, v3) with H = v0*1 + sum v_j sigma_j."""
    H = np.asarray(H, dtype=complex)
    if H.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {H.shape}")
    require_hermitian(H, what="input to pauli_decompose")
    v0 = 0.5 * np.trace(H).real
    v = [0.5 * np.trace(s @ H).real for s in PAULI]
    return (float(v0), float(v[0]), float(v[1]), float(v[2]))


def pauli_compose(v0: float, v1: float, v2: float, v3: float) -> np.ndarray:
    return v0 * I2 + v1 * SIGMA1 + v2 * SIGMA2 + v3 * SIGMA3


def anticommutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B + B @ A


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    a: float
    b: float
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"Interval needs a < b, got ({self.a}, {self.b})")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def endpoint(self, which: str) -> float:
        return {"a": self.a, "b": self.b}[which]

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        return np.minimum(x - self.a, self.b - x)

    def distance_gradient(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x - self.a <= self.b - x, 1.0, -1.0)

    def layer_points(self, delta: float, n_ang: int = 2) -> np.ndarray:
        return np.array([[self.a + delta], [self.b - delta]])


@dataclass(frozen=True)
class HalfLine:
    """[a, +inf); the finite boundary point is a, infinity is an endpoint but not boundary."""

    a: float
    dim: int = field(default=1, init=False)
    b: float = field(default=math.inf, init=False)

    @property
    def midpoint(self) -> float:
        return self.a + 1.0

    def endpoint(self, which: str) -> float:
        return {"a": self.a, "b": math.inf}[which]

    def distance(self, x):
        return np.asarray(x, dtype=float) - self.a

    def distance_gradient(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def layer_points(self, delta: float, n_ang: int = 2) -> np.ndarray:
        return np.array([[self.a + delta]])


def _radii(x):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return x, np.linalg.norm(x, axis=1)


def _circle(radius: float, n: int) -> np.ndarray:
    t = 2 * np.pi * (np.arange(n) + 0.5) / n
    return radius * np.column_stack([np.cos(t), np.sin(t)])


def _sphere(radius: float, n: int) -> np.ndarray:
    # Fibonacci lattice
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    phi = np.pi * (1 + 5 ** 0.5) * k
    s = np.sqrt(1 - z * z)
    return radius * np.column_stack([s * np.cos(phi), s * np.sin(phi), z])


@dataclass(frozen=True)
class UnitDisk:
    dim: int = field(default=2, init=False)

    def distance(self, x):
        _, r = _radii(x)
        return 1.0 - r

    def distance_gradient(self, x):
        x, r = _radii(x)
        return -x / r[:, None]

    def layer_points(self, delta: float, n_ang: int = 32) -> np.ndarray:
        return _circle(1.0 - delta, n_ang)


@dataclass(frozen=True)
class PuncturedUnitDisk:
    dim: int = field(default=2, init=False)

    def distance(self, x):
        _, r = _radii(x)
        return np.minimum(r, 1.0 - r)

    def distance_gradient(self, x):
        x, r = _radii(x)
        u = x / r[:, None]
        return np.where((r <= 1.0 - r)[:, None], u, -u)

    def layer_points(self, delta: float, n_ang: int = 32) -> np.ndarray:
        half = max(n_ang // 2, 1)
        return np.vstack([_circle(1.0 - delta, half), _circle(delta, half)])


@dataclass(frozen=True)
class Annulus:
    r0: float
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not 0.0 < self.r0 < 1.0:
            raise ValueError(f"Annulus needs 0 < r0 < 1, got {self.r0}")

    def distance(self, x):
        _, r = _radii(x)
        return np.minimum(r - self.r0, 1.0 - r)

    def distance_gradient(self, x):
        x, r = _radii(x)
        u = x / r[:, None]
        return np.where((r - self.r0 <= 1.0 - r)[:, None], u, -u)

    def layer_points(self, delta: float, n_ang: int = 32) -> np.ndarray:
        half = max(n_ang // 2, 1)
        return np.vstack([_circle(1.0 - delta, half), _circle(self.r0 + delta, half)])


@dataclass(frozen=True)
class UnitBall:
    """Unit ball in R^3 (needed for the 3D scalar-potential certificates)."""

    dim: int = field(default=3, init=False)

    def distance(self, x):
        _, r = _radii(x)
        return 1.0 - r

    def distance_gradient(self, x):
        x, r = _radii(x)
        return -x / r[:, None]

    def layer_points(self, delta: float, n_ang: int = 32) -> np.ndarray:
        return _sphere(1.0 - delta, n_ang)


# ---------------------------------------------------------------------------
# Profiles: functions of the distance t > 0 to an endpoint
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Asymptotic:
    """Leading behaviour lam * t**(-order) of a coefficient as t -> 0.

    order <= 0 with bounded=True means the coefficient stays bounded.
    order < 1 terms are integrable remainders for the closed-form rules.
    near_critical marks the log-corrected family on which we refuse to guess.
    """

    order: float
    coeff: float
    bounded: bool = False
    near_critical: bool = False

    @staticmethod
    def bounded_() -> "Asymptotic":
        return Asymptotic(0.0, 0.0, bounded=True)

    def singular_part(self, order: float) -> float:
        """Coefficient at exactly the given order (0 if this term is weaker)."""
        return self.coeff if (not self.bounded and self.order == order) else 0.0


def combine_asymptotics(parts: Sequence[Optional[Asymptotic]]) -> Optional[Asymptotic]:
    if any(p is None for p in parts):
        return None
    if any(p.near_critical for p in parts):
        return Asymptotic(1.0, 0.5, near_critical=True)
    unb = [p for p in parts if not p.bounded]
    if not unb:
        return Asymptotic.bounded_()
    top = max(p.order for p in unb)
    coeff = sum(p.coeff for p in unb if p.order == top)
    if coeff == 0.0 and top > 0:
        lower = [p for p in unb if p.order < top]
        if not lower:
            return Asymptotic.bounded_()
        return combine_asymptotics(lower)
    return Asymptotic(top, coeff)


PROFILE_KINDS = ("constant", "power", "log", "sin_inv", "osc_log", "ell_osc", "one_plus", "log_corrected")


@dataclass(frozen=True)
class Profile:
    """Closed-form function of the distance t to a boundary point.

    kinds and parameters:
      constant(c)             c
      power(lam, alpha)       lam * t**-alpha
      log(lam)                lam * ln(1/t)
      sin_inv()               sin(1/t) / t**2
      osc_log(lam)            lam * (2 + sin ln t) / t
      ell_osc()               2 + sin(ln t)
      one_plus()              1 + t
      log_corrected(lam, c)   (lam/t) * (1 + c / ln(1/t)),  t < 1
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}; expected one of {PROFILE_KINDS}")
        if self.kind == "power" and self.params[1] < 0:
            raise ValueError("power profile needs alpha >= 0")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        k, p = self.kind, self.params
        if k == "constant":
            return np.full_like(t, p[0])
        if k == "power":
            return p[0] * t ** (-p[1])
        if k == "log":
            return p[0] * np.log(1.0 / t)
        if k == "sin_inv":
            return np.sin(1.0 / t) / t**2
        if k == "osc_log":
            return p[0] * (2.0 + np.sin(np.log(t))) / t
        if k == "ell_osc":
            return 2.0 + np.sin(np.log(t))
        if k == "one_plus":
            return 1.0 + t
        lam, c = p
        return (lam / t) * (1.0 + c / np.log(1.0 / t))

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        k, p = self.kind, self.params
        if k == "constant":
            return np.zeros_like(t)
        if k == "power":
            return -p[1] * p[0] * t ** (-p[1] - 1.0)
        if k == "log":
            return -p[0] / t
        if k == "sin_inv":
            return -np.cos(1.0 / t) / t**4 - 2.0 * np.sin(1.0 / t) / t**3
        if k == "osc_log":
            u = np.log(t)
            return p[0] * (np.cos(u) - 2.0 - np.sin(u)) / t**2
        if k == "ell_osc":
            return np.cos(np.log(t)) / t
        if k == "one_plus":
            return np.ones_like(t)
        lam, c = p
        L = np.log(1.0 / t)
        return -lam / t**2 * (1.0 + c / L) + lam * c / (t * L) ** 2

    def antideriv(self, t):
        """Some F with dF/dt = value."""
        t = np.asarray(t, dtype=float)
        k, p = self.kind, self.params
        if k == "constant":
            return p[0] * t
        if k == "power":
            lam, a = p
            return lam * np.log(t) if a == 1.0 else lam * t ** (1.0 - a) / (1.0 - a)
        if k == "log":
            return p[0] * (t - t * np.log(t))
        if k == "sin_inv":
            return np.cos(1.0 / t)
        if k == "osc_log":
            u = np.log(t)
            return p[0] * (2.0 * u - np.cos(u))
        if k == "ell_osc":
            u = np.log(t)
            return 2.0 * t + 0.5 * t * (np.sin(u) - np.cos(u))
        if k == "one_plus":
            return t + 0.5 * t * t
        lam, c = p
        return lam * np.log(t) - lam * c * np.log(np.abs(np.log(t)))

    def asymptotics(self) -> Optional[Asymptotic]:
        k, p = self.kind, self.params
        if k in ("constant", "ell_osc", "one_plus"):
            return Asymptotic.bounded_()
        if k == "power":
            lam, a = p
            if a == 0.0 or lam == 0.0:
                return Asymptotic.bounded_()
            return Asymptotic(a, lam)
        if k == "log":
            return Asymptotic(0.0, p[0]) if p[0] != 0.0 else Asymptotic.bounded_()
        if k == "log_corrected":
            return Asymptotic(1.0, p[0], near_critical=True)
        return None  # oscillating families: no closed-form rule


# ---------------------------------------------------------------------------
# 1D coefficients
# ---------------------------------------------------------------------------


class Coefficient:
    """A real coefficient function on an interval."""

    def __call__(self, x):
        raise NotImplementedError

    def derivative(self, x):
        raise NotImplementedError

    def integral(self, x0: float, x1: float) -> float:
        val, _ = quad(lambda s: float(self(s)), x0, x1, limit=200, epsabs=1e-13, epsrel=1e-12)
        return val

    def asymptotics(self, endpoint: float) -> Optional[Asymptotic]:
        return None

    @property
    def is_zero(self) -> bool:
        return False

    def __add__(self, other: "Coefficient") -> "Coefficient":
        return Sum.of(self, other)


@dataclass(frozen=True)
class Zero(Coefficient):
    def __call__(self, x):
        return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0

    def derivative(self, x):
        return self(x)

    def integral(self, x0, x1):
        return 0.0

    def asymptotics(self, endpoint):
        return Asymptotic.bounded_()

    @property
    def is_zero(self):
        return True


@dataclass(frozen=True)
class Constant(Coefficient):
    c: float

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.c) if np.ndim(x) else float(self.c)

    def derivative(self, x):
        return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0

    def integral(self, x0, x1):
        return self.c * (x1 - x0)

    def asymptotics(self, endpoint):
        return Asymptotic.bounded_()

    @property
    def is_zero(self):
        return self.c == 0.0


@dataclass(frozen=True)
class AtEndpoint(Coefficient):
    """profile(t) with t the distance to a chosen point e; side=+1 if e is a left
    endpoint (t = x - e), side=-1 if e is a right endpoint (t = e - x).

    The profile expression is used on the whole interval, which is the smooth
    interior continuation. delta0 is the declared matching radius.
    """

    profile: Profile
    e: float
    side: int
    delta0: float = 0.1

    def _t(self, x):
        return self.side * (np.asarray(x, dtype=float) - self.e)

    def __call__(self, x):
        v = self.profile.value(self._t(x))
        return float(v) if np.ndim(v) == 0 else v

    def derivative(self, x):
        v = self.side * self.profile.deriv(self._t(x))
        return float(v) if np.ndim(v) == 0 else v

    def integral(self, x0, x1):
        F = self.profile.antideriv
        return float(self.side * (F(self._t(x1)) - F(self._t(x0))))

    def asymptotics(self, endpoint):
        if endpoint == self.e:
            return self.profile.asymptotics()
        if math.isinf(endpoint):
            if self.profile.kind in ("constant",):
                return Asymptotic.bounded_()
            if self.profile.kind == "power" and self.profile.params[1] >= 0:
                return Asymptotic.bounded_()
            return None
        return Asymptotic.bounded_()


def power_law(lam: float, alpha: float, e: float, side: int, delta0: float = 0.1) -> AtEndpoint:
    """lam / t**alpha near the point e (PowerLawAtEndpoint)."""
    if alpha < 0:
        raise ValueError("PowerLawAtEndpoint needs alpha >= 0")
    if delta0 <= 0:
        raise ValueError("matching radius delta0 must be positive")
    return AtEndpoint(Profile("power", (float(lam), float(alpha))), float(e), int(side), float(delta0))


def closed_form(kind: str, params: tuple, e: float, side: int) -> AtEndpoint:
    return AtEndpoint(Profile(kind, tuple(float(p) for p in params)), float(e), int(side))


def power_both_ends(lam: float, dom: Interval, alpha: float = 1.0) -> Coefficient:
    """lam/(x-a)^alpha + lam/(b-x)^alpha: behaves like lam/delta^alpha at both ends."""
    if lam == 0.0:
        return Zero()
    return Sum.of(power_law(lam, alpha, dom.a, +1), power_law(lam, alpha, dom.b, -1))


@dataclass(frozen=True)
class Fourier(Coefficient):
    """Bounded trigonometric sum c0 + sum A_k sin(w_k x + p_k)."""

    c0: float
    amps: tuple
    freqs: tuple
    phases: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = self.c0 + sum(A * np.sin(w * x + p) for A, w, p in zip(self.amps, self.freqs, self.phases))
        return float(v) if np.ndim(v) == 0 else v

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        v = sum(A * w * np.cos(w * x + p) for A, w, p in zip(self.amps, self.freqs, self.phases)) + 0.0 * x
        return float(v) if np.ndim(v) == 0 else v

    def integral(self, x0, x1):
        s = self.c0 * (x1 - x0)
        for A, w, p in zip(self.amps, self.freqs, self.phases):
            s += -A / w * (math.cos(w * x1 + p) - math.cos(w * x0 + p))
        return s

    def asymptotics(self, endpoint):
        return Asymptotic.bounded_() if not math.isinf(endpoint) else None

    @property
    def is_zero(self):
        return self.c0 == 0.0 and all(A == 0.0 for A in self.amps)


class Tabulated(Coefficient):
    """Cubic interpolation of tabulated values; no closed-form asymptotics."""

    def __init__(self, grid: Sequence[float], values: Sequence[float]):
        g = np.asarray(grid, dtype=float)
        v = np.asarray(values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 4:
            raise ValueError("Tabulated needs matching 1D grid/values with at least 4 points")
        if not np.all(np.diff(g) > 0):
            raise ValueError("Tabulated grid must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("Tabulated values must be finite")
        self.grid, self.values = g, v
        self._spl = CubicSpline(g, v)
        self._anti = self._spl.antiderivative()

    def __call__(self, x):
        v = self._spl(x)
        return float(v) if np.ndim(v) == 0 else v

    def derivative(self, x):
        v = self._spl(x, 1)
        return float(v) if np.ndim(v) == 0 else v

    def integral(self, x0, x1):
        return float(self._anti(x1) - self._anti(x0))

    def asymptotics(self, endpoint):
        return None

    def __repr__(self):
        return f"Tabulated(n={self.grid.size}, range=[{self.grid[0]}, {self.grid[-1]}])"


class Callable1D(Coefficient):
    """Arbitrary user callable; integrals by adaptive quadrature, derivative by central differences."""

    def __init__(self, f: Callable[[float], float], name: str = "callable"):
        self.f, self.name = f, name

    def __call__(self, x):
        if np.ndim(x):
            return np.array([self.f(float(s)) for s in np.ravel(x)]).reshape(np.shape(x))
        return float(self.f(float(x)))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        h = 1e-6 * np.maximum(np.abs(x), 1.0)
        return (self(x + h) - self(x - h)) / (2 * h)

    def __repr__(self):
        return f"Callable1D({self.name})"


@dataclass(frozen=True)
class Sum(Coefficient):
    terms: tuple

    @staticmethod
    def of(*terms: Coefficient) -> Coefficient:
        flat = []
        for t in terms:
            if isinstance(t, Sum):
                flat.extend(t.terms)
            elif not t.is_zero:
                flat.append(t)
        if not flat:
            return Zero()
        if len(flat) == 1:
            return flat[0]
        return Sum(tuple(flat))

    def __call__(self, x):
        return sum(t(x) for t in self.terms)

    def derivative(self, x):
        return sum(t.derivative(x) for t in self.terms)

    def integral(self, x0, x1):
        return sum(t.integral(x0, x1) for t in self.terms)

    def asymptotics(self, endpoint):
        return combine_asymptotics([t.asymptotics(endpoint) for t in self.terms])


@dataclass(frozen=True)
class PotentialSpec1D:
    """Pauli-basis coefficients of V = v0*1 + v1*s1 + v2*s2 + v3*s3."""

    v0: Coefficient = field(default_factory=Zero)
    v1: Coefficient = field(default_factory=Zero)
    v2: Coefficient = field(default_factory=Zero)
    v3: Coefficient = field(default_factory=Zero)

    def matrix(self, x: float) -> np.ndarray:
        return pauli_compose(self.v0(x), self.v1(x), self.v2(x), self.v3(x))


@dataclass(frozen=True)
class GaugePhase:
    """phi(x) = integral of v2 from x_base to x."""

    v2: Coefficient
    x_base: float

    def __call__(self, x):
        if np.ndim(x):
            return np.array([self.v2.integral(self.x_base, float(s)) for s in np.ravel(x)]).reshape(np.shape(x))
        return self.v2.integral(self.x_base, float(x))


def gauge_remove_v2(p: PotentialSpec1D, dom: Interval, n_check: int = 64) -> tuple[PotentialSpec1D, GaugePhase]:
    """Remove the sigma_2 v2 term by the phase exp(-i phi), phi' = v2.

    The phase is anchored at a when v2 is integrable there, otherwise at the midpoint.
    """
    if p.v2.is_zero:
        return p, GaugePhase(Zero(), dom.a if math.isfinite(dom.a) else 0.0)
    hi = dom.b if math.isfinite(dom.b) else dom.a + 10.0
    xs = np.linspace(dom.a, hi, n_check + 2)[1:-1]
    vals = np.asarray(p.v2(xs), dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = xs[~np.isfinite(vals)][0]
        raise ValueError(f"v2 is not locally integrable: non-finite value at interior point x = {bad:g}")
    asy = p.v2.asymptotics(dom.a)
    base = dom.a if (asy is not None and (asy.bounded or asy.order < 1)) else dom.midpoint
    return PotentialSpec1D(p.v0, p.v1, Zero(), p.v3), GaugePhase(p.v2, base)


# ---------------------------------------------------------------------------
# Dirac coefficients in d dimensions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiracCoefficients:
    """D = sum_j A^j D_j + V(x); A^j constant Hermitian.

    V is a callable x -> (k,k) matrix; dV (optional) returns the d partial
    derivatives as a (d,k,k) array.
    """

    d: int
    A: tuple
    V: Callable[[np.ndarray], np.ndarray]
    dV: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def k(self) -> int:
        return self.A[0].shape[0]

    def gradV(self, x: np.ndarray, h: Optional[float] = None) -> np.ndarray:
        if self.dV is not None:
            return np.asarray(self.dV(x))
        x = np.asarray(x, dtype=float)
        step = h if h is not None else 1e-6
        out = []
        for j in range(self.d):
            e = np.zeros(self.d)
            e[j] = step
            out.append((self.V(x + e) - self.V(x - e)) / (2 * step))
        return np.array(out)


def dirac_matrices(d: int) -> tuple:
    """Built-in kinetic matrices: d=1 (sigma_2), d=2 (sigma_1, sigma_2), d=3 (alpha_1..3)."""
    if d == 1:
        return (SIGMA2,)
    if d == 2:
        return (SIGMA1, SIGMA2)
    if d == 3:
        return ALPHA
    raise ValueError(f"dimension must be 1, 2 or 3, got {d}")


def scalar_matrix(d: int) -> np.ndarray:
    """The matrix anticommuting with all kinetic matrices: sigma_1 (d=1), sigma_3 (d=2), beta (d=3)."""
    return {1: SIGMA1, 2: SIGMA3, 3: BETA}[d]


def anticommutation_defect(mats: Sequence[np.ndarray]) -> float:
    """max || {M_i, M_j} - 2 delta_ij || over the given set."""
    worst = 0.0
    n = mats[0].shape[0]
    for i, Mi in enumerate(mats):
        for j, Mj in enumerate(mats):
            target = 2 * np.eye(n) if i == j else np.zeros((n, n))
            worst = max(worst, float(np.max(np.abs(anticommutator(Mi, Mj) - target))))
    return worst


def is_scalar_potential(c: DiracCoefficients, samples: Sequence) -> tuple[bool, float]:
    """True iff max_j,x ||A^j V(x) + V(x) A^j|| <= 1e-12 (spectral norm)."""
    samples = list(samples)
    if not samples:
        raise ValueError("is_scalar_potential needs at least one sample point")
    worst = 0.0
    for x in samples:
        Vx = np.asarray(c.V(np.asarray(x, dtype=float)))
        for Aj in c.A:
            worst = max(worst, float(np.linalg.norm(anticommutator(Aj, Vx), 2)))
    return worst <= HERMITIAN_TOL, worst


def velocity_matrix(c: DiracCoefficients, x=None) -> np.ndarray:
    """M_jk = Tr(A^j A^k); constant for the built-in constructors."""
    return np.array([[np.trace(Aj @ Ak).real for Ak in c.A] for Aj in c.A])
