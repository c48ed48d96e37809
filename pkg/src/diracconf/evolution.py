"""Crank-Nicolson evolution of radial Dirac fibers on (0, 1).

The fiber sigma_2 D_r + v_0 + sigma_1 v_1 + sigma_3 v_3 is discretised on a
uniform grid [delta_cut, 1 - delta_cut] with the antisymmetric centred
difference for d/dr, which makes the 2N x 2N matrix real symmetric. The rows at
the two grid ends can carry an extra Hermitian wall term; different walls model
different boundary conditions, which only matter when the wave reaches the cut.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

log = logging.getLogger(__name__)

BAND = 0.01  # boundary band delta < BAND
CUT_CELLS = 2  # cells next to the cut used for the local amplitude
WALLS = ("truncate", "mass", "mass_neg", "phase")


class EvolutionError(RuntimeError):
    def __init__(self, step: int, msg: str):
        super().__init__(f"step {step}: {msg}")
        self.step = step


def _as_array_fn(v) -> Optional[Callable[[np.ndarray], np.ndarray]]:
    if v is None:
        return None
    if hasattr(v, "is_zero") and v.is_zero:
        return None
    return lambda r: np.asarray(v(r), dtype=float) * np.ones_like(r)


def inverse_distance_both_ends(lam: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """lam / min(r, 1 - r)."""
    return lambda r: lam / np.minimum(r, 1.0 - r)


@dataclass
class DiscretizedFiber:
    """2N x 2N Hamiltonian [[v0+v3, -Delta + v1], [Delta + v1, v0-v3]] with optional end-cell walls.

    wall: 'truncate' (no extra term), 'mass' (+kappa sigma_3), 'mass_neg' (-kappa sigma_3),
    'phase' (+kappa sigma_1), kappa defaulting to 1/dr.
    """

    v0: Optional[Callable] = None
    v1: Optional[Callable] = None
    v3: Optional[Callable] = None
    N: int = 4096
    delta_cut: float = 1e-4
    wall: str = "truncate"
    kappa: Optional[float] = None
    label: str = ""
    r: np.ndarray = field(init=False, repr=False)
    dr: float = field(init=False)
    H: sp.csr_matrix = field(init=False, repr=False)

    def __post_init__(self):
        if self.wall not in WALLS:
            raise ValueError(f"unknown wall {self.wall!r}; expected one of {WALLS}")
        if not 0.0 < self.delta_cut < 0.1:
            raise ValueError("delta_cut must lie in (0, 0.1)")
        if self.N < 16:
            raise ValueError("need at least 16 grid points")
        self.r = np.linspace(self.delta_cut, 1.0 - self.delta_cut, self.N)
        self.dr = float(self.r[1] - self.r[0])
        self.H = self._assemble()

    def _pot(self, fn) -> np.ndarray:
        f = _as_array_fn(fn)
        return np.zeros(self.N) if f is None else f(self.r)

    def _assemble(self) -> sp.csr_matrix:
        n = self.N
        off = np.full(n - 1, 1.0 / (2 * self.dr))
        Delta = sp.diags([off, -off], [1, -1], shape=(n, n), format="csr")
        p0, p1, p3 = self._pot(self.v0), self._pot(self.v1), self._pot(self.v3)
        d11, d22, d12 = p0 + p3, p0 - p3, p1.copy()
        if self.wall != "truncate":
            k = self.kappa if self.kappa is not None else 1.0 / self.dr
            for i in (0, n - 1):
                if self.wall == "mass":
                    d11[i] += k
                    d22[i] -= k
                elif self.wall == "mass_neg":
                    d11[i] -= k
                    d22[i] += k
                else:
                    d12[i] += k
        H = sp.bmat(
            [[sp.diags(d11), -Delta + sp.diags(d12)], [Delta + sp.diags(d12), sp.diags(d22)]],
            format="csr",
        )
        return H

    @property
    def delta(self) -> np.ndarray:
        return np.minimum(self.r, 1.0 - self.r)

    def hermitian_defect(self) -> float:
        D = self.H - self.H.conj().T
        return float(abs(D).max()) if D.nnz else 0.0

    def refined(self) -> "DiscretizedFiber":
        return DiscretizedFiber(self.v0, self.v1, self.v3, 2 * self.N, self.delta_cut / 2, self.wall, self.kappa, self.label)

    def with_wall(self, wall: str, kappa: Optional[float] = None) -> "DiscretizedFiber":
        return DiscretizedFiber(self.v0, self.v1, self.v3, self.N, self.delta_cut, wall, kappa, self.label)

    def norm2(self, psi: np.ndarray) -> float:
        return float(np.sum(np.abs(psi) ** 2) * self.dr)

    def on_grid(self, psi_fn: Callable[[np.ndarray], tuple]) -> np.ndarray:
        u, w = psi_fn(self.r)
        return np.concatenate([np.asarray(u, dtype=complex), np.asarray(w, dtype=complex)])


def fiber_from_problem(problem, N: int = 4096, delta_cut: float = 1e-4, wall: str = "truncate") -> DiscretizedFiber:
    """Discretise a RadialDiracProblem on (0, 1) (v2 must be gauged away first)."""
    p = problem.potential
    if not p.v2.is_zero:
        raise ValueError("remove v2 by the gauge transformation before discretising")
    if problem.domain.a != 0.0 or problem.domain.b != 1.0:
        raise ValueError("the evolution grid lives on (0, 1)")
    return DiscretizedFiber(p.v0, p.v1, p.v3, N, delta_cut, wall, label=problem.label)


def gaussian_packet(f: DiscretizedFiber, centre: float = 0.5, width: float = 0.05, component: int = 0) -> np.ndarray:
    """Unit-norm Gaussian in one spinor component, cut to zero where delta <= 0.1.

    width is the standard deviation of the probability density |psi|^2.
    """
    g = np.exp(-((f.r - centre) ** 2) / (4 * width**2)) * (f.delta > 0.1)
    psi = np.zeros(2 * f.N, dtype=complex)
    psi[component * f.N:(component + 1) * f.N] = g
    return psi / np.sqrt(f.norm2(psi))


@dataclass
class EvolutionDiagnostics:
    times: np.ndarray
    norm: np.ndarray
    band_prob: np.ndarray
    flux_left: np.ndarray  # sigma_2 current 2 Im(conj(u) w) at delta = BAND, left end
    flux_right: np.ndarray
    cut_amp: np.ndarray  # max |psi| over the cells next to the cut
    max_step_drift: float
    steps: int
    dt: float
    states: Optional[list] = None

    COLUMNS = ("t", "norm", "band_prob", "flux_left", "flux_right", "cut_amp")

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norm - self.norm[0])))

    def rows(self):
        for row in zip(self.times, self.norm, self.band_prob, self.flux_left, self.flux_right, self.cut_amp):
            yield [float(x) for x in row]

    def to_csv(self, path_or_buf=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for row in self.rows():
            w.writerow([f"{x:.12e}" for x in row])
        text = buf.getvalue()
        if path_or_buf is not None:
            if hasattr(path_or_buf, "write"):
                path_or_buf.write(text)
            else:
                with open(path_or_buf, "w", newline="") as fh:
                    fh.write(text)
        return text


def _diagnose(f: DiscretizedFiber, psi: np.ndarray, band_mask, iL: int, iR: int):
    n = f.N
    u, w = psi[:n], psi[n:]
    dens = np.abs(u) ** 2 + np.abs(w) ** 2
    cur = 2.0 * np.imag(np.conj(u) * w)
    amp = np.sqrt(np.concatenate([dens[:CUT_CELLS], dens[-CUT_CELLS:]]))
    return (
        float(np.sum(dens) * f.dr),
        float(np.sum(dens[band_mask]) * f.dr),
        float(cur[iL]),
        float(cur[iR]),
        float(np.max(amp)),
    )


def crank_nicolson_evolve(
    f: DiscretizedFiber,
    psi0: Optional[np.ndarray] = None,
    T: float = 1.0,
    dt: float = 1e-3,
    sample_every: float = 0.01,
    keep_states: bool = False,
) -> EvolutionDiagnostics:
    """(1 + i dt H/2) psi+ = (1 - i dt H/2) psi with one sparse LU factorisation."""
    if dt <= 0 or dt > 1e-3:
        raise ValueError("dt must lie in (0, 1e-3]")
    if T <= 0:
        raise ValueError("T must be positive")
    psi = gaussian_packet(f) if psi0 is None else np.asarray(psi0, dtype=complex).copy()
    if psi.shape != (2 * f.N,):
        raise ValueError(f"initial state must have shape ({2 * f.N},)")
    if abs(f.norm2(psi) - 1.0) > 1e-10:
        raise ValueError("initial state must have unit norm")
    near = np.concatenate([f.delta <= 0.1] * 2)
    if np.sum(np.abs(psi[near]) ** 2) * f.dr > 1e-12:
        raise ValueError("initial state must be supported in delta > 0.1")

    n2 = 2 * f.N
    I = sp.identity(n2, dtype=complex, format="csc")
    Hc = f.H.astype(complex).tocsc()
    try:
        lu = splu((I + 0.5j * dt * Hc).tocsc())
    except RuntimeError as exc:
        raise EvolutionError(0, f"factorisation failed: {exc}") from exc
    Bm = (I - 0.5j * dt * Hc).tocsr()

    nsteps = int(round(T / dt))
    every = max(1, int(round(sample_every / dt)))
    band_mask = f.delta < BAND
    iL = int(np.searchsorted(f.r, BAND))
    iR = int(np.searchsorted(f.r, 1.0 - BAND)) - 1

    rec = [(0.0,) + _diagnose(f, psi, band_mask, iL, iR)]
    states = [psi.copy()] if keep_states else None
    prev = f.norm2(psi)
    drift = 0.0
    for k in range(1, nsteps + 1):
        psi = lu.solve(Bm @ psi)
        if not np.all(np.isfinite(psi)):
            raise EvolutionError(k, "non-finite state after linear solve")
        nrm = float(np.vdot(psi, psi).real * f.dr)
        drift = max(drift, abs(nrm - prev))
        prev = nrm
        if k % every == 0:
            rec.append((k * dt,) + _diagnose(f, psi, band_mask, iL, iR))
            if keep_states:
                states.append(psi.copy())
    arr = np.array(rec)
    return EvolutionDiagnostics(
        times=arr[:, 0],
        norm=arr[:, 1],
        band_prob=arr[:, 2],
        flux_left=arr[:, 3],
        flux_right=arr[:, 4],
        cut_amp=arr[:, 5],
        max_step_drift=drift,
        steps=nsteps,
        dt=dt,
        states=states,
    )


@dataclass
class ProbeResult:
    divergence: float  # max over sampled times of ||psi_A - psi_B||
    times: np.ndarray
    distance: np.ndarray
    walls: tuple

    def to_dict(self) -> dict:
        return {"divergence": self.divergence, "walls": list(self.walls), "T": float(self.times[-1])}


def extension_dependence_probe(
    f: DiscretizedFiber,
    walls: Sequence[str] = ("truncate", "mass"),
    psi0: Optional[np.ndarray] = None,
    T: float = 3.0,
    dt: float = 1e-3,
    sample_every: float = 0.01,
) -> ProbeResult:
    """Evolve the same data under two wall terms and report how far the states drift apart."""
    if len(walls) != 2 or walls[0] == walls[1]:
        raise ValueError("need two distinct wall variants")
    fa, fb = f.with_wall(walls[0], f.kappa), f.with_wall(walls[1], f.kappa)
    psi = gaussian_packet(fa) if psi0 is None else psi0
    ra = crank_nicolson_evolve(fa, psi, T, dt, sample_every, keep_states=True)
    rb = crank_nicolson_evolve(fb, psi, T, dt, sample_every, keep_states=True)
    dist = np.array([np.sqrt(fa.norm2(a - b)) for a, b in zip(ra.states, rb.states)])
    return ProbeResult(float(np.max(dist)), ra.times, dist, tuple(walls))


def probe_refinement(f: DiscretizedFiber, levels: int = 2, **kw) -> list[float]:
    """Probe values on (N, delta_cut), (2N, delta_cut/2), ..."""
    out = []
    g = f
    for _ in range(levels):
        out.append(extension_dependence_probe(g, **kw).divergence)
        g = g.refined()
    return out
