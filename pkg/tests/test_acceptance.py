"""Acceptance criteria 1-8, each at its stated tolerance and time budget.

Run with pytest (one PASS/FAIL line per criterion is printed in the terminal
summary) or directly: python tests/test_acceptance.py
"""
import math
import time

import numpy as np
import pytest

from diracconf import certifier as cert
from diracconf import evolution as evo
from diracconf import magnetic2d as mag
from diracconf.classifier import (
    ESA,
    INC,
    NOT_ESA,
    SHORT,
    chernoff_example_verdict,
    em_threshold_verdict,
    esa_verdict_1d,
    power_family_verdict,
)
from diracconf.cli import AxisConfig, RunConfig, SweepConfig, run_sweep, smf_problem
from diracconf.core import (
    Fourier,
    HermiticityError,
    Interval,
    PotentialSpec1D,
    anticommutation_defect,
    dirac_matrices,
    pauli_compose,
    pauli_decompose,
    power_law,
    require_hermitian,
    scalar_matrix,
)
from diracconf.radial import RadialDiracProblem, integrate_frame

RESULTS: dict = {}


def record(n, ok, detail, seconds):
    RESULTS[n] = (bool(ok), detail, seconds)
    return ok


def criterion_1():
    t0 = time.perf_counter()
    lams = [round(0.30 + 0.01 * k, 2) for k in range(41)]
    mismatches = []
    closed = {}
    for lam in lams:
        p = smf_problem(0.0, lam, 0.0)
        c = esa_verdict_1d(p, "closed_form").verdict
        n = esa_verdict_1d(p, "numeric").verdict
        closed[lam] = c
        if n != c and not (lam == 0.50 and n == INC):
            mismatches.append((lam, c, n))
    flip = [lam for lam in lams if closed[lam] == ESA]
    flip_ok = flip and flip[0] == 0.50 and all(closed[lam] == NOT_ESA for lam in lams if lam < 0.50)
    dt = time.perf_counter() - t0
    ok = not mismatches and flip_ok and dt <= 60
    return record(1, ok, f"mismatches={mismatches} flip={flip[0] if flip else None}", dt)


def criterion_2():
    t0 = time.perf_counter()
    got = {a: chernoff_example_verdict(a).verdict.verdict for a in (0.5, 1.0, 1.5, 2.0)}
    want = {a: (ESA if a <= 1 else NOT_ESA) for a in got}
    dt = time.perf_counter() - t0
    return record(2, got == want and dt <= 10, "; ".join(f"{a}: {SHORT[v]}" for a, v in got.items()), dt)


def criterion_3():
    t0 = time.perf_counter()
    bad = []
    for a in (0.25, 0.40):
        t = mag.partial_wave_verdict(mag.PCMField(a), 16)
        if t.aggregate != NOT_ESA or t.failing_fiber != -1:
            bad.append((a, t.short, t.failing_fiber))
    for a in (0.50, 0.75, 1.00):
        t = mag.partial_wave_verdict(mag.PCMField(a), 16)
        if t.aggregate != ESA or not mag.t_m2_certificate(mag.PCMField(a)).ok:
            bad.append((a, t.short, t.failing_fiber))
    thr = mag.bisect_fiber_threshold()
    dt = time.perf_counter() - t0
    ok = not bad and abs(thr - 0.50) <= 0.02 and dt <= 300
    return record(3, ok, f"bad={bad} threshold={thr:.4f}", dt)


def criterion_4():
    t0 = time.perf_counter()
    worst = math.inf
    for case in cert.ORDER_CASES:
        worst = min(worst, min(cert.identity_convergence(*case, h0=0.02, levels=4)["orders"]))
    dia_ok = True
    for B in (mag.ConstantField(0.0), mag.ConstantField(1.0), mag.PCMField(0.75)):
        g = mag.transversal_gauge(B)
        c = mag.susy_convergence(g, 0.02, 4)
        worst = min(worst, min(c["order_plus"]), min(c["order_minus"]))
        dia_ok = dia_ok and all(x.holds for x in mag.diamagnetic_check(g))
    dt = time.perf_counter() - t0
    return record(4, worst >= 1.7 and dia_ok, f"min order={worst:.3f} diamagnetic={dia_ok}", dt)


def criterion_5():
    t0 = time.perf_counter()
    g = cert.BoundaryLayerGrid(Interval(0.0, 1.0))
    rows = {}
    for lam in (0.3, 0.4, 0.5, 0.6, 1.0):
        V = cert.ScalarPotential(cert.inverse_distance_power(g.domain, lam, 1.0))
        rep = cert.tsh_certificate(V, cert.flat_hardy(g.domain), g)
        rows[lam] = (rep.certified, power_family_verdict(0.0, lam, 0.0))
    dt = time.perf_counter() - t0
    ok = all(a == b for a, b in rows.values()) and rows[0.5][0]
    return record(5, ok, f"(certified, exact)={rows}", dt)


def criterion_6():
    t0 = time.perf_counter()
    f = evo.DiscretizedFiber(v1=evo.inverse_distance_both_ends(1.0))
    d = evo.crank_nicolson_evolve(f, T=10.0, dt=1e-3)
    band = float(np.max(d.band_prob))
    probes = evo.probe_refinement(f, 2, T=3.0)
    free = evo.extension_dependence_probe(evo.DiscretizedFiber(), T=3.0).divergence
    dt = time.perf_counter() - t0
    ok = (
        d.steps == 10_000 and d.norm_drift <= 1e-8 and band <= 1e-3
        and probes[0] <= 1e-3 and probes[1] < probes[0] and free >= 0.1 and dt <= 300
    )
    detail = f"drift={d.norm_drift:.1e} band={band:.1e} probe={probes[0]:.1e}->{probes[1]:.1e} free={free:.2f}"
    return record(6, ok, detail, dt)


def criterion_7():
    t0 = time.perf_counter()
    cfg = RunConfig()
    cfg.sweep = SweepConfig(
        axes=[AxisConfig("lam_m", 0.0, 1.5, 0.05), AxisConfig("lam_e", 0.0, 1.5, 0.05)],
        numeric_cells=20, seed=2024, min_distance=0.05,
    )
    res = run_sweep(cfg)
    sc = res.spot_check
    exact_ok = all(
        (c.verdict == "ESA") == em_threshold_verdict(c.params[0], 0.0, c.params[1]) for c in res.cells
    )
    dt = time.perf_counter() - t0
    ok = len(res.cells) == 31 * 31 and sc["total"] == 20 and sc["agree"] >= 19 and exact_ok
    return record(7, ok, f"agree={sc['agree']}/{sc['total']} cells={len(res.cells)}", dt)


def criterion_8():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    fails = []
    unit = Interval(0.0, 1.0)
    # gauge invariance: 100 random v2
    for k in range(100):
        nterm = int(rng.integers(1, 4))
        v2 = Fourier(float(rng.uniform(-5, 5)), tuple(rng.uniform(-5, 5, nterm)),
                     tuple(rng.uniform(0.5, 30, nterm)), tuple(rng.uniform(0, 6.3, nterm)))
        lam = float(rng.uniform(0, 1.5))
        base = PotentialSpec1D(v1=power_law(lam, 1.0, 0.0, +1) + power_law(lam, 1.0, 1.0, -1))
        with_v2 = PotentialSpec1D(v1=base.v1, v2=v2)
        a = esa_verdict_1d(RadialDiracProblem(unit, base), "closed_form").verdict
        b = esa_verdict_1d(RadialDiracProblem(unit, with_v2), "closed_form").verdict
        if a != b:
            fails.append(("gauge", k))
    # anticommutation table
    for d in (1, 2, 3):
        if anticommutation_defect(list(dirac_matrices(d)) + [scalar_matrix(d)]) != 0.0:
            fails.append(("anticommutation", d))
    # Hermiticity gates
    try:
        require_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))
        fails.append(("hermiticity", "accepted"))
    except HermiticityError:
        pass
    f = evo.DiscretizedFiber(v1=evo.inverse_distance_both_ends(1.0), N=512, delta_cut=1e-3)
    if f.hermitian_defect() > 1e-14:
        fails.append(("hermiticity", "fiber"))
    # pauli round trip
    for _ in range(1000):
        v = rng.uniform(-100, 100, 4)
        if not np.allclose(pauli_decompose(pauli_compose(*v)), v, rtol=0, atol=1e-12):
            fails.append(("pauli", tuple(v)))
    # gauge round trip B -> a -> B on [0, 0.999]
    r = np.linspace(0.0, 0.999, 2001)
    tab_r = np.linspace(0.0, 0.9995, 4001)
    fields = [mag.ConstantField(1.0), mag.PCMField(0.75), mag.InverseDistanceGaugeField(0.6),
              mag.TabulatedField(tab_r, 1.0 + tab_r**2)]
    for B in fields:
        g = mag.transversal_gauge(B)
        err = np.max(np.abs(mag.field_from_gauge(g, r, "fd") - B.B(r)) / np.maximum(1.0, np.abs(B.B(r))))
        if err > 1e-8:
            fails.append(("gauge round trip", type(B).__name__, float(err)))
    # frame orthonormality
    for lam in (0.0, 0.3, 0.5, 1.0, 2.0):
        p = RadialDiracProblem(unit, PotentialSpec1D(v1=power_law(lam, 1.0, 0.0, +1)))
        if integrate_frame(p, "a").max_ortho_defect > 1e-10:
            fails.append(("frame", lam))
    dt = time.perf_counter() - t0
    return record(8, not fails, f"failures={fails}", dt)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def summary_lines():
    lines = []
    for n in sorted(RESULTS):
        ok, detail, seconds = RESULTS[n]
        lines.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({seconds:.1f} s) {detail}")
    return lines


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok = CRITERIA[n]()
    _, detail, _ = RESULTS[n]
    assert ok, detail


if __name__ == "__main__":
    for fn in CRITERIA.values():
        fn()
    print("\n".join(summary_lines()))
