"""Command-line front end: classify, sweep, certify, fibers, evolve, identity-check.

Exit codes: 0 ESA / Certified / pass, 1 NotESA / Falsified / fail, 2 Inconclusive, 3 error.
Configuration is a TOML file whose tables mirror the dataclasses below; unknown
keys are rejected and command-line flags override file values.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import tomli

from . import certifier as cert
from . import evolution as evo
from . import magnetic2d as mag
from .classifier import (
    INC,
    METHODS,
    em_threshold_verdict,
    esa_verdict_1d,
)
from .core import (
    Constant,
    Interval,
    HalfLine,
    PotentialSpec1D,
    Profile,
    Sum,
    UnitBall,
    UnitDisk,
    Zero,
    AtEndpoint,
    power_both_ends,
    power_law,
)
from .radial import DEFAULT_DELTA_MIN, DEFAULT_MARGIN, RadialDiracProblem

log = logging.getLogger("diracconf")

EXIT_OK, EXIT_NO, EXIT_INC, EXIT_ERR = 0, 1, 2, 3
COMMANDS = ("classify", "sweep", "certify", "fibers", "evolve", "identity-check")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class NumericsConfig:
    delta_min: float = DEFAULT_DELTA_MIN
    delta0: float = 0.1
    tol: float = DEFAULT_MARGIN
    method: str = "auto"
    jobs: int = 0  # 0 = logical CPU count


@dataclass
class ProblemConfig:
    """1D problem on an interval (or half-line if b is infinite).

    Each coefficient v0..v3 is a table: {kind, params, ends}. kind is a profile
    name, 'constant' or 'zero'; ends is 'a', 'b' or 'both' (profiles of the distance).
    """

    a: float = 0.0
    b: float = 1.0
    v0: dict = field(default_factory=dict)
    v1: dict = field(default_factory=dict)
    v2: dict = field(default_factory=dict)
    v3: dict = field(default_factory=dict)
    lam0: Optional[float] = None  # shortcut: power family lam_i / delta at both ends
    lam1: Optional[float] = None
    lam3: Optional[float] = None


@dataclass
class MagneticConfig:
    field: str = "pcm"  # pcm | constant | inverse_distance
    param: float = 0.5  # alpha, B0 or lam_m
    j_range: int = 16
    lam_s: float = 0.0  # v_s = lam_s / (1 - r)
    lam_e: float = 0.0  # v_e = lam_e / (1 - r)


@dataclass
class CertifyConfig:
    theorem: str = "tsh"  # ts | tsh | perturbation | td1s | membership | mu
    domain: str = "ball"  # interval | disk | ball
    lam: float = 0.5
    alpha: float = 1.0  # exponent of lam / delta^alpha
    w: float = 0.0  # W = w / delta * identity
    C: float = 1.0
    mu: float = 0.0
    convex: bool = True
    profile: str = "power"  # for membership / mu: a distance profile kind
    params: list = field(default_factory=list)
    n_shells: int = 64
    grid_delta_min: float = 1e-6  # innermost shell of the boundary layer


@dataclass
class EvolveConfig:
    lam: float = 1.0  # v1 = lam / delta at both ends; 0 gives the free fiber
    N: int = 4096
    delta_cut: float = 1e-4
    T: float = 10.0
    dt: float = 1e-3
    probe: bool = False
    probe_T: float = 3.0
    walls: list = field(default_factory=lambda: ["truncate", "mass"])
    refine: bool = False


@dataclass
class IdentityConfig:
    h0: float = 0.02
    levels: int = 4
    min_order: float = 1.7
    susy: bool = True
    shifted_norm: bool = True


@dataclass
class AxisConfig:
    name: str = "lam1"
    start: float = 0.3
    stop: float = 0.7
    step: float = 0.01


@dataclass
class SweepConfig:
    axes: list = field(default_factory=list)  # list of AxisConfig tables
    lam0: float = 0.0
    lam1: float = 0.0
    lam3: float = 0.0
    lam_m: float = 0.0
    lam_s: float = 0.0
    lam_e: float = 0.0
    method: str = "closed_form"  # per-cell classifier method for the SMF model
    numeric_cells: int = 0  # em model: numerically re-check this many random cells
    seed: int = 0
    min_distance: float = 0.05


@dataclass
class OutputConfig:
    out: Optional[str] = None
    json: bool = False


@dataclass
class RunConfig:
    command: Optional[str] = None
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    magnetic: MagneticConfig = field(default_factory=MagneticConfig)
    certify: CertifyConfig = field(default_factory=CertifyConfig)
    evolve: EvolveConfig = field(default_factory=EvolveConfig)
    identity: IdentityConfig = field(default_factory=IdentityConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


SWEEP_AXES = ("lam0", "lam1", "lam3", "lam_m", "lam_s", "lam_e", "alpha")
_SECTIONS = {f.name: f.type for f in dataclasses.fields(RunConfig) if f.name != "command"}
_SECTION_CLASSES = {
    "numerics": NumericsConfig, "problem": ProblemConfig, "magnetic": MagneticConfig,
    "certify": CertifyConfig, "evolve": EvolveConfig, "identity": IdentityConfig,
    "sweep": SweepConfig, "output": OutputConfig,
}


def _coerce(value, default, where: str):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected a boolean, got {value!r}")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected an array, got {value!r}")
        return value
    if isinstance(default, dict):
        if not isinstance(value, dict):
            raise ConfigError(f"{where}: expected a table, got {value!r}")
        return value
    # Optional fields default to None
    if value is not None and not isinstance(value, (int, float, str, bool)):
        raise ConfigError(f"{where}: unsupported value {value!r}")
    return float(value) if isinstance(value, int) and not isinstance(value, bool) else value


def _load_section(cls, table: dict, name: str):
    inst = cls()
    known = {f.name for f in dataclasses.fields(cls)}
    for key, value in table.items():
        if key not in known:
            raise ConfigError(f"unknown key '{name}.{key}' (allowed: {', '.join(sorted(known))})")
        setattr(inst, key, _coerce(value, getattr(inst, key), f"{name}.{key}"))
    return inst


_COEFF_KEYS = {"kind", "params", "ends"}


def _check_coefficient_table(t: dict, where: str):
    for k in t:
        if k not in _COEFF_KEYS:
            raise ConfigError(f"unknown key '{where}.{k}' (allowed: ends, kind, params)")


def _check_axis_table(t: dict, where: str) -> AxisConfig:
    ax = _load_section(AxisConfig, t, where)
    if ax.name not in SWEEP_AXES:
        raise ConfigError(f"{where}.name: unknown axis {ax.name!r}; expected one of {SWEEP_AXES}")
    if ax.step <= 0 or ax.stop < ax.start:
        raise ConfigError(f"{where}: need step > 0 and stop >= start")
    return ax


def parse_config(text: str) -> RunConfig:
    """Parse TOML text into a RunConfig; raises ConfigError with the key or line at fault."""
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error: {exc}") from exc
    cfg = RunConfig()
    for key, value in data.items():
        if key == "command":
            if value not in COMMANDS:
                raise ConfigError(f"command: unknown command {value!r}; expected one of {COMMANDS}")
            cfg.command = value
        elif key in _SECTION_CLASSES:
            if not isinstance(value, dict):
                raise ConfigError(f"'{key}' must be a table")
            setattr(cfg, key, _load_section(_SECTION_CLASSES[key], value, key))
        else:
            raise ConfigError(f"unknown key '{key}' (allowed: command, {', '.join(sorted(_SECTION_CLASSES))})")
    for c in ("v0", "v1", "v2", "v3"):
        _check_coefficient_table(getattr(cfg.problem, c), f"problem.{c}")
    cfg.sweep.axes = [
        a if isinstance(a, AxisConfig) else _check_axis_table(a, f"sweep.axes[{i}]") for i, a in enumerate(cfg.sweep.axes)
    ]
    if cfg.numerics.method not in METHODS:
        raise ConfigError(f"numerics.method: unknown method {cfg.numerics.method!r}; expected one of {METHODS}")
    return cfg


def load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------


def jsonable(obj):
    """Dataclasses and numpy values as plain JSON types (non-finite floats as strings)."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if obj is None or isinstance(obj, str):
        return obj
    return repr(obj)


def _dump(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# Problem builders
# ---------------------------------------------------------------------------


def _coefficient(t: dict, dom, where: str):
    if not t:
        return Zero()
    kind = t.get("kind", "zero")
    params = tuple(float(p) for p in t.get("params", []))
    if kind == "zero":
        return Zero()
    if kind == "constant":
        if len(params) != 1:
            raise ConfigError(f"{where}: constant needs params = [c]")
        return Constant(params[0])
    ends = t.get("ends", "both")
    if ends not in ("a", "b", "both"):
        raise ConfigError(f"{where}.ends: expected 'a', 'b' or 'both'")
    try:
        prof = Profile(kind, params)
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    terms = []
    if ends in ("a", "both"):
        terms.append(AtEndpoint(prof, dom.a, +1))
    if ends in ("b", "both"):
        if math.isinf(dom.b):
            raise ConfigError(f"{where}: a half-line has no finite endpoint b")
        terms.append(AtEndpoint(prof, dom.b, -1))
    return Sum.of(*terms)


def build_problem(pc: ProblemConfig) -> RadialDiracProblem:
    dom = HalfLine(pc.a) if math.isinf(pc.b) else Interval(pc.a, pc.b)
    coeffs = {}
    for name, lam in (("v0", pc.lam0), ("v1", pc.lam1), ("v3", pc.lam3)):
        if lam is not None:
            if getattr(pc, name):
                raise ConfigError(f"problem: give either {name} or its lam shortcut, not both")
            coeffs[name] = power_both_ends(lam, dom) if isinstance(dom, Interval) else power_law(lam, 1.0, dom.a, +1)
        else:
            coeffs[name] = _coefficient(getattr(pc, name), dom, f"problem.{name}")
    pot = PotentialSpec1D(coeffs["v0"], coeffs["v1"], _coefficient(pc.v2, dom, "problem.v2"), coeffs["v3"])
    return RadialDiracProblem(dom, pot, None, 0.0, "config")


def smf_problem(lam0: float, lam1: float, lam3: float) -> RadialDiracProblem:
    dom = Interval(0.0, 1.0)
    pot = PotentialSpec1D(power_both_ends(lam0, dom), power_both_ends(lam1, dom), Zero(), power_both_ends(lam3, dom))
    return RadialDiracProblem(dom, pot, None, 0.0, f"smf({lam0},{lam1},{lam3})")


def magnetic_field(kind: str, param: float):
    if kind == "pcm":
        return mag.PCMField(param)
    if kind == "constant":
        return mag.ConstantField(param)
    if kind == "inverse_distance":
        return mag.InverseDistanceGaugeField(param)
    raise ConfigError(f"magnetic.field: unknown field {kind!r}; expected pcm, constant or inverse_distance")


def _boundary_coupling(lam: float):
    return None if lam == 0.0 else power_law(lam, 1.0, 1.0, -1)


def em_fiber_problem(lam_m: float, lam_s: float, lam_e: float, j: int = 1) -> RadialDiracProblem:
    g = mag.transversal_gauge(mag.InverseDistanceGaugeField(lam_m))
    return mag.fiber_problem(g, j, _boundary_coupling(lam_s), _boundary_coupling(lam_e))


def _domain(name: str):
    try:
        return {"interval": Interval(0.0, 1.0), "disk": UnitDisk(), "ball": UnitBall()}[name]
    except KeyError:
        raise ConfigError(f"certify.domain: unknown domain {name!r}; expected interval, disk or ball") from None


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


def axis_values(ax: AxisConfig) -> list[float]:
    n = int(round((ax.stop - ax.start) / ax.step))
    return [round(ax.start + k * ax.step, 10) for k in range(n + 1)]


def _model(axes: list[str]) -> str:
    if "alpha" in axes:
        if len(axes) != 1:
            raise ConfigError("the alpha axis (PCM family) cannot be combined with other axes")
        return "pcm"
    em = {"lam_m", "lam_s", "lam_e"}
    smf = {"lam0", "lam1", "lam3"}
    if set(axes) <= em:
        return "em"
    if set(axes) <= smf:
        return "smf"
    raise ConfigError("sweep axes must all come from {lam0, lam1, lam3} or from {lam_m, lam_s, lam_e}")


@dataclass(frozen=True)
class SweepCell:
    params: tuple
    verdict: str  # ESA | NotESA | Boundary | Inconclusive
    tag: str
    margin: float


@dataclass
class SweepResult:
    axes: list
    grids: list
    model: str
    cells: list
    seconds: float
    spot_check: Optional[dict] = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["param1", "param2", "verdict", "tag", "margin"])
        for c in self.cells:
            p1 = _fmt(c.params[0])
            p2 = _fmt(c.params[1]) if len(c.params) > 1 else ""
            w.writerow([p1, p2, c.verdict, c.tag, _fmt(c.margin)])
        return buf.getvalue()


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _cell(job) -> SweepCell:
    """One sweep cell; a module-level function so worker processes can run it."""
    model, names, values, fixed, method, num = job
    p = dict(fixed)
    p.update(zip(names, values))
    if model == "smf":
        margin = p["lam1"] ** 2 + p["lam3"] ** 2 - 0.25 - p["lam0"] ** 2
        v = esa_verdict_1d(
            smf_problem(p["lam0"], p["lam1"], p["lam3"]), method, num["delta_min"], num["delta0"], num["tol"]
        )
        short = "Boundary" if (v.margin_flag and method == "numeric") else v.short
        return SweepCell(tuple(values), short, v.tag, margin)
    if model == "em":
        ok = em_threshold_verdict(p["lam_m"], p["lam_s"], p["lam_e"])
        margin = p["lam_m"] ** 2 + p["lam_s"] ** 2 - 0.25 - p["lam_e"] ** 2
        return SweepCell(tuple(values), "ESA" if ok else "NotESA", "CO.5", margin)
    alpha = p["alpha"]
    t = mag.partial_wave_verdict(mag.PCMField(alpha), 16, delta_min=num["delta_min"])
    return SweepCell(tuple(values), t.short, t.tag, alpha - 0.5)


def _pool_map(fn, jobs: list, n_jobs: int) -> list:
    n = n_jobs if n_jobs > 0 else (os.cpu_count() or 1)
    if n <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, jobs))  # map keeps submission order


def run_sweep(cfg: RunConfig) -> SweepResult:
    sc = cfg.sweep
    axes = sc.axes
    if not 1 <= len(axes) <= 2:
        raise ConfigError(f"sweep needs one or two axes, got {len(axes)}")
    names = [a.name for a in axes]
    if len(set(names)) != len(names):
        raise ConfigError("sweep axes must be distinct")
    model = _model(names)
    grids = [axis_values(a) for a in axes]
    fixed = {k: getattr(sc, k) for k in ("lam0", "lam1", "lam3", "lam_m", "lam_s", "lam_e")}
    num = {"delta_min": cfg.numerics.delta_min, "delta0": cfg.numerics.delta0, "tol": cfg.numerics.tol}
    method = sc.method
    if method not in METHODS:
        raise ConfigError(f"sweep.method: unknown method {method!r}")
    points = [(v,) for v in grids[0]] if len(grids) == 1 else [(u, v) for u in grids[0] for v in grids[1]]
    jobs = [(model, names, pt, fixed, method, num) for pt in points]
    t0 = time.perf_counter()
    cells = _pool_map(_cell, jobs, cfg.numerics.jobs)
    res = SweepResult(names, grids, model, cells, 0.0)
    if model == "em" and sc.numeric_cells > 0:
        res.spot_check = em_spot_check(res, fixed, sc.numeric_cells, sc.seed, sc.min_distance, cfg)
    res.seconds = time.perf_counter() - t0
    return res


def _curve_distance(lam_m: float, lam_e: float, lam_s: float) -> float:
    """Euclidean distance in the (lam_m, lam_e) plane to lam_e^2 = lam_m^2 + lam_s^2 - 1/4, lam_e >= 0."""
    mm = np.linspace(0.0, 3.0, 30001)
    ee2 = mm**2 + lam_s**2 - 0.25
    ok = ee2 >= 0
    ee = np.sqrt(ee2[ok])
    return float(np.min(np.hypot(mm[ok] - lam_m, ee - lam_e)))


def _em_numeric(job) -> dict:
    lam_m, lam_s, lam_e, j, num = job
    p = em_fiber_problem(lam_m, lam_s, lam_e, j)
    v = esa_verdict_1d(p, "numeric", num["delta_min"], num["delta0"], num["tol"])
    return {"lam_m": lam_m, "lam_e": lam_e, "numeric": v.short, "tag": v.tag}


def em_spot_check(res: SweepResult, fixed: dict, n: int, seed: int, min_distance: float, cfg: RunConfig) -> dict:
    """Numerically classify fiber j = 1 on n random cells away from the analytic curve."""
    names = res.axes
    if set(names) != {"lam_m", "lam_e"}:
        raise ConfigError("the numeric spot check needs the (lam_m, lam_e) axes")
    im, ie = names.index("lam_m"), names.index("lam_e")
    lam_s = fixed["lam_s"]
    eligible = [c for c in res.cells if _curve_distance(c.params[im], c.params[ie], lam_s) >= min_distance]
    rng = np.random.default_rng(seed)
    pick = sorted(rng.choice(len(eligible), size=min(n, len(eligible)), replace=False).tolist())
    chosen = [eligible[k] for k in pick]
    num = {"delta_min": cfg.numerics.delta_min, "delta0": cfg.numerics.delta0, "tol": cfg.numerics.tol}
    jobs = [(c.params[im], lam_s, c.params[ie], 1, num) for c in chosen]
    out = _pool_map(_em_numeric, jobs, cfg.numerics.jobs)
    for c, o in zip(chosen, out):
        o["analytic"] = c.verdict
        o["agree"] = o["numeric"] == c.verdict
    return {"fiber": 1, "cells": out, "agree": sum(o["agree"] for o in out), "total": len(out)}


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _emit(args, cfg: RunConfig, text: str, payload) -> None:
    js = _dump(payload)
    if cfg.output.json:
        sys.stdout.write(js)
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")
    if cfg.output.out and args.command not in ("sweep", "evolve"):
        with open(cfg.output.out, "w", encoding="utf-8") as fh:
            fh.write(js)


def _verdict_exit(short: str) -> int:
    return {"ESA": EXIT_OK, "NotESA": EXIT_NO, "Inconclusive": EXIT_INC}[short]


def cmd_classify(args, cfg: RunConfig) -> int:
    p = build_problem(cfg.problem)
    n = cfg.numerics
    v = esa_verdict_1d(p, n.method, n.delta_min, n.delta0, n.tol)
    lines = [f"verdict: {v.short}", f"tag: {v.tag}", f"note: {v.note}"]
    for e in v.endpoints:
        lines.append(f"  endpoint {e.endpoint}: {e.cls} via {e.method} [{e.tag}]" + (" (borderline)" if e.margin_flag else ""))
    if v.verdict == INC:
        lines.append("borderline: the fitted exponent sits at the critical value; refine or use the closed-form rule")
    _emit(args, cfg, "\n".join(lines), {"verdict": v.short, "report": v})
    return _verdict_exit(v.short)


def cmd_sweep(args, cfg: RunConfig) -> int:
    res = run_sweep(cfg)
    text = res.to_csv()
    if cfg.output.out:
        with open(cfg.output.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if cfg.output.json:
        payload = {
            "axes": res.axes, "grids": res.grids, "model": res.model,
            "cells": [dataclasses.asdict(c) for c in res.cells], "spot_check": res.spot_check,
        }
        sys.stdout.write(_dump(payload))
    elif not cfg.output.out:
        sys.stdout.write(text)
    if res.spot_check is not None:
        sc = res.spot_check
        print(f"numeric spot check (fiber j=1): {sc['agree']}/{sc['total']} agree", file=sys.stderr)
    print(f"{len(res.cells)} cells in {res.seconds:.1f} s", file=sys.stderr)
    return EXIT_OK


def cmd_certify(args, cfg: RunConfig) -> int:
    c = cfg.certify
    dom = _domain(c.domain)
    g = cert.BoundaryLayerGrid(dom, c.grid_delta_min, cfg.numerics.delta0, c.n_shells)
    if c.theorem == "td1s":
        ok = cert.t_d1s_verdict(c.mu, c.lam, c.convex)
        tag = "T:D1S(ii)" if c.convex else "T:D1S(i)"
        _emit(args, cfg, f"T:D1S verdict: {ok} [{tag}]", {"verdict": ok, "tag": tag, "mu": c.mu, "lam": c.lam})
        return EXIT_OK if ok else EXIT_NO
    if c.theorem in ("membership", "mu"):
        prof = Profile(c.profile, tuple(float(p) for p in c.params))
        f = cert.distance_function(dom, prof)
        if c.theorem == "membership":
            r = cert.class_membership_alpha(f, c.alpha, g)
            _emit(args, cfg, f"member: {r.member} eps={r.eps} failed={list(r.failed)}", r)
            return EXIT_INC if r.member is None else (EXIT_OK if r.member else EXIT_NO)
        r = cert.mu_estimate(f, g)
        _emit(args, cfg, f"mu: {r.mu} trend={r.trend}" + (f" rejected at {r.witness}" if r.rejected else ""), r)
        return EXIT_NO if r.rejected else EXIT_OK
    V = cert.ScalarPotential(cert.inverse_distance_power(dom, c.lam, c.alpha))
    if c.theorem == "ts":
        rep = cert.ts_certificate(V, g)
    elif c.theorem == "tsh":
        rep = cert.tsh_certificate(V, None, g)
    elif c.theorem == "perturbation":
        k = V.S.shape[0]
        W = (lambda X, d: (c.w / d)[:, None, None] * np.eye(k)) if c.w else None
        rep = cert.perturbation_certificate(V, W, cert.flat_hardy(dom), c.C, g)
    else:
        raise ConfigError(f"certify.theorem: unknown theorem {c.theorem!r}")
    text = f"{rep.outcome} [{rep.tag}, {rep.inequality}]" + (f" c={rep.c:g}" if rep.c is not None else "")
    if rep.note:
        text += f"\nnote: {rep.note}"
    _emit(args, cfg, text, rep.to_dict())
    return {cert.CERTIFIED: EXIT_OK, cert.FALSIFIED: EXIT_NO}.get(rep.outcome, EXIT_INC)


def cmd_fibers(args, cfg: RunConfig) -> int:
    m = cfg.magnetic
    B = magnetic_field(m.field, m.param)
    t = mag.partial_wave_verdict(
        B, m.j_range, _boundary_coupling(m.lam_s), _boundary_coupling(m.lam_e), cfg.numerics.method,
        cfg.numerics.delta_min, cfg.numerics.jobs or 1,
    )
    tm2 = mag.t_m2_certificate(B)
    lines = [f"aggregate: {t.short} [{t.tag}]", f"failing fiber: {t.failing_fiber}", f"boundary-field certificate: {tm2.ok}"]
    for row in t.rows:
        lines.append(f"  j={row.j:+d} m={row.m_j:+.1f}: {row.verdict.short} ({row.at0.cls} at 0, {row.at1.cls} at 1)")
    payload = {
        "aggregate": t.short, "tag": t.tag, "failing_fiber": t.failing_fiber, "j_range": t.j_range,
        "heuristic_ok": t.heuristic_ok, "note": t.note, "t_m2": tm2,
        "rows": [{"j": r.j, "m_j": r.m_j, "verdict": r.verdict.short, "tag": r.verdict.tag,
                  "at0": r.at0.cls, "at1": r.at1.cls} for r in t.rows],
    }
    _emit(args, cfg, "\n".join(lines), payload)
    return _verdict_exit(t.short)


def cmd_evolve(args, cfg: RunConfig) -> int:
    e = cfg.evolve
    v1 = evo.inverse_distance_both_ends(e.lam) if e.lam else None
    f = evo.DiscretizedFiber(v1=v1, N=e.N, delta_cut=e.delta_cut)
    if f.hermitian_defect() > 1e-12:
        raise RuntimeError("discrete Hamiltonian is not Hermitian")
    d = evo.crank_nicolson_evolve(f, None, e.T, e.dt)
    if cfg.output.out:
        d.to_csv(cfg.output.out)
    summary = {
        "steps": d.steps, "norm_drift": d.norm_drift, "max_step_drift": d.max_step_drift,
        "max_band_prob": float(np.max(d.band_prob)), "max_cut_amp": float(np.max(d.cut_amp)),
    }
    if e.probe:
        probe_kw = {"walls": tuple(e.walls), "T": e.probe_T, "dt": e.dt}
        summary["probe"] = evo.probe_refinement(f, 2 if e.refine else 1, **probe_kw)
    ok = summary["norm_drift"] <= 1e-8
    text = "\n".join(f"{k}: {v}" for k, v in summary.items()) + f"\nunitarity: {'pass' if ok else 'fail'}"
    if not cfg.output.out and not cfg.output.json:
        text = d.to_csv() + text
    _emit(args, cfg, text, summary)
    return EXIT_OK if ok else EXIT_NO


IDENTITY_FIELDS = (("B=0", mag.ConstantField(0.0)), ("B=1", mag.ConstantField(1.0)), ("PCM(0.75)", mag.PCMField(0.75)))


def run_identity_checks(ic: IdentityConfig) -> dict:
    rows = []
    if ic.shifted_norm:
        for case in cert.ORDER_CASES:
            c = cert.identity_convergence(*case, h0=ic.h0, levels=ic.levels)
            rows.append({"check": "shifted-norm", "case": "/".join(map(str, case)),
                         "residuals": [r.residual for r in c["residuals"]], "orders": c["orders"],
                         "pass": min(c["orders"]) >= ic.min_order})
    if ic.susy:
        for name, B in IDENTITY_FIELDS:
            c = mag.susy_convergence(mag.transversal_gauge(B), ic.h0, ic.levels)
            orders = [min(a, b) for a, b in zip(c["order_plus"], c["order_minus"])]
            rows.append({"check": "susy", "case": name, "residuals": [max(r.plus, r.minus) for r in c["residuals"]],
                         "orders": orders, "pass": min(orders) >= ic.min_order})
            dia = mag.diamagnetic_check(mag.transversal_gauge(B))
            rows.append({"check": "diamagnetic", "case": name, "residuals": [], "orders": [],
                         "pass": all(x.holds for x in dia)})
    return {"rows": rows, "pass": all(r["pass"] for r in rows)}


def cmd_identity(args, cfg: RunConfig) -> int:
    out = run_identity_checks(cfg.identity)
    lines = []
    for r in out["rows"]:
        orders = " ".join(f"{o:.2f}" for o in r["orders"])
        lines.append(f"{r['check']:<12} {r['case']:<22} orders [{orders}] {'pass' if r['pass'] else 'FAIL'}")
    _emit(args, cfg, "\n".join(lines), out)
    return EXIT_OK if out["pass"] else EXIT_NO


HANDLERS = {
    "classify": cmd_classify, "sweep": cmd_sweep, "certify": cmd_certify,
    "fibers": cmd_fibers, "evolve": cmd_evolve, "identity-check": cmd_identity,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _axis_arg(s: str) -> AxisConfig:
    try:
        name, a, b, st = s.split(":")
        ax = AxisConfig(name, float(a), float(b), float(st))
    except ValueError:
        raise argparse.ArgumentTypeError("axis must look like name:start:stop:step") from None
    if ax.name not in SWEEP_AXES:
        raise argparse.ArgumentTypeError(f"unknown axis {ax.name!r}; expected one of {SWEEP_AXES}")
    if ax.step <= 0 or ax.stop < ax.start:
        raise argparse.ArgumentTypeError("need step > 0 and stop >= start")
    return ax


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML configuration file")
    common.add_argument("--jobs", type=int, help="worker processes (default: logical CPU count)")
    common.add_argument("--out", help="output path (CSV for sweep/evolve, JSON otherwise)")
    common.add_argument("--json", action="store_true", default=None, help="print the JSON report")
    common.add_argument("--delta-min", type=float, dest="delta_min")
    common.add_argument("--delta0", type=float)
    common.add_argument("--tol", type=float, help="exponent margin for numerical tail fits")
    common.add_argument("--method", choices=METHODS)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="diracconf", description="Confinement verdicts for Dirac operators.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("classify", parents=[common], help="essential self-adjointness of a 1D problem")
    for k in ("lam0", "lam1", "lam3"):
        c.add_argument(f"--{k}", type=float, help=f"{k}/delta at both ends of (0,1)")
    s = sub.add_parser("sweep", parents=[common], help="1-2 axis parameter sweep to CSV")
    s.add_argument("--axis", type=_axis_arg, action="append", help="name:start:stop:step (repeatable)")
    for k in ("lam0", "lam1", "lam3", "lam_m", "lam_s", "lam_e"):
        s.add_argument(f"--{k.replace('_', '-')}", dest=f"fixed_{k}", type=float)
    s.add_argument("--cell-method", choices=METHODS, dest="cell_method")
    s.add_argument("--numeric-cells", type=int, dest="numeric_cells")
    s.add_argument("--seed", type=int)
    ce = sub.add_parser("certify", parents=[common], help="grid certificates for scalar potentials")
    ce.add_argument("--theorem", choices=("ts", "tsh", "perturbation", "td1s", "membership", "mu"))
    ce.add_argument("--domain", choices=("interval", "disk", "ball"))
    ce.add_argument("--lam", type=float)
    ce.add_argument("--alpha", type=float)
    ce.add_argument("--w", type=float)
    ce.add_argument("--C", type=float)
    ce.add_argument("--mu", type=float)
    ce.add_argument("--non-convex", action="store_true", default=None, dest="non_convex")
    f = sub.add_parser("fibers", parents=[common], help="partial-wave verdict for a radial magnetic field")
    f.add_argument("--field", choices=("pcm", "constant", "inverse_distance"))
    f.add_argument("--param", type=float)
    f.add_argument("--j-range", type=int, dest="j_range")
    e = sub.add_parser("evolve", parents=[common], help="Crank-Nicolson evolution of a radial fiber")
    e.add_argument("--lam", type=float, help="v1 = lam/delta at both ends (0: free)")
    e.add_argument("--T", type=float)
    e.add_argument("--N", type=int)
    e.add_argument("--probe", action="store_true", default=None)
    e.add_argument("--refine", action="store_true", default=None)
    sub.add_parser("identity-check", parents=[common], help="finite-difference identity convergence orders")
    return p


def apply_overrides(cfg: RunConfig, args) -> RunConfig:
    n = cfg.numerics
    for k in ("delta_min", "delta0", "tol", "method", "jobs"):
        v = getattr(args, k, None)
        if v is not None:
            setattr(n, k, v)
    if args.out is not None:
        cfg.output.out = args.out
    if args.json:
        cfg.output.json = True
    cmd = args.command
    if cmd == "classify":
        for k in ("lam0", "lam1", "lam3"):
            if getattr(args, k) is not None:
                setattr(cfg.problem, k, getattr(args, k))
    elif cmd == "sweep":
        if args.axis:
            cfg.sweep.axes = list(args.axis)
        for k in ("lam0", "lam1", "lam3", "lam_m", "lam_s", "lam_e"):
            v = getattr(args, f"fixed_{k}")
            if v is not None:
                setattr(cfg.sweep, k, v)
        if args.cell_method:
            cfg.sweep.method = args.cell_method
        if args.numeric_cells is not None:
            cfg.sweep.numeric_cells = args.numeric_cells
        if args.seed is not None:
            cfg.sweep.seed = args.seed
    elif cmd == "certify":
        for k in ("theorem", "domain", "lam", "alpha", "w", "C", "mu"):
            if getattr(args, k) is not None:
                setattr(cfg.certify, k, getattr(args, k))
        if args.non_convex:
            cfg.certify.convex = False
    elif cmd == "fibers":
        for k in ("field", "param", "j_range"):
            if getattr(args, k) is not None:
                setattr(cfg.magnetic, k, getattr(args, k))
    elif cmd == "evolve":
        for k in ("lam", "T", "N", "probe", "refine"):
            if getattr(args, k) is not None:
                setattr(cfg.evolve, k, getattr(args, k))
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if cfg.command is not None and cfg.command != args.command:
            log.info("config command %s overridden by %s", cfg.command, args.command)
        cfg = apply_overrides(cfg, args)
        return HANDLERS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERR
    except Exception as exc:  # noqa: BLE001 - every failure maps to the error exit code
        print(f"error ({args.command}): {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
