"""Parameter sweeps: config parsing, validation and deterministic CSV output.

A sweep config is an INI file::

    [sweep]
    target = charge_z
    z = 0, 0.6283185307179586, 0.0031415926535897933   ; start, stop, step

    [fixed]
    a = 1
    d = 1
    k_c = 10

    [numerics]
    rel_tol = 1e-8

    [output]
    path = fig3.csv

Every key in ``[sweep]`` other than ``target`` is a swept parameter; the
grid is their Cartesian product with the first listed parameter varying
slowest.  For the van der Waals targets ``a = plane`` selects the
large-radius flat-surface surrogate.
"""

from __future__ import annotations

import configparser
import csv
import io
import itertools
import math
import os
import re
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable

import numpy as np

from . import charge, vdw
from .geometry import ConstraintViolation, FieldPoint, make_sinusoidal_phi, make_sinusoidal_z, mode_count
from .numerics import ConvergenceError, NumericsConfig

WORKERS_ENV = "CORRUCYL_WORKERS"
PLANE = "plane"


@dataclass(frozen=True)
class Target:
    required: tuple[str, ...]
    defaults: dict
    columns: tuple[str, ...]
    evaluate: Callable[[dict, NumericsConfig], tuple[tuple, float]]
    azimuthal_only: bool = False
    allows_plane: bool = False


def _geometry(p):
    if p["direction"] == "z":
        return make_sinusoidal_z(p["a"], p["delta"], p["k_c"]), FieldPoint(p["a"] + p["d"], 0.0, p["z"])
    N = mode_count(p["a"], p["k_c"])
    return make_sinusoidal_phi(p["a"], p["delta"], N), FieldPoint(p["a"] + p["d"], p["phi"], 0.0)


def _charge_z(p, cfg):
    r = charge.u1_charge_z(p["a"], p["d"], p["k_c"], p["z"], p["delta"], cfg)
    return (r.value, r.normalized), r.report.estimated_error


def _charge_phi(p, cfg):
    N = mode_count(p["a"], p["k_c"])
    r = charge.u1_charge_phi(p["a"], p["d"], N, p["phi"], p["delta"], cfg)
    return (r.value, r.normalized), r.report.estimated_error


def _charge_ratio(p, cfg):
    a, d, k_c = p["a"], p["d"], p["k_c"]
    if p["direction"] == "z":
        S = charge.lateral_sum_z(float(a), float(d), float(k_c), cfg)
    else:
        S = charge.lateral_sum_phi(float(a), float(d), mode_count(a, k_c), cfg)
    plane = 0.25 * k_c * k_c * float(charge.special.kv(2, k_c * d)) * a * math.pi
    return (S.value / plane,), S.estimated_error / plane


def _dipole(p):
    return vdw.dipole_from_orientation(vdw.ParticleOrientation(p["theta"], p["phi_o"], p["beta"]))


def _phase(p, cfg):
    dip = _dipole(p)
    if p["a"] == PLANE:
        refs = [vdw.plane_reference(q, p["direction"], p["d"], p["k_c"], dip, cfg, angle_tol=p["angle_tol"])
                for q in (vdw.PlaneQuantity.C, vdw.PlaneQuantity.DELTA)]
        if any(ref.low_confidence for ref in refs):
            warnings.warn("plane surrogate: extrapolation disagrees by more than 1%", RuntimeWarning)
        res = refs[0].phase
        # the extrapolation spread dominates the quadrature error
        return res, abs(refs[0].value - refs[0].raw[1])
    a, d, k_c = p["a"], p["d"], p["k_c"]
    if p["direction"] == "z":
        r = vdw.r_functions_z(float(a), float(a + d), float(k_c), cfg)
    else:
        r = vdw.r_functions_phi(float(a), float(a + d), mode_count(a, k_c), cfg)
    res = vdw.phase_analysis(dip, r, angle_tol=p["angle_tol"])
    # every R enters C and B with a dipole weight of at most the trace
    return res, dip.trace * r.report.estimated_error


def _vdw_c(p, cfg):
    res, err = _phase(p, cfg)
    return (res.C, res.B, res.A, res.delta), err


def _vdw_delta(p, cfg):
    res, err = _phase(p, cfg)
    return (res.delta, res.C, res.B, res.A), err / max(res.A, 1e-300)


def _regime(p, cfg):
    res, err = _phase(p, cfg)
    return (res.regime.value, res.delta, res.C, res.B, res.A), err / max(res.A, 1e-300)


def _energy_profile(p, cfg):
    geo, pt = _geometry(p)
    r = vdw.u1_vdw(geo, pt, _dipole(p), cfg)
    return (r.value, r.phase.C, r.phase.B), r.report.estimated_error


_ORIENT = {"direction": "z", "theta": 0.0, "phi_o": 0.0, "beta": 0.2, "angle_tol": vdw.ANGLE_TOL_SWEEP}

TARGETS: dict[str, Target] = {
    "charge_z": Target(("a", "d", "k_c"), {"z": 0.0, "delta": 0.01}, ("U1", "U1_normalized"), _charge_z),
    "charge_phi": Target(("a", "d", "k_c"), {"phi": 0.0, "delta": 0.01}, ("U1", "U1_normalized"), _charge_phi,
                         azimuthal_only=True),
    "charge_ratio": Target(("a", "d", "k_c"), {"direction": "z"}, ("ratio",), _charge_ratio),
    "vdw_C": Target(("a", "d", "k_c"), dict(_ORIENT), ("C", "B", "A", "Delta"), _vdw_c, allows_plane=True),
    "vdw_Delta": Target(("a", "d", "k_c"), dict(_ORIENT), ("Delta", "C", "B", "A"), _vdw_delta, allows_plane=True),
    "regime_map": Target(("a", "d", "k_c"), dict(_ORIENT), ("regime", "Delta", "C", "B", "A"), _regime,
                         allows_plane=True),
    "energy_profile": Target(("a", "d", "k_c"), {**_ORIENT, "z": 0.0, "phi": 0.0, "delta": 0.01},
                             ("U1", "C", "B"), _energy_profile),
}
STRING_PARAMS = {"direction"}


# ---------------------------------------------------------------------------
# config


@dataclass(frozen=True)
class Diagnostic:
    line: int | None
    message: str

    def format(self, source: str = "<config>") -> str:
        return f"{source}:{self.line}: {self.message}" if self.line else f"{source}: {self.message}"


@dataclass
class SweepSpec:
    target: str
    fixed: dict
    swept: dict  # name -> np.ndarray, in config order
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    output: str | None = None

    def points(self) -> list[dict]:
        tgt = TARGETS[self.target]
        names = list(self.swept)
        base = {**tgt.defaults, **self.fixed}
        out = []
        for combo in itertools.product(*(self.swept[n] for n in names)):
            p = dict(base)
            p.update({n: float(v) for n, v in zip(names, combo)})
            out.append(p)
        return out

    def header(self) -> list[str]:
        return list(self.swept) + list(TARGETS[self.target].columns) + ["err", "converged", "message"]


class ConfigError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(d.format() for d in diagnostics))
        self.diagnostics = diagnostics


def _line_index(text: str) -> dict:
    """``(section, key) -> line`` and ``(section, None) -> line`` by scanning the raw text."""
    index = {}
    section = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            index.setdefault((section, None), n)
            continue
        m = re.match(r"([^=:;#\s][^=:]*?)\s*[=:]", line)
        if m and section:
            index.setdefault((section, m.group(1).strip().lower()), n)
    return index


def _range(text: str) -> np.ndarray:
    parts = [eval_number(s) for s in text.replace(":", ",").split(",") if s.strip()]
    if len(parts) == 1:
        return np.array(parts)
    if len(parts) != 3:
        raise ValueError("expected 'start, stop, step'")
    start, stop, step = parts
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step:g}")
    if stop < start:
        raise ValueError(f"empty range: stop {stop:g} < start {start:g}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _scalar(name: str, text: str):
    if name in STRING_PARAMS or text.strip().lower() == PLANE:
        return text.strip().lower()
    return float(eval_number(text))


def eval_number(text: str) -> float:
    """Float or a simple multiple of pi such as ``pi/6`` or ``2*pi``."""
    t = text.strip().lower().replace(" ", "")
    m = re.fullmatch(r"([-+]?[0-9.e+-]*)\*?pi(?:/([0-9.]+))?", t)
    if m:
        coef = m.group(1)
        c = -1.0 if coef == "-" else float(coef) if coef not in ("", "+") else 1.0
        return c * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
    return float(t)


def _check_point_domain(spec: SweepSpec, lines: dict) -> list[Diagnostic]:
    out = []
    tgt = TARGETS[spec.target]

    def where(name):
        sec = "sweep" if name in spec.swept else "fixed"
        return lines.get((sec, name))

    def values(name):
        if name in spec.swept:
            return list(spec.swept[name])
        v = {**tgt.defaults, **spec.fixed}.get(name)
        return [] if v is None else [v]

    for name in ("d", "k_c"):
        bad = [v for v in values(name) if not (isinstance(v, float) and v > 0)]
        if bad:
            out.append(Diagnostic(where(name), f"{name} must be > 0 (rho must exceed a); got {bad[0]!r}"))
    a_vals = values("a")
    for v in a_vals:
        if v == PLANE and not tgt.allows_plane:
            out.append(Diagnostic(where("a"), f"a = plane is only available for the vdW C/Delta targets"))
            break
        if v != PLANE and not (isinstance(v, float) and v > 0):
            out.append(Diagnostic(where("a"), f"a must be > 0, got {v!r}"))
            break
    if "beta" in tgt.defaults:
        for v in values("beta"):
            if not 0 < v <= 1:
                out.append(Diagnostic(where("beta"), f"beta must satisfy 0 < beta <= 1, got {v:g}"))
                break
    direction = {**tgt.defaults, **spec.fixed}.get("direction")
    if direction not in (None, "z", "phi"):
        out.append(Diagnostic(where("direction"), f"direction must be 'z' or 'phi', got {direction!r}"))
    if tgt.azimuthal_only or direction == "phi":
        for a, k in itertools.product(a_vals, values("k_c")):
            if a == PLANE or not (isinstance(a, float) and a > 0 and k > 0):
                continue
            try:
                mode_count(a, k)
            except ConstraintViolation as exc:
                line = where("k_c") if "k_c" in spec.swept or "a" not in spec.swept else where("a")
                out.append(Diagnostic(line, f"{exc} (a={a:g}, k_c={k:g})"))
                break
    if "delta" in tgt.defaults:
        for dv, hv in itertools.product(values("d"), values("delta")):
            if hv < 0:
                out.append(Diagnostic(where("delta"), f"delta must be >= 0, got {hv:g}"))
                break
            if isinstance(dv, float) and dv > 0 and hv >= dv:
                out.append(Diagnostic(where("delta"), f"delta={hv:g} >= d={dv:g}: point is not outside the surface"))
                break
    return out


def parse_config(text: str, target_override: str | None = None) -> tuple[SweepSpec | None, list[Diagnostic]]:
    """Parse and validate; returns ``(spec, [])`` or ``(None, diagnostics)``."""
    lines = _line_index(text)
    diags: list[Diagnostic] = []
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        return None, [Diagnostic(getattr(exc, "lineno", None), f"malformed config: {exc.message}")]

    sweep = cp["sweep"] if cp.has_section("sweep") else {}
    target = sweep.get("target", target_override)
    if target_override and target not in (None, target_override):
        diags.append(Diagnostic(lines.get(("sweep", "target")),
                                f"this command runs target {target_override!r}, config asks for {target!r}"))
    target = target_override or target
    if target not in TARGETS:
        diags.append(Diagnostic(lines.get(("sweep", "target")) or lines.get(("sweep", None)),
                                f"unknown or missing target {target!r}; choose from {', '.join(TARGETS)}"))
        return None, diags
    tgt = TARGETS[target]
    allowed = set(tgt.required) | set(tgt.defaults)

    swept: dict = {}
    for key, raw in sweep.items():
        if key == "target":
            continue
        if key not in allowed:
            diags.append(Diagnostic(lines.get(("sweep", key)), f"unknown parameter {key!r} for {target}"))
            continue
        if key in STRING_PARAMS:
            diags.append(Diagnostic(lines.get(("sweep", key)), f"{key} cannot be swept"))
            continue
        try:
            swept[key] = _range(raw)
        except ValueError as exc:
            diags.append(Diagnostic(lines.get(("sweep", key)), f"bad range for {key}: {exc}"))

    fixed: dict = {}
    if cp.has_section("fixed"):
        for key, raw in cp["fixed"].items():
            if key not in allowed:
                diags.append(Diagnostic(lines.get(("fixed", key)), f"unknown parameter {key!r} for {target}"))
                continue
            if key in swept:
                diags.append(Diagnostic(lines.get(("fixed", key)), f"{key} is both swept and fixed"))
                continue
            try:
                fixed[key] = _scalar(key, raw)
            except ValueError:
                diags.append(Diagnostic(lines.get(("fixed", key)), f"{key} = {raw!r} is not a number"))

    for key in tgt.required:
        if key not in swept and key not in fixed:
            diags.append(Diagnostic(lines.get(("fixed", None)), f"missing required parameter {key!r}"))

    kwargs = {}
    if cp.has_section("numerics"):
        types = {f.name: f.type for f in fields(NumericsConfig)}
        for key, raw in cp["numerics"].items():
            if key not in types:
                diags.append(Diagnostic(lines.get(("numerics", key)), f"unknown numerics option {key!r}"))
                continue
            try:
                kwargs[key] = raw.strip() if key == "tail_cutoff_policy" else (
                    int(raw) if key in ("max_order", "max_quad_depth") else float(raw))
            except ValueError:
                diags.append(Diagnostic(lines.get(("numerics", key)), f"{key} = {raw!r} is not a number"))
    try:
        numerics = NumericsConfig(**kwargs)
    except ValueError as exc:
        diags.append(Diagnostic(lines.get(("numerics", None)), str(exc)))
        numerics = NumericsConfig()

    output = cp["output"].get("path") if cp.has_section("output") else None
    if diags:
        return None, diags
    spec = SweepSpec(target, fixed, swept, numerics, output)
    diags = _check_point_domain(spec, lines)
    return (None, diags) if diags else (spec, [])


def validate_config(path: str | os.PathLike, target_override: str | None = None) -> list[Diagnostic]:
    """Diagnostics for the config at ``path`` (empty when valid); raises OSError if unreadable."""
    text = Path(path).read_text()
    return parse_config(text, target_override)[1]


def load_config(path: str | os.PathLike, target_override: str | None = None) -> SweepSpec:
    spec, diags = parse_config(Path(path).read_text(), target_override)
    if diags:
        raise ConfigError(diags)
    return spec


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Row:
    values: tuple
    err: float
    converged: bool
    message: str = ""


def evaluate_point(target: str, params: dict, cfg: NumericsConfig) -> Row:
    """One sweep point; failures become a non-converged row instead of an exception."""
    tgt = TARGETS[target]
    nan = (math.nan,) * len(tgt.columns)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            values, err = tgt.evaluate(params, cfg)
        except ConvergenceError as exc:
            rep = exc.report
            err = rep.estimated_error if rep is not None else math.nan
            return Row(nan, err, False, str(exc))
        except (ValueError, ArithmeticError) as exc:
            return Row(nan, math.nan, False, f"{type(exc).__name__}: {exc}")
    note = "; ".join(sorted({str(w.message) for w in caught}))
    return Row(tuple(values), float(err), True, note)


def _evaluate_star(args):
    return evaluate_point(*args)


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def evaluate_points(target: str, points: list[dict], cfg: NumericsConfig, workers: int | None = None) -> list[Row]:
    """Evaluate in input order; with several workers, contiguous blocks go to each process."""
    workers = worker_count() if workers is None else workers
    jobs = [(target, p, cfg) for p in points]
    if workers <= 1 or len(jobs) < 2:
        return [_evaluate_star(j) for j in jobs]
    chunk = max(1, math.ceil(len(jobs) / workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_star, jobs, chunksize=chunk))


def format_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return repr(float(v))


def write_csv(header: list[str], rows: list[list], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_value(v) for v in r])


def run_sweep(spec: SweepSpec, workers: int | None = None) -> tuple[str, list[Row]]:
    """Evaluate every grid point and return the CSV text together with the rows."""
    points = spec.points()
    rows = evaluate_points(spec.target, points, spec.numerics, workers)
    buf = io.StringIO()
    table = [[p[n] for n in spec.swept] + list(r.values) + [r.err, r.converged, r.message]
             for p, r in zip(points, rows)]
    write_csv(spec.header(), table, buf)
    return buf.getvalue(), rows
