"""Reproduction of the reference figure curves as CSV plus a declarative plot script.

Parameters are fixed by :data:`FIGURE_PARAMS`.  Each figure writes
``<id>.csv`` in long format (one row per series point) and ``<id>.plot``,
an INI-style description of axes, series and line styles that any
external renderer can consume.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .numerics import NumericsConfig
from .sweep import PLANE, Row, evaluate_points, write_csv

FIGURE_PARAMS: dict[str, dict] = {
    "fig3": {"target": "charge_z", "a": 1.0, "d": 1.0, "k_c": 10.0},
    "fig5": {"target": "charge_ratio", "direction": "z", "k_c": 10.0, "radii": (0.5, 1.0, 2.0)},
    "fig6": {"target": "charge_phi", "a": 1.0, "d": 1.0, "k_c": 10.0},
    "fig7": {"target": "charge_ratio", "direction": "phi", "k_c": 10.0, "radii": (0.5, 1.0, 2.0)},
    "fig8": {"target": "vdw_C", "direction": "z", "beta": 0.2, "k_c": 6.0, "theta": 0.0, "phi_o": 0.0,
             "radii": (1.0, 3.0, 9.0)},
    "fig9": {"target": "vdw_Delta", "direction": "z", "beta": 0.2, "k_c": 6.0, "theta": math.pi / 6,
             "phi_o": 0.0, "radii": (1.0, 3.0, 9.0)},
    "fig10": {"target": "vdw_C", "direction": "phi", "beta": 0.2, "k_c": 6.0, "theta": math.pi / 2,
              "phi_o": math.pi / 2, "radii": (1.0, 3.0, 9.0)},
    "fig11": {"target": "vdw_Delta", "direction": "phi", "beta": 0.2, "k_c": 6.0, "theta": math.pi / 2,
              "phi_o": math.pi / 3, "radii": (1.0, 3.0, 9.0)},
}

# line styles keyed by radius
_CHARGE_STYLES = {0.5: "dot-dashed", 1.0: "dashed", 2.0: "solid"}
_VDW_STYLES = {1.0: "dashed", 3.0: "dot-dashed", 9.0: "dotted", PLANE: "solid"}

# abscissae
PROFILE_PERIODS = 3
PROFILE_STEPS_PER_PERIOD = 200
RATIO_D = np.round(np.arange(1, 101) * 0.02, 10)
# the lateral sums fall to ~1e-8 at d = 2, below the default absolute tolerance
RATIO_ABS_TOL = 1e-20
REGIME_D = np.round(0.3 + 0.05 * np.arange(15), 10)

_LABELS = {
    "fig3": ("z", "U1_cc-z / (delta/(a pi))"),
    "fig5": ("d", "U1_cc-z / U1_cp"),
    "fig6": ("phi", "U1_cc-phi / (delta/(a pi))"),
    "fig7": ("d", "U1_cc-phi / U1_cp"),
    "fig8": ("d", "C_cc-z"),
    "fig9": ("d", "Delta_cc-z"),
    "fig10": ("d", "C_cc-phi"),
    "fig11": ("d", "Delta_cc-phi"),
}
FIGURE_IDS = tuple(FIGURE_PARAMS)


@dataclass
class Series:
    label: str
    style: str
    x: np.ndarray
    rows: list[Row]


@dataclass
class FigureOutput:
    figure_id: str
    csv_text: str
    plot_text: str
    series: list[Series]

    @property
    def failures(self) -> int:
        return sum(not r.converged for s in self.series for r in s.rows)


def _profile(fid, cap, cfg, workers):
    k_c = cap["k_c"]
    wave = k_c if cap["target"] == "charge_z" else k_c * cap["a"]
    coord = "z" if cap["target"] == "charge_z" else "phi"
    x = 2 * math.pi / wave * np.arange(PROFILE_PERIODS * PROFILE_STEPS_PER_PERIOD + 1) / PROFILE_STEPS_PER_PERIOD
    base = {"a": cap["a"], "d": cap["d"], "k_c": k_c, "delta": 0.01, "z": 0.0, "phi": 0.0}
    pts = [{**base, coord: float(v)} for v in x]
    rows = evaluate_points(cap["target"], pts, cfg, workers)
    # plot the normalized column
    rows = [Row((r.values[1],), r.err, r.converged, r.message) for r in rows]
    return [Series(f"a={cap['a']:g}", "solid", x, rows)]


def _ratio(fid, cap, cfg, workers):
    out = []
    for a in cap["radii"]:
        pts = [{"a": a, "d": float(d), "k_c": cap["k_c"], "direction": cap["direction"]} for d in RATIO_D]
        out.append(Series(f"a={a:g}", _CHARGE_STYLES[a], RATIO_D, evaluate_points(cap["target"], pts, cfg, workers)))
    return out


def _regime(fid, cap, cfg, workers):
    out = []
    keys = ("direction", "k_c", "beta", "theta", "phi_o")
    for a in cap["radii"] + (PLANE,):
        pts = [{**{k: cap[k] for k in keys}, "a": a, "d": float(d), "angle_tol": 1e-3} for d in REGIME_D]
        label = "plane" if a == PLANE else f"a={a:g}"
        out.append(Series(label, _VDW_STYLES[a], REGIME_D, evaluate_points(cap["target"], pts, cfg, workers)))
    return out


def _plot_script(fid: str, series: list[Series], inset: bool) -> str:
    xlabel, ylabel = _LABELS[fid]
    cp = configparser.ConfigParser()
    cp["plot"] = {"data": f"{fid}.csv", "x": "x", "y": "y", "xlabel": xlabel, "ylabel": ylabel,
                  "group_by": "series"}
    for s in series:
        cp[f"series {s.label}"] = {"select": f"series == {s.label}", "style": s.style}
    if inset:
        cp["inset"] = {"x": "x", "y": "ratio_to_plane", "xlabel": xlabel, "ylabel": f"{ylabel} / C_cp",
                       "exclude": "series == plane"}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def reproduce_figure(fid: str, cfg: NumericsConfig | None = None, workers: int | None = None) -> FigureOutput:
    if fid not in FIGURE_PARAMS:
        raise ValueError(f"unknown figure {fid!r}; choose from {', '.join(FIGURE_IDS)}")
    cap = FIGURE_PARAMS[fid]
    cfg = cfg or NumericsConfig()
    if fid in ("fig3", "fig6"):
        series = _profile(fid, cap, cfg, workers)
    elif fid in ("fig5", "fig7"):
        series = _ratio(fid, cap, replace(cfg, abs_tol=min(cfg.abs_tol, RATIO_ABS_TOL)), workers)
    else:
        series = _regime(fid, cap, cfg, workers)

    inset = cap["target"] == "vdw_C"
    header = ["series", "x", "y", "err", "converged", "message"] + (["ratio_to_plane"] if inset else [])
    plane = next((s for s in series if s.label == "plane"), None)
    table = []
    for s in series:
        for i, (x, r) in enumerate(zip(s.x, s.rows)):
            row = [s.label, float(x), r.values[0], r.err, r.converged, r.message]
            if inset:
                row.append(r.values[0] / plane.rows[i].values[0])
            table.append(row)
    buf = io.StringIO()
    write_csv(header, table, buf)
    return FigureOutput(fid, buf.getvalue(), _plot_script(fid, series, inset), series)


def write_figure(out: FigureOutput, directory: str | Path) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / f"{out.figure_id}.csv"
    plot_path = directory / f"{out.figure_id}.plot"
    csv_path.write_text(out.csv_text)
    plot_path.write_text(out.plot_text)
    return csv_path, plot_path
