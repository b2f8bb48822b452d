"""CSV readers for panel inputs and deterministic CSV / JSON / SVG writers."""

from __future__ import annotations

import json
import math
from collections import defaultdict
from pathlib import Path

import numpy as np
import pandas as pd

from .density import DensityGrid, JointDensityGrid
from .dynamics import ConditionalKernel, ErgodicResult, NTPCurve
from .emissions import FuelFactors
from .errors import ConfigError
from .panel import PanelDataset


def _read(path, columns) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"file not found: {path}")
    df = pd.read_csv(path, dtype={"entity": str, "neighbor": str, "region": str,
                                  "variable": str, "fuel": str})
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise ConfigError(f"{path}: missing column(s) {missing}; expected {columns}")
    return df[columns]


def read_panel(path, regions=None, adjacency=None) -> PanelDataset:
    """Long ``entity,year,variable,value`` CSV -> :class:`PanelDataset`.

    Entity order follows first appearance; years span min..max of the file.
    """
    df = _read(path, ["entity", "year", "variable", "value"])
    if df.duplicated(["entity", "year", "variable"]).any():
        raise ConfigError(f"{path}: duplicate (entity, year, variable) rows")
    entities = list(dict.fromkeys(df["entity"]))
    years = list(range(int(df["year"].min()), int(df["year"].max()) + 1))
    e_idx = {e: i for i, e in enumerate(entities)}
    values = {}
    for var, sub in df.groupby("variable", sort=False):
        arr = np.full((len(entities), len(years)), np.nan)
        arr[sub["entity"].map(e_idx).to_numpy(), sub["year"].to_numpy(int) - years[0]] = \
            sub["value"].to_numpy(float)
        values[var] = arr
    return PanelDataset(entities, years, values, regions, adjacency)


def read_regions(path) -> dict:
    df = _read(path, ["entity", "region"])
    return dict(zip(df["entity"], df["region"]))


def read_adjacency(path) -> dict:
    """One ``entity,neighbor`` edge per row; symmetrised when the panel is built."""
    df = _read(path, ["entity", "neighbor"])
    adj = defaultdict(set)
    for a, b in zip(df["entity"], df["neighbor"]):
        adj[a].add(b)
    return dict(adj)


def read_factors(path) -> dict:
    df = _read(path, ["fuel", "cf", "cc", "cof"])
    return {r.fuel: FuelFactors(float(r.cf), float(r.cc), float(r.cof))
            for r in df.itertuples(index=False)}


def read_consumption(path) -> dict:
    df = _read(path, ["entity", "year", "fuel", "quantity"])
    return {(r.entity, int(r.year), r.fuel): float(r.quantity)
            for r in df.itertuples(index=False)}


def read_deflator(path) -> dict:
    df = _read(path, ["entity", "year", "index"])
    return {(r.entity, int(r.year)): float(r.index) for r in df.itertuples(index=False)}


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    return "" if math.isnan(v) else repr(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_density(path, d: DensityGrid) -> Path:
    return write_csv(path, ["x", "density"], zip(d.grid.points, d.density))


def write_joint(path, j: JointDensityGrid) -> Path:
    xs, ys = j.x_grid.points, j.y_grid.points
    rows = ((xs[a], ys[b], j.density[a, b]) for a in range(len(xs)) for b in range(len(ys)))
    return write_csv(path, ["x", "y", "density"], rows)


def write_kernel(path, k: ConditionalKernel) -> Path:
    xs, ys = k.x_grid.points, k.y_grid.points
    rows = ((xs[a], ys[b], k.g[a, b], bool(k.valid[a]))
            for a in range(len(xs)) for b in range(len(ys)))
    return write_csv(path, ["x", "y", "g", "valid"], rows)


def write_ntp(path, c: NTPCurve) -> Path:
    return write_csv(path, ["x", "p", "valid"], zip(c.x_grid.points, c.p, c.valid.astype(bool)))


def write_ergodic(path, r: ErgodicResult) -> tuple:
    path = Path(path)
    csv_path = write_density(path, r.distribution)
    sidecar = write_json(path.with_suffix(".json"), {
        "iterations": int(r.iterations),
        "residual": float(r.residual),
        "converged": bool(r.converged),
    })
    return csv_path, sidecar


# Minimal SVG renderings -----------------------------------------------------------

_W, _H, _PAD = 480, 320, 40
_STROKES = ["none", "6,4", "2,3"]  # solid, dash, dot


def _scale(v, lo, hi, a, b):
    return a + (b - a) * ((v - lo) / (hi - lo) if hi > lo else 0.5)


def svg_lines(path, series: list, title: str = "") -> Path:
    """Overlay line plot; ``series`` is a list of ``(label, x, y)`` drawn solid/dash/dot."""
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(s[2], float) for s in series])
    ok = ~np.isnan(ys)
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(min(0.0, ys[ok].min())), float(ys[ok].max())
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}">',
             f'<text x="{_PAD}" y="20" font-size="12">{title}</text>',
             f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
             'fill="none" stroke="#999"/>']
    for i, (label, x, y) in enumerate(series):
        pts = " ".join(
            f"{_scale(a, x0, x1, _PAD, _W - _PAD):.2f},{_scale(b, y0, y1, _H - _PAD, _PAD):.2f}"
            for a, b in zip(x, y) if not math.isnan(b))
        dash = _STROKES[i % len(_STROKES)]
        parts.append(f'<polyline fill="none" stroke="black" stroke-dasharray="{dash}" '
                     f'points="{pts}"><title>{label}</title></polyline>')
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path


def svg_heatmap(path, xs, ys, z, title: str = "") -> Path:
    """Grey-scale surface as a grid of rectangles, with the 45-degree line overlaid."""
    z = np.asarray(z, float)
    zmax = float(z.max()) or 1.0
    stride = max(1, len(xs) // 64)
    xs_s, ys_s, z_s = xs[::stride], ys[::stride], z[::stride, ::stride]
    cw = (_W - 2 * _PAD) / len(xs_s)
    ch = (_H - 2 * _PAD) / len(ys_s)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}">',
             f'<text x="{_PAD}" y="20" font-size="12">{title}</text>']
    for a in range(len(xs_s)):
        for b in range(len(ys_s)):
            level = int(round(255 * (1 - z_s[a, b] / zmax)))
            parts.append(f'<rect x="{_PAD + a * cw:.2f}" y="{_H - _PAD - (b + 1) * ch:.2f}" '
                         f'width="{cw:.2f}" height="{ch:.2f}" '
                         f'fill="rgb({level},{level},{level})"/>')
    lo, hi = max(xs[0], ys[0]), min(xs[-1], ys[-1])
    if hi > lo:
        p = [(_scale(v, xs[0], xs[-1], _PAD, _W - _PAD), _scale(v, ys[0], ys[-1], _H - _PAD, _PAD))
             for v in (lo, hi)]
        parts.append(f'<line x1="{p[0][0]:.2f}" y1="{p[0][1]:.2f}" x2="{p[1][0]:.2f}" '
                     f'y2="{p[1][1]:.2f}" stroke="red" stroke-dasharray="4,3"/>')
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path
