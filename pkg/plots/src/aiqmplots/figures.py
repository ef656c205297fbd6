"""Figure rendering from result tables.

A figure spec is a JSON document with a list of panels; each panel names its
input CSV, the x column, the line series, axis scales, and which reference
lines to draw.  Every panel renders to its own vector image.  Two panel
kinds exist: ``lines`` (default) and ``sphere`` (Husimi map projection).
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from typing import List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402

from .csvio import PlotDataError, Table, read_table  # noqa: E402
from .spheres import render_sphere  # noqa: E402

# content-addressed ids and no creation date: identical inputs, identical bytes
plt.rcParams["svg.hashsalt"] = "aiqm-plots"

_SERIES_STYLES = [
    {"color": "#00a0b0", "linestyle": "-"},
    {"color": "#6a4a3c", "linestyle": "--"},
    {"color": "#cc333f", "linestyle": ":"},
    {"color": "#eb6841", "linestyle": "-."},
    {"color": "#4f372d", "linestyle": "-"},
]


@dataclasses.dataclass(frozen=True)
class SeriesSpec:
    column: str
    label: Optional[str] = None


@dataclasses.dataclass(frozen=True)
class PanelSpec:
    csv: str
    name: str
    kind: str = "lines"                  # lines | sphere
    x: Optional[str] = None
    series: Tuple[SeriesSpec, ...] = ()
    xscale: str = "linear"
    yscale: str = "linear"
    sql_line: bool = True
    hl_line: bool = False
    power_law_line: bool = False
    projection: str = "mollweide"        # sphere panels: mollweide | orthographic
    title: Optional[str] = None
    xlabel: Optional[str] = None
    ylabel: Optional[str] = None


@dataclasses.dataclass(frozen=True)
class FigureSpec:
    panels: Tuple[PanelSpec, ...]
    image_format: str = "svg"


def load_figure_spec(path: str) -> FigureSpec:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    base = os.path.dirname(os.path.abspath(path))
    panels = []
    for i, p in enumerate(raw.get("panels", [])):
        csv = p["csv"]
        if not os.path.isabs(csv):
            csv = os.path.join(base, csv)
        refs = p.get("reference_lines", {})
        series = tuple(SeriesSpec(column=s["column"], label=s.get("label"))
                       for s in p.get("series", []))
        panels.append(PanelSpec(
            csv=csv, name=p.get("name", f"panel{i + 1:02d}"),
            kind=p.get("kind", "lines"), x=p.get("x"), series=series,
            xscale=p.get("xscale", "linear"), yscale=p.get("yscale", "linear"),
            sql_line=refs.get("sql", True), hl_line=refs.get("hl", False),
            power_law_line=refs.get("power_law", False),
            projection=p.get("projection", "mollweide"), title=p.get("title"),
            xlabel=p.get("xlabel"), ylabel=p.get("ylabel")))
    if not panels:
        raise PlotDataError(f"{path}: figure spec declares no panels")
    return FigureSpec(panels=tuple(panels),
                      image_format=raw.get("format", "svg"))


def _finite_mask(xs, ys):
    return [(x, y) for x, y in zip(xs, ys)
            if not (math.isnan(x) or math.isnan(y))]


def _render_lines(panel: PanelSpec, table: Table, out_path: str) -> None:
    if panel.x is None:
        raise PlotDataError(f"panel {panel.name!r}: a lines panel needs an x column")
    xs = table.column(panel.x)
    if not panel.series:
        raise PlotDataError(f"panel {panel.name!r}: no series declared")
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    for style, series in zip(_SERIES_STYLES * 3, panel.series):
        pairs = _finite_mask(xs, table.column(series.column))
        if pairs:
            px, py = zip(*pairs)
            ax.plot(px, py, label=series.label or series.column, **style)
    if panel.sql_line and table.has_column("sql"):
        pairs = _finite_mask(xs, table.column("sql"))
        if pairs:
            px, py = zip(*pairs)
            ax.plot(px, py, color="0.45", linestyle="-.", label="SQL")
    if panel.hl_line and table.has_column("hl"):
        pairs = _finite_mask(xs, table.column("hl"))
        if pairs:
            px, py = zip(*pairs)
            ax.plot(px, py, color="0.7", linestyle=":", label="HL")
    if panel.power_law_line:
        pref = table.metadata.get("fit_prefactor")
        expo = table.metadata.get("fit_exponent")
        if pref is None or expo is None:
            raise PlotDataError(
                f"panel {panel.name!r}: power-law overlay requested but the table "
                "metadata carries no fit_prefactor/fit_exponent")
        grid = np.linspace(min(xs), max(xs), 200)
        ax.plot(grid, float(pref) * grid ** (-float(expo)), color="#e17aa3",
                linestyle="--",
                label=f"{float(pref):.0f} N^-{float(expo):.2f}")
    ax.set_xscale(panel.xscale)
    ax.set_yscale(panel.yscale)
    ax.set_xlabel(panel.xlabel or panel.x)
    ax.set_ylabel(panel.ylabel or "value")
    if panel.title:
        ax.set_title(panel.title)
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(out_path, metadata={"Date": None})
    plt.close(fig)


def render(spec: FigureSpec, out_dir: str) -> List[str]:
    """Render every panel to ``out_dir``; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for panel in spec.panels:
        table = read_table(panel.csv)
        out_path = os.path.join(out_dir, f"{panel.name}.{spec.image_format}")
        if panel.kind == "sphere":
            render_sphere(table, panel.projection, panel.title, out_path)
        elif panel.kind == "lines":
            _render_lines(panel, table, out_path)
        else:
            raise PlotDataError(f"panel {panel.name!r}: unknown kind {panel.kind!r}")
        written.append(out_path)
    return written
