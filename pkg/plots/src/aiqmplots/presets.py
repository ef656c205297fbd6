"""Ready-made figure specs for the simulator's built-in experiment tables."""

from __future__ import annotations

from typing import Dict, List

from .csvio import read_table
from .figures import FigureSpec, PanelSpec, SeriesSpec

_MODE_SERIES = [("full", "full drive"), ("eff", "effective"), ("bare", "undriven")]


def _mode_series(table, quantity: str) -> List[SeriesSpec]:
    out = []
    for suffix, label in _MODE_SERIES:
        column = f"{quantity}_{suffix}"
        if table.has_column(column):
            out.append(SeriesSpec(column=column, label=label))
    return out


def preset_figure_spec(experiment: str, csv_path: str) -> FigureSpec:
    """Panels appropriate for one of the built-in experiment CSVs."""
    table = read_table(csv_path)
    panels: List[PanelSpec] = []
    if experiment == "fig2-panels":
        for quantity, ylabel in (("jz_mean", "mean Jz"), ("jz_std", "Jz std"),
                                 ("delta_omega0", "frequency uncertainty")):
            panels.append(PanelSpec(
                csv=csv_path, name=f"{experiment}-{quantity}", x="delta",
                series=tuple(_mode_series(table, quantity)),
                sql_line=quantity == "delta_omega0", ylabel=ylabel))
    elif experiment in ("fig2-timesweep", "fig4-compare"):
        panels.append(PanelSpec(
            csv=csv_path, name=f"{experiment}-precision", x="chi_t_signal",
            series=tuple(_mode_series(table, "delta_omega0")),
            xscale="log", yscale="log", ylabel="frequency uncertainty"))
    elif experiment == "fig2-chisweep":
        panels.append(PanelSpec(
            csv=csv_path, name=f"{experiment}-precision", x="chi",
            series=tuple(_mode_series(table, "delta_omega0")),
            xscale="log", yscale="log", ylabel="frequency uncertainty"))
    elif experiment == "fig3-omega":
        panels.append(PanelSpec(
            csv=csv_path, name=f"{experiment}-precision", x="omega_m_factor",
            series=tuple(_mode_series(table, "delta_omega0")),
            xscale="log", ylabel="frequency uncertainty"))
    elif experiment in ("fig3-ratio", "fig3-alpha"):
        x = "ratio" if experiment == "fig3-ratio" else "alpha2_over_pi"
        panels.append(PanelSpec(
            csv=csv_path, name=f"{experiment}-window", x=x,
            series=(SeriesSpec(column="delta_omega0_eff", label="effective"),),
            ylabel="frequency uncertainty"))
    elif experiment == "fig4-scaling":
        panels.append(PanelSpec(
            csv=csv_path, name=f"{experiment}-fit", x="n_particles",
            series=(SeriesSpec(column="delta_omega0_eff", label="staged sequence"),),
            xscale="log", yscale="log", hl_line=True, power_law_line=True,
            ylabel="frequency uncertainty"))
    elif experiment == "fig4-noise":
        panels.append(PanelSpec(
            csv=csv_path, name=f"{experiment}-precision", x="sigma",
            series=(SeriesSpec(column="delta_omega0", label="with noise"),),
            ylabel="frequency uncertainty"))
    elif experiment == "custom-sweep":
        x = table.metadata.get("scan_variable", table.columns[0])
        panels.append(PanelSpec(
            csv=csv_path, name=f"{experiment}-precision", x=x,
            series=(SeriesSpec(column="delta_omega0", label="precision"),),
            ylabel="frequency uncertainty"))
    else:
        raise ValueError(f"no preset figure spec for experiment {experiment!r}")
    return FigureSpec(panels=tuple(panels))


def husimi_figure_spec(csv_paths: Dict[str, str],
                       projection: str = "mollweide") -> FigureSpec:
    """One sphere panel per checkpoint map."""
    panels = tuple(PanelSpec(csv=path, name=f"sphere-{name}", kind="sphere",
                             projection=projection, title=name)
                   for name, path in sorted(csv_paths.items()))
    return FigureSpec(panels=panels)
