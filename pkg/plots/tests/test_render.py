import json
import math

import numpy as np
import pytest

from aiqmplots import (FigureSpec, PanelSpec, PlotDataError, SeriesSpec,
                       load_figure_spec, render)
from aiqmplots.cli import main as plots_main


def line_csv(tmp_path, name="sweep.csv", with_fit=False):
    lines = ["# experiment: fig4-scaling", "# version: 0.1.0",
             "# scan_variable: n_particles"]
    if with_fit:
        lines += ["# fit_prefactor: 270", "# fit_exponent: 0.95"]
    lines.append("n_particles,delta_omega0_eff,sql,hl,status")
    for n in (20, 40, 80):
        lines.append(f"{n},{270 * n ** -0.95},{1 / (math.sqrt(n) * 0.01)},"
                     f"{1 / (n * 0.01)},ok")
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def sphere_csv(tmp_path, name="husimi.csv"):
    thetas = np.linspace(0, np.pi, 7)
    phis = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    lines = ["# experiment: husimi-checkpoint", "# checkpoint: entangled",
             "theta,phi,q"]
    for th in thetas:
        for ph in phis:
            q = math.exp(-((th - 1.0) ** 2 + (ph - 2.0) ** 2))
            lines.append(f"{th},{ph},{q}")
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_render_line_panel_with_references(tmp_path):
    csv = line_csv(tmp_path, with_fit=True)
    spec = FigureSpec(panels=(
        PanelSpec(csv=csv, name="scaling", x="n_particles",
                  series=(SeriesSpec(column="delta_omega0_eff", label="data"),),
                  xscale="log", yscale="log", hl_line=True, power_law_line=True),))
    written = render(spec, str(tmp_path / "out"))
    assert len(written) == 1
    content = open(written[0]).read()
    assert content.lstrip().startswith("<?xml")   # vector output
    assert "SQL" in content                        # legend carries the reference


def test_render_missing_column_names_it(tmp_path):
    csv = line_csv(tmp_path)
    spec = FigureSpec(panels=(
        PanelSpec(csv=csv, name="bad", x="n_particles",
                  series=(SeriesSpec(column="delta_omega0_full"),)),))
    with pytest.raises(PlotDataError) as err:
        render(spec, str(tmp_path / "out"))
    assert "delta_omega0_full" in str(err.value)


def test_render_power_law_needs_fit_metadata(tmp_path):
    csv = line_csv(tmp_path, with_fit=False)
    spec = FigureSpec(panels=(
        PanelSpec(csv=csv, name="nofit", x="n_particles",
                  series=(SeriesSpec(column="delta_omega0_eff"),),
                  power_law_line=True),))
    with pytest.raises(PlotDataError):
        render(spec, str(tmp_path / "out"))


def test_render_empty_csv_writes_nothing(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("# experiment: x\na,b,status\n")
    spec = FigureSpec(panels=(
        PanelSpec(csv=str(empty), name="void", x="a",
                  series=(SeriesSpec(column="b"),)),))
    out_dir = tmp_path / "out"
    with pytest.raises(PlotDataError):
        render(spec, str(out_dir))
    assert not (out_dir / "void.svg").exists()


@pytest.mark.parametrize("projection", ["mollweide", "orthographic"])
def test_render_sphere_projections(tmp_path, projection):
    csv = sphere_csv(tmp_path)
    spec = FigureSpec(panels=(
        PanelSpec(csv=csv, name=f"s-{projection}", kind="sphere",
                  projection=projection),))
    written = render(spec, str(tmp_path / "out"))
    assert open(written[0]).read().lstrip().startswith("<?xml")


def test_rendering_is_read_only_and_repeatable(tmp_path):
    csv = line_csv(tmp_path, with_fit=True)
    before = open(csv, "rb").read()
    spec = FigureSpec(panels=(
        PanelSpec(csv=csv, name="twice", x="n_particles",
                  series=(SeriesSpec(column="delta_omega0_eff"),),
                  power_law_line=True),))
    first = render(spec, str(tmp_path / "out1"))
    second = render(spec, str(tmp_path / "out2"))
    assert open(csv, "rb").read() == before
    assert open(first[0], "rb").read() == open(second[0], "rb").read()


def test_cli_round_trip(tmp_path, capsys):
    csv = line_csv(tmp_path)
    spec = {"panels": [{"csv": csv, "name": "cli-panel", "x": "n_particles",
                        "series": [{"column": "delta_omega0_eff"}],
                        "xscale": "log", "yscale": "log"}]}
    spec_path = tmp_path / "figure-spec.json"
    spec_path.write_text(json.dumps(spec))
    out_dir = tmp_path / "figs"
    assert plots_main([str(spec_path), "--out", str(out_dir)]) == 0
    assert (out_dir / "cli-panel.svg").exists()

    bad = {"panels": [{"csv": csv, "x": "n_particles",
                       "series": [{"column": "missing_column"}]}]}
    spec_path.write_text(json.dumps(bad))
    assert plots_main([str(spec_path), "--out", str(out_dir)]) == 1
    assert "missing_column" in capsys.readouterr().err


def test_figure_spec_loader_defaults(tmp_path):
    csv = line_csv(tmp_path)
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(
        {"panels": [{"csv": "sweep.csv", "x": "n_particles",
                     "series": [{"column": "sql"}]}]}))
    spec = load_figure_spec(str(spec_path))
    assert spec.panels[0].csv == csv          # relative to the spec file
    assert spec.panels[0].name == "panel01"
    assert spec.panels[0].sql_line is True
    with pytest.raises(PlotDataError):
        spec_path.write_text(json.dumps({"panels": []}))
        load_figure_spec(str(spec_path))
