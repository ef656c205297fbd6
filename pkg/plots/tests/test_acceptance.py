"""Secondary acceptance: every built-in experiment CSV renders to vector
images (with SQL reference lines and the scaling-fit overlay), and Husimi
checkpoint CSVs render as four sphere projections.

The tables come from the simulator's command line with reduced system sizes;
the column layout is identical to the full-scale presets.
"""

import json
import os
import subprocess
import sys

import pytest

from aiqmplots import husimi_figure_spec, preset_figure_spec, render

PRESETS = ["fig2-panels", "fig2-timesweep", "fig2-chisweep", "fig3-omega",
           "fig3-ratio", "fig3-alpha", "fig4-compare", "fig4-scaling",
           "fig4-noise"]

CHEAP_OVERRIDES = {
    "fig2-panels": {"physics.n_particles": 16,
                    "sweep.values": [0.5, 1.0, 1.5]},
    "fig2-timesweep": {"physics.n_particles": 16,
                       "sweep.values": [0.01, 0.05, 0.1]},
    "fig2-chisweep": {"physics.n_particles": 16,
                      "sweep.values": [0.5, 1.0, 2.0]},
    "fig3-omega": {"physics.n_particles": 16,
                   "sweep.values": [2.0, 10.0, 40.0]},
    "fig3-ratio": {"physics.n_particles": 16,
                   "sweep.values": [0.7, 0.8131, 0.9]},
    "fig3-alpha": {"physics.n_particles": 16,
                   "sweep.values": [0.3, 0.5, 0.7]},
    "fig4-compare": {"physics.n_particles": 12,
                     "sweep.values": [0.01, 0.02]},
    "fig4-scaling": {"sweep.values": [12, 16, 20]},
    "fig4-noise": {"physics.n_particles": 16,
                   "sweep.values": [0.0, 2.0, 4.0]},
}


def run_simulator(args, cwd):
    proc = subprocess.run([sys.executable, "-m", "aiqmsim.cli", *args],
                          cwd=cwd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def preset_tables(tmp_path_factory):
    root = tmp_path_factory.mktemp("tables")
    paths = {}
    for preset in PRESETS:
        cfg = {"preset": preset, "overrides": CHEAP_OVERRIDES[preset]}
        cfg_path = root / f"{preset}.json"
        cfg_path.write_text(json.dumps(cfg))
        out_path = root / f"{preset}.csv"
        run_simulator(["run", str(cfg_path), "--output", str(out_path)], str(root))
        paths[preset] = str(out_path)
    return paths


@pytest.mark.parametrize("preset", PRESETS)
def test_every_preset_table_renders(preset, preset_tables, tmp_path):
    spec = preset_figure_spec(preset, preset_tables[preset])
    written = render(spec, str(tmp_path))
    assert written, "no image written"
    for path in written:
        content = open(path).read()
        assert content.lstrip().startswith("<?xml")
        assert os.path.getsize(path) > 1000


def test_scaling_fit_overlay_present(preset_tables, tmp_path):
    spec = preset_figure_spec("fig4-scaling", preset_tables["fig4-scaling"])
    assert spec.panels[0].power_law_line
    written = render(spec, str(tmp_path))
    content = open(written[0]).read()
    assert "N^-" in content          # overlay label rendered into the legend


def test_precision_panels_draw_sql_reference(preset_tables, tmp_path):
    spec = preset_figure_spec("fig2-panels", preset_tables["fig2-panels"])
    written = render(spec, str(tmp_path))
    precision_panel = [p for p in written if "delta_omega0" in p]
    assert precision_panel
    assert "SQL" in open(precision_panel[0]).read()


def test_husimi_checkpoints_render_four_spheres(tmp_path):
    cfg = {"preset": "fig4-compare",
           "overrides": {"physics.n_particles": 12,
                         "physics.husimi_n_theta": 25,
                         "physics.husimi_n_phi": 48}}
    cfg_path = tmp_path / "husimi.json"
    cfg_path.write_text(json.dumps(cfg))
    maps_dir = tmp_path / "maps"
    run_simulator(["husimi", str(cfg_path), "--output", str(maps_dir)],
                  str(tmp_path))
    csvs = {name.split("_")[1].split(".")[0]: str(maps_dir / name)
            for name in sorted(os.listdir(maps_dir))}
    assert len(csvs) == 4
    spec = husimi_figure_spec(csvs)
    written = render(spec, str(tmp_path / "spheres"))
    assert len(written) == 4
    for path in written:
        assert open(path).read().lstrip().startswith("<?xml")
