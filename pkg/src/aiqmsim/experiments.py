"""Experiment presets, sweep execution, and deterministic result tables.

Every experiment is a sweep over one named axis; each sweep point is a pure
function of the configuration, so points can be dispatched to a process pool
and reassembled in sweep order without affecting the output.  Tables
serialize to CSV (17-significant-digit round-trip floats, ``#`` metadata
lines) or JSON.  Identical configuration and package version produce
byte-identical data rows; the metadata timestamp honors SOURCE_DATE_EPOCH
for fully reproducible files.
"""

from __future__ import annotations

import dataclasses
import datetime as _dt
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import floquet, metrology, protocol
from ._version import __version__
from .errors import AiqmError
from .spin import SpinSystem, husimi_q

WORKERS_ENV_VAR = "AIQMSIM_WORKERS"

RECOGNIZED_AXES = ("delta", "chi", "t_signal", "n_particles", "omega_m_factor",
                   "ratio", "alpha2_over_pi", "sigma")

PRESET_NAMES = ("fig2-panels", "fig2-timesweep", "fig2-chisweep",
                "fig3-omega", "fig3-ratio", "fig3-alpha",
                "fig4-compare", "fig4-scaling", "fig4-noise", "custom-sweep")


@dataclasses.dataclass(frozen=True)
class PhysicsConfig:
    """Physical parameters shared by all experiments (absolute units)."""

    n_particles: int = 100
    chi: float = 1.0
    delta: float = 1.0
    t_signal: float = 0.01
    chi_t_prepare: float = 0.03
    omega_m_factor: float = 20.0
    blocks_n: int = 1
    steps_per_period: int = 64
    swap_drive_roles: bool = False
    husimi_n_theta: int = 121
    husimi_n_phi: int = 241


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    axis: str
    values: Tuple[float, ...]


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    physics: PhysicsConfig = PhysicsConfig()
    sweep: Optional[SweepConfig] = None
    mode: Optional[str] = None          # None = experiment default
    pipeline: str = "ramsey"            # custom-sweep only: ramsey | full-stage
    output_format: str = "csv"
    workers: int = 0                    # 0 = environment default, else 1

    def canonical_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["sweep"] = None if self.sweep is None else {
            "axis": self.sweep.axis, "values": list(self.sweep.values)}
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True,
                          separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclasses.dataclass(frozen=True)
class Diagnostic:
    field: str
    reason: str

    def __str__(self):
        return f"{self.field}: {self.reason}"


def _default_sweep(experiment: str, physics: PhysicsConfig) -> SweepConfig:
    if experiment == "fig2-panels":
        return SweepConfig("delta", tuple(np.round(np.linspace(0.25, 2.5, 10), 10)))
    if experiment == "fig2-timesweep":
        return SweepConfig("t_signal",
                           tuple(np.round(np.linspace(0.01, 0.1, 10) / physics.chi, 12)))
    if experiment == "fig2-chisweep":
        return SweepConfig("chi", tuple(np.round(np.logspace(-1, 1, 9), 12)))
    if experiment == "fig3-omega":
        return SweepConfig("omega_m_factor", (2.0, 5.0, 10.0, 20.0, 40.0))
    if experiment == "fig3-ratio":
        return SweepConfig("ratio", tuple(np.round(np.arange(0.55, 0.9501, 0.01), 10)))
    if experiment == "fig3-alpha":
        return SweepConfig("alpha2_over_pi",
                           tuple(np.round(np.arange(0.05, 0.9501, 0.01), 10)))
    if experiment == "fig4-compare":
        return SweepConfig("t_signal", (0.005, 0.01, 0.02, 0.05))
    if experiment == "fig4-scaling":
        return SweepConfig("n_particles", (20.0, 40.0, 60.0, 80.0, 100.0))
    if experiment == "fig4-noise":
        top = 2.0 * math.sqrt(physics.n_particles)
        return SweepConfig("sigma", tuple(np.round(np.linspace(0.0, top, 21), 10)))
    raise ValueError(f"no default sweep for experiment {experiment!r}")


def preset_config(name: str, mode: Optional[str] = None,
                  output_format: str = "csv", workers: int = 0) -> ExperimentConfig:
    """Build the default configuration for a named experiment preset."""
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}; see {PRESET_NAMES}")
    physics = PhysicsConfig()
    if name.startswith("fig4"):
        physics = dataclasses.replace(physics, omega_m_factor=100.0)
    if name == "custom-sweep":
        cfg = ExperimentConfig(experiment=name, physics=physics,
                               sweep=SweepConfig("delta", (0.5, 1.0, 1.5)),
                               mode=mode or "effective", output_format=output_format,
                               workers=workers)
        return cfg
    return ExperimentConfig(experiment=name, physics=physics,
                            sweep=_default_sweep(name, physics), mode=mode,
                            output_format=output_format, workers=workers)


def list_presets() -> List[str]:
    return list(PRESET_NAMES)


def validate_config(cfg: ExperimentConfig) -> List[Diagnostic]:
    """Collect structural problems; never raises."""
    out: List[Diagnostic] = []
    if cfg.experiment not in PRESET_NAMES:
        out.append(Diagnostic("experiment",
                              f"unknown experiment {cfg.experiment!r}; "
                              f"recognized: {', '.join(PRESET_NAMES)}"))
    p = cfg.physics
    if int(p.n_particles) != p.n_particles or p.n_particles < 1:
        out.append(Diagnostic("physics.n_particles",
                              f"must be a positive integer, got {p.n_particles!r}"))
    for field in ("chi", "t_signal", "omega_m_factor", "chi_t_prepare"):
        val = getattr(p, field)
        if not val > 0:
            out.append(Diagnostic(f"physics.{field}",
                                  f"must be positive, got {val!r}"))
    if p.blocks_n < 1:
        out.append(Diagnostic("physics.blocks_n", f"must be >= 1, got {p.blocks_n!r}"))
    if p.steps_per_period < 16:
        out.append(Diagnostic("physics.steps_per_period",
                              f"must be >= 16, got {p.steps_per_period!r}"))
    if cfg.sweep is not None:
        if cfg.sweep.axis not in RECOGNIZED_AXES:
            out.append(Diagnostic("sweep.axis",
                                  f"unknown axis {cfg.sweep.axis!r}; recognized axes: "
                                  f"{', '.join(RECOGNIZED_AXES)}"))
        if len(cfg.sweep.values) == 0:
            out.append(Diagnostic("sweep.values", "sweep needs at least one value"))
    elif cfg.experiment == "custom-sweep":
        out.append(Diagnostic("sweep", "custom-sweep requires an explicit sweep"))
    if cfg.mode is not None and cfg.mode not in ("full", "effective", "bare"):
        out.append(Diagnostic("mode",
                              f"must be full, effective, or bare, got {cfg.mode!r}"))
    if cfg.pipeline not in ("ramsey", "full-stage"):
        out.append(Diagnostic("pipeline",
                              f"must be ramsey or full-stage, got {cfg.pipeline!r}"))
    if cfg.output_format not in ("csv", "json"):
        out.append(Diagnostic("output.format",
                              f"must be csv or json, got {cfg.output_format!r}"))
    if cfg.workers < 0:
        out.append(Diagnostic("workers", f"must be >= 0, got {cfg.workers!r}"))
    return out


# ---------------------------------------------------------------------------
# per-point computations

def _ramsey_cfg(p: PhysicsConfig, mode: str, **overrides) -> protocol.RamseyConfig:
    kw = dict(n_particles=int(p.n_particles), chi=p.chi, delta=p.delta,
              t_signal=p.t_signal, mode=protocol.SimulationMode.parse(mode),
              omega_m_factor=p.omega_m_factor, blocks_n=p.blocks_n,
              chi_t_prepare=p.chi_t_prepare, steps_per_period=p.steps_per_period)
    kw.update(overrides)
    return protocol.RamseyConfig(**kw)


def _full_stage_cfg(p: PhysicsConfig, mode: str, **overrides) -> protocol.FullStageConfig:
    kw = dict(n_particles=int(p.n_particles), chi=p.chi, delta=p.delta,
              t_signal=p.t_signal, mode=protocol.SimulationMode.parse(mode),
              omega_m_factor=p.omega_m_factor, blocks_n=p.blocks_n,
              steps_per_period=p.steps_per_period,
              swap_drive_roles=p.swap_drive_roles)
    kw.update(overrides)
    return protocol.FullStageConfig(**kw)


def _result_columns(label: str) -> List[str]:
    return [f"jz_mean_{label}", f"jz_std_{label}", f"slope_{label}",
            f"delta_omega0_{label}"]


def _result_values(res: metrology.PrecisionResult) -> List[float]:
    return [res.jz_mean, res.jz_std, res.slope, res.delta_omega0]


def _nan_values() -> List[float]:
    return [math.nan] * 4


_MODE_LABELS = {"full": "full", "effective": "eff", "bare": "bare"}


def _modes_for(cfg: ExperimentConfig, default: Sequence[str]) -> List[str]:
    if cfg.mode is not None:
        return [cfg.mode]
    return list(default)


def _point_fig2_panels(cfg: ExperimentConfig, value: float) -> Dict[str, float]:
    modes = _modes_for(cfg, ("full", "effective", "bare"))
    p = dataclasses.replace(cfg.physics, delta=value)
    row: Dict[str, float] = {"delta": value, "delta_t_signal": value * p.t_signal}
    for mode in ("full", "effective", "bare"):
        label = _MODE_LABELS[mode]
        if mode in modes:
            res = protocol.run_fig2_protocol(_ramsey_cfg(p, mode))
            vals = _result_values(res)
        else:
            vals = _nan_values()
        row.update(zip(_result_columns(label), vals))
    sql, hl = metrology.reference_limits(int(p.n_particles), p.t_signal)
    row["sql"] = sql
    row["hl"] = hl
    return row


def _point_fig2_timesweep(cfg: ExperimentConfig, value: float) -> Dict[str, float]:
    modes = _modes_for(cfg, ("effective", "bare"))
    p = dataclasses.replace(cfg.physics, t_signal=value)
    row = {"t_signal": value, "chi_t_signal": value * p.chi}
    for mode in ("effective", "bare"):
        label = _MODE_LABELS[mode]
        if mode in modes:
            res = protocol.run_fig2_protocol(_ramsey_cfg(p, mode))
            vals = _result_values(res)
            row[f"delta_omega0_t_{label}"] = res.delta_omega0 * value
        else:
            vals = _nan_values()
            row[f"delta_omega0_t_{label}"] = math.nan
        row.update(zip(_result_columns(label), vals))
    sql, hl = metrology.reference_limits(int(p.n_particles), value)
    row["sql"] = sql
    row["hl"] = hl
    return row


_CHISWEEP_FULL_SPOTS = (0.5, 1.0, 2.0)


def _point_fig2_chisweep(cfg: ExperimentConfig, value: float) -> Dict[str, float]:
    p = dataclasses.replace(cfg.physics, chi=value)
    row = {"chi": value}
    res = protocol.run_fig2_protocol(_ramsey_cfg(p, "effective"))
    row.update(zip(_result_columns("eff"), _result_values(res)))
    if any(abs(value - s) < 1e-12 for s in _CHISWEEP_FULL_SPOTS):
        res_f = protocol.run_fig2_protocol(_ramsey_cfg(p, "full"))
        row.update(zip(_result_columns("full"), _result_values(res_f)))
    else:
        row.update(zip(_result_columns("full"), _nan_values()))
    res_b = protocol.run_fig2_protocol(_ramsey_cfg(p, "bare"))
    row.update(zip(_result_columns("bare"), _result_values(res_b)))
    sql, hl = metrology.reference_limits(int(p.n_particles), p.t_signal)
    row["sql"] = sql
    row["hl"] = hl
    return row


def _point_fig3_omega(cfg: ExperimentConfig, value: float) -> Dict[str, float]:
    p = dataclasses.replace(cfg.physics, omega_m_factor=value)
    full_cfg = _ramsey_cfg(p, "full")
    t_snap = protocol.ramsey_signal_time(full_cfg)
    res_f = protocol.run_fig2_protocol(full_cfg)
    res_e = protocol.run_fig2_protocol(_ramsey_cfg(p, "effective", t_signal=t_snap))
    row = {"omega_m_factor": value, "t_signal_snapped": t_snap}
    row.update(zip(_result_columns("full"), _result_values(res_f)))
    row.update(zip(_result_columns("eff"), _result_values(res_e)))
    row["rel_deviation"] = abs(res_f.delta_omega0 - res_e.delta_omega0) / res_e.delta_omega0
    sql, hl = metrology.reference_limits(int(p.n_particles), t_snap)
    row["sql"] = sql
    row["hl"] = hl
    return row


def _point_fig3_ratio(cfg: ExperimentConfig, value: float) -> Dict[str, float]:
    p = cfg.physics
    system = SpinSystem(int(p.n_particles))
    omega_m = 2.0 * math.pi * p.omega_m_factor * p.n_particles * p.chi
    rcfg = _ramsey_cfg(p, "effective")

    def h_of(delta):
        dp = floquet.DriveParams(chi=p.chi, delta=delta, omega_m=omega_m,
                                 Omega=value * omega_m)
        return floquet.h_eff_ratio(dp, system).hamiltonian

    res = protocol.run_signal_model(rcfg, h_of)
    sql, hl = metrology.reference_limits(int(p.n_particles), p.t_signal)
    return {"ratio": value, **dict(zip(_result_columns("eff"), _result_values(res))),
            "sql": sql, "hl": hl, "sub_sql": 1.0 if res.delta_omega0 < sql else 0.0}


def _point_fig3_alpha(cfg: ExperimentConfig, value: float) -> Dict[str, float]:
    p = cfg.physics
    system = SpinSystem(int(p.n_particles))
    omega_m = 2.0 * math.pi * p.omega_m_factor * p.n_particles * p.chi
    ratio = floquet.solve_drive_ratio(floquet.TWIST_CANCEL_L0)
    alpha2 = value * math.pi
    rcfg = _ramsey_cfg(p, "effective")

    def h_of(delta):
        dp = floquet.DriveParams(chi=p.chi, delta=delta, omega_m=omega_m,
                                 Omega=ratio * omega_m)
        return floquet.h_eff_phase(dp, system, alpha2).hamiltonian

    res = protocol.run_signal_model(rcfg, h_of)
    sql, hl = metrology.reference_limits(int(p.n_particles), p.t_signal)
    return {"alpha2_over_pi": value,
            **dict(zip(_result_columns("eff"), _result_values(res))),
            "sql": sql, "hl": hl, "sub_sql": 1.0 if res.delta_omega0 < sql else 0.0}


def _point_fig4_compare(cfg: ExperimentConfig, value: float) -> Dict[str, float]:
    modes = _modes_for(cfg, ("full", "effective", "bare"))
    p = dataclasses.replace(cfg.physics, t_signal=value)
    row = {"t_signal": value, "chi_t_signal": value * p.chi}
    for mode in ("full", "effective", "bare"):
        label = _MODE_LABELS[mode]
        if mode in modes:
            res = protocol.run_full_stage_protocol(_full_stage_cfg(p, mode))
            vals = _result_values(res)
        else:
            vals = _nan_values()
        row.update(zip(_result_columns(label), vals))
    sql, hl = metrology.reference_limits(int(p.n_particles), value)
    row["sql"] = sql
    row["hl"] = hl
    return row


def _point_fig4_scaling(cfg: ExperimentConfig, value: float) -> Dict[str, float]:
    n = int(value)
    p = dataclasses.replace(cfg.physics, n_particles=n)
    res = protocol.run_full_stage_protocol(_full_stage_cfg(p, cfg.mode or "effective"))
    sql, hl = metrology.reference_limits(n, p.t_signal)
    return {"n_particles": float(n),
            **dict(zip(_result_columns("eff"), _result_values(res))),
            "delta_omega0_over_chi": res.delta_omega0 / p.chi, "sql": sql, "hl": hl}


def _point_fig4_noise(cfg: ExperimentConfig, value: float) -> Dict[str, float]:
    p = cfg.physics
    fcfg = _full_stage_cfg(p, cfg.mode or "effective")
    res = protocol.run_full_stage_protocol(fcfg)
    noisy = metrology.apply_detection_noise(res, metrology.NoiseModel(sigma=value))
    outcomes, probs = protocol.full_stage_jz_distribution(fcfg)
    _, var_conv = metrology.gaussian_smeared_moments(probs, outcomes, value) \
        if value > 0 else (res.jz_mean, res.jz_std ** 2)
    sql, hl = metrology.reference_limits(int(p.n_particles), p.t_signal)
    return {"sigma": value, "jz_std_noisy": noisy.jz_std,
            "jz_std_noisy_convolution": math.sqrt(max(var_conv, 0.0)),
            "delta_omega0": noisy.delta_omega0, "sql": sql, "hl": hl}


def _point_custom(cfg: ExperimentConfig, value: float) -> Dict[str, float]:
    axis = cfg.sweep.axis
    p = cfg.physics
    overrides = {}
    if axis in ("delta", "chi", "t_signal", "omega_m_factor"):
        p = dataclasses.replace(p, **{axis: value})
    elif axis == "n_particles":
        p = dataclasses.replace(p, n_particles=int(value))
    elif axis == "sigma":
        pass
    elif axis == "ratio":
        overrides["drive_ratio"] = value
    elif axis == "alpha2_over_pi":
        raise AiqmError("alpha2_over_pi sweeps are served by the fig3-alpha preset")
    mode = cfg.mode or "effective"
    if cfg.pipeline == "full-stage":
        res = protocol.run_full_stage_protocol(_full_stage_cfg(p, mode, **overrides))
    else:
        res = protocol.run_fig2_protocol(_ramsey_cfg(p, mode, **overrides))
    if axis == "sigma":
        res = metrology.apply_detection_noise(res, metrology.NoiseModel(sigma=value))
    t_sig = res.metadata.get("t_signal", p.t_signal)
    sql, hl = metrology.reference_limits(int(p.n_particles), t_sig)
    return {axis: value, **res.to_dict(), "sql": sql, "hl": hl}


_POINT_FUNCTIONS = {
    "fig2-panels": _point_fig2_panels,
    "fig2-timesweep": _point_fig2_timesweep,
    "fig2-chisweep": _point_fig2_chisweep,
    "fig3-omega": _point_fig3_omega,
    "fig3-ratio": _point_fig3_ratio,
    "fig3-alpha": _point_fig3_alpha,
    "fig4-compare": _point_fig4_compare,
    "fig4-scaling": _point_fig4_scaling,
    "fig4-noise": _point_fig4_noise,
    "custom-sweep": _point_custom,
}


def _compute_point(cfg: ExperimentConfig, value: float) -> Tuple[Dict[str, float], str]:
    try:
        return _POINT_FUNCTIONS[cfg.experiment](cfg, value), "ok"
    except AiqmError as exc:
        return {cfg.sweep.axis if cfg.sweep else "value": value}, \
            f"error:{type(exc).__name__}"


# ---------------------------------------------------------------------------
# result table

@dataclasses.dataclass
class ResultTable:
    columns: List[str]
    rows: List[List[float]]
    statuses: List[str]
    metadata: Dict[str, str]

    def to_csv_text(self) -> str:
        lines = [f"# {key}: {val}" for key, val in self.metadata.items()]
        lines.append(",".join(self.columns + ["status"]))
        for row, status in zip(self.rows, self.statuses):
            cells = [_format_float(v) for v in row] + [status]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_json_text(self) -> str:
        payload = {"metadata": self.metadata, "columns": self.columns + ["status"],
                   "rows": [[_json_cell(v) for v in row] + [status]
                            for row, status in zip(self.rows, self.statuses)]}
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"

    def write(self, path: str, output_format: Optional[str] = None) -> None:
        fmt = output_format or self.metadata.get("format", "csv")
        text = self.to_json_text() if fmt == "json" else self.to_csv_text()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)

    def column(self, name: str) -> List[float]:
        if name not in self.columns:
            raise KeyError(f"no column {name!r}; available: {self.columns}")
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]


def _format_float(value: float) -> str:
    return format(float(value), ".17g")


def _json_cell(value: float):
    v = float(value)
    return None if math.isnan(v) else v


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc)
    else:
        moment = _dt.datetime.now(_dt.timezone.utc)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def _worker_count(cfg: ExperimentConfig) -> int:
    if cfg.workers > 0:
        return cfg.workers
    env = os.environ.get(WORKERS_ENV_VAR)
    if env is not None and env.isdigit() and int(env) > 0:
        return int(env)
    return 1


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    """Execute every sweep point and assemble the deterministic table."""
    problems = validate_config(cfg)
    if problems:
        raise AiqmError("invalid configuration: " + "; ".join(map(str, problems)))
    sweep = cfg.sweep or _default_sweep(cfg.experiment, cfg.physics)
    cfg = dataclasses.replace(cfg, sweep=sweep)
    order = np.argsort(np.asarray(sweep.values, dtype=float), kind="stable")
    values = [float(sweep.values[i]) for i in order]

    workers = _worker_count(cfg)
    if workers > 1 and len(values) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_compute_point, [cfg] * len(values), values))
    else:
        outcomes = [_compute_point(cfg, v) for v in values]

    columns: List[str] = []
    for row, status in outcomes:
        for key in row:
            if key not in columns:
                columns.append(key)
    rows, statuses = [], []
    for row, status in outcomes:
        rows.append([row.get(col, math.nan) for col in columns])
        statuses.append(status)

    metadata = {
        "experiment": cfg.experiment,
        "version": __version__,
        "config_hash": cfg.config_hash(),
        "scan_variable": sweep.axis,
        "mode": cfg.mode or "default",
        "n_particles": str(cfg.physics.n_particles),
        "format": cfg.output_format,
        "timestamp": _timestamp(),
    }
    table = ResultTable(columns=columns, rows=rows, statuses=statuses,
                        metadata=metadata)
    _attach_experiment_metadata(cfg, table)
    return table


def _attach_experiment_metadata(cfg: ExperimentConfig, table: ResultTable) -> None:
    if cfg.experiment == "fig4-scaling" and all(s == "ok" for s in table.statuses):
        ns = table.column("n_particles")
        dws = table.column("delta_omega0_eff")
        fit = metrology.fit_scaling(list(zip(ns, dws)))
        table.metadata["fit_prefactor"] = _format_float(fit.prefactor)
        table.metadata["fit_exponent"] = _format_float(fit.exponent)
        table.metadata["fit_r_squared"] = _format_float(fit.r_squared)
    if cfg.experiment in ("fig3-ratio", "fig3-alpha") \
            and all(s == "ok" for s in table.statuses):
        axis = "ratio" if cfg.experiment == "fig3-ratio" else "alpha2_over_pi"
        xs = table.column(axis)
        flags = table.column("sub_sql")
        inside = [x for x, f in zip(xs, flags) if f > 0.5]
        if inside:
            table.metadata["sub_sql_window_low"] = _format_float(min(inside))
            table.metadata["sub_sql_window_high"] = _format_float(max(inside))


# ---------------------------------------------------------------------------
# Husimi checkpoint emission (drives the sphere plots)

def husimi_checkpoint_tables(cfg: ExperimentConfig) -> Dict[str, str]:
    """CSV texts of the Husimi map at the four staged-sequence checkpoints."""
    p = cfg.physics
    fcfg = _full_stage_cfg(p, cfg.mode or "effective")
    states = protocol.full_stage_states(fcfg)
    out = {}
    for name, state in states:
        if name == "final":
            continue
        qmap = husimi_q(state, n_theta=p.husimi_n_theta, n_phi=p.husimi_n_phi)
        lines = [f"# experiment: husimi-checkpoint", f"# checkpoint: {name}",
                 f"# version: {__version__}", f"# config_hash: {cfg.config_hash()}",
                 f"# n_particles: {p.n_particles}", f"# timestamp: {_timestamp()}",
                 "theta,phi,q"]
        for th, ph, q in qmap.rows():
            lines.append(f"{_format_float(th)},{_format_float(ph)},{_format_float(q)}")
        out[name] = "\n".join(lines) + "\n"
    return out
