"""Command-line experiment runner.

Subcommands:

* ``run <preset|config.json>``     execute a sweep and write the result table
* ``validate <config.json>``       report configuration diagnostics
* ``list-presets``                 enumerate the built-in experiments
* ``husimi <preset|config.json>``  emit Husimi-map CSVs at the staged-sequence
                                   checkpoints

Configuration files are JSON; either a full configuration or
``{"preset": "<name>", "overrides": {...}}`` with dotted override paths
(for example ``"physics.n_particles": 20``).  Exit status is 0 on success,
2 for configuration problems, and 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from typing import Optional

from . import experiments
from ._version import __version__
from .errors import AiqmError


def _load_config(source: str, mode: Optional[str], output_format: Optional[str],
                 workers: Optional[int]) -> experiments.ExperimentConfig:
    if source in experiments.PRESET_NAMES:
        cfg = experiments.preset_config(source)
    else:
        if not os.path.exists(source):
            raise AiqmError(
                f"{source!r} is neither a preset ({', '.join(experiments.PRESET_NAMES)}) "
                "nor a config file")
        with open(source, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        cfg = _config_from_dict(raw)
    if mode is not None:
        cfg = dataclasses.replace(cfg, mode={"full": "full", "effective": "effective",
                                             "bare": "bare"}[mode])
    if output_format is not None:
        cfg = dataclasses.replace(cfg, output_format=output_format)
    if workers is not None:
        cfg = dataclasses.replace(cfg, workers=workers)
    return cfg


def _config_from_dict(raw: dict) -> experiments.ExperimentConfig:
    if "preset" in raw:
        cfg = experiments.preset_config(raw["preset"])
        for path, value in raw.get("overrides", {}).items():
            cfg = _apply_override(cfg, path, value)
        return cfg
    physics = experiments.PhysicsConfig(**raw.get("physics", {}))
    sweep = None
    if raw.get("sweep") is not None:
        sweep = experiments.SweepConfig(axis=raw["sweep"]["axis"],
                                        values=tuple(raw["sweep"]["values"]))
    return experiments.ExperimentConfig(
        experiment=raw.get("experiment", "custom-sweep"), physics=physics,
        sweep=sweep, mode=raw.get("mode"), pipeline=raw.get("pipeline", "ramsey"),
        output_format=raw.get("output", {}).get("format", "csv"),
        workers=int(raw.get("workers", 0)))


def _apply_override(cfg: experiments.ExperimentConfig, path: str, value):
    head, _, rest = path.partition(".")
    if head == "physics":
        if not hasattr(cfg.physics, rest):
            raise AiqmError(f"unknown physics override {rest!r}")
        physics = dataclasses.replace(cfg.physics, **{rest: value})
        return dataclasses.replace(cfg, physics=physics)
    if head == "sweep":
        sweep = cfg.sweep or experiments.SweepConfig("delta", (1.0,))
        if rest == "axis":
            sweep = dataclasses.replace(sweep, axis=value)
        elif rest == "values":
            sweep = dataclasses.replace(sweep, values=tuple(value))
        else:
            raise AiqmError(f"unknown sweep override {rest!r}")
        return dataclasses.replace(cfg, sweep=sweep)
    if head in ("mode", "pipeline", "workers", "output_format"):
        return dataclasses.replace(cfg, **{head: value})
    raise AiqmError(f"unknown override path {path!r}")


def _cmd_run(args) -> int:
    cfg = _load_config(args.config, args.mode, args.format, args.workers)
    problems = experiments.validate_config(cfg)
    if problems:
        for item in problems:
            print(f"error: {item}", file=sys.stderr)
        return 2
    table = experiments.run_experiment(cfg)
    out_path = args.output or f"{cfg.experiment}.{cfg.output_format}"
    table.write(out_path, cfg.output_format)
    failures = sum(1 for s in table.statuses if s != "ok")
    print(f"wrote {out_path} ({len(table.rows)} rows"
          + (f", {failures} failed points" if failures else "") + ")")
    return 0


def _cmd_validate(args) -> int:
    if os.path.exists(args.config):
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        cfg = _config_from_dict(raw)
    elif args.config in experiments.PRESET_NAMES:
        cfg = experiments.preset_config(args.config)
    else:
        print(f"error: config: no such preset or file {args.config!r}", file=sys.stderr)
        return 2
    problems = experiments.validate_config(cfg)
    if not problems:
        print("configuration is valid")
        return 0
    for item in problems:
        print(f"error: {item}", file=sys.stderr)
    return 2


def _cmd_list_presets(_args) -> int:
    for name in experiments.list_presets():
        print(name)
    return 0


def _cmd_husimi(args) -> int:
    cfg = _load_config(args.config, args.mode, None, None)
    out_dir = args.output or "husimi"
    os.makedirs(out_dir, exist_ok=True)
    tables = experiments.husimi_checkpoint_tables(cfg)
    for name, text in tables.items():
        path = os.path.join(out_dir, f"husimi_{name}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aiqm",
        description="Driven-spin metrology experiments with deterministic outputs")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a preset or a JSON config")
    run_p.add_argument("config", help="preset name or path to a JSON config")
    run_p.add_argument("--output", help="output file path")
    run_p.add_argument("--workers", type=int,
                       help=f"parallel workers (default ${experiments.WORKERS_ENV_VAR} or 1)")
    run_p.add_argument("--mode", choices=["full", "effective", "bare"],
                       help="override the simulation mode")
    run_p.add_argument("--format", choices=["csv", "json"], help="output format")
    run_p.set_defaults(func=_cmd_run)

    val_p = sub.add_parser("validate", help="validate a config without running it")
    val_p.add_argument("config", help="preset name or path to a JSON config")
    val_p.set_defaults(func=_cmd_validate)

    lp = sub.add_parser("list-presets", help="list built-in experiments")
    lp.set_defaults(func=_cmd_list_presets)

    hus = sub.add_parser("husimi",
                         help="emit Husimi maps at the staged-sequence checkpoints")
    hus.add_argument("config", help="preset name or path to a JSON config")
    hus.add_argument("--output", help="output directory (default ./husimi)")
    hus.add_argument("--mode", choices=["full", "effective", "bare"],
                     help="override the simulation mode")
    hus.set_defaults(func=_cmd_husimi)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AiqmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
