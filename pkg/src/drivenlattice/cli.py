"""Command line interface: config ingestion, subcommands, serialization.

Subcommands: predict (closed-form report, no simulation), single (one
ensemble -> cm.csv), sweep-dm (drive-detuning scan -> sweep.csv),
sweep-pump (pumping-rate scan at fixed depth -> sweep.csv + xi.txt).
Exit codes: 0 success, 2 configuration error, 3 runtime fault, 4 I/O.

The config file is a JSON object; angles may be given in radians
("theta") or degrees ("theta_deg"), not both.  Output CSV uses
shortest-round-trip decimal formatting with a dot separator, so a rerun
with the same config and seed is byte-identical.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .dynamics import recommended_dt
from .ensemble import EnsembleSpec, EnsembleResult, SweepResult, compute_xi, \
    run_ensemble, sweep_delta_m, sweep_pump_rate
from .errors import AnalysisError, ConfigurationError, IntegratorFault
from .params import LatticeConfig, ModulationConfig, brillouin_frequency, \
    max_pump_rate, mode_velocity, phase_velocity, pump_rate_from_detuning, \
    vibrational_frequency

SWEEP_KINDS = ("none", "delta_m", "pump_rate")


@dataclass
class RunConfig:
    lattice: LatticeConfig
    modulation: ModulationConfig
    ensemble: EnsembleSpec
    sweep_kind: str = "none"
    sweep_values: tuple = ()
    output_dir: str = "."

    def __post_init__(self):
        if self.sweep_kind not in SWEEP_KINDS:
            raise ConfigurationError(
                f"sweep.kind must be one of {SWEEP_KINDS}, got {self.sweep_kind!r}")
        if self.sweep_kind != "none" and not self.sweep_values:
            raise ConfigurationError(
                "sweep.values must be non-empty when sweep.kind is set")


def _angle(section: dict, name: str, where: str) -> float:
    deg_key = f"{name}_deg"
    if name in section and deg_key in section:
        raise ConfigurationError(
            f"{where}: give either {name!r} (radians) or {deg_key!r}, not both")
    if deg_key in section:
        return math.radians(_number(section, deg_key, where))
    if name in section:
        return _number(section, name, where)
    raise ConfigurationError(f"{where}: missing {name!r} or {deg_key!r}")


_MISSING = object()


def _number(section: dict, key: str, where: str, default=_MISSING):
    if key not in section:
        if default is not _MISSING:
            return default
        raise ConfigurationError(f"{where}: missing {key!r}")
    value = section[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigurationError(f"{where}: {key!r} must be a number")
    return value


def _section(doc: dict, name: str, required: bool = True) -> dict:
    sec = doc.get(name)
    if sec is None:
        if required:
            raise ConfigurationError(f"missing config section {name!r}")
        return {}
    if not isinstance(sec, dict):
        raise ConfigurationError(f"config section {name!r} must be an object")
    return sec


def parse_config(doc: dict, need_ensemble: bool = True) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigurationError("config root must be a JSON object")
    lat = _section(doc, "lattice")
    lattice = LatticeConfig(
        theta=_angle(lat, "theta", "lattice"),
        light_shift_per_beam=_number(lat, "light_shift_per_beam", "lattice"),
        atomic_detuning_over_linewidth=_number(
            lat, "atomic_detuning_over_linewidth", "lattice", None),
        pump_rate_override=_number(lat, "pump_rate_override", "lattice", None),
    )
    ms = _section(doc, "modulation")
    modulation = ModulationConfig(
        phi=_angle(ms, "phi", "modulation"),
        light_shift_per_mod_beam=_number(
            ms, "light_shift_per_mod_beam", "modulation"),
        delta_m=_number(ms, "delta_m", "modulation", 0.0),
        t_on=_number(ms, "t_on", "modulation", 0.0),
    )
    es = _section(doc, "ensemble", required=need_ensemble)
    defaults = EnsembleSpec()
    spec = EnsembleSpec(
        n_atoms=int(_number(es, "n_atoms", "ensemble", defaults.n_atoms)),
        master_seed=int(_number(es, "master_seed", "ensemble",
                                defaults.master_seed)),
        burn_in=float(_number(es, "burn_in", "ensemble", defaults.burn_in)),
        run_time=float(_number(es, "run_time", "ensemble", defaults.run_time)),
        thermal_spread=float(_number(es, "thermal_spread", "ensemble",
                                     defaults.thermal_spread)),
        sample_stride=int(_number(es, "sample_stride", "ensemble",
                                  defaults.sample_stride)),
        position_spread=float(_number(es, "position_spread", "ensemble",
                                      defaults.position_spread)),
    )
    sw = _section(doc, "sweep", required=False)
    kind = sw.get("kind", "none")
    values = sw.get("values", [])
    if not isinstance(values, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool)
            for v in values):
        raise ConfigurationError("sweep.values must be a list of numbers")
    out = doc.get("output_dir", ".")
    if not isinstance(out, str):
        raise ConfigurationError("output_dir must be a string")
    return RunConfig(lattice=lattice, modulation=modulation, ensemble=spec,
                     sweep_kind=kind, sweep_values=tuple(float(v) for v in values),
                     output_dir=out)


def load_config(path, need_ensemble: bool = True) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON: {exc}") from exc
    return parse_config(doc, need_ensemble=need_ensemble)


def config_echo(config: RunConfig) -> dict:
    """Canonical (radians, fully defaulted) echo; reloading it reproduces the run."""
    return {
        "lattice": dataclasses.asdict(config.lattice),
        "modulation": dataclasses.asdict(config.modulation),
        "ensemble": dataclasses.asdict(config.ensemble),
        "sweep": {"kind": config.sweep_kind,
                  "values": list(config.sweep_values)},
        "output_dir": config.output_dir,
    }


def predict_report(lattice: LatticeConfig, modulation: ModulationConfig) -> dict:
    """Closed-form quantities for a configuration; pure, no simulation."""
    from dataclasses import replace
    omega_b = brillouin_frequency(lattice, modulation)
    return {
        "omega_x": vibrational_frequency(lattice),
        "omega_b": omega_b,
        "v_mode": mode_velocity(lattice),
        "v_phase": phase_velocity(modulation),
        "v_phase_at_omega_b": phase_velocity(
            replace(modulation, delta_m=omega_b)),
        "gamma_prime": pump_rate_from_detuning(lattice),
        "gamma_max": max_pump_rate(lattice),
        "recommended_dt": recommended_dt(lattice),
    }

_REPORT_UNITS = {
    "omega_x": "w_r", "omega_b": "w_r", "v_mode": "v_r", "v_phase": "v_r",
    "v_phase_at_omega_b": "v_r", "gamma_prime": "w_r", "gamma_max": "w_r",
    "recommended_dt": "1/w_r",
}


def _fmt(value: float) -> str:
    return repr(float(value))


class _OutputTracker:
    """Removes partially written outputs when a run fails midway."""

    def __init__(self):
        self.paths: list[Path] = []

    def write_text(self, path: Path, text: str):
        self.paths.append(path)
        path.write_text(text, encoding="utf-8")

    def discard(self):
        for p in self.paths:
            try:
                p.unlink()
            except OSError:
                pass


def write_cm_csv(result: EnsembleResult) -> str:
    lines = ["t,cm_x,cm_y,cm_z,var_x,var_y,var_z"]
    for k in range(result.times.size):
        row = [result.times[k]] + list(result.cm_position[k]) \
            + list(result.position_variance[k])
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_sweep_csv(sweep: SweepResult) -> str:
    lines = []
    if sweep.knob_name == "pump_rate":
        lines.append("# knob = pump_rate (Gamma0' in w_r); v_cx/v_cz columns "
                     "hold the pair amplitude xi = v(+omega_b) - v(-omega_b)")
    else:
        lines.append(f"# knob = {sweep.knob_name} (w_r); velocities in v_r")
    lines.append("knob,v_cx,v_cx_err,v_cz,v_cz_err")
    for k in range(len(sweep.knob_values)):
        row = [sweep.knob_values[k], sweep.v_cx[k], sweep.v_cx_err[k],
               sweep.v_cz[k], sweep.v_cz_err[k]]
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _meta_json(config: RunConfig, extra: dict) -> str:
    doc = {
        "artifact": {"name": "drivenlattice", "version": __version__},
        "config": config_echo(config),
    }
    doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _cmd_predict(args) -> int:
    config = load_config(args.config, need_ensemble=False)
    report = predict_report(config.lattice, config.modulation)
    for key, value in report.items():
        print(f"{key} [{_REPORT_UNITS[key]}] = {_fmt(value)}")
    return 0


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        config = dataclasses.replace(
            config, ensemble=dataclasses.replace(config.ensemble,
                                                 master_seed=args.seed))
    if args.out is not None:
        config = dataclasses.replace(config, output_dir=args.out)
    return config


def _outdir(config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_single(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    result = run_ensemble(config.ensemble, config.lattice, config.modulation,
                          threads=args.threads)
    out = _outdir(config)
    tracker = _OutputTracker()
    try:
        tracker.write_text(out / "cm.csv", write_cm_csv(result))
        tracker.write_text(out / "meta.json", _meta_json(config, {
            "command": "single",
            "master_seed": config.ensemble.master_seed,
            "dt": result.dt,
            "n_flips": result.n_flips,
        }))
    except OSError:
        tracker.discard()
        raise
    return 0


def _run_configured_sweep(args, kind: str):
    config = _apply_overrides(load_config(args.config), args)
    if config.sweep_kind != kind:
        raise ConfigurationError(
            f"this subcommand needs sweep.kind = {kind!r}, "
            f"config has {config.sweep_kind!r}")
    if kind == "delta_m":
        sweep = sweep_delta_m(config.ensemble, config.lattice,
                              config.modulation, config.sweep_values,
                              threads=args.threads)
    else:
        sweep = sweep_pump_rate(config.ensemble, config.lattice,
                                config.modulation, config.sweep_values,
                                threads=args.threads)
    return config, sweep


def _xi_txt(sweep: SweepResult) -> Optional[str]:
    if sweep.knob_name == "pump_rate":
        lines = ["# gamma_prime xi xi_err"]
        for k in range(len(sweep.knob_values)):
            lines.append(f"{_fmt(sweep.knob_values[k])} {_fmt(sweep.v_cx[k])} "
                         f"{_fmt(sweep.v_cx_err[k])}")
        return "\n".join(lines) + "\n"
    if sweep.xi is not None:
        return f"# xi xi_err\n{_fmt(sweep.xi)} {_fmt(sweep.xi_err)}\n"
    return None


def _cmd_sweep(args, kind: str) -> int:
    config, sweep = _run_configured_sweep(args, kind)
    out = _outdir(config)
    tracker = _OutputTracker()
    try:
        tracker.write_text(out / "sweep.csv", write_sweep_csv(sweep))
        xi_text = _xi_txt(sweep)
        if xi_text is not None:
            tracker.write_text(out / "xi.txt", xi_text)
        if not args.no_plot:
            from .svgplot import line_plot
            label = "xi [v_r]" if kind == "pump_rate" else "v_cx [v_r]"
            svg = line_plot(sweep.knob_values, sweep.v_cx,
                            yerr=sweep.v_cx_err,
                            title=f"{sweep.knob_name} sweep",
                            xlabel=f"{sweep.knob_name} [w_r]", ylabel=label)
            tracker.write_text(out / "sweep.svg", svg)
        tracker.write_text(out / "meta.json", _meta_json(config, {
            "command": f"sweep-{'dm' if kind == 'delta_m' else 'pump'}",
            "master_seed": config.ensemble.master_seed,
        }))
    except OSError:
        tracker.discard()
        raise
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drivenlattice",
        description="Semiclassical Monte Carlo of atom transport in a "
                    "driven dissipative optical lattice (recoil units)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
            ("predict", "print closed-form quantities, no simulation"),
            ("single", "run one ensemble and write cm.csv"),
            ("sweep-dm", "scan the drive detuning delta_m"),
            ("sweep-pump", "scan the pumping rate at fixed depth")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON config path")
        if name != "predict":
            p.add_argument("--seed", type=int, default=None,
                           help="override ensemble.master_seed")
            p.add_argument("--threads", type=int, default=None,
                           help="worker threads (default: all cores)")
            p.add_argument("--out", default=None,
                           help="override output_dir")
            p.add_argument("--no-plot", action="store_true",
                           help="skip the SVG quick-look plot")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "predict":
            return _cmd_predict(args)
        if args.command == "single":
            return _cmd_single(args)
        if args.command == "sweep-dm":
            return _cmd_sweep(args, "delta_m")
        if args.command == "sweep-pump":
            return _cmd_sweep(args, "pump_rate")
        raise AssertionError(args.command)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (IntegratorFault, AnalysisError) as exc:
        print(f"runtime fault: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


def run():
    sys.exit(main())
