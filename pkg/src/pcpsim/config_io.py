"""TOML experiment files -> validated ExperimentSpec.

Angles in files are degrees (human-facing) and are converted to radians at
this boundary.  Every omitted key falls back to the baseline defaults of
:class:`~pcpsim.model.SystemConfig`.  An empty file is a valid experiment.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .model import FixedSpeed, MobilityModel, RayleighSpeed, Static, SystemConfig, validate
from .montecarlo import TrialPlan, validate_plan


class ConfigError(Exception):
    """Unusable experiment file; ``messages`` enumerates every problem."""

    def __init__(self, messages: list[str]):
        super().__init__("; ".join(messages))
        self.messages = messages


@dataclass(frozen=True)
class SweepGrid:
    """Optional parameter grid crossed over the base configuration."""

    cfo_var: tuple[float, ...] | None = None
    speed: tuple[float, ...] | None = None  # v or v_mean per the base mobility model
    snr: tuple[tuple[float, float], ...] | None = None  # (snr_ue, snr_bs) pairs
    num_nodes: tuple[int, ...] | None = None
    num_oac_symbols: tuple[int, ...] | None = None


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one CLI invocation needs."""

    config: SystemConfig
    plan: TrialPlan
    sweep: SweepGrid | None = None
    out_dir: Path = Path("out")
    theta_max_deg: float = 40.0
    theta_step_deg: float = 0.5
    make_plots: bool = True


_CONFIG_KEYS = {
    "num_nodes": int,
    "num_oac_symbols": int,
    "carrier_freq": float,
    "guard_ul": float,
    "guard_dl": float,
    "ofdm_dur": float,
    "cp_dur": float,
    "symbol_dur": float,
    "packet_dur": float,
    "snr_ue": float,
    "snr_bs": float,
    "cfo_var": float,
    "speed_of_light": float,
    "quantization_bits": int,
    "spectral_eff": float,
}


def _parse_mobility(raw, errors: list[str]) -> MobilityModel:
    if isinstance(raw, str):
        if raw.lower() == "static":
            return Static()
        errors.append(f"mobility: unknown model string {raw!r} (use 'static' or a table)")
        return Static()
    if not isinstance(raw, dict):
        errors.append(f"mobility: expected a table or 'static', got {raw!r}")
        return Static()
    model = str(raw.get("model", "")).lower()
    speed_keys = [key for key in ("v", "v_mean", "speed") if key in raw]
    unknown = set(raw) - {"model", "v", "v_mean", "speed"}
    if unknown:
        errors.append(f"mobility: unknown keys {sorted(unknown)}")
    speed = float(raw[speed_keys[0]]) if speed_keys else 0.0
    if model == "fixed":
        return FixedSpeed(speed)
    if model == "rayleigh":
        return RayleighSpeed(speed)
    if model == "static":
        return Static()
    errors.append(f"mobility: model must be 'fixed', 'rayleigh', or 'static', got {model!r}")
    return Static()


def _parse_config_table(table: dict, errors: list[str]) -> SystemConfig:
    kwargs = {}
    for key, value in table.items():
        if key == "mobility":
            kwargs["mobility"] = _parse_mobility(value, errors)
        elif key == "theta_desired":
            kwargs["theta_desired"] = math.radians(float(value))  # degrees in files
        elif key in ("amp_ul", "amp_dl"):
            kwargs[key] = tuple(float(v) for v in value) if isinstance(value, list) else float(value)
        elif key in _CONFIG_KEYS:
            try:
                kwargs[key] = _CONFIG_KEYS[key](value)
            except (TypeError, ValueError):
                errors.append(f"config.{key}: cannot interpret {value!r}")
        else:
            errors.append(f"config.{key}: unknown key")
    try:
        return SystemConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        errors.append(f"config: {exc}")
        return SystemConfig()


def _parse_plan_table(table: dict, errors: list[str]) -> TrialPlan:
    kwargs = {}
    known = {
        "n_trials": int,
        "base_seed": int,
        "record_breakdown": bool,
    }
    for key, value in table.items():
        if key in known:
            kwargs[key] = known[key](value)
        elif key == "nodes_of_interest":
            kwargs["nodes_of_interest"] = tuple(int(v) for v in value)
        elif key == "symbols_of_interest":
            kwargs["symbols_of_interest"] = tuple(int(v) for v in value)
        else:
            errors.append(f"plan.{key}: unknown key")
    return TrialPlan(**kwargs)


def _parse_sweep_table(table: dict, errors: list[str]) -> SweepGrid:
    kwargs = {}
    for key, value in table.items():
        if key in ("cfo_var", "speed"):
            kwargs[key] = tuple(float(v) for v in value)
        elif key in ("num_nodes", "num_oac_symbols"):
            kwargs[key] = tuple(int(v) for v in value)
        elif key == "snr":
            try:
                kwargs["snr"] = tuple((float(ue), float(bs)) for ue, bs in value)
            except (TypeError, ValueError):
                errors.append("sweep.snr: expected a list of [snr_ue, snr_bs] pairs")
        else:
            errors.append(f"sweep.{key}: unknown key")
    for key, value in kwargs.items():
        if not value:
            errors.append(f"sweep.{key}: list must not be empty")
    return SweepGrid(**kwargs)


def parse_config(path: str | Path) -> ExperimentSpec:
    """Read and fully validate an experiment file.

    Raises :class:`ConfigError` with every problem found (parse errors carry
    the TOML line context).
    """
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError([f"{path}: file not found"]) from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"{path}: {exc}"]) from None

    errors: list[str] = []
    unknown = set(raw) - {"config", "plan", "sweep", "output"}
    if unknown:
        errors.append(f"unknown top-level tables: {sorted(unknown)}")

    config = _parse_config_table(raw.get("config", {}), errors)
    plan = _parse_plan_table(raw.get("plan", {}), errors)
    sweep = _parse_sweep_table(raw["sweep"], errors) if "sweep" in raw else None

    out = raw.get("output", {})
    out_kwargs = {}
    for key, value in out.items():
        if key == "directory":
            out_kwargs["out_dir"] = Path(value)
        elif key == "theta_max_deg":
            out_kwargs["theta_max_deg"] = float(value)
        elif key == "theta_step_deg":
            out_kwargs["theta_step_deg"] = float(value)
        elif key == "plots":
            out_kwargs["make_plots"] = bool(value)
        else:
            errors.append(f"output.{key}: unknown key")

    errors.extend(validate(config))
    errors.extend(validate_plan(plan, config))
    if errors:
        raise ConfigError(errors)
    return ExperimentSpec(config=config, plan=plan, sweep=sweep, **out_kwargs)


def expand_sweep(spec: ExperimentSpec) -> list[tuple[dict, SystemConfig]]:
    """Cross the sweep grid over the base config.

    Returns (label, config) pairs in deterministic order; the label maps
    swept field names to their values for CSV columns.  Without a sweep the
    single base config is returned with an empty label.
    """
    sweep = spec.sweep
    if sweep is None:
        return [({}, spec.config)]
    axes: list[tuple[str, tuple]] = []
    for name in ("cfo_var", "speed", "snr", "num_nodes", "num_oac_symbols"):
        values = getattr(sweep, name)
        if values is not None:
            axes.append((name, values))
    if not axes:
        return [({}, spec.config)]

    combos = []
    for point in itertools.product(*(values for _, values in axes)):
        label: dict = {}
        changes: dict = {}
        for (name, _), value in zip(axes, point):
            if name == "speed":
                label["speed"] = value
                changes["mobility"] = _with_speed(spec.config.mobility, value)
            elif name == "snr":
                label["snr_ue"], label["snr_bs"] = value
                changes["snr_ue"], changes["snr_bs"] = value
            else:
                label[name] = value
                changes[name] = value
        combos.append((label, dataclasses.replace(spec.config, **changes)))
    return combos


def _with_speed(mobility: MobilityModel, speed: float) -> MobilityModel:
    if isinstance(mobility, RayleighSpeed):
        return RayleighSpeed(speed)
    if isinstance(mobility, (FixedSpeed, Static)):
        return FixedSpeed(speed)
    raise TypeError(f"unknown mobility model: {mobility!r}")
