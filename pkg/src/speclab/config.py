"""Flat key = value experiment configuration.

One key per line, ``#`` starts a comment, blank lines ignored.  The key set
is closed: unknown keys are rejected with their line number.  Values are
strings at parse time; build_config() validates and types them against the
experiment registry's defaults.  emit_config() writes the effective
configuration in a canonical order so that emit -> parse -> emit is
byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

# canonical key order for emission; also the closed set of legal keys
CONFIG_KEYS = (
    "experiment",
    "variant",
    "N",
    "dt",
    "cfl",
    "t_end",
    "snapshots",
    "initial",
    "sv_order",
    "law",
    "fix",
    "seed",
    "out",
)


class ConfigError(Exception):
    """Invalid configuration text, value, or experiment name."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    variant: str
    n_list: tuple
    dt: float | None
    cfl: float
    t_end: float
    snapshots: tuple
    initial: str
    sv_order: int
    law: str
    fix: bool
    seed: int
    out: str

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **kwargs)


def parse_config_text(text: str) -> dict:
    """Raw key -> string-value mapping from flat config text."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r} (known: {', '.join(CONFIG_KEYS)})")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def _parse_int_list(text: str, key: str) -> tuple:
    try:
        items = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: expected comma-separated integers, got {text!r}") from exc
    if not items:
        raise ConfigError(f"{key}: list must not be empty")
    return items


def _parse_float_list(text: str, key: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {text!r}") from exc


def _parse_float(text: str, key: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from exc


def _parse_int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from exc


def _parse_flag(text: str, key: str) -> bool:
    if text in ("on", "off"):
        return text == "on"
    raise ConfigError(f"{key}: expected 'on' or 'off', got {text!r}")


def build_config(raw: dict) -> ExperimentConfig:
    """Validate and type a raw string mapping (defaults already merged in)."""
    missing = [key for key in CONFIG_KEYS if key not in raw]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")
    dt_text = raw["dt"]
    config = ExperimentConfig(
        experiment=raw["experiment"],
        variant=raw["variant"],
        n_list=_parse_int_list(raw["N"], "N"),
        dt=None if dt_text == "" else _parse_float(dt_text, "dt"),
        cfl=_parse_float(raw["cfl"], "cfl"),
        t_end=_parse_float(raw["t_end"], "t_end"),
        snapshots=_parse_float_list(raw["snapshots"], "snapshots"),
        initial=raw["initial"],
        sv_order=_parse_int(raw["sv_order"], "sv_order"),
        law=raw["law"],
        fix=_parse_flag(raw["fix"], "fix"),
        seed=_parse_int(raw["seed"], "seed"),
        out=raw["out"],
    )
    if any(n < 2 for n in config.n_list):
        raise ConfigError("N: every degree must be at least 2")
    if len(set(config.n_list)) != len(config.n_list):
        raise ConfigError("N: duplicate entries (each degree names its own output files)")
    if config.t_end < 0.0:
        raise ConfigError("t_end must be nonnegative")
    if config.dt is not None and config.dt <= 0.0:
        raise ConfigError("dt must be positive when given")
    if config.cfl <= 0.0:
        raise ConfigError("cfl must be positive")
    if config.sv_order < 1:
        raise ConfigError("sv_order must be at least 1")
    return config


def _format_value(key: str, config: ExperimentConfig) -> str:
    if key == "N":
        return ",".join(str(n) for n in config.n_list)
    if key == "snapshots":
        return ",".join(repr(float(s)) for s in config.snapshots)
    if key == "dt":
        return "" if config.dt is None else repr(float(config.dt))
    if key in ("cfl", "t_end"):
        return repr(float(getattr(config, key)))
    if key == "fix":
        return "on" if config.fix else "off"
    if key in ("sv_order", "seed"):
        return str(getattr(config, key))
    if key == "experiment":
        return config.experiment
    return str(getattr(config, key))


def emit_config(config: ExperimentConfig) -> str:
    """Canonical flat text of the effective configuration."""
    lines = [f"{key} = {_format_value(key, config)}" for key in CONFIG_KEYS]
    return "\n".join(lines) + "\n"
