"""Run manifests and the line-oriented experiment config format.

A config file holds exactly one section, ``[eprb]``, ``[ghzm]`` or
``[sweep]``, followed by ``key = value`` lines. ``#`` starts a comment,
blank lines are ignored, angles are given in degrees, and list values are
space-separated. Unknown sections or keys are hard errors, never silently
ignored. Angles stay in degrees throughout the manifest; conversion to
radians happens once, where directions are built for the pipelines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .tensor import DEFAULT_TOL

COMMANDS = ("eprb", "bell-q", "ghzm", "ghz-table", "lhv", "analyze", "sweep")
CONFIG_SECTIONS = ("eprb", "ghzm", "sweep")

_REQUIRED = object()


class ConfigError(ValueError):
    """Malformed config text or invalid manifest values."""


@dataclass
class RunManifest:
    command: str
    parameters: dict = field(default_factory=dict)
    output_format: str = "table"
    verify: bool = False
    tolerance: float = DEFAULT_TOL


@dataclass(frozen=True)
class _Key:
    parse: Callable[[str], object]
    default: object = _REQUIRED
    emit: Callable[[object], str] = str


def _parse_float(s: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"expected a number, got {s!r}") from None


def _parse_bool(s: str) -> bool:
    if s == "true":
        return True
    if s == "false":
        return False
    raise ConfigError(f"expected true or false, got {s!r}")


def _parse_floats(s: str) -> tuple[float, ...]:
    parts = s.split()
    if not parts:
        raise ConfigError("expected at least one number")
    return tuple(_parse_float(p) for p in parts)


def _choice(*options: str) -> Callable[[str], str]:
    def parse(s: str) -> str:
        if s not in options:
            raise ConfigError(f"expected one of {options}, got {s!r}")
        return s

    return parse


def _emit_float(v) -> str:
    return repr(float(v))


def _emit_bool(v) -> str:
    return "true" if v else "false"


def _emit_floats(v) -> str:
    return " ".join(repr(float(x)) for x in v)


def _float_key(default=_REQUIRED) -> _Key:
    return _Key(_parse_float, default, _emit_float)


def _bool_key(default) -> _Key:
    return _Key(_parse_bool, default, _emit_bool)


def _floats_key(default=_REQUIRED) -> _Key:
    return _Key(_parse_floats, default, _emit_floats)


def _choice_key(options, default=_REQUIRED) -> _Key:
    return _Key(_choice(*options), default)


_RUN_KEYS = {
    "format": _choice_key(("table", "csv"), "table"),
    "verify": _bool_key(False),
    "tol": _float_key(DEFAULT_TOL),
}

_SCHEMAS: dict[str, dict[str, _Key]] = {
    "eprb": {
        "theta1": _float_key(90.0),
        "phi1": _float_key(),
        "theta2": _float_key(90.0),
        "phi2": _float_key(),
        "entangled": _bool_key(True),
        "beta_preset": _choice_key(("spin", "probability"), "spin"),
        **_RUN_KEYS,
    },
    "ghzm": {
        "theta1": _float_key(90.0),
        "phi1": _float_key(),
        "theta2": _float_key(90.0),
        "phi2": _float_key(),
        "theta3": _float_key(90.0),
        "phi3": _float_key(),
        "entangled": _bool_key(True),
        "gamma_preset": _choice_key(("even", "odd"), "even"),
        **_RUN_KEYS,
    },
    "sweep": {
        "experiment": _choice_key(("eprb", "ghzm")),
        "theta1": _floats_key((90.0,)),
        "phi1": _floats_key(),
        "theta2": _floats_key((90.0,)),
        "phi2": _floats_key(),
        "theta3": _floats_key((90.0,)),
        "phi3": _floats_key(),
        "entangled": _bool_key(True),
        "beta_preset": _choice_key(("spin", "probability"), "spin"),
        "gamma_preset": _choice_key(("even", "odd"), "even"),
        **{**_RUN_KEYS, "format": _choice_key(("table", "csv"), "csv")},
    },
    "bell-q": {
        "phis": _floats_key((0.0, 120.0, 240.0)),
        **_RUN_KEYS,
    },
    "ghz-table": dict(_RUN_KEYS),
    "lhv": {
        "which": _choice_key(("eprb", "ghz", "both"), "both"),
        **_RUN_KEYS,
    },
    "analyze": {
        "experiment": _choice_key(("eprb", "ghzm"), "eprb"),
        "theta1": _float_key(90.0),
        "phi1": _float_key(0.0),
        "theta2": _float_key(90.0),
        "phi2": _float_key(120.0),
        "theta3": _float_key(90.0),
        "phi3": _float_key(240.0),
        **_RUN_KEYS,
    },
}

# keys that only make sense for one sweep experiment
_SWEEP_EPRB_ONLY = ("beta_preset",)
_SWEEP_GHZM_ONLY = ("theta3", "phi3", "gamma_preset")


def finalize_manifest(command: str, provided: dict[str, object]) -> RunManifest:
    """Apply defaults and validation to already-typed values."""
    if command not in _SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    schema = _SCHEMAS[command]
    unknown = set(provided) - set(schema)
    if unknown:
        raise ConfigError(f"unknown keys for {command!r}: {sorted(unknown)}")

    dropped: tuple[str, ...] = ()
    if command == "sweep":
        experiment = provided.get("experiment")
        if experiment is None:
            raise ConfigError("missing required key 'experiment' for 'sweep'")
        dropped = _SWEEP_GHZM_ONLY if experiment == "eprb" else _SWEEP_EPRB_ONLY
        for key in dropped:
            if key in provided:
                raise ConfigError(f"key {key!r} does not apply to a {experiment} sweep")

    values: dict[str, object] = {}
    for key, spec in schema.items():
        if key in dropped:
            continue
        if key in provided:
            values[key] = provided[key]
        elif spec.default is not _REQUIRED:
            values[key] = spec.default
        else:
            raise ConfigError(f"missing required key {key!r} for {command!r}")

    if command == "bell-q" and len(values["phis"]) != 3:
        raise ConfigError("bell-q needs exactly three analyzer azimuths")

    output_format = values.pop("format")
    verify = values.pop("verify")
    tolerance = values.pop("tol")
    if tolerance <= 0:
        raise ConfigError(f"tolerance must be positive, got {tolerance}")
    return RunManifest(command, values, output_format, verify, tolerance)


def parse_config(text: str) -> RunManifest:
    """Parse a config document into a validated manifest."""
    section: str | None = None
    raw: dict[str, str] = {}
    lines: dict[str, int] = {}
    for lineno, full_line in enumerate(text.splitlines(), start=1):
        line = full_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header {line!r}")
            name = line[1:-1].strip()
            if name not in CONFIG_SECTIONS:
                raise ConfigError(
                    f"line {lineno}: unknown section {name!r}; expected one of {CONFIG_SECTIONS}"
                )
            if section is not None:
                raise ConfigError(f"line {lineno}: config may hold only one section")
            section = name
            continue
        if section is None:
            raise ConfigError(f"line {lineno}: key assignment before any section header")
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        if key not in _SCHEMAS[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in section [{section}]")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
        lines[key] = lineno

    if section is None:
        raise ConfigError("config holds no section header")

    typed: dict[str, object] = {}
    for key, value in raw.items():
        try:
            typed[key] = _SCHEMAS[section][key].parse(value)
        except ConfigError as exc:
            raise ConfigError(f"line {lines[key]}: {key}: {exc}") from None
    return finalize_manifest(section, typed)


def manifest_to_config(manifest: RunManifest) -> str:
    """Render a manifest back to config text (config-file commands only)."""
    if manifest.command not in CONFIG_SECTIONS:
        raise ConfigError(f"command {manifest.command!r} has no config representation")
    schema = _SCHEMAS[manifest.command]
    out = [f"[{manifest.command}]"]
    rendered = dict(manifest.parameters)
    rendered["format"] = manifest.output_format
    rendered["verify"] = manifest.verify
    rendered["tol"] = manifest.tolerance
    for key, spec in schema.items():
        if key in rendered:
            out.append(f"{key} = {spec.emit(rendered[key])}")
    return "\n".join(out) + "\n"
