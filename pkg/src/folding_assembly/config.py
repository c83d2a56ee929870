"""Scenario configuration: flat dotted keys in a TOML file.

Example::

    gains.K_f = 0.01
    gains.f_d = 5.0
    sensor.seed = 7

Keys that are not listed here are rejected, so a typo in a gain name fails
loudly instead of silently running the default.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib


class ConfigError(ValueError):
    pass


Vec = tuple[float, float, float]


@dataclass(frozen=True)
class GeometryConfig:
    rod_length: float = 0.1
    p2: Vec = (0.0, 0.0, 0.0)
    normal: Vec = (0.0, 0.0, 1.0)
    tangent: Vec = (1.0, 0.0, 0.0)
    wall_offset: float = 0.235
    extent: float = 0.3
    contact_s0: float = 0.08
    theta0: float = -1.0


@dataclass(frozen=True)
class GainsConfig:
    K_f: float = 0.01
    f_d: float = 5.0
    v_d_mag: float = 0.015
    omega_d_mag: float = 0.05
    theta_target: float = 0.0
    theta_tol: float = 0.02


@dataclass(frozen=True)
class ControllerConfig:
    wall_rule: str = "geometric"
    delta_wall: float = 0.005
    wall_force: float = 2.0
    wall_force_ticks: int = 10
    n_hold: int = 50
    rot_sign: int = 1
    normal_tilt_deg: float = 0.0


@dataclass(frozen=True)
class ContactConfig:
    k_n: float = 5.0e3
    c_n: float = 10.0
    mu: float = 0.3
    v_stick: float = 1e-5
    eps_sep: float = 1e-4
    max_penetration: float = 5e-3


@dataclass(frozen=True)
class SensorConfig:
    sigma_f: float = 0.1
    sigma_tau: float = 0.02
    seed: int = 0
    filter_window: int = 5
    f_min: float = 0.25


@dataclass(frozen=True)
class RatesConfig:
    physics_hz: int = 1000
    control_hz: int = 100


@dataclass(frozen=True)
class RunConfig:
    duration: float = 30.0
    lag_tau: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    gains: GainsConfig = field(default_factory=GainsConfig)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    contact: ContactConfig = field(default_factory=ContactConfig)
    sensor: SensorConfig = field(default_factory=SensorConfig)
    rates: RatesConfig = field(default_factory=RatesConfig)
    run: RunConfig = field(default_factory=RunConfig)

    def with_values(self, **flat) -> "ScenarioConfig":
        """Copy with dotted-key overrides, e.g. ``with_values(**{"gains.f_d": 2.0})``."""
        sections = {s.name: getattr(self, s.name) for s in dataclasses.fields(self)}
        for key, value in flat.items():
            sec, _, name = key.partition(".")
            if sec not in sections or name not in _field_types(type(sections[sec])):
                raise ConfigError(f"unknown key {key!r}")
            sections[sec] = dataclasses.replace(sections[sec], **{name: _coerce(key, value, _field_types(type(sections[sec]))[name])})
        cfg = ScenarioConfig(**sections)
        validate(cfg)
        return cfg


# (lower, upper, lower_inclusive); upper is always inclusive
_BOUNDS = {
    "geometry.rod_length": (0.0, math.inf, False),
    "geometry.wall_offset": (0.0, math.inf, False),
    "geometry.extent": (0.0, math.inf, False),
    "geometry.theta0": (-math.pi / 2, math.pi / 2, True),
    "gains.K_f": (0.0, math.inf, True),
    "gains.f_d": (0.0, math.inf, False),
    "gains.v_d_mag": (0.0, math.inf, True),
    "gains.omega_d_mag": (0.0, math.inf, True),
    "gains.theta_tol": (0.0, math.inf, False),
    "controller.delta_wall": (0.0, math.inf, True),
    "controller.wall_force": (0.0, math.inf, False),
    "controller.wall_force_ticks": (1, math.inf, True),
    "controller.n_hold": (1, math.inf, True),
    "controller.normal_tilt_deg": (-90.0, 90.0, False),
    "contact.k_n": (0.0, math.inf, False),
    "contact.c_n": (0.0, math.inf, True),
    "contact.mu": (0.0, math.inf, True),
    "contact.v_stick": (0.0, math.inf, False),
    "contact.eps_sep": (0.0, math.inf, True),
    "contact.max_penetration": (0.0, math.inf, False),
    "sensor.sigma_f": (0.0, math.inf, True),
    "sensor.sigma_tau": (0.0, math.inf, True),
    "sensor.filter_window": (1, math.inf, True),
    "sensor.f_min": (0.0, math.inf, True),
    "rates.physics_hz": (1, math.inf, True),
    "rates.control_hz": (1, math.inf, True),
    "run.duration": (0.0, math.inf, True),
    "run.lag_tau": (0.0, math.inf, True),
}


def _field_types(cls) -> dict:
    hints = {"float": float, "int": int, "str": str, "Vec": tuple}
    return {f.name: hints[f.type] for f in dataclasses.fields(cls)}


def _coerce(key: str, value, typ):
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if typ is str:
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
        return value
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{key}: expected a list of 3 numbers, got {value!r}")
    return tuple(_coerce(key, v, float) for v in value)


def flatten(cfg: ScenarioConfig) -> dict:
    out = {}
    for sec in dataclasses.fields(cfg):
        obj = getattr(cfg, sec.name)
        for f in dataclasses.fields(obj):
            out[f"{sec.name}.{f.name}"] = getattr(obj, f.name)
    return out


def validate(cfg: ScenarioConfig) -> None:
    flat = flatten(cfg)
    for key, value in flat.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise ConfigError(f"{key}: must be finite, got {value!r}")
        if isinstance(value, tuple) and not all(math.isfinite(v) for v in value):
            raise ConfigError(f"{key}: must be finite, got {value!r}")
        if key in _BOUNDS:
            lo, hi, lo_inc = _BOUNDS[key]
            ok = (value >= lo if lo_inc else value > lo) and value <= hi
            if not ok:
                rel = ">=" if lo_inc else ">"
                raise ConfigError(f"{key} = {value!r} out of range: must be {rel} {lo} and <= {hi}")
    g = cfg.geometry
    for key in ("geometry.normal", "geometry.tangent"):
        v = flat[key]
        if abs(math.sqrt(sum(c * c for c in v)) - 1.0) > 1e-9:
            raise ConfigError(f"{key} must be a unit vector, got {v!r}")
    if abs(sum(a * b for a, b in zip(g.normal, g.tangent))) > 1e-9:
        raise ConfigError("geometry.tangent must be orthogonal to geometry.normal")
    if not 0.0 < g.contact_s0 < g.wall_offset:
        raise ConfigError(f"geometry.contact_s0 = {g.contact_s0!r} must lie between 0 and geometry.wall_offset")
    if cfg.controller.wall_rule not in ("geometric", "force"):
        raise ConfigError(f"controller.wall_rule = {cfg.controller.wall_rule!r}: expected 'geometric' or 'force'")
    if cfg.controller.rot_sign not in (1, -1):
        raise ConfigError(f"controller.rot_sign = {cfg.controller.rot_sign!r}: expected 1 or -1")
    if cfg.rates.physics_hz % cfg.rates.control_hz:
        raise ConfigError(
            f"rates.physics_hz = {cfg.rates.physics_hz} must be a multiple of rates.control_hz = {cfg.rates.control_hz}"
        )


def _flatten_doc(doc: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in doc.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten_doc(v, key + "."))
        else:
            out[key] = v
    return out


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # message carries "(at line N, column M)"
        raise ConfigError(f"{source}: parse error: {exc}") from None
    known = flatten(ScenarioConfig())
    flat = _flatten_doc(doc)
    unknown = sorted(set(flat) - set(known))
    if unknown:
        raise ConfigError(f"{source}: unknown key(s): {', '.join(repr(k) for k in unknown)}")
    try:
        return ScenarioConfig().with_values(**flat)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, str(path))


def _fmt(v) -> str:
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, tuple):
        return "[" + ", ".join(_fmt(c) for c in v) + "]"
    return repr(v)


def dumps_config(cfg: ScenarioConfig) -> str:
    lines = []
    section = None
    for key, value in flatten(cfg).items():
        sec = key.split(".", 1)[0]
        if sec != section:
            if section is not None:
                lines.append("")
            section = sec
        lines.append(f"{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def write_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(dumps_config(cfg), encoding="utf-8", newline="\n")
