"""Run configuration for the command-line tool.

Configs are JSON objects. Every physical quantity is a string carrying an
explicit unit, e.g. ``"1e8 amu"`` or ``"10 dB"``; bare numbers are accepted
only for dimensionless fields. :meth:`RunConfig.to_dict` writes quantities
back in canonical SI units with full float precision, so a config echoed into
an output header parses to an identical object.
"""

from __future__ import annotations

import dataclasses
import json
import math
import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError
from .fisher import MOMENTUM, POSITION, Heterodyne, Homodyne, SldOptimal, canonical_theta
from .scenario import AMU, YEAR, repetitions_from_duration, scenario_derive

__all__ = [
    "UNITS",
    "SCHEME_NAMES",
    "GridSpec",
    "RunConfig",
    "parse_quantity",
    "format_quantity",
    "parse_scheme",
    "load_config",
    "apply_overrides",
]

# unit -> (dimension, factor to canonical)
UNITS = {
    "kg": ("mass", 1.0),
    "g": ("mass", 1e-3),
    "amu": ("mass", AMU),
    "rad/s": ("angular_frequency", 1.0),
    "Hz": ("angular_frequency", 2.0 * math.pi),
    "s": ("time", 1.0),
    "ms": ("time", 1e-3),
    "day": ("time", 86400.0),
    "yr": ("time", YEAR),
    "m^-2s^-1": ("diffusion", 1.0),
    "m": ("length", 1.0),
    "um": ("length", 1e-6),
    "nm": ("length", 1e-9),
    "s^-1": ("rate", 1.0),
    "rad": ("angle", 1.0),
    "deg": ("angle", math.pi / 180.0),
    "dB": ("squeezing", 1.0),
}
CANONICAL = {
    "mass": "kg",
    "angular_frequency": "rad/s",
    "time": "s",
    "diffusion": "m^-2s^-1",
    "length": "m",
    "rate": "s^-1",
    "angle": "rad",
    "squeezing": "dB",
}

_QUANTITY = re.compile(r"^\s*([-+0-9.eE]+)\s*(\S.*?)\s*$")


def parse_quantity(text, dimension: str) -> float:
    """``"1e8 amu"`` -> value in canonical units of ``dimension``."""
    if isinstance(text, bool) or not isinstance(text, str):
        raise ConfigError(f"expected a {dimension} with a unit suffix, got {text!r}")
    m = _QUANTITY.match(text)
    if not m:
        raise ConfigError(f"cannot parse quantity {text!r}")
    unit = m.group(2).replace(" ", "")
    if unit not in UNITS:
        raise ConfigError(f"unknown unit {m.group(2)!r} in {text!r}")
    dim, factor = UNITS[unit]
    if dim != dimension:
        raise ConfigError(f"{text!r} is a {dim}, expected a {dimension}")
    try:
        value = float(m.group(1))
    except ValueError:
        raise ConfigError(f"cannot parse number in {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"non-finite quantity {text!r}")
    return value * factor


def format_quantity(value: float, dimension: str) -> str:
    return f"{value!r} {CANONICAL[dimension]}"


SCHEME_NAMES = ("qcrb", "position", "momentum", "optimal-homodyne", "heterodyne")


def parse_scheme(name: str):
    """Scheme names: the entries of :data:`SCHEME_NAMES` or ``homodyne:<angle>``."""
    if name == "qcrb":
        return SldOptimal()
    if name == "position":
        return POSITION
    if name == "momentum":
        return MOMENTUM
    if name == "heterodyne":
        return Heterodyne()
    if name == "optimal-homodyne":
        return "optimal-homodyne"
    if name.startswith("homodyne:"):
        return Homodyne(canonical_theta(parse_quantity(name.split(":", 1)[1], "angle")))
    raise ConfigError(f"unknown scheme {name!r}; expected one of {SCHEME_NAMES} or homodyne:<angle>")


@dataclass(frozen=True)
class GridSpec:
    variable: str
    start: float
    stop: float
    points: int
    spacing: str = "log"

    # squeezing is in dB, r is the bare squeezing parameter
    VARIABLES = {"lambda": "diffusion", "tau": None, "squeezing": "squeezing", "r": None, "r_c": "length"}

    def __post_init__(self):
        if self.variable not in self.VARIABLES:
            raise ConfigError(f"unknown sweep variable {self.variable!r}")
        if self.points < 2:
            raise ConfigError("a sweep grid needs at least two points")
        if self.spacing not in ("log", "linear"):
            raise ConfigError(f"grid spacing must be 'log' or 'linear', got {self.spacing!r}")
        if self.spacing == "log" and not (self.start > 0 and self.stop > 0):
            raise ConfigError("log grids need positive end points")

    def values(self):
        import numpy as np

        if self.spacing == "log":
            return np.logspace(math.log10(self.start), math.log10(self.stop), self.points)
        return np.linspace(self.start, self.stop, self.points)

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        d = dict(d)
        var = d.pop("variable", None)
        if var not in cls.VARIABLES:
            raise ConfigError(f"unknown sweep variable {var!r}")
        dim = cls.VARIABLES[var]
        conv = (lambda v: float(v)) if dim is None else (lambda v: parse_quantity(v, dim))
        try:
            grid = cls(var, conv(d.pop("start")), conv(d.pop("stop")), int(d.pop("points")), d.pop("spacing", "log"))
        except KeyError as exc:
            raise ConfigError(f"sweep is missing {exc.args[0]!r}") from None
        if d:
            raise ConfigError(f"unknown sweep keys {sorted(d)}")
        return grid

    def to_dict(self) -> dict:
        dim = self.VARIABLES[self.variable]
        fmt = (lambda v: v) if dim is None else (lambda v: format_quantity(v, dim))
        return {
            "variable": self.variable,
            "start": fmt(self.start),
            "stop": fmt(self.stop),
            "points": self.points,
            "spacing": self.spacing,
        }


# field name -> dimension (None = dimensionless number)
_QUANTITY_FIELDS = {
    "mass": "mass",
    "omega": "angular_frequency",
    "time": "time",
    "lambda_": "diffusion",
    "squeezing": "squeezing",
    "sphere_radius": "length",
    "sphere_mass": "mass",
    "m0": "mass",
    "duration": "time",
}
_JSON_NAMES = {"lambda_": "lambda"}


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI command needs. Physical fields are in SI units."""

    mass: float = 1e8 * AMU
    omega: float = 1e5
    time: float = 100.0
    lambda_: float = 0.0
    thermal_variance: float = 1.6
    squeezing: float = 0.0  # dB
    squeeze_angle: object = "optimal"  # radians or "optimal"
    schemes: tuple = ("qcrb", "optimal-homodyne", "momentum", "position", "heterodyne")
    repetitions: Optional[int] = None
    duration: Optional[float] = None
    duty_cycle: float = 1.0
    table1_literal: bool = False
    sphere_radius: float = 100e-9
    sphere_mass: Optional[float] = None
    m0: float = AMU
    sweep: Optional[GridSpec] = None
    seed: Optional[int] = None
    replicates: int = 200
    chunk_size: int = 1 << 16
    clamp: bool = True
    overlays: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.repetitions is not None and self.duration is not None:
            raise ConfigError("give either repetitions or duration, not both")
        if not 0 < self.duty_cycle <= 1:
            raise ConfigError(f"duty_cycle must be in (0, 1], got {self.duty_cycle}")
        if not self.thermal_variance >= 1:
            raise ConfigError(f"thermal_variance must be >= 1, got {self.thermal_variance}")
        if not self.schemes:
            raise ConfigError("at least one scheme is required")
        for name in self.schemes:
            parse_scheme(name)
        if isinstance(self.squeeze_angle, str) and self.squeeze_angle != "optimal":
            raise ConfigError("squeeze_angle must be an angle or 'optimal'")
        if self.replicates < 2:
            raise ConfigError("replicates must be >= 2")
        if self.chunk_size < 1:
            raise ConfigError("chunk_size must be >= 1")
        if self.seed is not None and not (0 <= self.seed < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")
        try:
            self.scenario()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def nu(self) -> int:
        if self.repetitions is not None:
            return self.repetitions
        if self.duration is not None:
            return repetitions_from_duration(self.duration, self.time, self.duty_cycle)
        return 1

    def scenario(self, **changes):
        kw = dict(
            mass=self.mass,
            omega=self.omega,
            time=self.time,
            lambda_=self.lambda_,
            sphere_radius=self.sphere_radius,
            repetitions=max(self.nu, 1),
            table1_literal=self.table1_literal,
        )
        kw.update(changes)
        return scenario_derive(**kw)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        names = {f.name: f for f in dataclasses.fields(cls)}
        reverse = {v: k for k, v in _JSON_NAMES.items()}
        kw = {}
        for key, value in d.items():
            name = reverse.get(key, key)
            if name not in names:
                raise ConfigError(f"unknown config key {key!r}")
            if value is None:
                kw[name] = None
            elif name in _QUANTITY_FIELDS:
                kw[name] = parse_quantity(value, _QUANTITY_FIELDS[name])
            elif name == "squeeze_angle":
                kw[name] = value if value == "optimal" else parse_quantity(value, "angle")
            elif name == "sweep":
                kw[name] = GridSpec.from_dict(value)
            elif name in ("schemes", "overlays"):
                if isinstance(value, str) or not all(isinstance(v, str) for v in value):
                    raise ConfigError(f"{key} must be a list of strings")
                kw[name] = tuple(value)
            elif name in ("repetitions", "seed", "replicates", "chunk_size"):
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ConfigError(f"{key} must be an integer, got {value!r}")
                kw[name] = value
            elif name in ("table1_literal", "clamp"):
                if not isinstance(value, bool):
                    raise ConfigError(f"{key} must be true or false")
                kw[name] = value
            else:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"{key} must be a number, got {value!r}")
                kw[name] = float(value)
        return cls(**kw)

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            key = _JSON_NAMES.get(f.name, f.name)
            if value is None:
                out[key] = None
            elif f.name in _QUANTITY_FIELDS:
                out[key] = format_quantity(value, _QUANTITY_FIELDS[f.name])
            elif f.name == "squeeze_angle":
                out[key] = value if value == "optimal" else format_quantity(value, "angle")
            elif f.name == "sweep":
                out[key] = value.to_dict()
            elif isinstance(value, tuple):
                out[key] = list(value)
            else:
                out[key] = value
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None


def apply_overrides(d: dict, overrides) -> dict:
    """Apply ``key=value`` strings; values are parsed as JSON, falling back to plain strings."""
    d = dict(d)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        d[key.strip()] = value
    return d
