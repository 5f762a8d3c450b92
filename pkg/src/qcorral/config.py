"""Run configuration: the ``key = value`` document format and its validation.

Example::

    [domain]
    radius = 5 nm

    [carrier]
    mass = 1 me
    velocity = 5e-3 c

    [physics]
    potential = distortionless   # zero | distortionless | <energy>
    equation = transformed_eq4   # full_eq1 | transformed_eq4 | undamped_eq7

    [initial]
    scenario = fig2              # or give kind/amplitude/center_r/... explicitly

    [grid]
    n_r = 128
    n_theta = 256

    [run]
    solver = fdtd                # spectral | fdtd | both
    total_time = 10 fs
    snapshots = 12

Quantities take a unit suffix. Lengths: m, um, nm, pm. Times: s, ps, fs, as.
Energies: J, eV, meV. Speeds: m/s, c. Masses: kg, me. Angles: rad, deg.
"""

from __future__ import annotations

import configparser
import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fdtd import DEFAULT_SAFETY, EQUATIONS
from .grid import PolarGrid
from .physics import (
    C_LIGHT,
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
    HeatCarrier,
    QhtParameters,
    derive_parameters,
    distortionless_potential,
)
from .scenarios import SCENARIO_RADII_NM, SCENARIO_SNAPSHOTS, PulseSpec, make_pulse, scenario_pulse
from .spectral import (
    DEFAULT_ORDER,
    DEFAULT_QUAD_POINTS,
    DEFAULT_RADIAL,
    DiskDomain,
    InitialCondition,
)

OUTPUT_ENV = "QCORRAL_OUTPUT_DIR"
SOLVERS = ("spectral", "fdtd", "both")
POTENTIAL_MODES = ("zero", "distortionless", "explicit")

UNITS = {
    "length": {"m": 1.0, "um": 1e-6, "nm": 1e-9, "pm": 1e-12},
    "time": {"s": 1.0, "ps": 1e-12, "fs": 1e-15, "as": 1e-18},
    "energy": {"J": 1.0, "eV": ELEMENTARY_CHARGE, "meV": 1e-3 * ELEMENTARY_CHARGE},
    "speed": {"m/s": 1.0, "c": C_LIGHT},
    "mass": {"kg": 1.0, "me": ELECTRON_MASS},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
}
SI_UNIT = {"length": "m", "time": "s", "energy": "J", "speed": "m/s", "mass": "kg", "angle": "rad"}

# section -> key -> kind ("length", ..., "int", "float", "str", "times")
SCHEMA = {
    "domain": {"radius": "length"},
    "carrier": {"mass": "mass", "velocity": "speed"},
    "physics": {"potential": "potential", "equation": "str"},
    "initial": {
        "scenario": "str",
        "kind": "str",
        "amplitude": "float",
        "center_r": "length",
        "center_theta": "angle",
        "width": "length",
        "excitation": "str",
    },
    "grid": {"n_r": "int", "n_theta": "int", "safety": "float"},
    "spectral": {"max_order": "int", "max_radial": "int", "quad_points": "int"},
    "run": {
        "solver": "str",
        "total_time": "time",
        "snapshots": "int",
        "snapshot_times": "times",
        "output_dir": "str",
    },
}
REQUIRED = (("domain", "radius"), ("carrier", "velocity"))


class ConfigError(ValueError):
    """Invalid configuration text or values."""


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "qcorral-output"))


@dataclass(frozen=True)
class SimulationConfig:
    domain: DiskDomain
    carrier: HeatCarrier
    pulse: PulseSpec
    grid: PolarGrid
    total_time: float
    snapshot_times: tuple
    potential_mode: str = "distortionless"
    potential_value: float = 0.0
    equation: str = "transformed_eq4"
    safety: float = DEFAULT_SAFETY
    max_order: int = DEFAULT_ORDER
    max_radial: int = DEFAULT_RADIAL
    quad_points: int = DEFAULT_QUAD_POINTS
    solver: str = "fdtd"
    output_dir: str = field(default_factory=lambda: str(default_output_dir()))

    def __post_init__(self):
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))
        _check(self.potential_mode in POTENTIAL_MODES, "physics.potential",
               f"unknown mode {self.potential_mode!r}")
        _check(self.potential_value >= 0, "physics.potential", "must be non-negative")
        _check(self.equation in EQUATIONS, "physics.equation",
               f"must be one of {', '.join(EQUATIONS)}")
        _check(self.solver in SOLVERS, "run.solver", f"must be one of {', '.join(SOLVERS)}")
        _check(math.isclose(self.grid.radius, self.domain.radius, rel_tol=1e-12),
               "grid", "radius must equal the domain radius")
        _check(0 < self.safety <= 1, "grid.safety", "must lie in (0, 1]")
        _check(self.max_order >= 0, "spectral.max_order", "must be >= 0")
        _check(self.max_radial >= 1, "spectral.max_radial", "must be >= 1")
        _check(32 <= self.quad_points <= 512, "spectral.quad_points", "must lie in [32, 512]")
        _check(math.isfinite(self.total_time) and self.total_time >= 0,
               "run.total_time", "must be a non-negative time")
        times = self.snapshot_times
        _check(len(times) > 0, "run.snapshot_times", "schedule is empty")
        _check(all(a <= b for a, b in zip(times, times[1:])), "run.snapshot_times",
               "must be sorted")
        _check(times[0] >= 0 and times[-1] <= self.total_time * (1 + 1e-12),
               "run.snapshot_times", "must lie within [0, total_time]")
        try:
            self.pulse.check_domain(self.domain)
        except ValueError as exc:
            raise ConfigError(f"initial.center_r: {exc}") from None

    def potential(self) -> float:
        """Potential energy V in joules."""
        if self.potential_mode == "zero":
            return 0.0
        if self.potential_mode == "distortionless":
            return distortionless_potential(self.carrier)
        return self.potential_value

    def parameters(self) -> QhtParameters:
        return derive_parameters(self.carrier, self.potential())

    def initial_condition(self) -> InitialCondition:
        return make_pulse(self.pulse, self.domain)

    def crossing_time(self) -> float:
        return self.domain.radius / self.carrier.velocity


def _check(ok: bool, name: str, message: str) -> None:
    if not ok:
        raise ConfigError(f"{name}: {message}")


_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def parse_quantity(text: str, kind: str) -> float:
    """Convert ``'5 nm'`` or ``'5e-3c'`` to SI. A bare number is taken as SI."""
    m = _NUMBER.match(text)
    if not m:
        raise ConfigError(f"cannot parse {kind} {text!r}")
    value, unit = float(m.group(1)), m.group(2)
    if not unit:
        return value
    table = UNITS[kind]
    if unit not in table:
        raise ConfigError(
            f"unknown {kind} unit {unit!r}; expected one of {', '.join(table)}"
        )
    return value * table[unit]


def format_quantity(value: float, kind: str) -> str:
    return f"{float(value)!r} {SI_UNIT[kind]}"


def _line_of(text: str, section: str | None, key: str | None = None) -> int | None:
    current = None
    for no, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        head = re.match(r"^\[(.+)\]$", stripped)
        if head:
            current = head.group(1).strip()
            if key is None and current == section:
                return no
            continue
        if key is not None and current == section and re.match(rf"^{re.escape(key)}\s*[=:]", stripped):
            return no
    return None


def _where(text, section, key=None) -> str:
    no = _line_of(text, section, key)
    return f"line {no}: " if no else ""


def parse_config(text: str) -> SimulationConfig:
    """Parse and validate a configuration document.

    Raises :class:`ConfigError` naming the line or field at fault.
    """
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True,
        default_section="__defaults__",
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"line {exc.lineno}: key outside of any [section]") from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else "?"
        raise ConfigError(f"line {lineno}: syntax error, expected 'key = value'") from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ConfigError(f"line {exc.lineno}: {exc.message}") from None

    raw: dict[str, dict[str, str]] = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{_where(text, section)}unknown section [{section}]")
        for key, value in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{_where(text, section, key)}unknown key {section}.{key}")
            raw.setdefault(section, {})[key] = value.strip()
    for section, key in REQUIRED:
        if key not in raw.get(section, {}):
            raise ConfigError(f"missing required field {section}.{key}")

    def get(section, key, default=None):
        if key not in raw.get(section, {}):
            return default
        value = raw[section][key]
        kind = SCHEMA[section][key]
        try:
            if kind in UNITS:
                return parse_quantity(value, kind)
            if kind == "int":
                return int(value)
            if kind == "float":
                return float(value)
            if kind == "times":
                return tuple(parse_quantity(v, "time") for v in value.split(",") if v.strip())
            return value
        except ConfigError as exc:
            raise ConfigError(f"{_where(text, section, key)}{section}.{key}: {exc}") from None
        except ValueError:
            raise ConfigError(
                f"{_where(text, section, key)}{section}.{key}: cannot parse {value!r}"
            ) from None

    try:
        return _build(get)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _build(get) -> SimulationConfig:
    radius = get("domain", "radius")
    domain = DiskDomain(radius)
    carrier = HeatCarrier(get("carrier", "mass", ELECTRON_MASS), get("carrier", "velocity"))

    pot_text = get("physics", "potential", "distortionless")
    if pot_text in ("zero", "distortionless"):
        mode, pot_value = pot_text, 0.0
    else:
        try:
            mode, pot_value = "explicit", parse_quantity(pot_text, "energy")
        except ConfigError as exc:
            raise ConfigError(f"physics.potential: {exc}") from None

    scenario = get("initial", "scenario")
    if scenario is not None and scenario not in SCENARIO_RADII_NM:
        raise ConfigError(f"initial.scenario: unknown scenario {scenario!r}")
    base = scenario_pulse(radius)
    pulse = PulseSpec(
        amplitude=get("initial", "amplitude", base.amplitude),
        center_r=get("initial", "center_r", base.center_r),
        center_theta=get("initial", "center_theta", base.center_theta),
        width=get("initial", "width", base.width),
        kind=get("initial", "kind", base.kind),
        excitation=get("initial", "excitation", base.excitation),
    )

    n_r = get("grid", "n_r", 128)
    n_theta = get("grid", "n_theta", 256)
    grid = PolarGrid(radius, n_r, n_theta)

    total = get("run", "total_time")
    if total is None:
        total = 3.0 * radius / carrier.velocity
    times = get("run", "snapshot_times")
    count = get("run", "snapshots")
    if times is not None and count is not None:
        raise ConfigError("run: give either snapshots or snapshot_times, not both")
    if times is None:
        count = SCENARIO_SNAPSHOTS if count is None else count
        if count < 1:
            raise ConfigError("run.snapshots: must be >= 1")
        times = tuple(float(t) for t in np.linspace(0.0, total, count)) if count > 1 else (total,)

    return SimulationConfig(
        domain=domain,
        carrier=carrier,
        pulse=pulse,
        grid=grid,
        total_time=total,
        snapshot_times=times,
        potential_mode=mode,
        potential_value=pot_value,
        equation=get("physics", "equation", "transformed_eq4"),
        safety=get("grid", "safety", DEFAULT_SAFETY),
        max_order=get("spectral", "max_order", DEFAULT_ORDER),
        max_radial=get("spectral", "max_radial", DEFAULT_RADIAL),
        quad_points=get("spectral", "quad_points", DEFAULT_QUAD_POINTS),
        solver=get("run", "solver", "fdtd"),
        output_dir=get("run", "output_dir", str(default_output_dir())),
    )


def load_config(path) -> SimulationConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such configuration file") from None
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def format_config(cfg: SimulationConfig, comments: dict | None = None) -> str:
    """Serialize ``cfg`` so that ``parse_config`` returns an equal config.

    ``comments`` are written as ``# key = value`` lines in a leading block;
    they are ignored when the document is parsed back.
    """
    lines = []
    if comments:
        for key, value in comments.items():
            lines.append(f"# {key} = {value}")
        lines.append("")
    if cfg.potential_mode == "explicit":
        potential = format_quantity(cfg.potential_value, "energy")
    else:
        potential = cfg.potential_mode
    p = cfg.pulse
    sections = {
        "domain": {"radius": format_quantity(cfg.domain.radius, "length")},
        "carrier": {
            "mass": format_quantity(cfg.carrier.mass, "mass"),
            "velocity": format_quantity(cfg.carrier.velocity, "speed"),
        },
        "physics": {"potential": potential, "equation": cfg.equation},
        "initial": {
            "kind": p.kind,
            "amplitude": repr(float(p.amplitude)),
            "center_r": format_quantity(p.center_r, "length"),
            "center_theta": format_quantity(p.center_theta, "angle"),
            "width": format_quantity(p.width, "length"),
            "excitation": p.excitation,
        },
        "grid": {
            "n_r": str(cfg.grid.n_r),
            "n_theta": str(cfg.grid.n_theta),
            "safety": repr(float(cfg.safety)),
        },
        "spectral": {
            "max_order": str(cfg.max_order),
            "max_radial": str(cfg.max_radial),
            "quad_points": str(cfg.quad_points),
        },
        "run": {
            "solver": cfg.solver,
            "total_time": format_quantity(cfg.total_time, "time"),
            "snapshot_times": ", ".join(format_quantity(t, "time") for t in cfg.snapshot_times),
            "output_dir": cfg.output_dir,
        },
    }
    for name, items in sections.items():
        lines.append(f"[{name}]")
        lines.extend(f"{k} = {v}" for k, v in items.items())
        lines.append("")
    return "\n".join(lines)
