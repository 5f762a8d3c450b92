"""Laser-pulse initial data and the preset corral runs.

The pulse is a Gaussian deposit tapered to zero at the wall by
``1 - (r/a)**8``. Presets cover corrals of radius 1, 5, 10 and 70 nm with an
electron carrier at 5e-3 c and the distortionless potential.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .grid import ScalarField
from .spectral import DiskDomain, InitialCondition

PULSE_KINDS = ("gaussian_spot", "gaussian_ring")
EXCITATIONS = ("displacement", "velocity")

SCENARIO_RADII_NM = {"fig1": 1.0, "fig2": 5.0, "fig3": 10.0, "fig4": 70.0}
SCENARIO_BETA = 5e-3
SCENARIO_CROSSINGS = 3
SCENARIO_SNAPSHOTS = 12


@dataclass(frozen=True)
class PulseSpec:
    amplitude: float = 1.0
    center_r: float = 0.0
    center_theta: float = 0.0
    width: float = 1e-10
    kind: str = "gaussian_spot"
    excitation: str = "displacement"

    def __post_init__(self):
        if not math.isfinite(self.amplitude):
            raise ValueError("pulse amplitude must be finite")
        if not self.width > 0:
            raise ValueError(f"pulse width must be positive, got {self.width!r}")
        if self.center_r < 0:
            raise ValueError("pulse center_r must be non-negative")
        if self.kind not in PULSE_KINDS:
            raise ValueError(f"unknown pulse kind {self.kind!r}; expected one of {PULSE_KINDS}")
        if self.excitation not in EXCITATIONS:
            raise ValueError(
                f"unknown excitation {self.excitation!r}; expected one of {EXCITATIONS}"
            )

    def check_domain(self, dom: DiskDomain) -> None:
        if not self.center_r < dom.radius:
            raise ValueError(
                f"pulse center_r={self.center_r!r} must lie inside the disk of radius {dom.radius!r}"
            )


def _profile(spec: PulseSpec, radius: float):
    two_s2 = 2.0 * spec.width**2

    def shape(r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if spec.kind == "gaussian_spot":
            if spec.center_r == 0.0:
                d2 = r * r + 0.0 * theta
            else:
                d2 = (r * r + spec.center_r**2
                      - 2.0 * r * spec.center_r * np.cos(theta - spec.center_theta))
        else:
            d2 = (r - spec.center_r) ** 2 + 0.0 * theta
        taper = 1.0 - (np.clip(r, 0.0, radius) / radius) ** 8
        return spec.amplitude * np.exp(-d2 / two_s2) * taper

    return shape


def _zero(r, theta):
    return np.zeros(np.broadcast(r, theta).shape)


def make_pulse(spec: PulseSpec, dom: DiskDomain) -> InitialCondition:
    """Initial data for a laser deposit described by ``spec``.

    A displacement-type pulse sets the initial field and leaves the initial
    rate at zero; a velocity-type pulse does the reverse. Widths above a/2
    trigger a ``UserWarning`` because the deposit is then not localized.
    """
    spec.check_domain(dom)
    if spec.width > 0.5 * dom.radius:
        warnings.warn(
            f"pulse width {spec.width:.3g} m exceeds half the corral radius; "
            "the deposit is not localized",
            UserWarning,
            stacklevel=2,
        )
    shape = _profile(spec, dom.radius)
    if spec.excitation == "velocity":
        return InitialCondition(f=_zero, g=shape)
    return InitialCondition(f=shape, g=_zero)


def scenario_pulse(radius: float) -> PulseSpec:
    """Centred unit Gaussian with width a/10."""
    return PulseSpec(amplitude=1.0, center_r=0.0, width=radius / 10.0)


def scenario_config(name: str, output_dir: str | None = None, **overrides):
    """Preset :class:`~qcorral.config.SimulationConfig` for ``fig1``..``fig4``."""
    from .config import SimulationConfig, default_output_dir
    from .grid import PolarGrid
    from .physics import HeatCarrier

    if name not in SCENARIO_RADII_NM:
        raise ValueError(f"unknown scenario {name!r}; expected one of {sorted(SCENARIO_RADII_NM)}")
    radius = SCENARIO_RADII_NM[name] * 1e-9
    carrier = HeatCarrier.electron(SCENARIO_BETA)
    total = SCENARIO_CROSSINGS * radius / carrier.velocity
    n_r = overrides.pop("n_r", 128)
    n_theta = overrides.pop("n_theta", 256)
    fields = dict(
        domain=DiskDomain(radius),
        carrier=carrier,
        potential_mode="distortionless",
        potential_value=0.0,
        equation="transformed_eq4",
        pulse=scenario_pulse(radius),
        grid=PolarGrid(radius, n_r, n_theta),
        total_time=total,
        snapshot_times=tuple(float(t) for t in np.linspace(0.0, total, SCENARIO_SNAPSHOTS)),
        solver="fdtd",
        output_dir=output_dir or str(default_output_dir() / name),
    )
    fields.update(overrides)
    return SimulationConfig(**fields)


def paper_scenarios() -> list:
    """The four preset runs: radii 1, 5, 10 and 70 nm."""
    return [scenario_config(name) for name in sorted(SCENARIO_RADII_NM)]


def _peaks(profile: np.ndarray, floor: float) -> list[int]:
    """Indices of local maxima of ``profile`` that reach ``floor``."""
    ext = np.concatenate([[-np.inf], profile, [-np.inf]])
    idx = np.nonzero((ext[1:-1] >= ext[:-2]) & (ext[1:-1] >= ext[2:]) & (profile >= floor))[0]
    return [int(i) for i in idx]


def front_radius(field: ScalarField, sign: float = 1.0, pick: str = "outermost",
                 floor: float = 0.1) -> float:
    """Radius of a ring in the azimuthally averaged field.

    Rings are local maxima of ``sign * profile`` reaching ``floor`` times the
    largest magnitude in the profile. ``pick`` selects the outermost ring or
    the strongest one. The chosen peak is refined with a parabola through it
    and its neighbours. Returns NaN when no ring qualifies.
    """
    prof = sign * field.radial_profile()
    peaks = _peaks(prof, floor * np.max(np.abs(prof)))
    if not peaks:
        return float("nan")
    i = peaks[-1] if pick == "outermost" else max(peaks, key=lambda k: prof[k])
    r = field.grid.r
    if 0 < i < len(prof) - 1:
        y0, y1, y2 = prof[i - 1], prof[i], prof[i + 1]
        denom = y0 - 2.0 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        return float(r[i] + shift * field.grid.dr)
    return float(r[i])


@dataclass(frozen=True)
class FrontTrack:
    times: tuple
    outward_radii: tuple
    inward_radii: tuple
    outward_speed: float
    inward_speed: float | None

    def relative_speed_error(self, v: float) -> float:
        return abs(self.outward_speed - v) / v


def track_front(snapshots, radius: float, v: float, amplitude_sign: float = 1.0) -> FrontTrack:
    """Fit wavefront speeds before and after the first wall reflection.

    The outgoing front is the outermost ring with the pulse's sign; it is
    fitted over 0.2 a/v <= t <= 0.85 a/v, after it leaves the centre and
    before it reaches the wall. The Dirichlet wall flips the sign, so the
    reflected front is the strongest ring of opposite sign, fitted over
    1.15 a/v <= t <= 1.85 a/v. A negative ``inward_speed`` means the
    reflected front moves toward the centre.
    """
    crossing = radius / v
    times = np.array([t for t, _ in snapshots])
    out_r = np.array([front_radius(f, amplitude_sign, "outermost") for _, f in snapshots])
    in_r = np.array([front_radius(f, -amplitude_sign, "strongest") for _, f in snapshots])

    def slope(radii, lo, hi):
        sel = (times >= lo * crossing) & (times <= hi * crossing) & np.isfinite(radii)
        if sel.sum() < 2:
            return None
        return float(np.polyfit(times[sel], radii[sel], 1)[0])

    out = slope(out_r, 0.2, 0.85)
    if out is None:
        raise ValueError("need at least two snapshots between 0.2 and 0.85 crossing times")
    return FrontTrack(tuple(times), tuple(out_r), tuple(in_r), out, slope(in_r, 1.15, 1.85))
