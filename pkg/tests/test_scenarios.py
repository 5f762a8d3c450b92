import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcorral.config import SimulationConfig
from qcorral.grid import PolarGrid, ScalarField
from qcorral.scenarios import (
    PulseSpec,
    front_radius,
    make_pulse,
    paper_scenarios,
    scenario_config,
    track_front,
)
from qcorral.spectral import DiskDomain, expand_initial

A = 10e-9
DOM = DiskDomain(A)


def test_zero_amplitude():
    ic = make_pulse(PulseSpec(amplitude=0.0, width=A / 10), DOM)
    grid = PolarGrid(A, 16, 16)
    assert not grid.sample(ic.f).any()
    assert not grid.sample(ic.g).any()


def test_centred_spot_is_axisymmetric():
    ic = make_pulse(PulseSpec(width=A / 10), DOM)
    grid = PolarGrid(A, 32, 64)
    vals = grid.sample(ic.f)
    assert np.max(np.abs(vals - vals[:, :1])) == 0.0
    c = expand_initial(ic, DOM, 1.5e6, M=4, N=16)
    assert np.max(np.abs(c.a[1:])) < 1e-10
    assert np.max(np.abs(c.b)) < 1e-10


@pytest.mark.parametrize("theta0", [0.0, 1.0, -2.5])
def test_offset_spot_argmax(theta0):
    grid = PolarGrid(A, 64, 128)
    spec = PulseSpec(center_r=A / 2, center_theta=theta0, width=A / 20)
    vals = grid.sample(make_pulse(spec, DOM).f)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    rr, tt = grid.mesh()
    x, y = rr[i, j] * np.cos(tt[i, j]), rr[i, j] * np.sin(tt[i, j])
    x0, y0 = A / 2 * np.cos(theta0), A / 2 * np.sin(theta0)
    assert math.hypot(x - x0, y - y0) <= math.hypot(grid.dr, A / 2 * grid.dtheta)


@settings(max_examples=20, deadline=None)
@given(amp=st.floats(0.1, 10.0), frac=st.floats(0.03, 0.1))
def test_pulse_mass_scaling(amp, frac):
    sigma = frac * A
    ic = make_pulse(PulseSpec(amplitude=amp, width=sigma), DOM)
    grid = PolarGrid(A, 256, 16)
    mass = ScalarField(grid, grid.sample(ic.f)).integral()
    assert mass == pytest.approx(2 * math.pi * sigma**2 * amp, rel=0.05)


def test_velocity_excitation():
    ic = make_pulse(PulseSpec(width=A / 10, excitation="velocity"), DOM)
    grid = PolarGrid(A, 16, 16)
    assert not grid.sample(ic.f).any()
    assert grid.sample(ic.g).max() > 0.5


def test_ring_pulse_wall_compatible():
    make_pulse(PulseSpec(kind="gaussian_ring", center_r=0.6 * A, width=A / 10), DOM).check_compatible(DOM)


def test_wide_pulse_warns():
    with pytest.warns(UserWarning):
        make_pulse(PulseSpec(width=0.6 * A), DOM)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        make_pulse(PulseSpec(width=0.5 * A), DOM)


@pytest.mark.parametrize("kwargs", [
    {"width": 0.0}, {"width": -1.0}, {"amplitude": float("inf")}, {"center_r": -1e-9},
    {"kind": "square"}, {"excitation": "magnetic"},
])
def test_pulse_validation(kwargs):
    with pytest.raises(ValueError):
        PulseSpec(**kwargs)


def test_pulse_outside_disk():
    with pytest.raises(ValueError):
        make_pulse(PulseSpec(center_r=A), DOM)


def test_paper_scenarios():
    configs = paper_scenarios()
    assert len(configs) == 4
    assert sorted(round(c.domain.radius * 1e9, 9) for c in configs) == [1, 5, 10, 70]
    for cfg in configs:
        assert isinstance(cfg, SimulationConfig)
        assert cfg.potential_mode == "distortionless"
        assert cfg.parameters().q == 0.0
        assert cfg.carrier.beta == pytest.approx(5e-3)
        assert cfg.pulse.width == pytest.approx(cfg.domain.radius / 10)
        assert len(cfg.snapshot_times) == 12
        assert cfg.total_time == pytest.approx(3 * cfg.crossing_time())
        cfg.initial_condition().check_compatible(cfg.domain)


def test_unknown_scenario():
    with pytest.raises(ValueError):
        scenario_config("fig9")


def test_front_radius_of_ring():
    grid = PolarGrid(A, 64, 32)
    for r0 in (0.3 * A, 0.55 * A):
        vals = grid.sample(lambda r, th: np.exp(-((r - r0) / (0.05 * A)) ** 2) + 0 * th)
        assert front_radius(ScalarField(grid, vals)) == pytest.approx(r0, abs=0.2 * grid.dr)


def test_track_front_synthetic():
    v = 1.5e6
    grid = PolarGrid(A, 128, 16)
    crossing = A / v
    snaps = []
    for t in np.linspace(0, 2 * crossing, 17):
        s = v * t
        if s <= A:
            prof = lambda r, th: np.exp(-((r - s) / (0.05 * A)) ** 2) + 0 * th
        else:
            back = 2 * A - s
            prof = lambda r, th: -np.exp(-((r - back) / (0.05 * A)) ** 2) + 0 * th
        snaps.append((t, ScalarField(grid, grid.sample(prof))))
    tr = track_front(snaps, A, v)
    assert tr.relative_speed_error(v) < 0.02
    assert tr.inward_speed == pytest.approx(-v, rel=0.02)
