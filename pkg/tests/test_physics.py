import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcorral.grid import PolarGrid, ScalarField
from qcorral.physics import (
    ATTOSECOND,
    C_LIGHT,
    CONSTANTS,
    ELECTRON_MASS,
    ELEMENTARY_CHARGE,
    HBAR,
    PUBLISHED_MEAN_FREE_PATH,
    PUBLISHED_RELAXATION_TIME,
    HeatCarrier,
    derive_parameters,
    diffusivity,
    distortionless_potential,
    envelope_to_temperature,
    full_residual,
    mean_free_path,
    published_comparison,
    q_parameter,
    reduced_residual,
    relaxation_time,
    temperature_to_envelope,
)

carriers = st.builds(
    HeatCarrier,
    mass=st.floats(0.1, 10.0).map(lambda k: k * ELECTRON_MASS),
    velocity=st.floats(1e-4, 1e-1).map(lambda b: b * C_LIGHT),
)


@pytest.fixture
def electron():
    return HeatCarrier.electron(5e-3)


def test_constants():
    assert CONSTANTS.hbar == 1.054571817e-34
    assert CONSTANTS.c == 2.99792458e8
    rest = ELECTRON_MASS * C_LIGHT**2 / ELEMENTARY_CHARGE
    assert abs(rest - CONSTANTS.electron_rest_energy) / rest < 2e-3


@pytest.mark.parametrize("mass, v", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, C_LIGHT), (1.0, float("nan"))])
def test_carrier_validation(mass, v):
    with pytest.raises(ValueError):
        HeatCarrier(mass, v)


def test_electron_beta(electron):
    assert electron.velocity == pytest.approx(1.49896229e6, rel=1e-9)
    assert electron.beta == pytest.approx(5e-3, rel=1e-12)


def test_relaxation_time_value(electron):
    tau = relaxation_time(electron)
    assert tau == pytest.approx(51.5 * ATTOSECOND, rel=0.01)
    assert PUBLISHED_RELAXATION_TIME == 160 * ATTOSECOND


def test_mean_free_path_value(electron):
    assert mean_free_path(electron) == pytest.approx(7.72e-11, rel=0.01)
    assert 0.5 <= mean_free_path(electron) / PUBLISHED_MEAN_FREE_PATH <= 2.0


def test_distortionless_value(electron):
    assert distortionless_potential(electron) / ELEMENTARY_CHARGE == pytest.approx(1.60, rel=0.01)


def test_velocity_scaling(electron):
    fast = HeatCarrier(electron.mass, 2 * electron.velocity)
    assert relaxation_time(fast) == pytest.approx(relaxation_time(electron) / 4, rel=1e-14)
    assert mean_free_path(fast) == pytest.approx(mean_free_path(electron) / 2, rel=1e-14)


def test_q_examples(electron):
    k2 = (electron.mass * electron.velocity / (2 * HBAR)) ** 2
    assert q_parameter(0.0, electron) == pytest.approx(-k2, rel=1e-14)
    assert q_parameter(distortionless_potential(electron), electron) == 0.0
    assert q_parameter(2 * distortionless_potential(electron), electron) == pytest.approx(k2, rel=1e-12)


def test_q_rejects_negative_potential(electron):
    with pytest.raises(ValueError):
        q_parameter(-1e-20, electron)


@settings(max_examples=100, deadline=None)
@given(carriers)
def test_distortionless_fixed_point(c):
    v_star = distortionless_potential(c)
    scale = (c.mass * c.velocity / (2 * HBAR)) ** 2
    assert abs(q_parameter(v_star, c)) <= 1e-12 * scale
    assert v_star * relaxation_time(c) == pytest.approx(HBAR / 8, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(carriers)
def test_parameter_identities(c):
    p = derive_parameters(c, distortionless_potential(c))
    tau = p.relaxation_time
    assert p.diffusivity == pytest.approx(HBAR / c.mass, rel=1e-12)
    assert p.mean_free_path == pytest.approx(c.velocity * tau, rel=1e-12)
    assert tau * c.velocity**2 * c.mass / HBAR == pytest.approx(1.0, rel=1e-12)
    assert p.diffusivity * tau == pytest.approx(p.mean_free_path**2, rel=1e-12)
    assert diffusivity(c) == p.diffusivity


@settings(max_examples=50, deadline=None)
@given(carriers, st.floats(0.0, 10.0))
def test_q_linear_in_potential(c, k):
    v_star = distortionless_potential(c)
    q0 = q_parameter(0.0, c)
    assert q_parameter(k * v_star, c) == pytest.approx(q0 * (1 - k), rel=1e-9, abs=1e-12 * abs(q0))


def test_envelope_examples():
    grid = PolarGrid(1.0, 8, 8)
    u = ScalarField(grid, np.arange(64.0).reshape(8, 8) + 1.0)
    tau = 3.0
    same = envelope_to_temperature(u, 0.0, tau)
    np.testing.assert_array_equal(same.values, u.values)
    assert same.quantity == "temperature"
    half = envelope_to_temperature(u, 2 * tau * math.log(2), tau)
    np.testing.assert_allclose(half.values, u.values / 2, rtol=1e-15)
    back = temperature_to_envelope(half, 2 * tau * math.log(2), tau)
    np.testing.assert_allclose(back.values, u.values, rtol=1e-15)
    assert back.quantity == "envelope"


def test_envelope_rejects_bad_arguments():
    with pytest.raises(ValueError):
        envelope_to_temperature(np.ones(3), -1.0, 1.0)
    with pytest.raises(ValueError):
        envelope_to_temperature(np.ones(3), 1.0, 0.0)


@pytest.mark.parametrize("potential_scale", [0.0, 1.0, 3.0])
def test_substitution_identity(potential_scale):
    # carrier with tau, D, q of order one so both residual terms matter
    c = HeatCarrier(1e-34, 1.0)
    p = derive_parameters(c, potential_scale * distortionless_potential(c))
    tau = p.relaxation_time

    def u(x, y, t):
        return np.sin(1.3 * x + 0.4) * np.cos(0.7 * y) * np.cos(1.1 * t + 0.2)

    def temp(x, y, t):
        return np.exp(-t / (2 * tau)) * u(x, y, t)

    x, y, t = np.meshgrid(np.linspace(0, 2, 5), np.linspace(0, 2, 5), [0.3, 1.7])
    mismatch = []
    for h in (2e-2, 1e-2, 5e-3):
        lhs = full_residual(temp, x, y, t, h, p)
        rhs = np.exp(-t / (2 * tau)) * reduced_residual(u, x, y, t, h, p)
        mismatch.append(np.max(np.abs(lhs - rhs)))
    assert mismatch[0] / mismatch[1] >= 3.5
    assert mismatch[1] / mismatch[2] >= 3.5


def test_published_comparison(electron):
    pub = published_comparison(electron)
    assert pub["tau_discrepancy"] is True
    assert pub["tau_ratio"] == pytest.approx(0.322, abs=1e-3)
    assert pub["mfp_within_factor_2"] is True
