import math

import numpy as np
import pytest
from scipy import special


def bisect_root(func, lo, hi, tol=1e-14, max_iter=200):
    flo = func(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = func(mid)
        if fm == 0 or hi - lo < tol:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def oracle_zeros(m, count, step=0.05):
    """First ``count`` positive zeros of J_m by scanning scipy's J_m for sign
    changes and bisecting each bracket."""
    f = lambda x: float(special.jv(m, x))
    out = []
    x = max(step, m * 0.9)
    fx = f(x)
    while len(out) < count:
        y = x + step
        fy = f(y)
        if fx == 0.0:
            out.append(x)
        elif (fx < 0) != (fy < 0):
            out.append(bisect_root(f, x, y))
        x, fx = y, fy
    return np.array(out)


@pytest.fixture(scope="session")
def zero_oracle():
    return {m: oracle_zeros(m, 21) for m in range(12)}


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), math.tiny)


def unit_params(mass=1e-34, velocity=1.0, potential="zero"):
    """Carrier with v = 1 m/s so a unit disk has crossing time 1 s."""
    from qcorral.physics import HeatCarrier, derive_parameters, distortionless_potential

    c = HeatCarrier(mass, velocity)
    v_pot = distortionless_potential(c) if potential == "distortionless" else 0.0
    return derive_parameters(c, v_pot)


def eigenmode_error(n_r, n_theta, periods=1.0, m=0, n=1, equation="undamped_eq7"):
    """Max-norm FDTD error for the (m, n) eigenmode on the unit disk."""
    from qcorral import fdtd
    from qcorral.grid import PolarGrid
    from qcorral.spectral import DiskDomain, ModalCoefficients, evaluate_on_grid, mode_profile

    dom = DiskDomain(1.0)
    params = unit_params()
    grid = PolarGrid(1.0, n_r, n_theta)
    coeffs = ModalCoefficients.single_mode(dom, params.velocity, m, n, m, n)
    total = periods * 2 * math.pi / coeffs.frequencies[m, n - 1]
    f = grid.sample(mode_profile(dom, m, n))
    (t, fld), = fdtd.simulate(grid, f, np.zeros_like(f), params, equation, total, [total])
    ref = evaluate_on_grid(coeffs, grid, t)
    return float(np.max(np.abs(fld.values - ref.values)))
