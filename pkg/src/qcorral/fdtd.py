"""Leapfrog finite-difference solver on a staggered polar grid.

Three equation variants share one kernel::

    (1/v^2) u_tt + gamma u_t + p u = lap u

full_eq1         gamma = 1/D, p = 2 V m / hbar^2  (temperature)
transformed_eq4  gamma = 0,   p = q               (envelope)
undamped_eq7     gamma = 0,   p = 0               (envelope)

The Laplacian is the conservative form (1/r) d/dr (r du/dr) + (1/r^2) d2u/dtheta2.
The ghost node inside the first ring is the antipodal node across the origin;
its face sits at r = 0 so it enters with zero weight. The wall ghost at
r = a + dr/2 is the quadratic extrapolation through u(a) = 0 and the two
outermost rings, ``-2 u[-1] + u[-2] / 3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .grid import PolarGrid, ScalarField
from .physics import QhtParameters

EQUATIONS = ("full_eq1", "transformed_eq4", "undamped_eq7")
DEFAULT_SAFETY = 0.9


class DivergenceError(ArithmeticError):
    def __init__(self, step_index: int):
        super().__init__(f"non-finite field after step {step_index}")
        self.step_index = step_index


def stable_dt(grid: PolarGrid, v: float, safety: float = DEFAULT_SAFETY) -> float:
    """Largest stable leapfrog step, limited by the innermost ring."""
    if not 0 < safety <= 1:
        raise ValueError(f"safety factor must be in (0, 1], got {safety!r}")
    if not v > 0:
        raise ValueError("wave speed must be positive")
    r_min = 0.5 * grid.dr
    return safety / (v * math.sqrt(1.0 / grid.dr**2 + 1.0 / (r_min * grid.dtheta) ** 2))


@lru_cache(maxsize=16)
def _stencil(grid: PolarGrid):
    r = grid.r
    faces = np.arange(grid.n_r + 1) * grid.dr  # r_{i-1/2}, i = 0..n_r
    radial = (1.0 / (r * grid.dr**2))[:, None]
    angular = (1.0 / (r * grid.dtheta) ** 2)[:, None]
    return faces[:, None], radial, angular


def laplacian(values: np.ndarray, grid: PolarGrid) -> np.ndarray:
    faces, radial, angular = _stencil(grid)
    half = grid.n_theta // 2
    ext = np.empty((grid.n_r + 2, grid.n_theta))
    ext[1:-1] = values
    ext[0] = np.roll(values[0], half)
    ext[-1] = -2.0 * values[-1] + values[-2] / 3.0
    flux = faces * np.diff(ext, axis=0)
    out = radial * np.diff(flux, axis=0)
    out += angular * (np.roll(values, 1, axis=1) - 2.0 * values + np.roll(values, -1, axis=1))
    return out


def coefficients(equation: str, params: QhtParameters) -> tuple[float, float]:
    """(damping gamma, potential p) for an equation variant."""
    if equation == "full_eq1":
        return 1.0 / params.diffusivity, params.potential_coefficient
    if equation == "transformed_eq4":
        return 0.0, params.q
    if equation == "undamped_eq7":
        return 0.0, 0.0
    raise ValueError(f"unknown equation {equation!r}; expected one of {EQUATIONS}")


def quantity_of(equation: str) -> str:
    return "temperature" if equation == "full_eq1" else "envelope"


@dataclass(frozen=True)
class FdtdState:
    prev: ScalarField
    curr: ScalarField
    step_index: int
    dt: float
    equation: str
    params: QhtParameters

    def __post_init__(self):
        if self.prev.grid != self.curr.grid:
            raise ValueError("prev and curr must share one grid")
        coefficients(self.equation, self.params)
        limit = stable_dt(self.grid, self.params.velocity, 1.0)
        if not 0 < self.dt <= limit * (1 + 1e-12):
            raise ValueError(f"dt={self.dt:.4g} violates the stability bound {limit:.4g}")

    @property
    def grid(self) -> PolarGrid:
        return self.curr.grid

    @property
    def time(self) -> float:
        return self.step_index * self.dt


def _advance(prev, curr, grid, dt, v, gamma, pot):
    beta = 0.5 * gamma * v * v * dt
    rhs = laplacian(curr, grid)
    if pot:
        rhs -= pot * curr
    nxt = (v * dt) ** 2 * rhs + 2.0 * curr - (1.0 - beta) * prev
    if beta:
        nxt /= 1.0 + beta
    return nxt


def step(state: FdtdState) -> FdtdState:
    """One leapfrog step; damping is centred and solved implicitly."""
    gamma, pot = coefficients(state.equation, state.params)
    with np.errstate(over="ignore", invalid="ignore"):
        nxt = _advance(
            state.prev.values, state.curr.values, state.grid, state.dt,
            state.params.velocity, gamma, pot,
        )
    if not np.isfinite(nxt).all():
        raise DivergenceError(state.step_index + 1)
    return replace(
        state,
        prev=state.curr,
        curr=state.curr.with_values(nxt),
        step_index=state.step_index + 1,
    )


def start(
    grid: PolarGrid,
    f: np.ndarray,
    g: np.ndarray,
    dt: float,
    equation: str,
    params: QhtParameters,
) -> FdtdState:
    """State holding u^0 = f and a second-order Taylor estimate of u^1."""
    gamma, pot = coefficients(equation, params)
    v = params.velocity
    with np.errstate(over="ignore", invalid="ignore"):
        accel = v * v * (laplacian(f, grid) - pot * f - gamma * g)
        u1 = f + dt * g + 0.5 * dt * dt * accel
    if not np.isfinite(u1).all():
        raise DivergenceError(1)
    q = quantity_of(equation)
    return FdtdState(
        ScalarField(grid, f, q), ScalarField(grid, u1, q), 1, dt, equation, params
    )


@lru_cache(maxsize=16)
def energy_weights(grid: PolarGrid) -> np.ndarray:
    """Cell areas, with the outer ring rescaled so that the discrete
    Laplacian (including the wall closure) is self-adjoint."""
    w = np.array(grid.cell_area)
    n = grid.n_r
    w[-1] *= (n - 1) / (n - 1 + n / 3.0)
    w.flags.writeable = False
    return w


def wall_values(values: np.ndarray) -> np.ndarray:
    """Field on r = a from the quadratic through the wall ghost and the two
    outermost rings."""
    u1, u2 = values[-1], values[-2]
    ghost = -2.0 * u1 + u2 / 3.0
    return 0.375 * ghost + 0.75 * u1 - 0.125 * u2


def discrete_energy(prev: np.ndarray, curr: np.ndarray, dt: float, grid: PolarGrid,
                    v: float, pot: float = 0.0) -> float:
    """Energy conserved exactly by leapfrog without damping.

    E = sum w [ (u^k - u^{k-1})^2 / (v dt)^2 - u^k lap u^{k-1} + p u^k u^{k-1} ]
    with the weights of :func:`energy_weights`.
    """
    w = energy_weights(grid)
    kinetic = np.sum(w * (curr - prev) ** 2) / (v * dt) ** 2
    potential = -np.sum(w * curr * laplacian(prev, grid))
    if pot:
        potential += pot * np.sum(w * prev * curr)
    return float(kinetic + potential)


def state_energy(state: FdtdState) -> float:
    _, pot = coefficients(state.equation, state.params)
    return discrete_energy(state.prev.values, state.curr.values, state.dt,
                           state.grid, state.params.velocity, pot)


def plan_steps(total_time: float, dt_max: float) -> tuple[int, float]:
    """Step count and dt <= dt_max that land exactly on ``total_time``."""
    if total_time <= 0:
        return 0, dt_max
    n = max(1, math.ceil(total_time / dt_max * (1 - 1e-12)))
    return n, total_time / n


def simulate(
    grid: PolarGrid,
    f: np.ndarray,
    g: np.ndarray,
    params: QhtParameters,
    equation: str,
    total_time: float,
    snapshot_times,
    safety: float = DEFAULT_SAFETY,
    callback=None,
) -> list[tuple[float, ScalarField]]:
    """March from t = 0 to ``total_time`` and collect snapshots.

    Each requested time is mapped to the nearest step; the returned time is
    that step's exact time. ``callback(k, dt, prev, curr)`` is invoked after
    each step from k = 2 on, with the raw arrays of the last two levels.
    """
    times = [float(t) for t in snapshot_times]
    if not times:
        raise ValueError("snapshot schedule is empty")
    if any(t < 0 or t > total_time * (1 + 1e-12) for t in times):
        raise ValueError("snapshot times must lie in [0, total_time]")
    n_steps, dt = plan_steps(total_time, stable_dt(grid, params.velocity, safety))
    wanted = {}
    for t in times:
        k = min(n_steps, int(round(t / dt))) if n_steps else 0
        wanted.setdefault(k, None)
    q = quantity_of(equation)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if 0 in wanted:
        wanted[0] = ScalarField(grid, f.copy(), q)
    if n_steps:
        state = start(grid, f, g, dt, equation, params)
        gamma, pot = coefficients(equation, params)
        v = params.velocity
        prev, curr = state.prev.values, state.curr.values
        if 1 in wanted:
            wanted[1] = ScalarField(grid, curr.copy(), q)
        last = max(wanted)
        for k in range(2, last + 1):
            with np.errstate(over="ignore", invalid="ignore"):
                prev, curr = curr, _advance(prev, curr, grid, dt, v, gamma, pot)
                finite = math.isfinite(curr.sum())
            if not finite:
                raise DivergenceError(k)
            if k in wanted:
                wanted[k] = ScalarField(grid, curr.copy(), q)
            if callback is not None:
                callback(k, dt, prev, curr)
    return [(k * dt, wanted[k]) for k in sorted(wanted)]


def run(config) -> list[tuple[float, ScalarField]]:
    """Run the finite-difference solver for a :class:`~qcorral.config.SimulationConfig`."""
    ic = config.initial_condition()
    grid = config.grid
    return simulate(
        grid,
        grid.sample(ic.f),
        grid.sample(ic.g),
        config.parameters(),
        config.equation,
        config.total_time,
        config.snapshot_times,
        config.safety,
    )
