"""Fourier-Bessel modal solution of the undamped wave equation on a disk.

The solution with a Dirichlet wall at r = a is::

    u = sum_{m,n} J_m(k_mn r) [ (a_mn cos m theta + b_mn sin m theta) cos(w_mn t)
                               + (A_mn cos m theta + B_mn sin m theta) sin(w_mn t) ]

with k_mn = j_mn / a and w_mn = k_mn v. Row m = 0 of ``b`` and ``B`` is
identically zero.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import PolarGrid, ScalarField
from .specfun import bessel_j, bessel_zero, bessel_zeros, gauss_legendre

DEFAULT_ORDER = 16
DEFAULT_RADIAL = 32
DEFAULT_QUAD_POINTS = 128
DEFAULT_ANGULAR_POINTS = 256

Profile = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _zero(r, theta):
    return np.zeros(np.broadcast(r, theta).shape)


@dataclass(frozen=True)
class DiskDomain:
    radius: float
    boundary: str = "dirichlet"

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"disk radius must be positive, got {self.radius!r}")
        if self.boundary != "dirichlet":
            raise ValueError(f"unsupported boundary {self.boundary!r}")


@dataclass(frozen=True)
class InitialCondition:
    """Initial field ``f(r, theta)`` and rate ``g(r, theta)``.

    Both callables must accept broadcastable arrays. ``f`` has to vanish on
    the wall; :meth:`check_compatible` verifies this on 64 angles.
    """

    f: Profile = _zero
    g: Profile = _zero

    def check_compatible(self, dom: DiskDomain, tol: float = 1e-9) -> None:
        theta = np.linspace(-np.pi, np.pi, 64, endpoint=False)
        r = np.full_like(theta, dom.radius)
        for name, func in (("f", self.f), ("g", self.g)):
            vals = np.asarray(func(r, theta), dtype=float)
            if not np.all(np.isfinite(vals)):
                raise ValueError(f"initial {name} is not finite on the wall")
        wall = np.max(np.abs(np.asarray(self.f(r, theta), dtype=float)))
        if wall > tol:
            raise ValueError(f"initial field is {wall:.3g} on the wall, must vanish")


@dataclass(frozen=True, eq=False)
class ModalCoefficients:
    domain: DiskDomain
    wave_speed: float
    a: np.ndarray
    b: np.ndarray
    A: np.ndarray
    B: np.ndarray
    converged: bool = True
    zeros: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        shape = np.shape(self.a)
        if len(shape) != 2 or shape[1] < 1:
            raise ValueError("coefficient arrays must be (M + 1, N)")
        for name in ("a", "b", "A", "B"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"coefficient array {name} has shape {arr.shape}, want {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"coefficient array {name} is not finite")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not self.wave_speed > 0:
            raise ValueError("wave speed must be positive")
        object.__setattr__(self, "zeros", modal_zeros(shape[0] - 1, shape[1]))

    @classmethod
    def zeros_like(cls, dom: DiskDomain, v: float, M: int, N: int) -> "ModalCoefficients":
        z = np.zeros((M + 1, N))
        return cls(dom, v, z, z, z, z)

    @classmethod
    def single_mode(cls, dom, v, M, N, m, n, kind="a", value=1.0) -> "ModalCoefficients":
        """Coefficients with one nonzero entry; ``n`` counts from 1."""
        arrays = {k: np.zeros((M + 1, N)) for k in "abAB"}
        arrays[kind][m, n - 1] = value
        return cls(dom, v, **arrays)

    @property
    def max_order(self) -> int:
        return self.a.shape[0] - 1

    @property
    def max_radial(self) -> int:
        return self.a.shape[1]

    @property
    def a0n(self) -> np.ndarray:
        return self.a[0]

    @property
    def A0n(self) -> np.ndarray:
        return self.A[0]

    @property
    def wavenumbers(self) -> np.ndarray:
        return self.zeros / self.domain.radius

    @property
    def frequencies(self) -> np.ndarray:
        return self.wavenumbers * self.wave_speed

    def norms(self) -> np.ndarray:
        """Squared L2 norms of J_m(k r) cos(m theta) over the disk."""
        return mode_norms(self.max_order, self.max_radial, self.domain.radius)

    def __add__(self, other: "ModalCoefficients") -> "ModalCoefficients":
        if self.a.shape != other.a.shape or self.domain != other.domain:
            raise ValueError("coefficient sets are not compatible")
        return ModalCoefficients(
            self.domain, self.wave_speed,
            self.a + other.a, self.b + other.b, self.A + other.A, self.B + other.B,
            self.converged and other.converged,
        )

    def scaled(self, factor: float) -> "ModalCoefficients":
        return ModalCoefficients(
            self.domain, self.wave_speed,
            factor * self.a, factor * self.b, factor * self.A, factor * self.B,
            self.converged,
        )


def modal_zeros(M: int, N: int) -> np.ndarray:
    """Table of j_mn, shape (M + 1, N)."""
    return np.array([bessel_zeros(m, N) for m in range(M + 1)])


def mode_norms(M: int, N: int, radius: float) -> np.ndarray:
    zeros = modal_zeros(M, N)
    out = np.empty_like(zeros)
    for m in range(M + 1):
        jn1 = bessel_j(m + 1, zeros[m])
        out[m] = 0.5 * np.pi * radius**2 * jn1**2
    out[0] *= 2.0
    return out


def _angular_moments(values: np.ndarray, M: int):
    """Trapezoid estimates of int F cos(m t) dt and int F sin(m t) dt
    on a uniform periodic grid along the last axis."""
    n_theta = values.shape[-1]
    spec = np.fft.rfft(values, axis=-1) * (2.0 * np.pi / n_theta)
    if M >= spec.shape[-1]:
        raise ValueError("angular resolution too coarse for requested order")
    return spec[..., : M + 1].real, -spec[..., : M + 1].imag


def _project(func: Profile, dom: DiskDomain, M: int, N: int, quad_points: int, n_theta: int):
    """Raw projections <func, J_m(k r) cos/sin(m theta)> for all modes."""
    rule = gauss_legendre(quad_points)
    r, w = rule.mapped(0.0, dom.radius)
    theta = np.arange(n_theta) * (2.0 * np.pi / n_theta)
    vals = np.asarray(func(r[:, None], theta[None, :]), dtype=float)
    vals = np.broadcast_to(vals, (r.size, n_theta))
    cos_m, sin_m = _angular_moments(vals, M)  # (n_r, M + 1)
    zeros = modal_zeros(M, N)
    pc = np.empty((M + 1, N))
    ps = np.empty((M + 1, N))
    for m in range(M + 1):
        radial = bessel_j(m, np.outer(r, zeros[m] / dom.radius))  # (n_r, N)
        weighted = radial * (w * r)[:, None]
        pc[m] = cos_m[:, m] @ weighted
        ps[m] = sin_m[:, m] @ weighted
    ps[0] = 0.0
    return pc, ps


def expand_initial(
    ic: InitialCondition,
    dom: DiskDomain,
    v: float,
    M: int = DEFAULT_ORDER,
    N: int = DEFAULT_RADIAL,
    quad_points: int = DEFAULT_QUAD_POINTS,
    n_theta: int = DEFAULT_ANGULAR_POINTS,
    check: bool = True,
) -> ModalCoefficients:
    """Project initial data onto the Dirichlet eigenmodes of the disk.

    Displacement coefficients are ``<f, phi> / |phi|^2``; rate coefficients
    are ``<g, phi> / (|phi|^2 k v)`` so that the series time derivative at
    t = 0 reproduces ``g``.

    When ``check`` is true the projection is repeated with twice as many
    radial and angular points; a change above 1e-8 marks the result as not
    converged and emits a ``RuntimeWarning``.
    """
    if M < 0 or N < 1:
        raise ValueError("need M >= 0 and N >= 1")
    if quad_points < 32:
        raise ValueError("quad_points must be >= 32")
    if v <= 0:
        raise ValueError("wave speed must be positive")
    ic.check_compatible(dom)
    norms = mode_norms(M, N, dom.radius)
    omega = modal_zeros(M, N) / dom.radius * v

    def coeffs(qp, nt):
        fc, fs = _project(ic.f, dom, M, N, qp, nt)
        gc, gs = _project(ic.g, dom, M, N, qp, nt)
        return fc / norms, fs / norms, gc / (norms * omega), gs / (norms * omega)

    sets = coeffs(quad_points, n_theta)
    converged = True
    if check and 2 * quad_points <= 512:
        fine = coeffs(2 * quad_points, 2 * n_theta)
        change = max(np.max(np.abs(x - y)) for x, y in zip(sets, fine))
        scale = max(1.0, max(np.max(np.abs(x)) for x in fine))
        if change > 1e-8 * scale:
            converged = False
            warnings.warn(
                f"Fourier-Bessel coefficients changed by {change:.3g} when the "
                "quadrature was doubled",
                RuntimeWarning,
                stacklevel=2,
            )
    return ModalCoefficients(dom, v, *sets, converged=converged)


def _time_factors(coeffs: ModalCoefficients, t: float):
    phase = coeffs.frequencies * t
    return np.cos(phase), np.sin(phase)


def evaluate_series(coeffs: ModalCoefficients, r: float, theta: float, t: float) -> float:
    """Truncated modal sum at a single point."""
    a = coeffs.domain.radius
    if not 0 <= r <= a * (1 + 1e-12):
        raise ValueError(f"r={r!r} outside [0, {a}]")
    if t < 0:
        raise ValueError("t must be non-negative")
    ct, st = _time_factors(coeffs, t)
    total = 0.0
    for m in range(coeffs.max_order + 1):
        radial = bessel_j(m, coeffs.wavenumbers[m] * min(r, a))
        cm, sm = np.cos(m * theta), np.sin(m * theta)
        amp = (coeffs.a[m] * cm + coeffs.b[m] * sm) * ct[m]
        amp += (coeffs.A[m] * cm + coeffs.B[m] * sm) * st[m]
        total += float(np.dot(radial, amp))
    return total


def evaluate_points(coeffs: ModalCoefficients, r, theta, t: float) -> np.ndarray:
    """Vectorized :func:`evaluate_series` over broadcastable ``r``, ``theta``."""
    r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
    ct, st = _time_factors(coeffs, t)
    out = np.zeros(r.shape)
    for m in range(coeffs.max_order + 1):
        radial = bessel_j(m, np.multiply.outer(r, coeffs.wavenumbers[m]))
        cm, sm = np.cos(m * theta), np.sin(m * theta)
        out += cm * (radial @ (coeffs.a[m] * ct[m] + coeffs.A[m] * st[m]))
        out += sm * (radial @ (coeffs.b[m] * ct[m] + coeffs.B[m] * st[m]))
    return out


def evaluate_on_grid(
    coeffs: ModalCoefficients, grid: PolarGrid, t: float, quantity: str = "envelope"
) -> ScalarField:
    """Modal sum at every grid node, factored into radial and angular parts."""
    if not np.isclose(grid.radius, coeffs.domain.radius, rtol=1e-12, atol=0):
        raise ValueError(
            f"grid radius {grid.radius} does not match domain radius {coeffs.domain.radius}"
        )
    ct, st = _time_factors(coeffs, t)
    values = np.zeros((grid.n_r, grid.n_theta))
    for m in range(coeffs.max_order + 1):
        radial = bessel_j(m, np.outer(grid.r, coeffs.wavenumbers[m]))
        cos_part = radial @ (coeffs.a[m] * ct[m] + coeffs.A[m] * st[m])
        values += np.outer(cos_part, np.cos(m * grid.theta))
        if m:
            sin_part = radial @ (coeffs.b[m] * ct[m] + coeffs.B[m] * st[m])
            values += np.outer(sin_part, np.sin(m * grid.theta))
    return ScalarField(grid, values, quantity)


def modal_energy(coeffs: ModalCoefficients, t: float = 0.0) -> float:
    """Wave energy int (u_t^2 / v^2 + |grad u|^2) dA from modal amplitudes.

    Each mode contributes k^2 |phi|^2 times the sum of its kinetic and
    potential amplitudes squared, which is constant in time.
    """
    ct, st = _time_factors(coeffs, t)
    k2n = coeffs.wavenumbers**2 * coeffs.norms()
    disp_c = coeffs.a * ct + coeffs.A * st
    disp_s = coeffs.b * ct + coeffs.B * st
    rate_c = -coeffs.a * st + coeffs.A * ct
    rate_s = -coeffs.b * st + coeffs.B * ct
    return float(np.sum(k2n * (disp_c**2 + disp_s**2 + rate_c**2 + rate_s**2)))


def mode_profile(dom: DiskDomain, m: int, n: int, phase: str = "cos") -> Profile:
    """The eigenfunction J_m(j_mn r / a) cos(m theta) (or sin) as a callable."""
    k = bessel_zero(m, n) / dom.radius
    trig = np.cos if phase == "cos" else np.sin

    def profile(r, theta):
        r = np.asarray(r, dtype=float)
        return bessel_j(m, k * np.clip(r, 0.0, None)) * trig(m * np.asarray(theta, dtype=float))

    return profile


def run(config, times=None, grid: PolarGrid | None = None) -> list[tuple[float, ScalarField]]:
    """Modal solution of a :class:`~qcorral.config.SimulationConfig` on a grid.

    The undamped and distortionless variants are solved directly. For the
    full damped equation (which requires q = 0) the envelope is advanced
    with initial rate g + f / (2 tau) and multiplied by exp(-t / 2 tau).
    """
    from .physics import envelope_factor

    params = config.parameters()
    if config.equation != "undamped_eq7" and params.q != 0.0:
        raise ValueError(
            "the modal solution needs q = 0; use the distortionless potential "
            "or the undamped equation"
        )
    grid = grid or config.grid
    ic = config.initial_condition()
    tau = params.relaxation_time
    if config.equation == "full_eq1":
        f, g = ic.f, ic.g
        ic = InitialCondition(f=f, g=lambda r, th: g(r, th) + f(r, th) / (2.0 * tau))
    coeffs = expand_initial(
        ic, config.domain, config.carrier.velocity,
        config.max_order, config.max_radial, config.quad_points,
    )
    out = []
    for t in config.snapshot_times if times is None else times:
        fld = evaluate_on_grid(coeffs, grid, t)
        if config.equation == "full_eq1":
            fld = fld.with_values(float(envelope_factor(t, tau)) * fld.values, "temperature")
        out.append((float(t), fld))
    return out
