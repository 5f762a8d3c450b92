"""Staggered polar grid on a disk and fields sampled on it."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

QUANTITIES = ("temperature", "envelope")


@dataclass(frozen=True)
class PolarGrid:
    """Cell-centred polar grid: r_i = (i + 1/2) dr, theta_j = j dtheta.

    No node sits at the origin. ``n_theta`` must be even so every node has
    an antipodal partner on the innermost ring.
    """

    radius: float
    n_r: int
    n_theta: int

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"grid radius must be positive, got {self.radius!r}")
        if self.n_r < 8:
            raise ValueError(f"n_r must be >= 8, got {self.n_r}")
        if self.n_theta < 8 or self.n_theta % 2:
            raise ValueError(f"n_theta must be even and >= 8, got {self.n_theta}")

    @property
    def dr(self) -> float:
        return self.radius / self.n_r

    @property
    def dtheta(self) -> float:
        return 2.0 * np.pi / self.n_theta

    @cached_property
    def r(self) -> np.ndarray:
        return (np.arange(self.n_r) + 0.5) * self.dr

    @cached_property
    def theta(self) -> np.ndarray:
        return np.arange(self.n_theta) * self.dtheta

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(r, theta) arrays of shape (n_r, n_theta)."""
        return np.meshgrid(self.r, self.theta, indexing="ij")

    @cached_property
    def cell_area(self) -> np.ndarray:
        """Area r dr dtheta of each cell, shape (n_r, 1)."""
        return (self.r * self.dr * self.dtheta)[:, None]

    def refined(self, factor: int = 2) -> "PolarGrid":
        return PolarGrid(self.radius, self.n_r * factor, self.n_theta * factor)

    def sample(self, func) -> np.ndarray:
        rr, tt = self.mesh()
        return np.broadcast_to(np.asarray(func(rr, tt), dtype=float), rr.shape).copy()


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: PolarGrid
    values: np.ndarray
    quantity: str = "envelope"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_r, self.grid.n_theta):
            raise ValueError(
                f"field shape {vals.shape} does not match grid "
                f"({self.grid.n_r}, {self.grid.n_theta})"
            )
        object.__setattr__(self, "values", vals)

    def with_values(self, values, quantity: str | None = None) -> "ScalarField":
        return ScalarField(self.grid, values, quantity or self.quantity)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def rotated(self, k: int) -> "ScalarField":
        """Rotate by k angular cells (theta -> theta + k dtheta)."""
        return self.with_values(np.roll(self.values, k, axis=1))

    def radial_profile(self) -> np.ndarray:
        """Azimuthal mean on each ring."""
        return self.values.mean(axis=1)

    def integral(self) -> float:
        """Midpoint-rule integral over the disk."""
        return float(np.sum(self.values * self.grid.cell_area))
