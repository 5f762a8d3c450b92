"""Thermal waves in circular quantum corrals.

Modal (Fourier-Bessel) and finite-difference solutions of the quantum
hyperbolic heat equation on a disk.
"""

__version__ = "0.1.0"
