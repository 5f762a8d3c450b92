"""Bessel functions of the first kind, their zeros, and Gauss-Legendre rules.

Only integer orders and real, non-negative arguments are supported. Values
are accurate to about 1e-12 absolute for arguments up to a few hundred.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BesselZeroTable",
    "ConvergenceError",
    "QuadratureRule",
    "SERIES_SPLIT",
    "bessel_j",
    "bessel_j_orders",
    "bessel_j_prime",
    "bessel_zero",
    "gauss_legendre",
]

# Power series below this argument, Miller backward recurrence above.
SERIES_SPLIT = 5.0

_SERIES_MAX_TERMS = 80
_RESCALE = 1e250


class ConvergenceError(ArithmeticError):
    """An iterative kernel failed to converge within its budget."""


def _check_order(m):
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise ValueError(f"Bessel order must be a non-negative integer, got {m!r}")
    return int(m)


def _check_args(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("Bessel argument must be finite")
    if np.any(x < 0):
        raise ValueError("Bessel argument must be non-negative")
    return x


def _series(m: int, x: np.ndarray) -> np.ndarray:
    """Ascending power series of J_m, vectorized over ``x``."""
    half = 0.5 * x
    if m == 0:
        term = np.ones_like(half)
    else:
        with np.errstate(divide="ignore"):
            term = np.exp(m * np.log(half) - math.lgamma(m + 1))
    total = term.copy()
    h2 = half * half
    for k in range(1, _SERIES_MAX_TERMS):
        term = -term * h2 / (k * (k + m))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _miller(max_order: int, x: np.ndarray) -> np.ndarray:
    """J_0..J_max_order by backward recurrence normalized with
    J_0 + 2 sum J_2k = 1. Requires every ``x`` > 0."""
    top = max(max_order, float(x.max()))
    start = int(top + 30.0 + 12.0 * top ** (1.0 / 3.0))
    start += start % 2
    out = np.zeros((max_order + 1,) + x.shape)
    nxt = np.zeros_like(x)
    cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    for k in range(start, 0, -1):
        prev = (2.0 * k / x) * cur - nxt
        nxt, cur = cur, prev
        # cur now holds J_{k-1} (unnormalized)
        if k - 1 <= max_order:
            out[k - 1] = cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * cur
        big = np.abs(cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            cur *= scale
            nxt *= scale
            norm *= scale
            out *= scale
    norm += cur
    return out / norm


def _series_scalar(m: int, x: float) -> float:
    if x == 0.0:
        return 1.0 if m == 0 else 0.0
    half = 0.5 * x
    term = math.exp(m * math.log(half) - math.lgamma(m + 1))
    total = term
    h2 = half * half
    for k in range(1, _SERIES_MAX_TERMS):
        term = -term * h2 / (k * (k + m))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return total


def _miller_scalar(max_order: int, x: float) -> list[float]:
    top = max(max_order, x)
    start = int(top + 30.0 + 12.0 * top ** (1.0 / 3.0))
    start += start % 2
    out = [0.0] * (max_order + 1)
    nxt, cur, norm = 0.0, 1e-30, 0.0
    for k in range(start, 0, -1):
        nxt, cur = cur, (2.0 * k / x) * cur - nxt
        if k - 1 <= max_order:
            out[k - 1] = cur
        if (k - 1) % 2 == 0 and k > 1:
            norm += 2.0 * cur
        if abs(cur) > _RESCALE:
            cur /= _RESCALE
            nxt /= _RESCALE
            norm /= _RESCALE
            out = [v / _RESCALE for v in out]
    norm += cur
    return [v / norm for v in out]


def _scalar_orders(max_order: int, x: float) -> list[float]:
    if x <= SERIES_SPLIT:
        return [_series_scalar(m, x) for m in range(max_order + 1)]
    return _miller_scalar(max_order, x)


def bessel_j_orders(max_order: int, x) -> np.ndarray:
    """Return ``J_0(x), ..., J_max_order(x)`` stacked along axis 0."""
    max_order = _check_order(max_order)
    x = _check_args(x)
    out = np.empty((max_order + 1,) + x.shape)
    small = x <= SERIES_SPLIT
    if np.any(small):
        xs = x[small]
        for m in range(max_order + 1):
            out[m][small] = _series(m, xs)
    if np.any(~small):
        out[:, ~small] = _miller(max_order, x[~small])
    return out


def bessel_j(m: int, x):
    """Bessel function of the first kind J_m(x).

    Parameters
    ----------
    m : int
        Non-negative integer order.
    x : float or array_like
        Non-negative finite argument(s).

    Returns
    -------
    float or numpy.ndarray
        Same shape as ``x``.
    """
    m = _check_order(m)
    x_arr = _check_args(x)
    if x_arr.ndim == 0:
        xf = float(x_arr)
        if xf <= SERIES_SPLIT:
            return _series_scalar(m, xf)
        return _miller_scalar(m, xf)[m]
    out = np.empty(x_arr.shape)
    small = x_arr <= SERIES_SPLIT
    if np.any(small):
        out[small] = _series(m, x_arr[small])
    if np.any(~small):
        out[~small] = _miller(m, x_arr[~small])[m]
    return out


def bessel_j_prime(m: int, x):
    """Derivative dJ_m/dx from (J_{m-1} - J_{m+1}) / 2."""
    m = _check_order(m)
    if m == 0:
        return -bessel_j(1, x)
    return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))


def _value_and_slope(m: int, x: float) -> tuple[float, float]:
    js = _scalar_orders(m + 1, x)
    slope = -js[1] if m == 0 else 0.5 * (js[m - 1] - js[m + 1])
    return js[m], slope


def _refine_root(m: int, lo: float, hi: float, tol: float = 1e-15) -> float:
    """Safeguarded Newton on J_m inside a sign-change bracket."""
    f_lo = _value_and_slope(m, lo)[0]
    f_hi = _value_and_slope(m, hi)[0]
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0:
        raise ConvergenceError(f"no sign change of J_{m} on [{lo}, {hi}]")
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx, dfx = _value_and_slope(m, x)
        if fx == 0.0:
            return x
        if fx * f_lo < 0:
            hi = x
        else:
            lo, f_lo = x, fx
        step = fx / dfx if dfx != 0.0 else math.inf
        cand = x - step
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        if abs(cand - x) <= tol * max(1.0, abs(x)) or hi - lo <= tol * max(1.0, hi):
            return cand
        x = cand
    raise ConvergenceError(f"zero of J_{m} in [{lo}, {hi}] did not converge")


@dataclass
class BesselZeroTable:
    """Memoized positive zeros ``zeros[(m, n)] = j_{m,n}``.

    Zeros of J_0 are bracketed on [(n - 1/2) pi, n pi], one per interval.
    Zeros of J_m, m >= 1, are bracketed by consecutive zeros of J_{m-1}
    (interlacing), so each order is built from the one below it.
    """

    max_order: int = 0
    zeros_per_order: int = 0
    zeros: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def get(self, m: int, n: int) -> float:
        m = _check_order(m)
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise ValueError(f"zero index must be >= 1, got {n!r}")
        n = int(n)
        val = self.zeros.get((m, n))
        if val is not None:
            return val
        with self._lock:
            self._fill(m, n)
        return self.zeros[(m, n)]

    def column(self, m: int, count: int) -> np.ndarray:
        """First ``count`` zeros of J_m as an array."""
        self.get(m, count)
        return np.array([self.zeros[(m, n)] for n in range(1, count + 1)])

    def _fill(self, m: int, n: int) -> None:
        # order k needs zeros 1..n + (m - k) of order k - 1
        for k in range(m + 1):
            need = n + (m - k)
            for i in range(1, need + 1):
                if (k, i) in self.zeros:
                    continue
                if k == 0:
                    lo, hi = (i - 0.5) * math.pi, i * math.pi
                else:
                    lo = self.zeros[(k - 1, i)]
                    hi = self.zeros[(k - 1, i + 1)]
                self.zeros[(k, i)] = _refine_root(k, lo, hi)
        self.max_order = max(self.max_order, m)
        self.zeros_per_order = max(self.zeros_per_order, n)


_ZEROS = BesselZeroTable()


def bessel_zero(m: int, n: int) -> float:
    """n-th positive zero of J_m (n counts from 1)."""
    return _ZEROS.get(m, n)


def bessel_zeros(m: int, count: int) -> np.ndarray:
    """First ``count`` positive zeros of J_m."""
    return _ZEROS.column(m, count)


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)

    def mapped(self, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights affinely mapped to [lo, hi]."""
        half = 0.5 * (hi - lo)
        return lo + half * (self.nodes + 1.0), half * self.weights

    def integrate(self, func, lo: float = -1.0, hi: float = 1.0) -> float:
        x, w = self.mapped(lo, hi)
        return float(np.dot(w, func(x)))


_GL_CACHE: dict[int, QuadratureRule] = {}


def gauss_legendre(k: int) -> QuadratureRule:
    """k-point Gauss-Legendre rule on [-1, 1], 1 <= k <= 512.

    Newton iteration on P_k from Chebyshev-like initial guesses; weights
    from 2 / ((1 - x^2) P_k'(x)^2). Nodes are returned in increasing order.
    """
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= 512:
        raise ValueError(f"node count must be in [1, 512], got {k!r}")
    k = int(k)
    if k in _GL_CACHE:
        return _GL_CACHE[k]
    i = np.arange(1, k + 1)
    x = np.cos(np.pi * (i - 0.25) / (k + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(2, k + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        dp = k * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    else:
        raise ConvergenceError(f"Gauss-Legendre nodes for k={k} did not converge")
    # final derivative at the converged nodes
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(2, k + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = k * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x = x[::-1].copy()
    w = w[::-1].copy()
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.flags.writeable = False
    w.flags.writeable = False
    rule = QuadratureRule(nodes=x, weights=w)
    _GL_CACHE[k] = rule
    return rule
