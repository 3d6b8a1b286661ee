"""Bessel functions of the first kind for batches of integer orders.

The mode-determinant scan needs J_m(x) and J_m'(x) for every order
0..m_max on a long grid of arguments. The normalized downward (Miller)
recurrence produces the whole order column per argument in one sweep, so
the grid cost is O(m_max * len(x)) fused numpy operations instead of one
special-function call per (order, point) pair. An ascending-series
evaluator is kept alongside as the small-argument cross-check.
"""

import math

import numpy as np

__all__ = ["bessel_j_table", "bessel_j", "bessel_j_series"]

_RESCALE = 1e250


def bessel_j_table(m_max: int, x) -> np.ndarray:
    """J_m(x) for all m = 0..m_max, shape (m_max+1, len(x)).

    Downward recurrence f_{m-1} = (2m/x) f_m - f_{m+1} started well above
    max(m_max, x) in the decaying regime, normalized with
    J_0(x) + 2 * sum_k J_{2k}(x) = 1. Columns are rescaled on the way
    down whenever the unnormalized values approach overflow.
    """
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0.0):
        raise ValueError("arguments must be positive")
    top = max(float(m_max), float(x.max()))
    n_start = int(top + 1.8 * math.sqrt(top + 1.0)) + 40

    nx = x.size
    out = np.zeros((m_max + 1, nx))
    f_hi = np.zeros(nx)  # order m+1
    f = np.full(nx, 1e-30)  # order m
    norm = np.zeros(nx)
    inv_x = 1.0 / x

    for m in range(n_start, -1, -1):
        if m <= m_max:
            out[m] = f
        if m % 2 == 0:
            norm += f if m == 0 else 2.0 * f
        if m > 0:
            f_lo = (2.0 * m) * inv_x * f - f_hi
            f_hi, f = f, f_lo
            big = np.abs(f) > _RESCALE
            if np.any(big):
                shrink = np.where(big, 1.0 / _RESCALE, 1.0)
                f *= shrink
                f_hi *= shrink
                norm *= shrink
                out[:, big] /= _RESCALE
    out /= norm
    return out


def bessel_j(m: int, x) -> np.ndarray:
    """J_m(x) for one integer order m >= -1 (J_{-1} = -J_1)."""
    if m == -1:
        return -bessel_j_table(1, x)[1]
    return bessel_j_table(m, x)[m]


def bessel_j_series(m: int, x, terms: int = 60) -> np.ndarray:
    """Ascending power series for J_m, accurate for moderate arguments.

    sum_k (-1)^k (x/2)^{m+2k} / (k! (m+k)!); used as the independent
    small-argument check of the recurrence evaluator.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    half = 0.5 * x
    term = half**m / math.factorial(m)
    total = term.copy()
    for k in range(1, terms):
        term = term * (-(half**2)) / (k * (m + k))
        total += term
    return total
