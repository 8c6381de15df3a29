"""Pure-Python/NumPy implementation of the hot loops.

Same contract as the compiled ``_speedups`` extension: windowed kernel
weight sums over sorted samples, and orbit iteration for the built-in maps.
Selected at import time by :mod:`dynkde._core` when the extension is
unavailable or explicitly disabled.
"""

from __future__ import annotations

from math import fabs, floor

import numpy as np

KERNEL_BOX1D = 0
KERNEL_EPANECHNIKOV = 1
KERNEL_BOX2D = 0


def _weights_1d(u: np.ndarray, code: int) -> np.ndarray:
    if code == KERNEL_BOX1D:
        return (np.abs(u) <= 0.5).astype(float)
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


def kernel_sums_1d(xs_sorted, grid, h, radius, code):
    """sum_i K((g - x_i)/h) for each grid point g; xs_sorted ascending."""
    xs = np.ascontiguousarray(xs_sorted, dtype=float)
    grid = np.asarray(grid, dtype=float)
    r = h * radius
    lo = np.searchsorted(xs, grid - r, side="left")
    hi = np.searchsorted(xs, grid + r, side="right")
    out = np.empty(grid.shape[0])
    for k in range(grid.shape[0]):
        u = (grid[k] - xs[lo[k]:hi[k]]) / h
        out[k] = _weights_1d(u, code).sum()
    return out


def kernel_weighted_sums_1d(xs_sorted, ys_sorted, grid, h, radius, code):
    """Plain and y-weighted kernel sums; ys_sorted has shape (n, q)."""
    xs = np.ascontiguousarray(xs_sorted, dtype=float)
    ys = np.ascontiguousarray(ys_sorted, dtype=float)
    grid = np.asarray(grid, dtype=float)
    r = h * radius
    lo = np.searchsorted(xs, grid - r, side="left")
    hi = np.searchsorted(xs, grid + r, side="right")
    p = grid.shape[0]
    s0 = np.empty(p)
    s1 = np.empty((p, ys.shape[1]))
    for k in range(p):
        u = (grid[k] - xs[lo[k]:hi[k]]) / h
        w = _weights_1d(u, code)
        s0[k] = w.sum()
        s1[k] = w @ ys[lo[k]:hi[k]]
    return s0, s1


def kernel_sums_2d(x_sorted, grid, h, radius, code):
    """Box-kernel sums on the sup-norm ball; x_sorted sorted by column 0."""
    X = np.ascontiguousarray(x_sorted, dtype=float)
    grid = np.asarray(grid, dtype=float)
    r = h * radius
    lo = np.searchsorted(X[:, 0], grid[:, 0] - r, side="left")
    hi = np.searchsorted(X[:, 0], grid[:, 0] + r, side="right")
    out = np.empty(grid.shape[0])
    for k in range(grid.shape[0]):
        d1 = np.abs(grid[k, 1] - X[lo[k]:hi[k], 1])
        out[k] = 0.25 * np.count_nonzero(d1 <= r)
    return out


def kernel_weighted_sums_2d(x_sorted, y_sorted, grid, h, radius, code):
    X = np.ascontiguousarray(x_sorted, dtype=float)
    Y = np.ascontiguousarray(y_sorted, dtype=float)
    grid = np.asarray(grid, dtype=float)
    r = h * radius
    lo = np.searchsorted(X[:, 0], grid[:, 0] - r, side="left")
    hi = np.searchsorted(X[:, 0], grid[:, 0] + r, side="right")
    p = grid.shape[0]
    s0 = np.empty(p)
    s1 = np.empty((p, Y.shape[1]))
    for k in range(p):
        sl = slice(lo[k], hi[k])
        inside = np.abs(grid[k, 1] - X[sl, 1]) <= r
        s0[k] = 0.25 * np.count_nonzero(inside)
        s1[k] = 0.25 * (inside @ Y[sl])
    return s0, s1


def orbit_beta(x0, n, beta, dither):
    out = np.empty(n)
    x = float(x0)
    for i in range(n):
        out[i] = x
        y = beta * x + dither
        x = y - floor(y)
    return out


def orbit_gauss(x0, n):
    out = np.empty(n)
    x = float(x0)
    for i in range(n):
        out[i] = x
        if x == 0.0:
            x = 0.0
        else:
            u = 1.0 / x
            x = u - floor(u)
    return out


def orbit_alpha_gauss(x0, n, alpha):
    out = np.empty(n)
    x = float(x0)
    for i in range(n):
        out[i] = x
        if x == 0.0:
            x = 0.0
        else:
            u = fabs(1.0 / x)
            x = u - floor(u + 1.0 - alpha)
    return out


def orbit_logistic(x0, n, a):
    out = np.empty(n)
    x = float(x0)
    for i in range(n):
        out[i] = x
        x = a * x * (1.0 - x)
    return out


def orbit_matrix2(x0, y0, n, b11, b12, b21, b22):
    out = np.empty((n, 2))
    x = float(x0)
    y = float(y0)
    for i in range(n):
        out[i, 0] = x
        out[i, 1] = y
        u = b11 * x + b12 * y
        v = b21 * x + b22 * y
        x = u - floor(u)
        y = v - floor(v)
    return out
