"""Kernel density and Nadaraya-Watson map estimation on evaluation grids.

The density estimate is (1/(n h^d)) sum_i K((x - X_i)/h).  The map
estimate is the coordinatewise ratio of the Y-weighted kernel sum to the
plain kernel sum over the first n-1 samples (the ones with a defined
target), with the convention that a zero denominator yields 0.

Note on normalization: in d dimensions the scaled kernel integrates to
h^d, so the estimator divides by n h^d to remain a bona fide density.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ._core import backend
from .dynamics import DynamicalSystem, Trajectory
from .kernels import Kernel
from . import regularity

__all__ = [
    "EstimateGrid",
    "BiasCheckReport",
    "make_grid",
    "density_estimate",
    "regression_estimate",
    "map_estimate",
    "full_estimate",
    "bias_bound_check",
    "ame",
    "ame_vector",
]

# (code, support radius in u-units) for the compiled/fallback fast path
_FAST_KERNELS = {
    "box1d": (0, 0.5),
    "epanechnikov": (1, 1.0),
    "box2d": (0, 1.0),
}


@dataclass
class EstimateGrid:
    """Estimator values on evaluation points, with optional ground truth."""

    points: np.ndarray  # (p, d)
    h: float
    f_hat: np.ndarray  # (p,)
    t_hat: Optional[np.ndarray] = None  # (p, d)
    f_true: Optional[np.ndarray] = None
    t_true: Optional[np.ndarray] = None
    n_used: int = 0


def make_grid(lo, hi, p: int) -> np.ndarray:
    """p cell-centered points per axis on the box [lo, hi]; shape (p^d, d).

    Offsets are x_k = lo + (k + 1/2)/p * (hi - lo), so endpoints are
    excluded by half a step.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    ticks = (np.arange(p) + 0.5) / p
    axes = [lo[j] + ticks * (hi[j] - lo[j]) for j in range(lo.shape[0])]
    if lo.shape[0] == 1:
        return axes[0][:, None]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _as_points(points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    return points


def _kernel_sums(X, Y, kernel, h, points, force_slow=False):
    """Plain and (optionally) Y-weighted kernel sums over the samples."""
    d = X.shape[1]
    if kernel.dimension != d:
        raise ValueError(f"kernel dimension {kernel.dimension} != data dimension {d}")
    fast = kernel.name in _FAST_KERNELS and not force_slow
    if fast:
        code, radius = _FAST_KERNELS[kernel.name]
        if d == 1:
            order = np.argsort(X[:, 0], kind="stable")
            xs = X[order, 0]
            if Y is None:
                return backend.kernel_sums_1d(xs, points[:, 0], h, radius, code), None
            return backend.kernel_weighted_sums_1d(
                xs, Y[order], points[:, 0], h, radius, code
            )
        order = np.argsort(X[:, 0], kind="stable")
        Xs = X[order]
        if Y is None:
            return backend.kernel_sums_2d(Xs, points, h, radius, code), None
        return backend.kernel_weighted_sums_2d(Xs, Y[order], points, h, radius, code)
    # generic path: chunked broadcasting through the kernel profile
    p = points.shape[0]
    s0 = np.empty(p)
    s1 = np.empty((p, Y.shape[1])) if Y is not None else None
    chunk = max(1, int(2e6 // max(X.shape[0], 1)))
    for start in range(0, p, chunk):
        sl = slice(start, min(start + chunk, p))
        u = (points[sl, None, :] - X[None, :, :]) / h  # (c, n, d)
        w = kernel.profile(u[..., 0] if d == 1 else u)
        s0[sl] = w.sum(axis=1)
        if Y is not None:
            s1[sl] = w @ Y
    return s0, s1


def _states(traj_or_states) -> np.ndarray:
    if isinstance(traj_or_states, Trajectory):
        return traj_or_states.states
    arr = np.asarray(traj_or_states, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


def density_estimate(traj, kernel: Kernel, h: float, points, **kw) -> np.ndarray:
    """Kernel density estimate at the evaluation points."""
    if h <= 0:
        raise ValueError(f"bandwidth h must be positive, got {h}")
    X = _states(traj)
    if X.shape[0] == 0:
        raise ValueError("empty trajectory")
    points = _as_points(points)
    s0, _ = _kernel_sums(X, None, kernel, h, points, **kw)
    d = X.shape[1]
    return s0 / (X.shape[0] * h**d)


def _ratio_estimate(traj: Trajectory, kernel, h, points, Y, **kw):
    X = traj.states[:-1]
    points = _as_points(points)
    s0, s1 = _kernel_sums(X, Y, kernel, h, points, **kw)
    out = np.zeros_like(s1)
    np.divide(s1, s0[:, None], out=out, where=s0[:, None] > 0.0)
    return out


def regression_estimate(
    traj: Trajectory, kernel: Kernel, h: float, points, coordinate: int = 0, **kw
) -> np.ndarray:
    """Nadaraya-Watson estimate of one target coordinate; 0 off-support."""
    if h <= 0:
        raise ValueError(f"bandwidth h must be positive, got {h}")
    if not (0 <= coordinate < traj.dimension):
        raise ValueError(f"coordinate {coordinate} out of range")
    Y = traj.targets[:, coordinate:coordinate + 1]
    return _ratio_estimate(traj, kernel, h, points, Y, **kw)[:, 0]


def map_estimate(traj: Trajectory, kernel: Kernel, h: float, points, **kw) -> np.ndarray:
    """All target coordinates in one pass over the kernel weights."""
    if h <= 0:
        raise ValueError(f"bandwidth h must be positive, got {h}")
    return _ratio_estimate(traj, kernel, h, points, traj.targets, **kw)


def full_estimate(
    traj: Trajectory,
    sys: DynamicalSystem,
    kernel: Kernel,
    h: float,
    points,
) -> EstimateGrid:
    """Density and map estimates plus reference truths where available."""
    points = _as_points(points)
    f_hat = density_estimate(traj, kernel, h, points)
    t_hat = map_estimate(traj, kernel, h, points)
    f_true = None
    if sys.density_oracle is not None:
        f_true = np.asarray(
            sys.density_oracle(points[:, 0] if sys.dimension == 1 else points)
        )
    t_true = sys.map_grid(points)
    return EstimateGrid(
        points=points,
        h=h,
        f_hat=f_hat,
        t_hat=t_hat,
        f_true=f_true,
        t_true=t_true,
        n_used=traj.n - 1,
    )


@dataclass
class BiasCheckReport:
    """Pointwise smoothing-bias check against the u^alpha budget."""

    points: np.ndarray
    expected_fhat: np.ndarray
    bias: np.ndarray
    passed: np.ndarray  # bool per point
    failing_points: np.ndarray
    bad_set: "regularity.BadSetReport"
    failures_inside_bad_set: bool


def bias_bound_check(
    sys: DynamicalSystem,
    kernel: Kernel,
    h: float,
    u: float,
    alpha: float,
    points,
    quad_points: int = 4001,
) -> BiasCheckReport:
    """Check |E f_hat(x) - f(x)| <= u^alpha per grid point.

    E f_hat(x) = int K(y) f(x - h y) dy is computed by trapezoid quadrature
    with weights renormalized to unit mass.  Failing points are cross-checked
    against the oscillation bad set of f at radius h * diam(support).
    """
    if sys.density_oracle is None:
        raise ValueError(f"system {sys.system_id} has no density oracle")
    if sys.dimension != 1:
        raise ValueError("bias check is implemented for 1-D systems only")
    ball = h * kernel.support_diameter
    if u < ball:
        raise ValueError(f"need u >= h*diam(D) = {ball}, got {u}")
    f = sys.density_oracle
    points = _as_points(points)[:, 0]
    r = kernel.support_diameter / 2.0
    y = np.linspace(-r, r, quad_points)
    w = kernel.profile(y)
    w[0] *= 0.5
    w[-1] *= 0.5
    w /= w.sum()
    expected = f(points[:, None] - h * y[None, :]) @ w
    bias = expected - np.asarray(f(points))
    passed = np.abs(bias) <= u**alpha
    failing = points[~passed]
    # scan one ball beyond the domain: the density extended by zero jumps
    # at the boundary, and points within a ball of it carry that bias
    bad = regularity.oscillation_bad_set(
        f,
        u,
        ball,
        alpha,
        resolution=ball / 8.0,
        domain=(float(sys.domain_lo[0]) - ball, float(sys.domain_hi[0]) + ball),
    )
    slack = bad.resolution
    inside = all(
        any(a - slack <= x <= b + slack for a, b in bad.components) for x in failing
    )
    return BiasCheckReport(
        points=points,
        expected_fhat=expected,
        bias=bias,
        passed=passed,
        failing_points=failing,
        bad_set=bad,
        failures_inside_bad_set=inside,
    )


def ame(estimates, truths) -> float:
    """Mean absolute deviation over the grid."""
    estimates = np.asarray(estimates, dtype=float).ravel()
    truths = np.asarray(truths, dtype=float).ravel()
    if estimates.size == 0:
        raise ValueError("empty input")
    if estimates.shape != truths.shape:
        raise ValueError("length mismatch")
    return float(np.mean(np.abs(estimates - truths)))


def ame_vector(estimates, truths):
    """Per-coordinate mean absolute errors and the sup-norm variant.

    Returns (coord_ames of shape (d,), sup_ame) where sup_ame averages the
    per-point sup-norm of the error vector.
    """
    estimates = np.asarray(estimates, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if estimates.size == 0:
        raise ValueError("empty input")
    if estimates.shape != truths.shape:
        raise ValueError("shape mismatch")
    err = np.abs(estimates - truths)
    return err.mean(axis=0), float(err.max(axis=1).mean())
