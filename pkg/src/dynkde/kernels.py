"""Compactly supported smoothing kernels with semi-norm metadata.

Each kernel carries the constants that the deviation bounds consume: the
semi-norm family it lives in (bounded variation / Lipschitz / Holder), its
semi-norm constant C(K), and the scaling exponent beta governing how the
semi-norm of the rescaled kernel t -> K((x - t)/h) grows as h shrinks:
C(K_h) <= C(K) / h**beta.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = [
    "SeminormFamily",
    "Kernel",
    "make_epanechnikov",
    "make_box",
    "kernel_by_name",
    "eval_scaled",
    "scaled_seminorm_bound",
]


class SeminormTag(Enum):
    BOUNDED_VARIATION = "bounded_variation"
    LIPSCHITZ = "lipschitz"
    HOLDER = "holder"


@dataclass(frozen=True)
class SeminormFamily:
    """Function-space family of a kernel; Holder carries its exponent."""

    tag: SeminormTag
    holder_exponent: float | None = None

    def __post_init__(self):
        if self.tag is SeminormTag.HOLDER:
            g = self.holder_exponent
            if g is None or not (0.0 < g <= 1.0):
                raise ValueError(f"Holder exponent must lie in (0, 1], got {g}")
        elif self.holder_exponent is not None:
            raise ValueError("holder_exponent is only meaningful for the Holder family")

    def natural_scaling_exponent(self) -> float:
        if self.tag is SeminormTag.BOUNDED_VARIATION:
            return 0.0
        if self.tag is SeminormTag.LIPSCHITZ:
            return 1.0
        return float(self.holder_exponent)


@dataclass(frozen=True)
class Kernel:
    """A nonnegative, unit-mass weight function with compact support.

    ``profile`` is vectorized: for dimension 1 it maps arrays of shape
    ``(...,)`` to arrays of the same shape; for dimension d it maps
    ``(..., d)`` to ``(...,)``.  ``support_diameter`` is the sup-norm
    diameter of the support of the unscaled profile.
    """

    name: str
    dimension: int
    profile: Callable[[np.ndarray], np.ndarray]
    support_diameter: float
    seminorm_constant: float
    family: SeminormFamily
    scaling_exponent: float
    integral_check: float = field(default=float("nan"))

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be a positive integer")
        if self.support_diameter <= 0:
            raise ValueError("support_diameter must be positive")
        if self.seminorm_constant < 0:
            raise ValueError("seminorm_constant must be nonnegative")
        if self.scaling_exponent < 0:
            raise ValueError("scaling_exponent must be nonnegative")
        if self.scaling_exponent >= 1.0:
            warnings.warn(
                f"kernel {self.name!r} has scaling exponent "
                f"{self.scaling_exponent} >= 1; the deviation envelopes use it "
                "verbatim but their derivation assumes an exponent below 1",
                stacklevel=2,
            )
        if np.isnan(self.integral_check):
            object.__setattr__(self, "integral_check", self._compute_integral())
        if abs(self.integral_check - 1.0) > 1e-6:
            raise ValueError(
                f"kernel {self.name!r} has numerical mass {self.integral_check}, "
                "expected 1 within 1e-6"
            )

    def _compute_integral(self) -> float:
        r = self.support_diameter / 2.0
        if self.dimension == 1:
            val, _ = integrate.quad(
                lambda x: float(self.profile(np.asarray(x))), -r, r, limit=200
            )
            return val
        ranges = [(-r, r)] * self.dimension
        val, _ = integrate.nquad(
            lambda *xs: float(self.profile(np.asarray(xs))), ranges
        )
        return val


def _epanechnikov_profile(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) <= 1.0, 0.75 * (1.0 - x * x), 0.0)


def _box1d_profile(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return (np.abs(x) <= 0.5).astype(float)


def _box2d_profile(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    sup = np.max(np.abs(x), axis=-1)
    return 0.25 * (sup <= 1.0)


def make_epanechnikov() -> Kernel:
    """Parabolic kernel (3/4)(1 - x^2) on [-1, 1].

    Lipschitz with constant 3/2 (steepest slope at the support edges), so
    the rescaled kernel has Lipschitz constant at most (3/2)/h.
    """
    return Kernel(
        name="epanechnikov",
        dimension=1,
        profile=_epanechnikov_profile,
        support_diameter=2.0,
        seminorm_constant=1.5,
        family=SeminormFamily(SeminormTag.LIPSCHITZ),
        scaling_exponent=1.0,
    )


def make_box(d: int) -> Kernel:
    """Uniform kernel: indicator of [-1/2, 1/2] (d=1) or (1/4)*indicator
    of [-1, 1]^2 (d=2).

    Total variation is invariant under rescaling, so the scaling exponent
    is 0.  For d=1, C(K) = 2 (two unit jumps).  For d=2 we take C(K) = 1,
    the sum of the two axis-section variations (2 * 1/4 per axis).
    """
    if d == 1:
        return Kernel(
            name="box1d",
            dimension=1,
            profile=_box1d_profile,
            support_diameter=1.0,
            seminorm_constant=2.0,
            family=SeminormFamily(SeminormTag.BOUNDED_VARIATION),
            scaling_exponent=0.0,
        )
    if d == 2:
        return Kernel(
            name="box2d",
            dimension=2,
            profile=_box2d_profile,
            support_diameter=2.0,
            seminorm_constant=1.0,
            family=SeminormFamily(SeminormTag.BOUNDED_VARIATION),
            scaling_exponent=0.0,
        )
    raise ValueError(f"box kernel is only defined for d in {{1, 2}}, got {d}")


_BUILTINS = {
    "epanechnikov": make_epanechnikov,
    "box1d": lambda: make_box(1),
    "box2d": lambda: make_box(2),
}


def kernel_by_name(name: str) -> Kernel:
    """Resolve a kernel from its config name."""
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ValueError(
            f"unknown kernel {name!r}; choose from {sorted(_BUILTINS)}"
        ) from None


def eval_scaled(kernel: Kernel, x, t, h: float):
    """Evaluate K((x - t)/h).

    x and t may be scalars (d=1), vectors of length d, or arrays of such
    points; shapes must broadcast.
    """
    if h <= 0:
        raise ValueError(f"bandwidth h must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    return kernel.profile((x - t) / h)


def scaled_seminorm_bound(kernel: Kernel, h: float) -> float:
    """Semi-norm bound C(K)/h**beta of the rescaled kernel."""
    if h <= 0:
        raise ValueError(f"bandwidth h must be positive, got {h}")
    return kernel.seminorm_constant / h**kernel.scaling_exponent
