"""Exponential deviation envelopes for kernel estimates under weak mixing.

The mixing structure enters only through the weighted coefficient sum
S(n) = sum_{k<n} (n-k) Phi(k) and its smallest linear majorant R with
S(n) <= R n.  The envelopes have the form  A * exp(-t^2 * c * n * h^(beta+2))
with c assembled from R, Phi(0), the kernel semi-norm constant C(K), and
(for the regression case) inf f and a bound on Y or on the regression
function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "MixingModel",
    "BoundParams",
    "BoundValue",
    "EnvelopeValue",
    "weighted_phi_sum",
    "smallest_linear_majorant",
    "moment_bound",
    "concentration_bound",
    "density_deviation_envelope",
    "regression_deviation_envelope",
    "bandwidth_schedule",
]

# leading constant of every envelope
E_POW_INV_E = math.exp(1.0 / math.e)


@dataclass(frozen=True)
class MixingModel:
    """Summable covariance-decay coefficients Phi(k).

    Either geometric, Phi(k) = C * gamma^k, or an explicit nonnegative
    sequence (treated as zero beyond its length; the tail must already be
    negligible).
    """

    c: float = 1.0
    gamma: float = 0.0
    sequence: Optional[np.ndarray] = None

    @staticmethod
    def geometric(c: float, gamma: float) -> "MixingModel":
        if c <= 0:
            raise ValueError("C must be positive")
        if not (0.0 < gamma < 1.0):
            raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
        return MixingModel(c=c, gamma=gamma)

    @staticmethod
    def explicit(sequence: Sequence[float]) -> "MixingModel":
        seq = np.asarray(sequence, dtype=float)
        if seq.size == 0 or np.any(seq < 0):
            raise ValueError("sequence must be nonempty and nonnegative")
        if seq.size > 1 and seq[-1] > 1e-12:
            raise ValueError("sequence tail exceeds 1e-12; not summable in practice")
        return MixingModel(sequence=seq)

    @staticmethod
    def parse(spec: str) -> "MixingModel":
        """Parse "geometric:<C>,<gamma>"."""
        kind, _, args = spec.strip().partition(":")
        if kind != "geometric":
            raise ValueError(f"unknown mixing model spec {spec!r}")
        c, gamma = (float(v) for v in args.split(","))
        return MixingModel.geometric(c, gamma)

    @property
    def phi0(self) -> float:
        if self.sequence is not None:
            return float(self.sequence[0])
        return self.c

    def phi(self, k) -> np.ndarray:
        k = np.asarray(k)
        if self.sequence is not None:
            out = np.zeros(k.shape)
            inside = k < self.sequence.size
            out[inside] = self.sequence[k[inside]]
            return out
        return self.c * self.gamma ** k


def weighted_phi_sum(model: MixingModel, n: int, method: str = "closed") -> float:
    """sum_{k=0}^{n-1} (n - k) Phi(k).

    For geometric models the closed form
    C * [n(1-gamma) - gamma(1-gamma^n)] / (1-gamma)^2 is used unless
    ``method="direct"`` forces termwise summation (the cross-check path).
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if model.sequence is None and method == "closed":
        g = model.gamma
        return model.c * (n * (1.0 - g) - g * (1.0 - g**n)) / (1.0 - g) ** 2
    k = np.arange(n)
    return float(np.sum((n - k) * model.phi(k)))


def smallest_linear_majorant(model: MixingModel, n_max: int) -> float:
    """Smallest R with sum_{k<n} (n-k) Phi(k) <= R n for all n <= n_max.

    The per-n ratio is nondecreasing toward sum_k Phi(k), so for geometric
    models R converges to C/(1-gamma) from below.
    """
    if n_max < 1:
        raise ValueError(f"need n_max >= 1, got {n_max}")
    ns = np.arange(1, n_max + 1)
    if model.sequence is None:
        g = model.gamma
        sums = model.c * (ns * (1.0 - g) - g * (1.0 - g**ns)) / (1.0 - g) ** 2
    else:
        phis = model.phi(np.arange(n_max))
        # S(n) = n * cumsum(Phi)[n-1] - cumsum(k Phi)[n-1]
        c1 = np.cumsum(phis)
        c2 = np.cumsum(np.arange(n_max) * phis)
        sums = ns * c1 - c2
    return float(np.max(sums / ns))


def moment_bound(model: MixingModel, c_phi: float, n: int, p: float) -> float:
    """p-th moment bound C(phi) * sqrt(2 p sum (n-k) Phi(k)) for the
    centered kernel sum, p >= 2."""
    if p < 2:
        raise ValueError(f"need p >= 2, got {p}")
    if c_phi < 0:
        raise ValueError("C(phi) must be nonnegative")
    return c_phi * math.sqrt(2.0 * p * weighted_phi_sum(model, n))


@dataclass(frozen=True)
class BoundValue:
    raw: float
    clipped: float


def concentration_bound(
    model: MixingModel, c_phi: float, n: int, t: float
) -> BoundValue:
    """Tail bound for the deviation of the un-normalized kernel sum:
    e^(1/e) * exp(-t^2 / (2e C(phi)^2 Phi(0) sum (n-k) Phi(k)))."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if c_phi == 0.0:
        # a zero semi-norm means a constant summand: no deviation at all
        raw = 0.0 if t > 0 else E_POW_INV_E
        return BoundValue(raw=raw, clipped=min(raw, 1.0))
    denom = 2.0 * math.e * c_phi**2 * model.phi0 * weighted_phi_sum(model, n)
    raw = E_POW_INV_E * math.exp(-(t * t) / denom)
    return BoundValue(raw=raw, clipped=min(raw, 1.0))


@dataclass(frozen=True)
class BoundParams:
    """Inputs shared by the deviation envelopes."""

    n: int
    h: float
    beta: float  # kernel scaling exponent
    c_k: float  # kernel semi-norm constant C(K)
    t: float  # deviation level
    u: float  # bias level, must be >= h * diam(D)
    alpha: float = 1.0
    support_diameter: float = 1.0
    inf_f: float = 0.0
    y_max: Optional[float] = None
    r_max: Optional[float] = None

    def __post_init__(self):
        if self.n < 1 or self.h <= 0 or self.c_k < 0 or self.t < 0:
            raise ValueError("invalid bound parameters")
        if self.u < self.h * self.support_diameter:
            raise ValueError(
                f"need u >= h*diam(D) = {self.h * self.support_diameter}, got {self.u}"
            )


@dataclass(frozen=True)
class EnvelopeValue:
    raw: float
    clipped: float
    vacuous: bool
    exponent_rate: float  # the constant multiplying n h^(beta+2) t^2
    bad_set_budget: float  # measure allowance R h^gamma' for the excluded set


def _n_h_factor(p: BoundParams) -> float:
    return p.n * p.h ** (p.beta + 2.0)


def density_deviation_envelope(
    p: BoundParams, model: MixingModel, gamma_prime: float = 1.0
) -> EnvelopeValue:
    """Envelope for P(|f_hat(x) - f(x)| > t - u^alpha) off the bad set:
    2 e^(1/e) exp(-t^2 n h^(beta+2) / (2e R Phi(0) C(K)))."""
    r_major = smallest_linear_majorant(model, p.n)
    rate = 1.0 / (2.0 * math.e * r_major * model.phi0 * p.c_k)
    vacuous = p.t <= p.u**p.alpha
    raw = 2.0 * E_POW_INV_E * math.exp(-p.t**2 * rate * _n_h_factor(p))
    return EnvelopeValue(
        raw=raw,
        clipped=min(raw, 1.0) if not vacuous else 1.0,
        vacuous=vacuous,
        exponent_rate=rate,
        bad_set_budget=r_major * p.h**gamma_prime,
    )


def regression_deviation_envelope(
    p: BoundParams,
    model_f: MixingModel,
    model_g: MixingModel,
    bounded_y: bool = True,
    gamma_prime: float = 1.0,
) -> EnvelopeValue:
    """Envelope for P(|r_hat(x) - r(x)| > t - u^alpha) off the bad set.

    With bounded observations (|Y| <= y_max) the bound is a single
    exponential with rate
    L = min( (inf f)^2/(8e R' Phi_g(0) C(K)),
             (inf f)^2/(8e R  Phi_f(0) C(K) y_max^2) ).
    The min (not the max written loosely elsewhere) is the constant that a
    union bound actually delivers.  With only a bounded regression function
    (r_max) the split loses another factor of 2 in t and adds the
    small-denominator mass term exp(-L'' n h^(beta+2)).
    """
    if p.inf_f <= 0:
        raise ValueError("inf_f must be positive for the regression envelope")
    r_f = smallest_linear_majorant(model_f, p.n)
    r_g = smallest_linear_majorant(model_g, p.n)
    nh = _n_h_factor(p)
    vacuous = p.t <= p.u**p.alpha
    if bounded_y:
        if p.y_max is None:
            raise ValueError("bounded_y requires y_max")
        rate = min(
            p.inf_f**2 / (8.0 * math.e * r_g * model_g.phi0 * p.c_k),
            p.inf_f**2 / (8.0 * math.e * r_f * model_f.phi0 * p.c_k * p.y_max**2),
        )
        raw = 2.0 * E_POW_INV_E * math.exp(-p.t**2 * rate * nh)
    else:
        if p.r_max is None:
            raise ValueError("unbounded-Y mode requires r_max")
        rate = min(
            p.inf_f**2 / (32.0 * math.e * r_g * model_g.phi0 * p.c_k),
            p.inf_f**2 / (32.0 * math.e * r_f * model_f.phi0 * p.c_k * p.r_max**2),
        )
        mass_rate = (p.inf_f / 2.0) ** 2 / (
            2.0 * math.e * r_f * model_f.phi0 * p.c_k
        )
        raw = E_POW_INV_E * (
            2.0 * math.exp(-p.t**2 * rate * nh) + math.exp(-mass_rate * nh)
        )
    return EnvelopeValue(
        raw=raw,
        clipped=min(raw, 1.0) if not vacuous else 1.0,
        vacuous=vacuous,
        exponent_rate=rate,
        bad_set_budget=max(r_f, r_g) * p.h**gamma_prime,
    )


def bandwidth_schedule(xi: float, n: int, beta: float):
    """h_n = n^(-xi) with 0 < xi < 1/(beta+2); also returns n h_n^(beta+2),
    the effective sample factor in the envelopes."""
    limit = 1.0 / (beta + 2.0)
    if not (0.0 < xi < limit):
        raise ValueError(f"xi must lie in (0, {limit}), got {xi}")
    h = float(n) ** -xi
    return h, n * h ** (beta + 2.0)
