"""Built-in chaotic maps, stationary sampling and trajectory generation.

Systems expose the map itself, an axis-aligned domain, and (where known in
closed form) the invariant density.  Trajectories pair each state with the
noisy next-state observation used by the regression estimator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._core import backend
from .stochastics import NoiseLaw, RngState, draw_noise_block, split_stream

__all__ = [
    "DynamicalSystem",
    "Trajectory",
    "ParryDensity",
    "beta_map",
    "parry_density",
    "gauss_map",
    "alpha_gauss_map",
    "logistic_map",
    "matrix_beta_map",
    "system_by_spec",
    "sample_stationary",
    "generate_trajectory",
]

# A dyadic multiplier makes x -> beta*x mod 1 exact in binary floating
# point: the orbit loses one mantissa bit per step and collapses onto a
# short cycle.  Nudging the multiplier by a relative 2^-45 makes rounding
# refresh the low bits every step while moving the invariant measure only
# at the 1e-13 scale.
_DYADIC_NUDGE = 2.0**-45

_ESCAPE_TOL = 1e-9


class ParryDensity:
    """Invariant density of x -> beta*x mod 1: a finite weighted sum of
    indicators 1_[0, s_i] along the (truncated) forward orbit s_i of 1.

    The orbit starts from the left-limit value of the map at 1.  Exposes
    the exact jump structure so that total variation, cdf and supremum
    need no numerical approximation.
    """

    def __init__(self, beta: float, tail_tol: float = 1e-12):
        if beta <= 1.0:
            raise ValueError(f"beta must exceed 1, got {beta}")
        self.beta = float(beta)
        tops = []
        weights = []
        s = 1.0
        i = 0
        while True:
            w = beta ** -(i + 1)
            if w < tail_tol:
                break
            tops.append(s)
            weights.append(w)
            if i == 0:
                # left-limit convention at the right endpoint
                s = 0.0 if float(beta).is_integer() else beta - math.floor(beta)
            else:
                y = beta * s
                s = y - math.floor(y)
            if s == 0.0:
                break
            i += 1
        self.tops = np.array(tops)
        self.weights = np.array(weights)
        mass = float(self.weights @ self.tops)
        self.normalizer = 1.0 / mass

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = (x >= 0.0) & (x <= 1.0)
        vals = (x[..., None] <= self.tops) @ self.weights
        return self.normalizer * vals * inside

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, 0.0, 1.0)
        return self.normalizer * (np.minimum(xc[..., None], self.tops) @ self.weights)

    @property
    def exact_sup(self) -> float:
        return self.normalizer * float(self.weights.sum())

    @property
    def jump_points(self) -> np.ndarray:
        """Interior jump locations (strictly inside (0, 1)), ascending."""
        pts = self.tops[(self.tops > 0.0) & (self.tops < 1.0)]
        return np.unique(pts)

    def exact_total_variation(self) -> float:
        interior = (self.tops > 0.0) & (self.tops < 1.0)
        return self.normalizer * float(self.weights[interior].sum())


@dataclass
class DynamicalSystem:
    """A map on an axis-aligned box, with orbit iteration and optional
    invariant-density / invariant-support oracles."""

    system_id: str
    dimension: int
    domain_lo: np.ndarray
    domain_hi: np.ndarray
    step: Callable  # float -> float (d=1) or (2,) array -> (2,) array
    orbit_impl: Callable[[np.ndarray, int], np.ndarray] = field(repr=False)
    density_oracle: Optional[Callable] = None
    support_lo: Optional[np.ndarray] = None
    support_hi: Optional[np.ndarray] = None

    def orbit(self, x0, n: int) -> np.ndarray:
        """Iterate the map n-1 times from x0; returns shape (n, dimension)."""
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        states = self.orbit_impl(x0, n)
        if states.ndim == 1:
            states = states[:, None]
        return states

    def map_grid(self, points: np.ndarray) -> np.ndarray:
        """Apply the map to every row of ``points``; shape preserved."""
        points = np.asarray(points, dtype=float)
        out = np.empty_like(points)
        if self.dimension == 1:
            for i, x in enumerate(points[:, 0]):
                out[i, 0] = self.step(x)
        else:
            for i in range(points.shape[0]):
                out[i] = self.step(points[i])
        return out


@dataclass(frozen=True)
class Trajectory:
    """States X_0..X_{n-1} and noisy targets Y_i = X_{i+1} + eps_i."""

    states: np.ndarray  # (n, d)
    targets: np.ndarray  # (n-1, d)
    noise_law: NoiseLaw
    system_id: str

    @property
    def n(self) -> int:
        return self.states.shape[0]

    @property
    def dimension(self) -> int:
        return self.states.shape[1]


def _is_dyadic(beta: float) -> bool:
    m, _ = math.frexp(beta)
    return m == 0.5


def parry_density(beta: float) -> ParryDensity:
    """Closed-form invariant density of the beta map (truncated series)."""
    return ParryDensity(beta)


def beta_map(beta: float) -> DynamicalSystem:
    """x -> beta*x mod 1 on [0, 1], beta > 1.

    For a power-of-two beta the float orbit of the exact map loses one
    mantissa bit per step and collapses onto a short cycle, so the
    simulated multiplier is nudged by a relative 2^-45.  The invariant
    density differs from the exact one by O(1e-13) and the orbit behaves
    like a generic expanding orbit.
    """
    if beta <= 1.0:
        raise ValueError(f"beta must exceed 1, got {beta}")
    beta = float(beta)
    beta_sim = beta * (1.0 + _DYADIC_NUDGE) if _is_dyadic(beta) else beta

    def step(x: float) -> float:
        y = beta_sim * x
        return y - math.floor(y)

    return DynamicalSystem(
        system_id=f"beta:{beta:g}",
        dimension=1,
        domain_lo=np.array([0.0]),
        domain_hi=np.array([1.0]),
        step=step,
        orbit_impl=lambda x0, n: backend.orbit_beta(x0[0], n, beta_sim, 0.0),
        density_oracle=ParryDensity(beta),
    )


def _gauss_density(x):
    x = np.asarray(x, dtype=float)
    inside = (x >= 0.0) & (x <= 1.0)
    return inside / (math.log(2.0) * (1.0 + x))


def gauss_map() -> DynamicalSystem:
    """x -> 1/x mod 1 on (0, 1); the map is set to 0 at x = 0."""

    def step(x: float) -> float:
        if x == 0.0:
            return 0.0
        u = 1.0 / x
        return u - math.floor(u)

    return DynamicalSystem(
        system_id="gauss",
        dimension=1,
        domain_lo=np.array([0.0]),
        domain_hi=np.array([1.0]),
        step=step,
        orbit_impl=lambda x0, n: backend.orbit_gauss(x0[0], n),
        density_oracle=_gauss_density,
    )


def alpha_gauss_map(alpha: float) -> DynamicalSystem:
    """x -> |1/x| - floor(|1/x| + 1 - alpha) on [alpha-1, alpha]."""
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    alpha = float(alpha)

    def step(x: float) -> float:
        if x == 0.0:
            return 0.0
        u = abs(1.0 / x)
        return u - math.floor(u + 1.0 - alpha)

    return DynamicalSystem(
        system_id=f"alphagauss:{alpha:g}",
        dimension=1,
        domain_lo=np.array([alpha - 1.0]),
        domain_hi=np.array([alpha]),
        step=step,
        orbit_impl=lambda x0, n: backend.orbit_alpha_gauss(x0[0], n, alpha),
    )


def logistic_map(a: float) -> DynamicalSystem:
    """x -> a*x*(1-x) on [0, 1]; invariant support [T(T(1/2)), T(1/2)]."""
    if not (0.0 < a <= 4.0):
        raise ValueError(f"logistic parameter must lie in (0, 4], got {a}")
    a = float(a)

    def step(x: float) -> float:
        return a * x * (1.0 - x)

    top = step(0.5)
    bottom = step(top)
    return DynamicalSystem(
        system_id=f"logistic:{a:g}",
        dimension=1,
        domain_lo=np.array([0.0]),
        domain_hi=np.array([1.0]),
        step=step,
        orbit_impl=lambda x0, n: backend.orbit_logistic(x0[0], n, a),
        support_lo=np.array([bottom]),
        support_hi=np.array([top]),
    )


def matrix_beta_map(B) -> DynamicalSystem:
    """x -> B x mod Z^2 on [0, 1]^2 for a 2x2 expanding matrix B."""
    B = np.asarray(B, dtype=float)
    if B.shape != (2, 2) or not np.all(np.isfinite(B)):
        raise ValueError("B must be a finite 2x2 matrix")
    smin = np.linalg.svd(B, compute_uv=False)[-1]
    if smin <= 1.0:
        warnings.warn(
            f"matrix has smallest singular value {smin:.4g} <= 1; the map is "
            "not expanding and the estimation theory does not apply",
            stacklevel=2,
        )
    b11, b12 = B[0]
    b21, b22 = B[1]

    def step(x: np.ndarray) -> np.ndarray:
        u = b11 * x[0] + b12 * x[1]
        v = b21 * x[0] + b22 * x[1]
        return np.array([u - math.floor(u), v - math.floor(v)])

    return DynamicalSystem(
        system_id=f"matrixbeta:{b11:g},{b12:g},{b21:g},{b22:g}",
        dimension=2,
        domain_lo=np.zeros(2),
        domain_hi=np.ones(2),
        step=step,
        orbit_impl=lambda x0, n: backend.orbit_matrix2(
            x0[0], x0[1], n, b11, b12, b21, b22
        ),
    )


def _parse_number(text: str) -> float:
    if "/" in text:
        num, den = text.split("/")
        return float(num) / float(den)
    return float(text)


def system_by_spec(spec: str) -> DynamicalSystem:
    """Build a system from a config string.

    Formats: "beta:<b>" | "gauss" | "alphagauss:<a>" | "logistic:<a>" |
    "matrixbeta:<b11,b12,b21,b22>".  Numbers may be fractions like 27/11.
    """
    name, _, arg = spec.strip().partition(":")
    if name == "beta":
        return beta_map(_parse_number(arg))
    if name == "gauss":
        return gauss_map()
    if name == "alphagauss":
        return alpha_gauss_map(_parse_number(arg))
    if name == "logistic":
        return logistic_map(_parse_number(arg))
    if name == "matrixbeta":
        vals = [_parse_number(v) for v in arg.split(",")]
        if len(vals) != 4:
            raise ValueError(f"matrixbeta needs 4 entries, got {len(vals)}")
        return matrix_beta_map(np.array(vals).reshape(2, 2))
    raise ValueError(f"unknown system spec {spec!r}")


def sample_stationary(
    sys: DynamicalSystem,
    rng: RngState,
    burnin: int = 1000,
    envelope_factor: float = 1.01,
) -> np.ndarray:
    """One draw from the invariant law.

    With a density oracle: rejection sampling against a uniform proposal,
    envelope = sup of the density (exact when the oracle exposes it, else a
    10^4-point grid maximum) times ``envelope_factor``.  Without an oracle:
    uniform start in the invariant support (or the domain) followed by
    ``burnin`` iterations.
    """
    gen = rng.generator
    f = sys.density_oracle
    if f is not None:
        lo, hi = sys.domain_lo, sys.domain_hi
        vol = float(np.prod(hi - lo))
        sup = getattr(f, "exact_sup", None)
        if sup is None:
            probe = lo + (hi - lo) * ((np.arange(10_000) + 0.5) / 10_000)[:, None]
            sup = float(np.max(f(probe[:, 0] if sys.dimension == 1 else probe)))
        envelope = sup * envelope_factor * vol  # vol folds the proposal density in
        for _ in range(100_000):
            x = lo + (hi - lo) * gen.uniform(size=sys.dimension)
            fx = float(f(x[0] if sys.dimension == 1 else x))
            if fx * vol > envelope:
                raise RuntimeError(
                    f"rejection envelope too small: f({x}) = {fx} exceeds "
                    f"envelope {envelope / vol}"
                )
            if np.all(x == sys.domain_lo) or np.all(x == sys.domain_hi):
                continue  # degenerate boundary start (e.g. the fixed point 0)
            if gen.uniform() * envelope <= fx * vol:
                return x
        raise RuntimeError("rejection sampling failed to accept after 100000 tries")
    lo = sys.support_lo if sys.support_lo is not None else sys.domain_lo
    hi = sys.support_hi if sys.support_hi is not None else sys.domain_hi
    x = lo + (hi - lo) * gen.uniform(size=sys.dimension)
    if burnin > 0:
        x = sys.orbit(x, burnin + 1)[-1]
    return np.asarray(x, dtype=float)


def generate_trajectory(
    sys: DynamicalSystem,
    n: int,
    noise: NoiseLaw,
    rng: RngState,
    burnin: int = 1000,
) -> Trajectory:
    """Stationary orbit of length n plus noisy next-state targets.

    Initialization and noise use distinct child streams of ``rng``, so the
    noise is independent of the trajectory and the whole object is a
    deterministic function of (system, n, noise, seed).
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if noise.dimension != sys.dimension:
        raise ValueError(
            f"noise dimension {noise.dimension} != system dimension {sys.dimension}"
        )
    init_rng = split_stream(rng, "init")
    noise_rng = split_stream(rng, "noise")
    x0 = sample_stationary(sys, init_rng, burnin=burnin)
    states = sys.orbit(x0, n)
    lo, hi = sys.domain_lo, sys.domain_hi
    if np.any(states < lo - _ESCAPE_TOL) or np.any(states > hi + _ESCAPE_TOL):
        raise RuntimeError(f"orbit escaped the domain of {sys.system_id}")
    eps = draw_noise_block(noise, noise_rng, n - 1)
    targets = states[1:] + eps
    return Trajectory(
        states=states, targets=targets, noise_law=noise, system_id=sys.system_id
    )
