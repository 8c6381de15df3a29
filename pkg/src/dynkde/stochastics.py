"""Deterministic, splittable random number generation and observation noise.

The generator is the counter-based Philox engine, which is platform-stable
and cheap to fork: child streams are derived from (seed, label) via SHA-256,
so the same (seed, label) always yields the same stream regardless of how
much the parent has been consumed.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

__all__ = ["RngState", "NoiseLaw", "draw_noise", "draw_noise_block", "split_stream"]


@dataclass
class RngState:
    """Seeded stream of pseudo-random numbers.  Not shareable across
    workers; fork with :func:`split_stream` instead."""

    seed: int
    generator: np.random.Generator = field(repr=False, default=None)

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.generator is None:
            self.generator = np.random.Generator(np.random.Philox(self.seed))


def split_stream(rng: RngState, label: str) -> RngState:
    """Child stream deterministic in (rng.seed, label).

    Splitting depends only on the seed and the label, never on how many
    draws the parent has produced.
    """
    digest = hashlib.sha256(f"{rng.seed}\x1f{label}".encode()).digest()
    child_seed = int.from_bytes(digest[:8], "big")
    return RngState(seed=child_seed)


@dataclass(frozen=True)
class NoiseLaw:
    """Centered observation-noise law, i.i.d. across coordinates.

    kind is one of "none", "uniform" (on [-half_width, half_width]) or
    "gaussian" (mean 0, standard deviation sd).
    """

    kind: str
    dimension: int = 1
    half_width: float = 0.0
    sd: float = 0.0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if self.kind == "none":
            return
        if self.kind == "uniform":
            if self.half_width <= 0:
                raise ValueError("uniform noise needs a positive half width")
        elif self.kind == "gaussian":
            if self.sd <= 0:
                raise ValueError("gaussian noise needs a positive sd")
        else:
            raise ValueError(f"unknown noise kind {self.kind!r}")

    @staticmethod
    def none(dimension: int = 1) -> "NoiseLaw":
        return NoiseLaw(kind="none", dimension=dimension)

    @staticmethod
    def uniform(half_width: float, dimension: int = 1) -> "NoiseLaw":
        return NoiseLaw(kind="uniform", dimension=dimension, half_width=half_width)

    @staticmethod
    def gaussian(sd: float, dimension: int = 1) -> "NoiseLaw":
        return NoiseLaw(kind="gaussian", dimension=dimension, sd=sd)

    @staticmethod
    def parse(spec: str, dimension: int = 1) -> "NoiseLaw":
        """Parse a config string: "none" | "uniform:<b>" | "gaussian:<sd>"."""
        spec = spec.strip()
        if spec == "none":
            return NoiseLaw.none(dimension)
        try:
            kind, _, arg = spec.partition(":")
            value = float(arg)
        except ValueError:
            raise ValueError(f"cannot parse noise spec {spec!r}") from None
        if kind == "uniform":
            return NoiseLaw.uniform(value, dimension)
        if kind == "gaussian":
            return NoiseLaw.gaussian(value, dimension)
        raise ValueError(f"cannot parse noise spec {spec!r}")

    def spec_string(self) -> str:
        if self.kind == "none":
            return "none"
        if self.kind == "uniform":
            return f"uniform:{self.half_width:g}"
        return f"gaussian:{self.sd:g}"


def draw_noise_block(law: NoiseLaw, rng: RngState, count: int) -> np.ndarray:
    """Draw ``count`` noise vectors at once; shape (count, dimension)."""
    shape = (count, law.dimension)
    if law.kind == "none":
        return np.zeros(shape)
    if law.kind == "uniform":
        return rng.generator.uniform(-law.half_width, law.half_width, size=shape)
    return rng.generator.normal(0.0, law.sd, size=shape)


def draw_noise(law: NoiseLaw, rng: RngState) -> np.ndarray:
    """Draw a single noise vector of shape (dimension,)."""
    return draw_noise_block(law, rng, 1)[0]
