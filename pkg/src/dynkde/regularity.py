"""Oscillation bad sets, total variation, and the BV bad-set bounds.

A point is "bad" at scale (u, h) when the oscillation of g over the ball
of radius h around it exceeds the threshold (u^alpha, or raw u for the BV
lemma convention).  All measures here are grid approximations: each report
carries its sampling resolution and a slack of 2 * resolution per
component.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

__all__ = [
    "BadSetReport",
    "BvBoundRecord",
    "oscillation_bad_set",
    "total_variation",
    "bv_lemma_bounds",
]


@dataclass
class BadSetReport:
    """Detected high-oscillation region of a function."""

    u: float
    h: float
    alpha: float
    threshold: float
    threshold_mode: str
    measure_estimate: float
    components: list  # 1-D: [(a, b), ...]; 2-D: [((a0, b0), (a1, b1)), ...]
    resolution: float
    measure_slack: float


def _sample_axis(a: float, b: float, resolution: float):
    m = int(np.ceil((b - a) / resolution))
    centers = a + (np.arange(m) + 0.5) / m * (b - a)
    step = (b - a) / m
    return centers, step


def oscillation_bad_set(
    g,
    u: float,
    h: float,
    alpha: float,
    resolution: float,
    domain,
    threshold_mode: str = "condition",
) -> BadSetReport:
    """Grid scan for cells where sup-oscillation over the h-ball exceeds
    the threshold (u^alpha in "condition" mode, raw u in "raw" mode).

    ``domain`` is (a, b) for one dimension or ((a0, b0), (a1, b1)) for two;
    2-D balls are sup-norm balls.  Vector-valued g is handled through the
    sup norm of the difference.  The scan under-approximates the true set
    (the sup is taken over samples only).
    """
    if u <= 0 or h <= 0:
        raise ValueError("u and h must be positive")
    if resolution > h / 4:
        raise ValueError(f"resolution {resolution} too coarse; need <= h/4 = {h / 4}")
    threshold = u**alpha if threshold_mode == "condition" else u
    two_d = np.ndim(domain) == 2
    if not two_d:
        a, b = float(domain[0]), float(domain[1])
        xs, step = _sample_axis(a, b, resolution)
        vals = np.asarray(g(xs), dtype=float)
        size = 2 * int((h - 1e-12 * h) / step) + 1
        osc = ndimage.maximum_filter1d(vals, size, mode="nearest") - ndimage.minimum_filter1d(
            vals, size, mode="nearest"
        )
        flagged = osc > threshold
        components = []
        idx = np.flatnonzero(flagged)
        if idx.size:
            splits = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
            components = [
                (xs[run[0]] - step / 2, xs[run[-1]] + step / 2) for run in splits
            ]
        measure = float(np.count_nonzero(flagged) * step)
    else:
        (a0, b0), (a1, b1) = domain
        xs0, step0 = _sample_axis(a0, b0, resolution)
        xs1, step1 = _sample_axis(a1, b1, resolution)
        step = max(step0, step1)
        mesh = np.stack(np.meshgrid(xs0, xs1, indexing="ij"), axis=-1)
        vals = np.asarray(g(mesh.reshape(-1, 2)), dtype=float)
        size = 2 * int((h - 1e-12 * h) / step) + 1
        if size < 1:
            raise ValueError("resolution too coarse for the ball radius")
        shape = (xs0.size, xs1.size)
        if vals.ndim == 1:
            fields = [vals.reshape(shape)]
        else:
            fields = [vals[:, j].reshape(shape) for j in range(vals.shape[1])]
        osc = np.zeros(shape)
        for fld in fields:
            o = ndimage.maximum_filter(fld, size, mode="nearest") - ndimage.minimum_filter(
                fld, size, mode="nearest"
            )
            osc = np.maximum(osc, o)
        flagged = osc > threshold
        labels, count = ndimage.label(flagged)
        components = []
        for sl0, sl1 in ndimage.find_objects(labels):
            components.append(
                (
                    (xs0[sl0.start] - step0 / 2, xs0[sl0.stop - 1] + step0 / 2),
                    (xs1[sl1.start] - step1 / 2, xs1[sl1.stop - 1] + step1 / 2),
                )
            )
        measure = float(np.count_nonzero(flagged) * step0 * step1)
    return BadSetReport(
        u=u,
        h=h,
        alpha=alpha,
        threshold=threshold,
        threshold_mode=threshold_mode,
        measure_estimate=measure,
        components=components,
        resolution=float(step),
        measure_slack=2.0 * float(step) * len(components),
    )


def total_variation(g, a: float, b: float, resolution: float) -> float:
    """Variation of g along a uniform subdivision of [a, b].

    A lower bound that refines upward as the resolution shrinks.  Functions
    exposing ``exact_total_variation()`` (piecewise-constant densities with
    a known jump set) short-circuit to the exact value.
    """
    if a >= b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    exact = getattr(g, "exact_total_variation", None)
    if exact is not None:
        return float(exact())
    m = int(np.ceil((b - a) / resolution))
    xs = a + np.arange(m + 1) / m * (b - a)
    vals = np.asarray(g(xs), dtype=float)
    return float(np.sum(np.abs(np.diff(vals))))


@dataclass
class BvBoundRecord:
    """Theoretical bad-set bounds for one (u_n, h_n) pair, plus the
    empirical measure when validation ran."""

    u: float
    h: float
    limsup_bound: float  # 3 V h^(alpha/2)
    single_scale_bound: float  # 2 V h / u
    empirical_measure: float | None = None
    empirical_slack: float | None = None


def bv_lemma_bounds(
    variation: float,
    u_seq,
    h_seq,
    alpha: float,
    g=None,
    domain=None,
    resolution=None,
) -> list[BvBoundRecord]:
    """Bad-set measure bounds for a BV function with total variation V:
    3 V h_n^(alpha/2) for the limsup set and 2 V h_n / u_n per scale.

    Requires u_n, h_n decreasing with h_n^(2-alpha) <= u_n^2.  When g (with
    domain and resolution) is supplied, the per-scale bad set is measured
    empirically with the raw-u threshold and checked against its bound;
    a violation beyond the grid slack raises RuntimeError.
    """
    u_seq = np.asarray(u_seq, dtype=float)
    h_seq = np.asarray(h_seq, dtype=float)
    if u_seq.shape != h_seq.shape:
        raise ValueError("u and h sequences must have equal length")
    if np.any(np.diff(u_seq) > 0) or np.any(np.diff(h_seq) > 0):
        raise ValueError("u and h sequences must be nonincreasing")
    if np.any(h_seq ** (2.0 - alpha) > u_seq**2 * (1.0 + 1e-9)):
        raise ValueError(
            "hypothesis h^(2-alpha) <= u^2 violated; the limsup bound does not apply"
        )
    out = []
    for u, h in zip(u_seq, h_seq):
        rec = BvBoundRecord(
            u=float(u),
            h=float(h),
            limsup_bound=3.0 * variation * h ** (alpha / 2.0),
            single_scale_bound=2.0 * variation * h / u,
        )
        if g is not None:
            if domain is None or resolution is None:
                raise ValueError("validation mode needs domain and resolution")
            report = oscillation_bad_set(
                g, u, h, alpha, resolution=resolution, domain=domain,
                threshold_mode="raw",
            )
            rec.empirical_measure = report.measure_estimate
            rec.empirical_slack = report.measure_slack
            if rec.empirical_measure > rec.single_scale_bound + report.measure_slack:
                raise RuntimeError(
                    f"empirical bad-set measure {rec.empirical_measure} exceeds "
                    f"the BV bound {rec.single_scale_bound} at (u={u}, h={h})"
                )
        out.append(rec)
    return out
