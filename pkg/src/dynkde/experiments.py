"""End-to-end experiment orchestration: single runs, tables, bandwidth
sweeps, envelope-coverage studies, and the reference-table reproduction
suite.  Owns CSV emission; every output carries its serialized spec so a
run can be replayed bit-exactly.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import bounds as bounds_mod
from . import regularity
from .dynamics import generate_trajectory, system_by_spec
from .estimators import (
    ame,
    ame_vector,
    density_estimate,
    full_estimate,
    make_grid,
    map_estimate,
)
from .kernels import kernel_by_name
from .stochastics import NoiseLaw, RngState, split_stream

__all__ = [
    "ExperimentSpec",
    "ResultRow",
    "run_experiment",
    "run_table",
    "convergence_sweep",
    "coverage_study",
    "reproduce_paper_suite",
    "write_estimate_csv",
    "write_table_csv",
    "write_suite_csv",
]


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything that determines a run: system, sample size, bandwidth,
    kernel, noise, grid, seed."""

    system: str
    n: int
    h: float
    kernel: str
    noise: str = "none"
    grid: int = 200
    seed: int = 0
    replications: int = 1
    burnin: int = 1000
    grid_domain: str = "domain"  # "domain" or "support"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @staticmethod
    def from_dict(d: dict) -> "ExperimentSpec":
        return ExperimentSpec(**d)


@dataclass
class ResultRow:
    spec: ExperimentSpec
    amef: Optional[float]
    amet: Optional[np.ndarray]  # per coordinate
    amet_sup: Optional[float]
    n_used: int
    wall_time: float
    seed: int
    error: Optional[str] = None


def _grid_for(spec: ExperimentSpec, sys):
    if spec.grid_domain == "support":
        if sys.support_lo is None:
            raise ValueError(f"system {sys.system_id} exposes no invariant support")
        return make_grid(sys.support_lo, sys.support_hi, spec.grid)
    return make_grid(sys.domain_lo, sys.domain_hi, spec.grid)


def run_experiment(spec: ExperimentSpec, seed: Optional[int] = None):
    """One full run; returns (ResultRow, EstimateGrid)."""
    t0 = time.perf_counter()
    sys = system_by_spec(spec.system)
    kernel = kernel_by_name(spec.kernel)
    noise = NoiseLaw.parse(spec.noise, sys.dimension)
    rng = RngState(spec.seed if seed is None else seed)
    traj = generate_trajectory(sys, spec.n, noise, rng, burnin=spec.burnin)
    points = _grid_for(spec, sys)
    est = full_estimate(traj, sys, kernel, spec.h, points)
    amef = ame(est.f_hat, est.f_true) if est.f_true is not None else None
    coord_ames, sup_ame = ame_vector(est.t_hat, est.t_true)
    row = ResultRow(
        spec=spec,
        amef=amef,
        amet=coord_ames,
        amet_sup=sup_ame,
        n_used=est.n_used,
        wall_time=time.perf_counter() - t0,
        seed=rng.seed,
    )
    return row, est


def run_table(specs: Sequence[ExperimentSpec]):
    """One ResultRow per spec; per-row failures are recorded, not raised."""
    rows = []
    for spec in specs:
        try:
            row, _ = run_experiment(spec)
        except (ValueError, RuntimeError) as exc:
            row = ResultRow(
                spec=spec, amef=None, amet=None, amet_sup=None, n_used=0,
                wall_time=0.0, seed=spec.seed, error=str(exc),
            )
        rows.append(row)
    return rows


@dataclass
class SweepResult:
    ns: np.ndarray
    hs: np.ndarray
    amet_means: np.ndarray
    amet_reps: list  # per n: array of per-replication AMETs
    slope: float


def convergence_sweep(
    base: ExperimentSpec,
    n_list: Sequence[int],
    xi: float,
    estimator: Optional[Callable] = None,
) -> SweepResult:
    """Run the base spec at each n with h_n = n^(-xi) and fit the log-log
    slope of the map error against n.

    ``estimator`` is a debug hook with the signature of
    :func:`dynkde.estimators.map_estimate`; the default is the real one.
    """
    n_list = list(n_list)
    if len(n_list) < 3:
        raise ValueError("need at least 3 sample sizes")
    if sorted(n_list) != n_list:
        raise ValueError("sample sizes must be increasing")
    estimate = estimator if estimator is not None else map_estimate
    sys = system_by_spec(base.system)
    kernel = kernel_by_name(base.kernel)
    noise = NoiseLaw.parse(base.noise, sys.dimension)
    root = RngState(base.seed)
    hs, means, reps_all = [], [], []
    for n in n_list:
        h = float(n) ** -xi
        hs.append(h)
        reps = []
        for rep in range(base.replications):
            rng = split_stream(root, f"n{n}/rep{rep}")
            traj = generate_trajectory(sys, n, noise, rng, burnin=base.burnin)
            points = _grid_for(base, sys)
            t_hat = estimate(traj, kernel, h, points)
            _, sup_ame = ame_vector(t_hat, sys.map_grid(points))
            reps.append(sup_ame)
        reps_all.append(np.array(reps))
        means.append(float(np.mean(reps)))
    slope = float(np.polyfit(np.log(n_list), np.log(means), 1)[0])
    return SweepResult(
        ns=np.array(n_list), hs=np.array(hs), amet_means=np.array(means),
        amet_reps=reps_all, slope=slope,
    )


@dataclass
class CoveragePoint:
    t: float
    empirical: float
    envelope: float
    passed: bool


@dataclass
class CoverageResult:
    x: float
    u: float
    alpha: float
    deviations: np.ndarray
    points: list


def coverage_study(
    spec: ExperimentSpec,
    model: bounds_mod.MixingModel,
    t_grid: Sequence[float],
    replications: int,
    x: Optional[float] = None,
    u: Optional[float] = None,
    alpha: float = 1.0,
) -> CoverageResult:
    """Empirical exceedance frequency of the density deviation versus the
    theoretical envelope, replicated over independent trajectories.

    The evaluation point must lie outside the detected oscillation bad set
    of the true density (away from its jumps).
    """
    if replications < 50:
        raise ValueError("need at least 50 replications")
    sys = system_by_spec(spec.system)
    if sys.density_oracle is None:
        raise ValueError("coverage study needs a density oracle")
    kernel = kernel_by_name(spec.kernel)
    noise = NoiseLaw.parse(spec.noise, sys.dimension)
    ball = spec.h * kernel.support_diameter
    if u is None:
        u = ball
    f = sys.density_oracle
    lo, hi = float(sys.domain_lo[0]), float(sys.domain_hi[0])
    if x is None:
        x = lo + 0.5 * (hi - lo)
    bad = regularity.oscillation_bad_set(
        f, u, ball, alpha, resolution=ball / 8.0, domain=(lo, hi)
    )
    for a, b in bad.components:
        if a - bad.resolution <= x <= b + bad.resolution:
            raise ValueError(
                f"evaluation point {x} lies in the oscillation bad set "
                f"component ({a}, {b}); pick a point away from density jumps"
            )
    f_x = float(f(x))
    root = RngState(spec.seed)
    devs = np.empty(replications)
    for rep in range(replications):
        rng = split_stream(root, f"rep{rep}")
        traj = generate_trajectory(sys, spec.n, noise, rng, burnin=spec.burnin)
        fh = density_estimate(traj, kernel, spec.h, np.array([x]))[0]
        devs[rep] = abs(fh - f_x)
    points = []
    for t in t_grid:
        params = bounds_mod.BoundParams(
            n=spec.n, h=spec.h, beta=kernel.scaling_exponent,
            c_k=kernel.seminorm_constant, t=float(t), u=u, alpha=alpha,
            support_diameter=kernel.support_diameter,
        )
        env = bounds_mod.density_deviation_envelope(params, model)
        emp = float(np.mean(devs > t - u**alpha))
        points.append(
            CoveragePoint(
                t=float(t), empirical=emp, envelope=env.clipped,
                passed=emp <= env.clipped + 1e-12,
            )
        )
    return CoverageResult(x=x, u=u, alpha=alpha, deviations=devs, points=points)


# ---------------------------------------------------------------------------
# Reference-table reproduction suite
# ---------------------------------------------------------------------------

# (n, h, kernel, noise, reference AMEf, reference AMET)
_BETA_27_11_ROWS = [
    (10_000, 0.01, "epanechnikov", "none", 0.08234419, 0.008309136),
    (10_000, 0.005, "epanechnikov", "none", 0.09906515, 0.004301326),
    (50_000, 0.007, "epanechnikov", "none", 0.04428149, 0.005530895),
    (200_000, 0.001, "epanechnikov", "none", 0.05107575, 0.001799785),
    (50_000, 0.007, "box1d", "none", 0.05492035, 0.003809815),
    (50_000, 0.007, "epanechnikov", "uniform:0.3", 0.04728425, 0.008303824),
    (200_000, 0.0005, "epanechnikov", "uniform:0.3", 0.07806642, 0.011328519),
    (10_000, 0.01, "epanechnikov", "gaussian:0.3", 0.07473928, 0.020744986),
    (50_000, 0.007, "epanechnikov", "gaussian:0.3", 0.04269281, 0.011423138),
    (200_000, 0.001, "epanechnikov", "gaussian:0.3", 0.05107575, 0.001799785),
    (50_000, 0.007, "box1d", "uniform:0.3", 0.05329131, 0.007722570),
]

_BETA_46_11_ROWS = [
    (10_000, 0.01, "epanechnikov", "none", 0.08165332, 0.01648713),
    (50_000, 0.007, "epanechnikov", "none", 0.04259507, 0.01071092),
    (200_000, 0.001, "epanechnikov", "none", 0.05249840, 1.536396e-04),
    (50_000, 0.007, "epanechnikov", "uniform:0.3", 0.03810643, 0.01482175),
    (50_000, 0.007, "epanechnikov", "gaussian:0.3", 0.03961733, 0.01763502),
    (50_000, 0.007, "box1d", "none", 0.05467709, 0.007079913),
    (50_000, 0.007, "box1d", "uniform:0.3", 0.05109682, 0.01036748),
]


def _tolerance_factor(reference: float) -> float:
    # single unseeded reference runs: Monte Carlo spread dominates.  Below
    # 0.004 the error is set by whether a grid point happens to straddle a
    # jump of the map, so those rows are informational only.
    if reference >= 0.02:
        return 2.0
    if reference >= 0.004:
        return 2.5
    return float("inf")


@dataclass
class SuiteCheck:
    name: str
    spec: ExperimentSpec
    metric: str
    reference: float
    ours: float
    ratio: float
    tolerance: float
    passed: bool


@dataclass
class SuiteReport:
    checks: list
    passed: bool
    extras: dict = field(default_factory=dict)


def _check(name, spec, metric, reference, ours) -> SuiteCheck:
    # one-sided: beating the reference is fine, exceeding it by more than
    # the tolerance factor is not
    ratio = ours / reference
    tol = _tolerance_factor(reference)
    passed = np.isfinite(ours) and ours >= 0.0 and ratio <= tol
    return SuiteCheck(
        name=name, spec=spec, metric=metric, reference=reference, ours=ours,
        ratio=ratio, tolerance=tol, passed=bool(passed),
    )


def reproduce_paper_suite(seed: int = 0) -> SuiteReport:
    """Re-run every reference experiment with our seeds and compare the
    absolute mean errors against the published values, factor tolerances."""
    root = RngState(seed)
    checks: list[SuiteCheck] = []
    extras: dict = {}

    def row_seed(label: str) -> int:
        return split_stream(root, label).seed

    for sys_spec, table in (
        ("beta:27/11", _BETA_27_11_ROWS),
        ("beta:46/11", _BETA_46_11_ROWS),
    ):
        for i, (n, h, kern, noise, ref_f, ref_t) in enumerate(table):
            label = f"{sys_spec}#{i}"
            spec = ExperimentSpec(
                system=sys_spec, n=n, h=h, kernel=kern, noise=noise,
                grid=200, seed=row_seed(label),
            )
            row, _ = run_experiment(spec)
            checks.append(_check(label, spec, "AMEf", ref_f, row.amef))
            checks.append(_check(label, spec, "AMET", ref_t, float(row.amet[0])))

    # Gauss map run: density and map errors over 800 points, plus the map
    # error restricted to [0.2, 1] where the branches are wide.
    gauss_spec = ExperimentSpec(
        system="gauss", n=50_000, h=0.009, kernel="epanechnikov",
        noise="uniform:0.2", grid=800, seed=row_seed("gauss"),
    )
    row, est = run_experiment(gauss_spec)
    checks.append(_check("gauss", gauss_spec, "AMEf", 0.05046933, row.amef))
    checks.append(_check("gauss", gauss_spec, "AMET", 0.05141938, float(row.amet[0])))
    mask = est.points[:, 0] >= 0.2
    amet_restricted = ame(est.t_hat[mask, 0], est.t_true[mask, 0])
    checks.append(
        _check("gauss[0.2,1]", gauss_spec, "AMET", 0.01439787, amet_restricted)
    )
    extras["gauss_amet_restricted"] = amet_restricted

    # Logistic map, grid inside the invariant support.
    logistic_spec = ExperimentSpec(
        system="logistic:3.8", n=50_000, h=0.01, kernel="epanechnikov",
        noise="uniform:0.2", grid=154, seed=row_seed("logistic"),
        grid_domain="support",
    )
    row, _ = run_experiment(logistic_spec)
    checks.append(_check("logistic", logistic_spec, "AMET", 0.004114143,
                         float(row.amet[0])))

    # 2-D matrix map, 100 x 100 grid, coordinatewise errors.
    matrix_spec = ExperimentSpec(
        system="matrixbeta:2.5,3.4,4.6,3.2", n=66_668, h=0.004,
        kernel="box2d", noise="none", grid=100, seed=row_seed("matrix"),
    )
    row, est = run_experiment(matrix_spec)
    checks.append(_check("matrix", matrix_spec, "AMET_x", 0.01882885,
                         float(row.amet[0])))
    checks.append(_check("matrix", matrix_spec, "AMET_y", 0.06723186,
                         float(row.amet[1])))
    diff = est.t_hat - est.t_true
    hist_x, edges = np.histogram(diff[:, 0], bins=100)
    hist_y, _ = np.histogram(diff[:, 1], bins=edges)
    extras["matrix_diff_hist"] = (edges, hist_x, hist_y)

    return SuiteReport(checks=checks, passed=all(c.passed for c in checks),
                       extras=extras)


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_estimate_csv(path, spec: ExperimentSpec, est) -> None:
    """Grid dump: x columns, estimates, truths, absolute errors."""
    d = est.points.shape[1]
    cols = [f"x{j}" for j in range(d)] + ["f_hat", "f_true"]
    cols += [f"t_hat{j}" for j in range(d)] + [f"t_true{j}" for j in range(d)]
    cols += ["abs_err_f", "abs_err_t"]
    with open(path, "w") as fh:
        fh.write(f"# spec: {spec.to_json()}\n")
        fh.write(",".join(cols) + "\n")
        for k in range(est.points.shape[0]):
            vals = [est.points[k, j] for j in range(d)]
            vals.append(est.f_hat[k])
            vals.append(None if est.f_true is None else est.f_true[k])
            vals += [est.t_hat[k, j] for j in range(d)]
            vals += [est.t_true[k, j] for j in range(d)]
            vals.append(
                None if est.f_true is None else abs(est.f_hat[k] - est.f_true[k])
            )
            vals.append(float(np.max(np.abs(est.t_hat[k] - est.t_true[k]))))
            fh.write(",".join(_fmt(float(v) if v is not None else None)
                              for v in vals) + "\n")


def write_table_csv(path, rows) -> None:
    cols = ["system", "n", "h", "kernel", "noise", "grid", "seed",
            "AMEf", "AMET", "AMET_sup", "n_used", "wall_time", "error"]
    with open(path, "w") as fh:
        fh.write("# spec: " + json.dumps(
            [json.loads(r.spec.to_json()) for r in rows], sort_keys=True) + "\n")
        fh.write(",".join(cols) + "\n")
        for r in rows:
            s = r.spec
            amet = None if r.amet is None else float(np.max(r.amet))
            fh.write(",".join([
                s.system, str(s.n), repr(s.h), s.kernel, s.noise, str(s.grid),
                str(r.seed), _fmt(r.amef), _fmt(amet), _fmt(r.amet_sup),
                str(r.n_used), repr(r.wall_time), r.error or "",
            ]) + "\n")


def write_suite_csv(path, report: SuiteReport, seed: int) -> None:
    cols = ["name", "system", "n", "h", "kernel", "noise", "metric",
            "paper_value", "our_value", "ratio", "tolerance", "passed"]
    with open(path, "w") as fh:
        fh.write(f"# spec: {json.dumps({'suite_seed': seed}, sort_keys=True)}\n")
        fh.write(",".join(cols) + "\n")
        for c in report.checks:
            s = c.spec
            fh.write(",".join([
                c.name, s.system, str(s.n), repr(s.h), s.kernel, s.noise,
                c.metric, repr(c.reference), repr(c.ours), repr(c.ratio),
                repr(c.tolerance), str(c.passed),
            ]) + "\n")
