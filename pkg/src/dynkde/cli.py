"""Command-line harness.

Subcommands: estimate, table, sweep, coverage, bounds, regularity,
paper-suite.  Every subcommand accepts ``--config file.toml``; values from
the file act as defaults, explicit flags override them.  All outputs are
CSV with a header row and a leading ``# spec:`` comment carrying the
serialized run spec.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import bounds as bounds_mod
from . import experiments as exp
from . import regularity
from .dynamics import system_by_spec
from .kernels import kernel_by_name


def _parse_t_grid(spec: str) -> np.ndarray:
    """``a:b:steps`` -> linspace(a, b, steps)."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"t-grid must be a:b:steps, got {spec!r}")
    a, b, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if steps < 1:
        raise ValueError("t-grid needs at least one step")
    return np.linspace(a, b, steps)


def _load_config(path: str) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dynkde",
        description="kernel estimation of invariant densities and evolution maps",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subs = {}

    def add(name, **kw):
        sp = subparsers.add_parser(name, **kw)
        sp.add_argument("--config", help="TOML config file; flags override it")
        sp.add_argument("--out", help="output CSV path")
        subs[name] = sp
        return sp

    def add_run_flags(sp, grid_default=200):
        sp.add_argument("--system", help="e.g. beta:27/11, gauss, logistic:3.8")
        sp.add_argument("--n", type=int, help="trajectory length")
        sp.add_argument("--h", type=float, help="bandwidth")
        sp.add_argument("--kernel", default="epanechnikov",
                        help="epanechnikov | box1d | box2d")
        sp.add_argument("--noise", default="none",
                        help="none | uniform:<half-width> | gaussian:<sd>")
        sp.add_argument("--grid", type=int, default=grid_default,
                        help="evaluation points per axis")
        sp.add_argument("--seed", type=int, default=0)

    sp = add("estimate", help="one run: density + map estimate grid dump")
    add_run_flags(sp)
    sp.add_argument("--grid-domain", default="domain",
                    choices=["domain", "support"])

    sp = add("table", help="batch of runs from a TOML [[run]] list")
    add_run_flags(sp)

    sp = add("sweep", help="bandwidth/size sweep with log-log rate fit")
    add_run_flags(sp)
    sp.add_argument("--n-list", help="comma-separated sample sizes")
    sp.add_argument("--xi", type=float, default=1.0 / 3.0,
                    help="bandwidth exponent, h = n^-xi")
    sp.add_argument("--replications", type=int, default=1)

    sp = add("coverage", help="empirical exceedance vs deviation envelope")
    add_run_flags(sp)
    sp.add_argument("--model", default="geometric:1,0.5",
                    help="mixing model, geometric:C,gamma")
    sp.add_argument("--t-grid", default="0:1:20", help="a:b:steps")
    sp.add_argument("--replications", type=int, default=200)
    sp.add_argument("--x", type=float, help="evaluation point")
    sp.add_argument("--u", type=float, help="bias level (default h*diam)")
    sp.add_argument("--alpha", type=float, default=1.0)

    sp = add("bounds", help="density deviation envelope on a t grid")
    sp.add_argument("--model", default="geometric:1,0.5")
    sp.add_argument("--n", type=int, required=False)
    sp.add_argument("--h", type=float)
    sp.add_argument("--beta", type=float, default=0.0,
                    help="kernel scaling exponent")
    sp.add_argument("--cK", dest="c_k", type=float, default=1.0,
                    help="kernel semi-norm constant")
    sp.add_argument("--diam", type=float, default=1.0,
                    help="kernel support diameter")
    sp.add_argument("--u", type=float, help="bias level (default h*diam)")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--t-grid", default="0:1:20")

    sp = add("regularity", help="oscillation bad-set scan of a system target")
    sp.add_argument("--system")
    sp.add_argument("--target", default="density", choices=["density", "map"])
    sp.add_argument("--u", type=float)
    sp.add_argument("--h", type=float)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--resolution", type=float)
    sp.add_argument("--threshold-mode", default="condition",
                    choices=["condition", "raw"])

    sp = add("paper-suite", help="re-run the reference experiments and compare")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--hist-out", help="CSV path for the 2-D error histograms")

    return parser, subs


def _parse_args(argv):
    parser, subs = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        config = _load_config(args.config)
        defaults = {k: v for k, v in config.items() if not isinstance(v, list)}
        subs[args.command].set_defaults(**defaults)
        args = parser.parse_args(argv)
        args._config = config
    else:
        args._config = {}
    return args


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise SystemExit(f"error: --{name.replace('_', '-')} is required")


def _spec_from_args(args, **overrides) -> exp.ExperimentSpec:
    _require(args, "system", "n", "h")
    fields = dict(
        system=args.system, n=args.n, h=args.h, kernel=args.kernel,
        noise=args.noise, grid=args.grid, seed=args.seed,
    )
    fields.update(overrides)
    return exp.ExperimentSpec(**fields)


def _write_simple_csv(path, spec_obj, columns, rows):
    lines = [f"# spec: {json.dumps(spec_obj, sort_keys=True)}",
             ",".join(columns)]
    for row in rows:
        lines.append(",".join(
            "" if v is None else (repr(v) if isinstance(v, float) else str(v))
            for v in row
        ))
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_estimate(args) -> int:
    spec = _spec_from_args(args, grid_domain=args.grid_domain)
    row, est = exp.run_experiment(spec)
    out = args.out or "estimate.csv"
    exp.write_estimate_csv(out, spec, est)
    amef = "n/a" if row.amef is None else f"{row.amef:.6g}"
    print(f"AMEf={amef} AMET={row.amet_sup:.6g} -> {out}")
    return 0


def _cmd_table(args) -> int:
    runs = args._config.get("run", [])
    if not runs:
        # no [[run]] entries: treat the flags themselves as a single run
        specs = [_spec_from_args(args)]
    else:
        specs = []
        for entry in runs:
            merged = dict(
                system=args.system, n=args.n, h=args.h, kernel=args.kernel,
                noise=args.noise, grid=args.grid, seed=args.seed,
            )
            merged.update(entry)
            if merged["system"] is None or merged["n"] is None or merged["h"] is None:
                raise SystemExit("error: each [[run]] needs system, n, h")
            specs.append(exp.ExperimentSpec(**merged))
    rows = exp.run_table(specs)
    out = args.out or "table.csv"
    exp.write_table_csv(out, rows)
    for r in rows:
        if r.error:
            print(f"{r.spec.system} n={r.spec.n}: ERROR {r.error}")
        else:
            amef = "n/a" if r.amef is None else f"{r.amef:.6g}"
            print(f"{r.spec.system} n={r.spec.n} h={r.spec.h}: "
                  f"AMEf={amef} AMET={r.amet_sup:.6g}")
    print(f"-> {out}")
    return 0


def _cmd_sweep(args) -> int:
    _require(args, "system", "n_list")
    n_list = [int(v) for v in str(args.n_list).split(",")]
    base = exp.ExperimentSpec(
        system=args.system, n=n_list[-1], h=1.0, kernel=args.kernel,
        noise=args.noise, grid=args.grid, seed=args.seed,
        replications=args.replications,
    )
    result = exp.convergence_sweep(base, n_list, args.xi)
    rows = [
        (int(n), float(h), float(m), result.slope)
        for n, h, m in zip(result.ns, result.hs, result.amet_means)
    ]
    _write_simple_csv(
        args.out, json.loads(base.to_json()) | {"xi": args.xi, "n_list": n_list},
        ["n", "h", "amet_mean", "slope"], rows,
    )
    print(f"fitted log-log AMET slope: {result.slope:.4f}")
    return 0


def _cmd_coverage(args) -> int:
    spec = _spec_from_args(args)
    model = bounds_mod.MixingModel.parse(args.model)
    t_grid = _parse_t_grid(args.t_grid)
    result = exp.coverage_study(
        spec, model, t_grid, args.replications, x=args.x, u=args.u,
        alpha=args.alpha,
    )
    rows = [(p.t, p.empirical, p.envelope, p.passed) for p in result.points]
    meta = json.loads(spec.to_json()) | {
        "model": args.model, "x": result.x, "u": result.u,
        "alpha": result.alpha, "replications": args.replications,
    }
    _write_simple_csv(args.out, meta, ["t", "empirical", "envelope", "passed"], rows)
    n_fail = sum(not p.passed for p in result.points)
    print(f"{len(rows)} t-points, {n_fail} exceed the envelope")
    return 0


def _cmd_bounds(args) -> int:
    _require(args, "n", "h")
    model = bounds_mod.MixingModel.parse(args.model)
    t_grid = _parse_t_grid(args.t_grid)
    u = args.u if args.u is not None else args.h * args.diam
    rows = []
    for t in t_grid:
        params = bounds_mod.BoundParams(
            n=args.n, h=args.h, beta=args.beta, c_k=args.c_k, t=float(t),
            u=u, alpha=args.alpha, support_diameter=args.diam,
        )
        env = bounds_mod.density_deviation_envelope(params, model)
        rows.append((float(t), env.raw, env.clipped))
    meta = {
        "model": args.model, "n": args.n, "h": args.h, "beta": args.beta,
        "c_k": args.c_k, "u": u, "alpha": args.alpha, "diam": args.diam,
    }
    _write_simple_csv(args.out, meta, ["t", "raw_bound", "clipped_bound"], rows)
    return 0


def _cmd_regularity(args) -> int:
    _require(args, "system", "u", "h")
    sys_obj = system_by_spec(args.system)
    if args.target == "density":
        if sys_obj.density_oracle is None:
            raise SystemExit(f"error: {args.system} has no density oracle")
        g = sys_obj.density_oracle
    else:
        if sys_obj.dimension == 1:
            g = lambda xs: sys_obj.map_grid(np.asarray(xs)[:, None])[:, 0]
        else:
            g = lambda xs: sys_obj.map_grid(np.asarray(xs))
    resolution = args.resolution if args.resolution is not None else args.h / 8.0
    if sys_obj.dimension == 1:
        domain = (float(sys_obj.domain_lo[0]), float(sys_obj.domain_hi[0]))
    else:
        domain = tuple(
            (float(sys_obj.domain_lo[j]), float(sys_obj.domain_hi[j]))
            for j in range(2)
        )
    report = regularity.oscillation_bad_set(
        g, args.u, args.h, args.alpha, resolution=resolution, domain=domain,
        threshold_mode=args.threshold_mode,
    )
    meta = {
        "system": args.system, "target": args.target, "u": args.u,
        "h": args.h, "alpha": args.alpha, "threshold": report.threshold,
        "threshold_mode": report.threshold_mode,
        "measure_estimate": report.measure_estimate,
        "resolution": report.resolution,
        "measure_slack": report.measure_slack,
    }
    if sys_obj.dimension == 1:
        rows = [(i, a, b) for i, (a, b) in enumerate(report.components)]
        cols = ["component", "lo", "hi"]
    else:
        rows = [
            (i, a0, b0, a1, b1)
            for i, ((a0, b0), (a1, b1)) in enumerate(report.components)
        ]
        cols = ["component", "lo0", "hi0", "lo1", "hi1"]
    _write_simple_csv(args.out, meta, cols, rows)
    print(f"{len(rows)} flagged components, "
          f"measure ~ {report.measure_estimate:.6g}")
    return 0


def _cmd_paper_suite(args) -> int:
    report = exp.reproduce_paper_suite(seed=args.seed)
    out = args.out or "paper_suite.csv"
    exp.write_suite_csv(out, report, args.seed)
    for c in report.checks:
        status = "pass" if c.passed else "FAIL"
        print(f"{status}  {c.name:24s} {c.metric:7s} "
              f"paper={c.reference:.8g} ours={c.ours:.8g} "
              f"ratio={c.ratio:.3f} tol={c.tolerance:.1f}")
    if args.hist_out and "matrix_diff_hist" in report.extras:
        edges, hist_x, hist_y = report.extras["matrix_diff_hist"]
        rows = [
            (float(edges[i]), float(edges[i + 1]), int(hist_x[i]), int(hist_y[i]))
            for i in range(hist_x.size)
        ]
        _write_simple_csv(args.hist_out, {"suite_seed": args.seed},
                          ["bin_lo", "bin_hi", "count_x", "count_y"], rows)
    n_fail = sum(not c.passed for c in report.checks)
    print(f"{len(report.checks) - n_fail}/{len(report.checks)} checks passed "
          f"-> {out}")
    return 0 if report.passed else 2


_COMMANDS = {
    "estimate": _cmd_estimate,
    "table": _cmd_table,
    "sweep": _cmd_sweep,
    "coverage": _cmd_coverage,
    "bounds": _cmd_bounds,
    "regularity": _cmd_regularity,
    "paper-suite": _cmd_paper_suite,
}


def main(argv=None) -> int:
    args = _parse_args(sys.argv[1:] if argv is None else list(argv))
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
