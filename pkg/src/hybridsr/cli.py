"""Command-line entry point: ``hybridsr {solve,table,sweep,cost,gen}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from hybridsr.bench import ExperimentConfig, Method, output_dir, run_experiment, run_seeds, summarize, write_experiment
from hybridsr.hybrid import ConfigError
from hybridsr.kernels import KernelKind, Status, iterate, random_start
from hybridsr.problems import DEFAULT_SEED, ProblemSpec, load_system, save_system
from hybridsr.spectral import omega_sweep
from hybridsr.tables import build_table
from hybridsr.trace import PARALLEL, SEQUENTIAL, sweep_cost, write_atomic


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _grid(text: str) -> tuple[float, ...]:
    """``a,b,c`` or ``start:stop:step`` (stop inclusive)."""
    if ":" in text:
        start, stop, step = (float(t) for t in text.split(":"))
        count = int(round((stop - start) / step)) + 1
        return tuple(round(start + k * step, 12) for k in range(count))
    return _floats(text)


def _problem(text: str, n: int, seed: int):
    path = Path(text)
    if path.exists():
        return path
    try:
        return ProblemSpec.parse(text, n=n, seed=seed)
    except ValueError:
        raise ValueError(f"unknown problem {text!r} and no such file") from None


def _system(problem):
    return load_system(problem) if isinstance(problem, Path) else problem.build()


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", required=True,
                   help="p0, nsq, table6_a..table6_d, table7_1..table7_10, or a system file")
    p.add_argument("--n", type=int, default=100, help="problem order for generated systems")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def cmd_solve(args) -> int:
    problem = _problem(args.problem, args.n, args.seed)
    lo, hi = args.omega_bounds
    cfg = ExperimentConfig(problem, Method(args.method), args.omegas, args.threshold, args.max,
                           args.runs, args.seed, (lo, hi), args.norm)
    outcomes = run_experiment(cfg, workers=args.workers)
    summary = summarize(cfg, outcomes)
    out = output_dir(args.out)
    write_experiment(out, outcomes, summary)
    print(f"{cfg.method.value} on {cfg.problem_name}: {summary['status']} "
          f"({summary['converged_runs']}/{cfg.runs} converged, {summary['diverged_runs']} diverged, "
          f"mean iterations {summary['mean_iterations']}, geomean error {summary['geomean_final_error']})")
    print(f"wrote {out}/summary.json")
    return 0 if summary["status"] == Status.CONVERGED.value else 1


def cmd_table(args) -> int:
    report = build_table(args.table_id, seed=args.seed)
    out = output_dir(args.out)
    write_atomic(out / f"table_{args.table_id}.json", json.dumps(report.to_dict(), indent=2, default=str) + "\n")
    print(f"Table {report.table}: {report.title}")
    for row in report.rows:
        print(f"  [{row.verdict}] {row.name}: artifact={row.artifact} published={row.published} ({row.tolerance})")
    print(f"wrote {out}/table_{args.table_id}.json")
    return 0 if report.passed else 1


def sweep_rows(system, kernel: KernelKind, grid, threshold: float, max_iter: int, seed: int):
    """(omega, iterations or DIVERGED, spectral radius) per grid point."""
    rhos = omega_sweep(system, kernel, grid, seed=seed)
    x0 = random_start(system.n, np.random.default_rng(run_seeds(seed, 1)[0]))
    rows = []
    for w, point in zip(grid, rhos):
        res = iterate(system, kernel, w, x0, threshold, max_iter)
        if res.status is Status.DIVERGED:
            count = "DIVERGED"
        elif res.status is Status.MAX_ITERATIONS:
            count = f">{max_iter}"
        else:
            count = res.iterations
        rows.append((w, count, point.spectral_radius))
    return rows


def cmd_sweep(args) -> int:
    system = _system(_problem(args.problem, args.n, args.seed))
    rows = sweep_rows(system, KernelKind(args.kernel), args.grid, args.threshold, args.max, args.seed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega", "iterations", "spectral_radius"])
    for omega, count, rho in rows:
        w.writerow([repr(omega), count, repr(rho)])
    out = output_dir(args.out) / "sweep.csv"
    write_atomic(out, buf.getvalue())
    sys.stdout.write(buf.getvalue())
    return 0


def cost_report(n: int, method: Method, iterations: int | None) -> dict:
    kernel = method.kernel
    par, seq = sweep_cost(kernel, n, PARALLEL), sweep_cost(kernel, n, SEQUENTIAL)
    report = {
        "n": n,
        "method": method.value,
        "kernel": kernel.value,
        "units_per_sweep": {PARALLEL: par, SEQUENTIAL: seq},
        "observed_iterations": iterations,
    }
    if iterations is not None:
        report["total_units"] = {PARALLEL: par * iterations, SEQUENTIAL: seq * iterations}
    return report


def cmd_cost(args) -> int:
    method = Method(args.method)
    if args.problem is None:
        report = cost_report(args.n, method, None)
    else:
        problem = _problem(args.problem, args.n, args.seed)
        omegas = args.omegas or ((0.5, 1.5) if method.is_hybrid else (1.0,))
        cfg = ExperimentConfig(problem, method, omegas, args.threshold, args.max, 1, args.seed)
        outcome = run_experiment(cfg)[0]
        report = cost_report(cfg.system().n, method, outcome.iterations)
        report["status"] = outcome.status.value
    text = json.dumps(report, indent=2) + "\n"
    write_atomic(output_dir(args.out) / "cost.json", text)
    sys.stdout.write(text)
    return 0


def cmd_gen(args) -> int:
    spec = ProblemSpec.parse(args.problem, n=args.n, seed=args.seed)
    path = Path(args.output) if args.output else output_dir(args.out) / f"{spec.name}_n{spec.n}.txt"
    path.parent.mkdir(parents=True, exist_ok=True)
    save_system(spec.build(), path)
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output directory (default $HYBRIDSR_OUTPUT_DIR or ./results)")
    parser = argparse.ArgumentParser(prog="hybridsr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="run a solver several times and write traces + summary")
    _add_problem_args(p)
    p.add_argument("--method", required=True, choices=[m.value for m in Method])
    p.add_argument("--omegas", required=True, type=_floats, help="one for classical, N for hybrids")
    p.add_argument("--threshold", type=float, default=1e-12)
    p.add_argument("--max", type=int, default=1000, help="iteration / generation budget")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--omega-bounds", type=_floats, default=(0.0, 2.0))
    p.add_argument("--norm", default="euclidean", choices=["euclidean", "infinity", "one"])
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", parents=[common], help="re-run one of the published tables (1-7)")
    p.add_argument("table_id", type=int, choices=range(1, 8))
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("sweep", parents=[common], help="iterations and spectral radius over an omega grid")
    _add_problem_args(p)
    p.add_argument("--kernel", default="jacobi_sr", choices=[k.value for k in KernelKind])
    p.add_argument("--grid", required=True, type=_grid, help="a,b,c or start:stop:step")
    p.add_argument("--threshold", type=float, default=1e-6)
    p.add_argument("--max", type=int, default=10000)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cost", parents=[common], help="simulated time units per sweep on an n^2-processor machine")
    p.add_argument("--problem", default=None)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--method", default="jbua", choices=[m.value for m in Method])
    p.add_argument("--omegas", type=_floats, default=None)
    p.add_argument("--threshold", type=float, default=1e-12)
    p.add_argument("--max", type=int, default=1000)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("gen", parents=[common], help="write a generated problem to a system file")
    p.add_argument("--problem", required=True)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
