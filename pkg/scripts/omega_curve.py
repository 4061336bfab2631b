"""Spectral radius and classical iteration count over an omega grid, as CSV plot data.

    python scripts/omega_curve.py --problem nsq --kernel jacobi_sr --out results/nsq_curve.csv
"""

import argparse
import csv
import io
from pathlib import Path

import numpy as np

from hybridsr.cli import sweep_rows
from hybridsr.kernels import KernelKind
from hybridsr.problems import DEFAULT_SEED, ProblemSpec
from hybridsr.spectral import argmin_omega, omega_sweep
from hybridsr.trace import write_atomic


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--problem", default="nsq")
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--kernel", default="jacobi_sr", choices=[k.value for k in KernelKind])
    ap.add_argument("--lo", type=float, default=0.01)
    ap.add_argument("--hi", type=float, default=1.99)
    ap.add_argument("--step", type=float, default=0.01)
    ap.add_argument("--threshold", type=float, default=1e-6)
    ap.add_argument("--max", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--out", type=Path, default=Path("results/omega_curve.csv"))
    args = ap.parse_args()

    system = ProblemSpec.parse(args.problem, n=args.n, seed=args.seed).build()
    kernel = KernelKind(args.kernel)
    grid = np.round(np.arange(args.lo, args.hi + args.step / 2, args.step), 10)
    rows = sweep_rows(system, kernel, grid, args.threshold, args.max, args.seed)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega", "iterations", "spectral_radius"])
    w.writerows((repr(float(o)), c, repr(r)) for o, c, r in rows)
    write_atomic(args.out, buf.getvalue())
    best = argmin_omega(omega_sweep(system, kernel, grid, seed=args.seed))
    print(f"{len(rows)} grid points written to {args.out}; argmin rho at omega = {best}")


if __name__ == "__main__":
    main()
