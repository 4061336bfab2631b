"""Stationary sweeps (Jacobi, JOR, Gauss-Seidel, SOR) and a fixed-omega driver."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from hybridsr.linalg import (
    DimensionError,
    LinearSystem,
    NormKind,
    error_norm,
    row_dots,
)
from hybridsr.trace import PARALLEL, ConvergenceTrace, TraceRecord, sweep_cost

DIVERGENCE_CAP = 1e15


class KernelKind(str, enum.Enum):
    JACOBI = "jacobi"
    JACOBI_SR = "jacobi_sr"
    GAUSS_SEIDEL = "gauss_seidel"
    GAUSS_SEIDEL_SR = "gauss_seidel_sr"

    @property
    def is_jacobi(self) -> bool:
        return self in (KernelKind.JACOBI, KernelKind.JACOBI_SR)

    @property
    def relaxed(self) -> bool:
        return self in (KernelKind.JACOBI_SR, KernelKind.GAUSS_SEIDEL_SR)


class Status(str, enum.Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    DIVERGED = "diverged"


def _check(sys: LinearSystem, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (sys.n,):
        raise DimensionError(f"expected vector of length {sys.n}, got shape {x.shape}")
    return x


def jor_sweep(sys: LinearSystem, x, omega: float, workers: int = 1) -> np.ndarray:
    """One Jacobi over-relaxation step ``x + omega * D^-1 (b - A x)``.

    Every component reads only the old ``x``, so rows may be split across
    ``workers`` without changing a single bit of the result.
    """
    x = _check(sys, x)
    r = sys.b - row_dots(sys.a, x, workers)
    return x + (omega * r) / sys.diag


def jacobi_sweep(sys: LinearSystem, x, workers: int = 1) -> np.ndarray:
    return jor_sweep(sys, x, 1.0, workers)


def sor_sweep(sys: LinearSystem, x, omega: float) -> np.ndarray:
    """One successive over-relaxation step, rows updated in ascending order in place."""
    x = _check(sys, x).copy()
    a, b, d = sys.a, sys.b, sys.diag
    for i in range(sys.n):
        s = np.cumsum(a[i] * x)[-1]
        x[i] = x[i] + (omega * (b[i] - s)) / d[i]
    return x


def gauss_seidel_sweep(sys: LinearSystem, x) -> np.ndarray:
    return sor_sweep(sys, x, 1.0)


def sweep(sys: LinearSystem, x, kernel: KernelKind | str, omega: float = 1.0, workers: int = 1) -> np.ndarray:
    """Dispatch one sweep; the unrelaxed kernels ignore ``omega``."""
    kernel = KernelKind(kernel)
    w = omega if kernel.relaxed else 1.0
    if kernel.is_jacobi:
        return jor_sweep(sys, x, w, workers)
    return sor_sweep(sys, x, w)


@dataclass
class IterateResult:
    x: np.ndarray
    iterations: int
    final_error: float
    status: Status
    trace: ConvergenceTrace = field(repr=False)


def random_start(n: int, rng: np.random.Generator, domain=(-30.0, 30.0)) -> np.ndarray:
    lo, hi = domain
    return rng.uniform(lo, hi, n)


def iterate(
    sys: LinearSystem,
    kernel: KernelKind | str,
    omega: float,
    x0,
    threshold: float,
    max_iter: int,
    divergence_cap: float = DIVERGENCE_CAP,
    norm: NormKind | str = NormKind.EUCLIDEAN,
    workers: int = 1,
) -> IterateResult:
    """Repeat one kernel at fixed omega until converged, diverged, or out of budget.

    Any omega is accepted, including values outside (0, 2).
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    kernel = KernelKind(kernel)
    x = _check(sys, x0).copy()
    unit = sweep_cost(kernel, sys.n, PARALLEL)
    trace = ConvergenceTrace()
    status = Status.MAX_ITERATIONS
    err = math.inf
    k = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, max_iter + 1):
            x = sweep(sys, x, kernel, omega, workers)
            err = error_norm(sys, x, norm, workers)
            trace.append(TraceRecord(k, err, (float(omega),), k * unit, (err,)))
            if not math.isfinite(err) or err > divergence_cap:
                status = Status.DIVERGED
                break
            if err < threshold:
                status = Status.CONVERGED
                break
    return IterateResult(x=x, iterations=k, final_error=err, status=status, trace=trace)
