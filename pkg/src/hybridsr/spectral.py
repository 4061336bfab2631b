"""Iteration matrices, spectral-radius estimation and convergence certificates."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from hybridsr.kernels import KernelKind
from hybridsr.linalg import DimensionError, LinearSystem, SingularDiagonalError, dlu_split, mat_inf_norm


class SpectralRadiusInconclusive(RuntimeError):
    """Raised when neither estimator settles; ``estimate`` holds the best value seen."""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


def _square(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def _diagonal(a: np.ndarray) -> np.ndarray:
    d = np.diagonal(a).copy()
    if np.any(d == 0.0):
        raise SingularDiagonalError("iteration matrix needs a nonzero diagonal")
    return d


def jacobi_iteration_matrix(a) -> np.ndarray:
    """``-D^-1 (L + U)``: zero diagonal, off-diagonal entries ``-a_ij / a_ii``."""
    a = _square(a)
    d = _diagonal(a)
    h = -a / d[:, None]
    np.fill_diagonal(h, 0.0)
    return h


def jor_iteration_matrix(a, omega: float) -> np.ndarray:
    """``(1 - omega) I + omega * H_J``."""
    h = omega * jacobi_iteration_matrix(a)
    h[np.diag_indices_from(h)] = 1.0 - omega
    return h


def sor_iteration_matrix(a, omega: float) -> np.ndarray:
    """``(D + omega L)^-1 ((1 - omega) D - omega U)``."""
    a = _square(a)
    _diagonal(a)
    d, l, u = dlu_split(a)
    return np.linalg.solve(d + omega * l, (1.0 - omega) * d - omega * u)


def iteration_matrix(a, kernel: KernelKind | str, omega: float = 1.0) -> np.ndarray:
    kernel = KernelKind(kernel)
    w = omega if kernel.relaxed else 1.0
    if kernel.is_jacobi:
        return jor_iteration_matrix(a, w)
    return sor_iteration_matrix(a, w)


def _power_estimate(m: np.ndarray, tol: float, max_steps: int, rng: np.random.Generator):
    """Plain power iteration; returns (estimate, converged)."""
    v = rng.standard_normal(m.shape[0])
    v /= np.linalg.norm(v)
    hist: list[float] = []
    for _ in range(max_steps):
        w = m @ v
        r = float(np.linalg.norm(w))
        if r == 0.0:
            return 0.0, True
        v = w / r
        hist.append(r)
        if len(hist) >= 3:
            d1 = hist[-1] - hist[-2]
            d0 = hist[-2] - hist[-3]
            if d1 == 0.0:
                return r, True
            if d0 != 0.0:
                q = abs(d1 / d0)
                # accept only geometric convergence whose remaining tail is below tol
                if q < 0.95 and abs(d1) * q / (1.0 - q) <= tol * r and abs(d1) <= tol * r:
                    return r, True
    return (hist[-1] if hist else 0.0), False


def _growth_rate_estimate(m: np.ndarray, tol: float, max_doublings: int = 80):
    """rho = lim ||M^(2^k)||^(1/2^k), computed in log space with renormalisation."""
    nrm = mat_inf_norm(m)
    if nrm == 0.0:
        return 0.0, True
    p = m / nrm
    log_scale = math.log(nrm)
    prev = nrm
    for k in range(1, max_doublings + 1):
        p = p @ p
        log_scale *= 2.0
        nrm = mat_inf_norm(p)
        if nrm == 0.0 or not math.isfinite(nrm):
            return (0.0, True) if nrm == 0.0 else (prev, False)
        p /= nrm
        log_scale += math.log(nrm)
        est = math.exp(log_scale / 2.0**k)
        if k >= 4 and abs(est - prev) <= tol * est:
            return est, True
        prev = est
    return prev, False


def spectral_radius(m, tol: float = 1e-8, max_steps: int = 2000, seed: int = 0) -> float:
    """Estimate the largest eigenvalue magnitude of a square matrix.

    Power iteration from a seeded random start is tried first. When it stalls
    (complex or tied dominant eigenvalues, or slow geometric convergence) the
    estimate falls back to the growth rate of repeated squares, which converges
    for every matrix.
    """
    m = _square(m)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    rng = np.random.default_rng(seed)
    est, ok = _power_estimate(m, tol, max_steps, rng)
    if ok:
        return est
    est2, ok2 = _growth_rate_estimate(m, tol)
    if ok2:
        return est2
    raise SpectralRadiusInconclusive(f"spectral radius did not settle to tol={tol}", est2)


class Verdict(str, enum.Enum):
    NORM_CONTRACTION = "norm_contraction"
    SPECTRAL_CONTRACTION = "spectral_contraction"
    DIVERGENT = "divergent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConvergenceCertificate:
    inf_norm: float
    spectral_radius_estimate: float | None
    verdict: Verdict


def certify(
    sys: LinearSystem, kernel: KernelKind | str, omega: float, tol: float = 1e-8, seed: int = 0
) -> ConvergenceCertificate:
    h = iteration_matrix(sys.a, kernel, omega)
    inf_norm = mat_inf_norm(h)
    if inf_norm < 1.0:
        return ConvergenceCertificate(inf_norm, None, Verdict.NORM_CONTRACTION)
    rho = spectral_radius(h, tol=tol, seed=seed)
    if rho < 1.0 - tol:
        verdict = Verdict.SPECTRAL_CONTRACTION
    elif rho > 1.0 + tol:
        verdict = Verdict.DIVERGENT
    else:
        verdict = Verdict.INCONCLUSIVE
    return ConvergenceCertificate(inf_norm, rho, verdict)


class SweepPoint(NamedTuple):
    omega: float
    spectral_radius: float
    settled: bool


def omega_sweep(
    sys: LinearSystem,
    kernel: KernelKind | str,
    omegas,
    tol: float = 1e-8,
    seed: int = 0,
    workers: int = 1,
) -> list[SweepPoint]:
    """Spectral radius of the kernel's iteration matrix at each grid point."""
    omegas = [float(w) for w in omegas]
    if not omegas:
        raise ValueError("omega grid is empty")

    def point(w: float) -> SweepPoint:
        h = iteration_matrix(sys.a, kernel, w)
        try:
            return SweepPoint(w, spectral_radius(h, tol=tol, seed=seed), True)
        except SpectralRadiusInconclusive as exc:
            return SweepPoint(w, exc.estimate, False)

    if workers <= 1:
        return [point(w) for w in omegas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(point, omegas))


def argmin_omega(points: list[SweepPoint]) -> float:
    """Grid point with the smallest settled spectral radius (first one on ties)."""
    settled = [p for p in points if p.settled]
    if not settled:
        raise ValueError("no grid point settled")
    return min(settled, key=lambda p: p.spectral_radius).omega
