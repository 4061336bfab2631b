"""Experiment runner: repeated seeded runs of a classical or hybrid solver."""

from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hybridsr import hybrid
from hybridsr.hybrid import AdaptationConfig, ConfigError, HybridConfig
from hybridsr.kernels import KernelKind, Status, iterate, random_start
from hybridsr.linalg import LinearSystem, NormKind
from hybridsr.problems import DEFAULT_SEED, ProblemSpec, load_system
from hybridsr.trace import ConvergenceTrace, write_atomic

OUTPUT_ENV = "HYBRIDSR_OUTPUT_DIR"


class Method(str, enum.Enum):
    JACOBI = "jacobi"
    GAUSS_SEIDEL = "gauss_seidel"
    JACOBI_SR = "jacobi_sr"
    GAUSS_SEIDEL_SR = "gauss_seidel_sr"
    JBUA = "jbua"
    GSBUA = "gsbua"

    @property
    def is_hybrid(self) -> bool:
        return self in (Method.JBUA, Method.GSBUA)

    @property
    def kernel(self) -> KernelKind:
        return {
            Method.JACOBI: KernelKind.JACOBI,
            Method.GAUSS_SEIDEL: KernelKind.GAUSS_SEIDEL,
            Method.JACOBI_SR: KernelKind.JACOBI_SR,
            Method.GAUSS_SEIDEL_SR: KernelKind.GAUSS_SEIDEL_SR,
            Method.JBUA: KernelKind.JACOBI_SR,
            Method.GSBUA: KernelKind.GAUSS_SEIDEL_SR,
        }[self]


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemSpec | Path
    method: Method
    omegas: tuple[float, ...]
    threshold: float = 1e-12
    max_iterations: int = 1000
    runs: int = 10
    seed: int = DEFAULT_SEED
    omega_bounds: tuple[float, float] = (0.0, 2.0)
    norm: NormKind = NormKind.EUCLIDEAN

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        if self.method.is_hybrid:
            if len(self.omegas) < 2 or len(self.omegas) % 2:
                raise ConfigError("hybrid methods take one omega per individual (an even count)")
        elif len(self.omegas) != 1:
            raise ConfigError("classical methods take exactly one omega")
        if not self.threshold > 0:
            raise ConfigError("threshold must be positive")
        if self.max_iterations < 1 or self.runs < 1:
            raise ConfigError("max_iterations and runs must be positive")

    def system(self) -> LinearSystem:
        if isinstance(self.problem, ProblemSpec):
            return self.problem.build()
        return load_system(self.problem)

    @property
    def problem_name(self) -> str:
        if isinstance(self.problem, ProblemSpec):
            return self.problem.name
        return str(self.problem)


@dataclass
class RunOutcome:
    seed: int
    status: Status
    iterations: int
    final_error: float
    trace: ConvergenceTrace = field(repr=False)


def run_seeds(seed: int, runs: int) -> list[int]:
    """Independent 64-bit seeds for each run, derived from one experiment seed."""
    children = np.random.SeedSequence(seed).spawn(runs)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def hybrid_config(cfg: ExperimentConfig, seed: int) -> HybridConfig:
    lo, hi = cfg.omega_bounds
    return HybridConfig(
        kernel=cfg.method.kernel,
        population_size=len(cfg.omegas),
        threshold=cfg.threshold,
        max_generations=cfg.max_iterations,
        adaptation=AdaptationConfig(omega_low=lo, omega_high=hi),
        seed=seed,
        initial_omegas=cfg.omegas,
        norm=cfg.norm,
    )


def run_once(sys: LinearSystem, cfg: ExperimentConfig, seed: int) -> RunOutcome:
    if cfg.method.is_hybrid:
        res = hybrid.run(sys, hybrid_config(cfg, seed))
        return RunOutcome(seed, res.status, res.generations, res.best.error, res.trace)
    x0 = random_start(sys.n, np.random.default_rng(seed))
    res = iterate(sys, cfg.method.kernel, cfg.omegas[0], x0, cfg.threshold, cfg.max_iterations, norm=cfg.norm)
    return RunOutcome(seed, res.status, res.iterations, res.final_error, res.trace)


def run_experiment(cfg: ExperimentConfig, workers: int = 1, sys: LinearSystem | None = None) -> list[RunOutcome]:
    sys = cfg.system() if sys is None else sys
    seeds = run_seeds(cfg.seed, cfg.runs)
    if workers <= 1:
        return [run_once(sys, cfg, s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: run_once(sys, cfg, s), seeds))


def geometric_mean(values) -> float:
    values = [v for v in values if math.isfinite(v)]
    if not values:
        return math.nan
    if any(v == 0.0 for v in values):
        return 0.0
    return math.exp(sum(math.log(v) for v in values) / len(values))


def summarize(cfg: ExperimentConfig, outcomes: list[RunOutcome]) -> dict:
    """Averages over non-diverged runs; diverged runs are only counted."""
    kept = [o for o in outcomes if o.status is not Status.DIVERGED]
    n_div = len(outcomes) - len(kept)
    n_conv = sum(o.status is Status.CONVERGED for o in outcomes)
    geo = geometric_mean(o.final_error for o in kept)
    if n_div:
        status = Status.DIVERGED
    elif n_conv == len(outcomes) and geo < cfg.threshold:
        status = Status.CONVERGED
    else:
        status = Status.MAX_ITERATIONS
    return {
        "problem": cfg.problem_name,
        "method": cfg.method.value,
        "omegas": list(cfg.omegas),
        "threshold": cfg.threshold,
        "max_iterations": cfg.max_iterations,
        "seed": cfg.seed,
        "runs": [
            {"seed": o.seed, "status": o.status.value, "iterations": o.iterations, "final_error": o.final_error}
            for o in outcomes
        ],
        "converged_runs": n_conv,
        "diverged_runs": n_div,
        "mean_iterations": (sum(o.iterations for o in kept) / len(kept)) if kept else None,
        "geomean_final_error": geo if kept else None,
        "status": status.value,
    }


def output_dir(override: str | Path | None = None) -> Path:
    if override is not None:
        return Path(override)
    return Path(os.environ.get(OUTPUT_ENV, "results"))


def write_experiment(out: Path, outcomes: list[RunOutcome], summary: dict) -> None:
    for i, o in enumerate(outcomes):
        write_atomic(out / f"run_{i:02d}.csv", o.trace.to_csv())
    write_atomic(out / "summary.json", json.dumps(summary, indent=2, allow_nan=True) + "\n")
