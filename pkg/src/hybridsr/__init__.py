"""Jacobi-SR and Gauss-Seidel-SR solvers with self-adapted relaxation factors."""

from hybridsr.hybrid import AdaptationConfig, HybridConfig, HybridResult, RecombinationPolicy
from hybridsr.hybrid import run as solve_hybrid
from hybridsr.kernels import KernelKind, Status, iterate
from hybridsr.linalg import LinearSystem, NormKind, error_norm
from hybridsr.problems import ProblemSpec, gen_nsq, gen_p0, gen_table6, gen_table7, load_system, save_system

__all__ = [
    "AdaptationConfig",
    "HybridConfig",
    "HybridResult",
    "KernelKind",
    "LinearSystem",
    "NormKind",
    "ProblemSpec",
    "RecombinationPolicy",
    "Status",
    "error_norm",
    "gen_nsq",
    "gen_p0",
    "gen_table6",
    "gen_table7",
    "iterate",
    "load_system",
    "save_system",
    "solve_hybrid",
]
