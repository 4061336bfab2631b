"""Self-adaptive hybrid of stationary SR sweeps and a small evolutionary loop.

With ``kernel=jacobi_sr`` this is the Jacobi-SR based uniform-adaptive hybrid
(JBUA); with ``kernel=gauss_seidel_sr`` it is the Gauss-Seidel sibling (GSBUA).
One generation is recombine -> mutate (one SR sweep per individual at its own
omega) -> pairwise omega adaptation -> best-half selection.

Random draws happen in a fixed order: initial vectors row-major, then initial
omegas by individual; each generation draws ``(p_x, p_y)`` per ranked pair
before any parallel work starts.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from hybridsr.kernels import DIVERGENCE_CAP, KernelKind, Status, sweep
from hybridsr.linalg import DimensionError, LinearSystem, NormKind, error_norm
from hybridsr.trace import PARALLEL, ConvergenceTrace, TraceRecord, sweep_cost


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Individual:
    x: np.ndarray
    omega: float
    error: float


@dataclass(frozen=True)
class Population:
    individuals: tuple[Individual, ...]
    generation: int = 0

    def __post_init__(self):
        object.__setattr__(self, "individuals", tuple(self.individuals))
        if not self.individuals:
            raise ConfigError("population is empty")
        n = self.individuals[0].x.shape
        if any(ind.x.shape != n for ind in self.individuals):
            raise DimensionError("individuals have different dimensions")

    def __len__(self):
        return len(self.individuals)

    @property
    def xs(self) -> np.ndarray:
        return np.stack([ind.x for ind in self.individuals])

    @property
    def omegas(self) -> tuple[float, ...]:
        return tuple(ind.omega for ind in self.individuals)

    @property
    def errors(self) -> tuple[float, ...]:
        return tuple(ind.error for ind in self.individuals)

    def best(self) -> Individual:
        return self.individuals[rank(self.errors)[0]]


@dataclass(frozen=True)
class AdaptationConfig:
    omega_low: float = 0.0
    omega_high: float = 2.0
    px_range: tuple[float, float] = (-0.01, 0.01)
    py_range: tuple[float, float] = (0.008, 0.012)

    def __post_init__(self):
        if not self.omega_low < self.omega_high:
            raise ConfigError("omega_low must be below omega_high")
        for name in ("px_range", "py_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ConfigError(f"{name} must be a nonempty open interval")

    def clamp(self, w: float) -> float:
        return min(max(w, self.omega_low), self.omega_high)


class RecombinationMode(str, enum.Enum):
    PAPER_N2 = "paper_n2"
    CUSTOM = "custom"


@dataclass(frozen=True)
class RecombinationPolicy:
    mode: RecombinationMode = RecombinationMode.PAPER_N2
    rows: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", RecombinationMode(self.mode))
        if self.mode is RecombinationMode.CUSTOM:
            if self.rows is None:
                raise ConfigError("custom recombination needs a matrix")
            r = np.asarray(self.rows, dtype=np.float64)
            if r.ndim != 2 or r.shape[0] != r.shape[1]:
                raise ConfigError("recombination matrix must be square")
            if np.any(r < 0) or not np.allclose(r.sum(axis=1), 1.0, rtol=0, atol=1e-12):
                raise ConfigError("recombination matrix must be row-stochastic")
            object.__setattr__(self, "rows", tuple(tuple(float(v) for v in row) for row in r))

    @classmethod
    def custom(cls, rows) -> "RecombinationPolicy":
        return cls(RecombinationMode.CUSTOM, rows)

    def matrix(self, errors) -> np.ndarray:
        if self.mode is RecombinationMode.CUSTOM:
            r = np.asarray(self.rows)
            if r.shape[0] != len(errors):
                raise ConfigError(f"recombination matrix order {r.shape[0]} != population size {len(errors)}")
            return r
        if len(errors) != 2:
            raise ConfigError("paper_n2 recombination is defined for two individuals only")
        if errors[0] < errors[1]:
            return np.array([[1.0, 0.0], [0.99, 0.01]])
        return np.array([[0.01, 0.99], [1.0, 0.0]])


@dataclass(frozen=True)
class HybridConfig:
    kernel: KernelKind = KernelKind.JACOBI_SR
    population_size: int = 2
    threshold: float = 1e-12
    max_generations: int = 1000
    init_domain: tuple[float, float] = (-30.0, 30.0)
    adaptation: AdaptationConfig = field(default_factory=AdaptationConfig)
    seed: int = 0
    recombination: RecombinationPolicy = field(default_factory=RecombinationPolicy)
    initial_omegas: tuple[float, ...] | None = None
    norm: NormKind = NormKind.EUCLIDEAN
    divergence_cap: float = DIVERGENCE_CAP

    def __post_init__(self):
        object.__setattr__(self, "kernel", KernelKind(self.kernel))
        object.__setattr__(self, "norm", NormKind(self.norm))
        if self.population_size < 2 or self.population_size % 2:
            raise ConfigError("population size must be a positive even number")
        if not self.threshold > 0:
            raise ConfigError("threshold must be positive")
        if self.max_generations < 1:
            raise ConfigError("max_generations must be at least 1")
        lo, hi = self.init_domain
        if lo > hi:
            raise ConfigError("init_domain is reversed")
        if self.initial_omegas is not None:
            object.__setattr__(self, "initial_omegas", tuple(float(w) for w in self.initial_omegas))
            if len(self.initial_omegas) != self.population_size:
                raise ConfigError("need one initial omega per individual")


def _open_uniform(rng: np.random.Generator, lo: float, hi: float, size=None):
    u = rng.uniform(lo, hi, size)
    if size is None:
        while u == lo:
            u = rng.uniform(lo, hi)
        return float(u)
    bad = u == lo
    while np.any(bad):
        u[bad] = rng.uniform(lo, hi, int(bad.sum()))
        bad = u == lo
    return u


def _evaluate(sys: LinearSystem, x: np.ndarray, norm: NormKind) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        return error_norm(sys, x, norm)


def init_population(sys: LinearSystem, cfg: HybridConfig, rng: np.random.Generator | None = None) -> Population:
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    n_ind, n = cfg.population_size, sys.n
    lo, hi = cfg.init_domain
    xs = np.full((n_ind, n), lo) if lo == hi else _open_uniform(rng, lo, hi, (n_ind, n))
    if cfg.initial_omegas is not None:
        omegas = cfg.initial_omegas
    else:
        a = cfg.adaptation
        omegas = tuple(float(w) for w in _open_uniform(rng, a.omega_low, a.omega_high, n_ind))
    return Population(
        tuple(Individual(x, w, _evaluate(sys, x, cfg.norm)) for x, w in zip(xs, omegas)),
        generation=0,
    )


def recombine(pop: Population, policy: RecombinationPolicy) -> Population:
    """Each offspring vector is a row-stochastic blend of all parent vectors; omegas pass through."""
    r = policy.matrix(pop.errors)
    xs = [ind.x for ind in pop.individuals]
    out = []
    for i, ind in enumerate(pop.individuals):
        acc = r[i, 0] * xs[0]
        for j in range(1, len(xs)):
            acc = acc + r[i, j] * xs[j]
        out.append(replace(ind, x=acc, error=math.nan))
    return replace(pop, individuals=tuple(out))


def mutate(
    pop: Population,
    sys: LinearSystem,
    kernel: KernelKind | str,
    norm: NormKind | str = NormKind.EUCLIDEAN,
    workers: int = 1,
    pool: ThreadPoolExecutor | None = None,
) -> Population:
    """One kernel sweep per individual at that individual's own omega."""
    kernel = KernelKind(kernel)
    norm = NormKind(norm)

    def one(ind: Individual) -> Individual:
        with np.errstate(over="ignore", invalid="ignore"):
            x = sweep(sys, ind.x, kernel, ind.omega)
        return replace(ind, x=x, error=_evaluate(sys, x, norm))

    if workers > 1 or pool is not None:
        own = pool is None
        pool = pool or ThreadPoolExecutor(max_workers=workers)
        try:
            out = tuple(pool.map(one, pop.individuals))
        finally:
            if own:
                pool.shutdown()
    else:
        out = tuple(one(ind) for ind in pop.individuals)
    return replace(pop, individuals=out)


def _sort_key(e: float) -> float:
    return math.inf if math.isnan(e) else e


def rank(errors) -> list[int]:
    """Indices by ascending error; ties keep original order, NaN sorts last."""
    return sorted(range(len(errors)), key=lambda i: (_sort_key(errors[i]), i))


def rank_and_pair(pop: Population) -> list[tuple[int, int]]:
    if len(pop) % 2:
        raise ConfigError("pairing needs an even population")
    order = rank(pop.errors)
    return [(order[k], order[k + 1]) for k in range(0, len(order), 2)]


def _move(worse: float, better: float, cfg: AdaptationConfig, px: float, py: float) -> tuple[float, float]:
    new_worse = (0.5 + px) * (worse + better)
    if better > worse:
        new_better = better + py * (cfg.omega_high - better)
    else:
        new_better = better + py * (cfg.omega_low - better)
    return cfg.clamp(new_worse), cfg.clamp(new_better)


def adapt_pair(
    wx: float,
    wy: float,
    ex: float,
    ey: float,
    cfg: AdaptationConfig,
    rng: np.random.Generator | None = None,
    *,
    px: float | None = None,
    py: float | None = None,
) -> tuple[float, float]:
    """Uniform adaptation of two relaxation factors.

    The worse individual's omega moves to ``(0.5 + p_x)(wx + wy)``; the better
    one's steps a fraction ``p_y`` of the way toward the omega bound on its own
    side. Equal errors leave both untouched. Perturbations come either from
    ``rng`` (``p_x`` first, then ``p_y``) or are given explicitly.
    """
    if px is None:
        px = _open_uniform(rng, *cfg.px_range)
    if py is None:
        py = _open_uniform(rng, *cfg.py_range)
    sx, sy = _sort_key(ex), _sort_key(ey)
    if sx > sy:
        return _move(wx, wy, cfg, px, py)
    if sx < sy:
        wy_new, wx_new = _move(wy, wx, cfg, px, py)
        return wx_new, wy_new
    return wx, wy


def draw_perturbations(rng: np.random.Generator, n_pairs: int, cfg: AdaptationConfig) -> np.ndarray:
    """``(n_pairs, 2)`` array of (p_x, p_y), drawn pair by pair."""
    out = np.empty((n_pairs, 2))
    for k in range(n_pairs):
        out[k, 0] = _open_uniform(rng, *cfg.px_range)
        out[k, 1] = _open_uniform(rng, *cfg.py_range)
    return out


def adapt(pop: Population, cfg: AdaptationConfig, draws: np.ndarray) -> Population:
    omegas = list(pop.omegas)
    errors = pop.errors
    for (i, j), (px, py) in zip(rank_and_pair(pop), draws):
        omegas[i], omegas[j] = adapt_pair(omegas[i], omegas[j], errors[i], errors[j], cfg, px=px, py=py)
    return replace(
        pop,
        individuals=tuple(replace(ind, omega=w) for ind, w in zip(pop.individuals, omegas)),
    )


def select_reproduce(pop: Population) -> Population:
    """The best half each fill two slots; every slot keeps its own adapted omega.

    The k-th ranked slot receives the vector of the (k // 2)-th ranked
    individual, so the pair (1st, 2nd) both carry the best vector, (3rd, 4th)
    the second best, and so on. No omega is lost or duplicated.
    """
    if len(pop) % 2:
        raise ConfigError("selection needs an even population")
    order = rank(pop.errors)
    inds = list(pop.individuals)
    out = list(inds)
    for k, slot in enumerate(order):
        src = inds[order[k // 2]]
        out[slot] = replace(inds[slot], x=src.x, error=src.error)
    return Population(tuple(out), pop.generation + 1)


@dataclass
class HybridResult:
    best: Individual
    trace: ConvergenceTrace
    status: Status
    generations: int
    population: Population = field(repr=False)


def step(
    pop: Population,
    sys: LinearSystem,
    cfg: HybridConfig,
    rng: np.random.Generator,
    workers: int = 1,
    pool: ThreadPoolExecutor | None = None,
) -> tuple[Population, Population]:
    """One full generation; returns the next population and the adapted offspring it came from."""
    draws = draw_perturbations(rng, len(pop) // 2, cfg.adaptation)
    pop = recombine(pop, cfg.recombination)
    pop = mutate(pop, sys, cfg.kernel, cfg.norm, workers, pool)
    offspring = adapt(pop, cfg.adaptation, draws)
    return select_reproduce(offspring), offspring


def run(sys: LinearSystem, cfg: HybridConfig, workers: int = 1) -> HybridResult:
    rng = np.random.default_rng(cfg.seed)
    pop = init_population(sys, cfg, rng)
    unit = sweep_cost(cfg.kernel, sys.n, PARALLEL)
    trace = ConvergenceTrace()
    status = Status.MAX_ITERATIONS
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for g in range(1, cfg.max_generations + 1):
            pop, offspring = step(pop, sys, cfg, rng, workers, pool)
            best = pop.best()
            trace.append(TraceRecord(g, best.error, pop.omegas, g * unit, offspring.errors))
            if best.error < cfg.threshold:
                status = Status.CONVERGED
                break
            if all(not (e <= cfg.divergence_cap) for e in offspring.errors):
                status = Status.DIVERGED
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return HybridResult(pop.best(), trace, status, pop.generation, pop)
