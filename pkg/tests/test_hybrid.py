import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hybridsr.hybrid import (
    AdaptationConfig,
    ConfigError,
    HybridConfig,
    Individual,
    Population,
    RecombinationPolicy,
    adapt,
    adapt_pair,
    draw_perturbations,
    init_population,
    mutate,
    rank,
    rank_and_pair,
    recombine,
    run,
    select_reproduce,
    step,
)
from hybridsr.kernels import KernelKind, Status, jacobi_sweep
from hybridsr.linalg import LinearSystem, error_norm
from hybridsr.spectral import Verdict, certify
from strategies import dominant_systems, random_dominant

CFG = AdaptationConfig()


def pop_of(xs, omegas, errors):
    return Population(tuple(Individual(np.asarray(x, float), w, e) for x, w, e in zip(xs, omegas, errors)))


# -- configuration ------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ConfigError):
        HybridConfig(population_size=3)
    with pytest.raises(ConfigError):
        HybridConfig(threshold=0.0)
    with pytest.raises(ConfigError):
        HybridConfig(max_generations=0)
    with pytest.raises(ConfigError):
        HybridConfig(initial_omegas=(0.5,))
    with pytest.raises(ConfigError):
        AdaptationConfig(omega_low=1.0, omega_high=1.0)
    with pytest.raises(ConfigError):
        RecombinationPolicy.custom([[0.5, 0.6], [1.0, 0.0]])
    with pytest.raises(ConfigError):
        RecombinationPolicy.custom([[1.5, -0.5], [1.0, 0.0]])
    with pytest.raises(ConfigError):
        RecombinationPolicy().matrix([1.0, 2.0, 3.0, 4.0])


def test_default_adaptation_constants():
    a = AdaptationConfig()
    assert (a.omega_low, a.omega_high) == (0.0, 2.0)
    assert a.px_range == (-0.01, 0.01) and a.py_range == (0.008, 0.012)
    cfg = HybridConfig()
    assert cfg.population_size == 2 and cfg.init_domain == (-30.0, 30.0)


# -- initialisation -----------------------------------------------------------

def test_init_population_examples():
    sys = LinearSystem(np.eye(3) * 4, [1.0, 2.0, 3.0])
    cfg = HybridConfig(initial_omegas=(0.5, 1.5), seed=11)
    pop = init_population(sys, cfg)
    assert pop.omegas == (0.5, 1.5) and pop.generation == 0
    again = init_population(sys, cfg)
    assert np.array_equal(pop.xs, again.xs)
    for ind in pop.individuals:
        assert ind.error == error_norm(sys, ind.x)
        assert np.all((-30 < ind.x) & (ind.x < 30))
    flat = init_population(sys, HybridConfig(init_domain=(2.5, 2.5)))
    assert np.all(flat.xs == 2.5)


@given(st.integers(0, 2**63), st.sampled_from([2, 4, 6]))
def test_random_initial_omegas_inside_open_bounds(seed, n_ind):
    sys = LinearSystem(np.eye(2), [1.0, 1.0])
    pop = init_population(sys, HybridConfig(population_size=n_ind, seed=seed))
    assert len(pop) == n_ind
    assert all(0.0 < w < 2.0 for w in pop.omegas)


# -- recombination ------------------------------------------------------------

def test_recombine_examples():
    pop = pop_of([[0, 0], [100, 100]], (0.5, 1.5), (1.0, 2.0))
    out = recombine(pop, RecombinationPolicy())
    assert out.xs.tolist() == [[0, 0], [1, 1]]
    assert out.omegas == (0.5, 1.5)
    tied = recombine(pop_of([[0, 0], [100, 100]], (0.5, 1.5), (2.0, 2.0)), RecombinationPolicy())
    assert tied.xs.tolist() == [[99, 99], [0, 0]]
    same = recombine(pop, RecombinationPolicy.custom(np.eye(2)))
    assert np.array_equal(same.xs, pop.xs)


@given(dominant_systems(max_n=6), st.integers(0, 2**32), st.sampled_from([2, 4]))
def test_recombination_never_moves_further_than_worst_parent(case, seed, n_ind):
    sys, _ = case
    x_star = np.linalg.solve(sys.a, sys.b)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-30, 30, (n_ind, sys.n))
    errors = tuple(rng.uniform(0, 1, n_ind))
    rows = rng.dirichlet(np.ones(n_ind), n_ind)
    rows /= rows.sum(axis=1, keepdims=True)
    policies = [RecombinationPolicy.custom(rows)] + ([RecombinationPolicy()] if n_ind == 2 else [])
    worst = max(np.linalg.norm(x - x_star) for x in xs)
    for policy in policies:
        out = recombine(pop_of(xs, (1.0,) * n_ind, errors), policy)
        for x in out.xs:
            assert np.linalg.norm(x - x_star) <= worst * (1 + 1e-12)


# -- mutation -----------------------------------------------------------------

def test_mutate_examples():
    a = np.array([[4.0, 1.0], [1.0, 3.0]])
    x_star = np.array([1.0, -1.0])
    sys = LinearSystem(a, a @ x_star)
    pop = pop_of([x_star, [5.0, 5.0], [5.0, 5.0]], (1.3, 0.0, 1.0), (0.0, math.nan, math.nan))
    pop = Population(pop.individuals + (Individual(np.array([2.0, 2.0]), 0.7, math.nan),))
    out = mutate(pop, sys, KernelKind.JACOBI_SR)
    assert np.array_equal(out.xs[0], x_star) and out.errors[0] == 0.0
    assert np.array_equal(out.xs[1], [5.0, 5.0])
    assert np.array_equal(out.xs[2], jacobi_sweep(sys, [5.0, 5.0]))
    for ind in out.individuals:
        assert ind.error == error_norm(sys, ind.x)
    assert np.array_equal(mutate(pop, sys, "jacobi_sr", workers=3).xs, out.xs)


# -- ranking and adaptation ---------------------------------------------------

def test_rank_and_pair_examples():
    assert rank_and_pair(pop_of([[0]] * 2, (1, 1), (7.0, 3.0))) == [(1, 0)]
    assert rank_and_pair(pop_of([[0]] * 4, (1,) * 4, (5, 1, 3, 9))) == [(1, 2), (0, 3)]
    assert rank_and_pair(pop_of([[0]] * 4, (1,) * 4, (2, 2, 2, 2))) == [(0, 1), (2, 3)]
    assert rank([math.nan, 1.0, math.inf]) == [1, 0, 2]


def test_adapt_pair_examples():
    assert adapt_pair(0.5, 1.5, 1.0, 1.0, CFG, px=0.003, py=0.01) == (0.5, 1.5)
    wx, wy = adapt_pair(0.5, 1.5, 2.0, 1.0, CFG, px=0.0, py=0.01)
    assert wx == 1.0
    assert wy == pytest.approx(1.505, abs=1e-15)
    # reversed roles: y is worse, so y moves to the blend and x steps toward omega_low
    wx, wy = adapt_pair(0.5, 1.5, 1.0, 2.0, CFG, px=0.0, py=0.01)
    assert wy == 1.0 and wx == pytest.approx(0.495, abs=1e-15)


def test_adapt_pair_clamps():
    wx, wy = adapt_pair(1.95, 2.0, 5.0, 1.0, CFG, px=0.009, py=0.01)
    assert wx == 2.0 and wy == 2.0


unit = st.floats(0.01, 1.99)


@given(unit, unit, st.floats(-0.01, 0.01), st.floats(0.008, 0.012))
def test_worse_omega_lands_strictly_between_when_px_small_enough(wx, wy, px, py):
    # the blend (0.5 + px)(wx + wy) is strictly between the two exactly when
    # |px| < |wy - wx| / (2 (wx + wy))
    assume(abs(wy - wx) > 1e-9)
    bound = abs(wy - wx) / (2 * (wx + wy))
    new_x, new_y = adapt_pair(wx, wy, 2.0, 1.0, CFG, px=px, py=py)
    if abs(px) < bound * (1 - 1e-9):
        assert min(wx, wy) < new_x < max(wx, wy)
    # the better omega steps away from the worse one, toward its own bound
    if wy > wx:
        assert wy <= new_y <= 2.0
    else:
        assert 0.0 <= new_y <= wy


def test_strictly_between_fails_for_close_omegas_despite_small_px():
    # px = 0.009 < 0.25, yet the blend overshoots wy when the pair is close
    wx, _ = adapt_pair(1.0, 1.01, 2.0, 1.0, CFG, px=0.009, py=0.01)
    assert wx > 1.01


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 10), st.floats(0, 10), st.integers(0, 2**32),
       st.tuples(st.floats(-3, 0), st.floats(0.1, 3)))
def test_adapted_omegas_stay_in_bounds(wx, wy, ex, ey, seed, bounds):
    cfg = AdaptationConfig(bounds[0], bounds[1])
    wx, wy = cfg.clamp(wx), cfg.clamp(wy)
    out = adapt_pair(wx, wy, ex, ey, cfg, np.random.default_rng(seed))
    assert all(cfg.omega_low <= w <= cfg.omega_high for w in out)


def test_draw_perturbations_ranges():
    d = draw_perturbations(np.random.default_rng(3), 500, CFG)
    assert d.shape == (500, 2)
    assert np.all((-0.01 < d[:, 0]) & (d[:, 0] < 0.01))
    assert np.all((0.008 < d[:, 1]) & (d[:, 1] < 0.012))


def test_adapt_uses_ranked_pairs():
    pop = pop_of([[0]] * 4, (0.2, 0.4, 1.2, 1.8), (5.0, 1.0, 3.0, 9.0))
    out = adapt(pop, CFG, np.array([[0.0, 0.01], [0.0, 0.01]]))
    # pairs (1, 2) and (0, 3): worse of each goes to the midpoint
    assert out.omegas[2] == pytest.approx(0.8)
    assert out.omegas[3] == pytest.approx(1.0)
    assert out.omegas[1] == pytest.approx(0.4 - 0.004)
    assert out.omegas[0] == pytest.approx(0.2 - 0.002)


# -- selection ----------------------------------------------------------------

def test_select_reproduce_examples():
    pop = pop_of([[1.0], [2.0]], (0.7, 1.3), (0.5, 4.0))
    out = select_reproduce(pop)
    assert out.xs.tolist() == [[1.0], [1.0]] and out.omegas == (0.7, 1.3) and out.generation == 1
    same = pop_of([[3.0]] * 4, (1.0,) * 4, (2.0,) * 4)
    out = select_reproduce(same)
    assert np.array_equal(out.xs, same.xs) and out.omegas == same.omegas and out.generation == 1


@given(st.lists(st.floats(0, 100), min_size=4, max_size=4, unique=True))
def test_select_reproduce_two_copies_of_best_half(errors):
    xs = [[float(i)] for i in range(4)]
    out = select_reproduce(pop_of(xs, (0.1, 0.2, 0.3, 0.4), tuple(errors)))
    best = sorted(range(4), key=lambda i: errors[i])[:2]
    got = sorted(out.xs[:, 0].tolist())
    assert got == sorted([float(best[0])] * 2 + [float(best[1])] * 2)
    assert sorted(out.omegas) == [0.1, 0.2, 0.3, 0.4]


# -- full runs ----------------------------------------------------------------

def test_run_identity_converges_quickly():
    sys = LinearSystem(np.eye(5), np.arange(1.0, 6.0))
    res = run(sys, HybridConfig(initial_omegas=(1.0, 0.6), seed=4, max_generations=50))
    assert res.status is Status.CONVERGED and res.generations <= 5
    assert res.best.error < 1e-12


def test_run_trace_shape():
    sys = random_dominant(np.random.default_rng(0), 6)[0]
    res = run(sys, HybridConfig(initial_omegas=(0.5, 1.5), population_size=2, max_generations=15, seed=2))
    assert len(res.trace) == res.generations
    assert [r.generation for r in res.trace] == list(range(1, res.generations + 1))
    assert all(len(r.omegas) == 2 and len(r.errors) == 2 for r in res.trace)
    assert res.trace[-1].best_error == res.best.error


def test_run_reports_divergence():
    sys = LinearSystem([[1.0, 3.0], [3.0, 1.0]], [1.0, 1.0])
    res = run(sys, HybridConfig(initial_omegas=(1.0, 1.0), max_generations=500,
                                adaptation=AdaptationConfig(0.999, 1.0)))
    assert res.status is Status.DIVERGED


def _scaled_residual(sys, x):
    return float(np.max(np.abs((sys.a @ x - sys.b) / sys.diag)))


@given(st.integers(0, 2**32), st.integers(3, 12))
def test_elite_scaled_residual_contracts_under_norm_contraction(seed, n):
    # D^-1 (A x - b) evolves by H_omega under a JOR sweep, so once both
    # individuals carry the elite vector its scaled residual must shrink
    # whenever every omega certifies ||H_omega||_inf < 1
    rng = np.random.default_rng(seed)
    sys, _ = random_dominant(rng, n)
    cfg = HybridConfig(threshold=1e-10, max_generations=60, seed=seed, adaptation=AdaptationConfig(0.05, 1.0))
    rng = np.random.default_rng(cfg.seed)
    pop, _ = step(init_population(sys, cfg, rng), sys, cfg, rng)
    while pop.generation < cfg.max_generations and pop.best().error >= cfg.threshold:
        contracting = all(
            certify(sys, KernelKind.JACOBI_SR, w).verdict is Verdict.NORM_CONTRACTION for w in pop.omegas
        )
        before = _scaled_residual(sys, pop.best().x)
        pop, _ = step(pop, sys, cfg, rng)
        if contracting and before > 1e-9:
            assert _scaled_residual(sys, pop.best().x) < before


@given(st.integers(0, 2**32), st.sampled_from([KernelKind.JACOBI_SR, KernelKind.GAUSS_SEIDEL_SR]))
def test_run_is_seed_deterministic_and_worker_independent(seed, kernel):
    sys = random_dominant(np.random.default_rng(seed), 9)[0]
    cfg = HybridConfig(kernel=kernel, population_size=4, seed=seed, max_generations=30,
                       recombination=RecombinationPolicy.custom(np.full((4, 4), 0.25)))
    one = run(sys, cfg).trace.to_csv()
    assert run(sys, cfg).trace.to_csv() == one
    assert run(sys, cfg, workers=3).trace.to_csv() == one
