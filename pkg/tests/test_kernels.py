import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from hybridsr.kernels import (
    KernelKind,
    Status,
    gauss_seidel_sweep,
    iterate,
    jacobi_sweep,
    jor_sweep,
    random_start,
    sor_sweep,
    sweep,
)
from hybridsr.linalg import LinearSystem, SingularDiagonalError, error_norm, mat_inf_norm
from hybridsr.problems import gen_nsq
from hybridsr.spectral import jor_iteration_matrix, sor_iteration_matrix
from strategies import dominant_systems, vectors

TWO = LinearSystem([[2.0, 1.0], [1.0, 2.0]], [3.0, 3.0])
omegas = st.floats(-1.0, 2.5, allow_nan=False)


def test_jacobi_examples():
    assert jacobi_sweep(TWO, [0, 0]).tolist() == [1.5, 1.5]
    assert jacobi_sweep(TWO, [1.5, 1.5]).tolist() == [0.75, 0.75]
    diag = LinearSystem(np.diag([2.0, 4.0, -5.0]), [1.0, 2.0, 10.0])
    assert jacobi_sweep(diag, [9, 9, 9]).tolist() == [0.5, 0.5, -2.0]


def test_jor_examples():
    assert jor_sweep(TWO, [0, 0], 1.0).tolist() == [1.5, 1.5]
    assert jor_sweep(TWO, [0, 0], 0.5).tolist() == [0.75, 0.75]
    x = np.array([3.0, -7.0])
    assert np.array_equal(jor_sweep(TWO, x, 0.0), x)


def test_sor_examples():
    assert sor_sweep(TWO, [0, 0], 1.0).tolist() == [1.5, 0.75]
    diag = LinearSystem(np.diag([2.0, 4.0]), [1.0, 2.0])
    for w in (0.3, 1.0, 1.7):
        assert np.array_equal(sor_sweep(diag, [5, 5], w), jor_sweep(diag, [5, 5], w))


def test_zero_diagonal_rejected():
    with pytest.raises(SingularDiagonalError):
        LinearSystem([[0.0, 1.0], [1.0, 2.0]], [1.0, 1.0])


@given(dominant_systems(), st.data())
def test_omega_one_reductions_are_bit_equal(case, data):
    sys, _ = case
    x = data.draw(vectors(sys.n))
    assert np.array_equal(jor_sweep(sys, x, 1.0), jacobi_sweep(sys, x))
    assert np.array_equal(sor_sweep(sys, x, 1.0), gauss_seidel_sweep(sys, x))
    assert np.array_equal(sweep(sys, x, KernelKind.JACOBI, 0.3), jacobi_sweep(sys, x))
    assert np.array_equal(sweep(sys, x, KernelKind.GAUSS_SEIDEL, 0.3), gauss_seidel_sweep(sys, x))


@given(dominant_systems(), omegas, st.data())
def test_jor_is_damped_jacobi(case, w, data):
    sys, _ = case
    x = data.draw(vectors(sys.n))
    j = jacobi_sweep(sys, x)
    np.testing.assert_allclose(jor_sweep(sys, x, w), x + w * (j - x), rtol=1e-12, atol=1e-9)


@given(dominant_systems(), omegas, st.data())
def test_sweeps_match_textbook_loops(case, w, data):
    sys, _ = case
    x = data.draw(vectors(sys.n))
    a, b = sys.a.tolist(), sys.b.tolist()
    np.testing.assert_allclose(jor_sweep(sys, x, w), oracles.jor_step(a, b, x.tolist(), w), rtol=1e-10, atol=1e-9)
    np.testing.assert_allclose(sor_sweep(sys, x, w), oracles.sor_step(a, b, x.tolist(), w), rtol=1e-10, atol=1e-9)


@given(dominant_systems(), omegas, st.data())
def test_sweep_error_propagates_through_iteration_matrix(case, w, data):
    sys, _ = case
    x = data.draw(vectors(sys.n))
    x_star = np.linalg.solve(sys.a, sys.b)
    for new, h in ((jor_sweep(sys, x, w), jor_iteration_matrix(sys.a, w)),
                   (sor_sweep(sys, x, w), sor_iteration_matrix(sys.a, w))):
        np.testing.assert_allclose(new - x_star, h @ (x - x_star), rtol=1e-8, atol=1e-8)


def test_fixed_point():
    a = np.array([[4.0, 1.0, 0.0], [1.0, 5.0, 2.0], [0.0, 1.0, 3.0]])
    x = np.array([1.0, 2.0, -1.0])
    sys = LinearSystem(a, a @ x)
    assert error_norm(sys, x) == 0.0
    for w in (0.4, 1.0, 1.3):
        assert np.array_equal(jor_sweep(sys, x, w), x)
        assert np.array_equal(sor_sweep(sys, x, w), x)


@given(dominant_systems(), st.floats(0.05, 1.0), st.data())
def test_contraction_under_norm_bound(case, w, data):
    sys, _ = case
    h = jor_iteration_matrix(sys.a, w)
    if mat_inf_norm(h) >= 1:
        return
    x = data.draw(vectors(sys.n)) + 50.0
    x_star = np.linalg.solve(sys.a, sys.b)
    before = np.max(np.abs(x - x_star))
    if before < 1e-6:
        return
    after = np.max(np.abs(jor_sweep(sys, x, w) - x_star))
    assert after < before


def test_iterate_identity_converges_in_one():
    sys = LinearSystem(np.eye(4), [1.0, -2.0, 3.0, 0.5])
    res = iterate(sys, KernelKind.JACOBI, 1.0, [9, 9, 9, 9], 1e-12, 10)
    assert res.status is Status.CONVERGED and res.iterations == 1 and res.final_error == 0.0


def test_iterate_nsq_examples():
    sys = gen_nsq(100)
    x0 = random_start(100, np.random.default_rng(0))
    res = iterate(sys, KernelKind.JACOBI_SR, 0.81, x0, 1e-6, 1000)
    assert res.status is Status.CONVERGED and abs(res.iterations - 18) <= 5
    res = iterate(sys, KernelKind.JACOBI_SR, 1.5, x0, 1e-6, 1000)
    assert res.status is Status.DIVERGED


def test_iterate_accepts_negative_omega_and_validates_threshold():
    sys = LinearSystem(np.eye(2) * 2, [1.0, 1.0])
    res = iterate(sys, KernelKind.JACOBI_SR, -1.0, [0, 0], 1e-12, 50)
    assert res.status is Status.DIVERGED
    with pytest.raises(ValueError):
        iterate(sys, KernelKind.JACOBI_SR, 1.0, [0, 0], 0.0, 5)
    with pytest.raises(ValueError):
        iterate(sys, KernelKind.JACOBI_SR, 1.0, [0, 0], 1e-3, 0)


@given(dominant_systems(), st.sampled_from(list(KernelKind)), st.floats(0.1, 1.9), st.integers(1, 40))
def test_iterate_result_invariants(case, kernel, w, budget):
    sys, _ = case
    res = iterate(sys, kernel, w, np.full(sys.n, 3.0), 1e-8, budget)
    assert len(res.trace) == res.iterations
    assert res.trace[-1].best_error == res.final_error
    if res.status is Status.CONVERGED:
        assert res.final_error < 1e-8
    if res.status is Status.MAX_ITERATIONS:
        assert res.iterations == budget


@given(st.integers(0, 2**32), st.integers(1, 30))
def test_random_start_in_domain(seed, n):
    x = random_start(n, np.random.default_rng(seed))
    assert x.shape == (n,) and np.all((-30 <= x) & (x < 30))
