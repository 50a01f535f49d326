import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tvnet.errors import DimensionMismatch, NotPositiveDefinite, ShapeMismatch, Singular, SingularBlock
from tvnet.linalg import (
    BlockTridiagSystem,
    block_tridiag_factorize,
    block_tridiag_solve,
    log_det_pd,
    sym_solve,
)


def random_spd_blocks(rng, T, b, min_eig=2.0):
    blocks = np.empty((T, b, b))
    for k in range(T):
        m = rng.standard_normal((b, b))
        blocks[k] = m @ m.T + min_eig * np.eye(b)
    return blocks


def test_single_block_inverse():
    system = BlockTridiagSystem(np.array([2.0 * np.eye(2)]))
    fact = block_tridiag_factorize(system)
    np.testing.assert_allclose(fact.pivot_inverses[0], 0.5 * np.eye(2))


def test_scalar_recursion():
    system = BlockTridiagSystem(np.array([[[2.0]], [[2.0]]]))
    fact = block_tridiag_factorize(system)
    np.testing.assert_allclose(fact.pivot_inverses.ravel(), [0.5, 2.0 / 3.0])


def test_identity_system_solve():
    # scale 0.5 times diagonal blocks 2I assembles to the identity at T=1
    system = BlockTridiagSystem(np.array([2.0 * np.eye(3)]), scale=0.5)
    fact = block_tridiag_factorize(system)
    rhs = np.array([1.0, -2.0, 3.5])
    np.testing.assert_allclose(block_tridiag_solve(fact, rhs), rhs, atol=1e-14)


def test_scalar_tridiagonal_matches_dense():
    system = BlockTridiagSystem(np.array([[[2.0]], [[3.0]], [[2.0]]]), scale=1.0)
    fact = block_tridiag_factorize(system)
    rhs = np.array([1.0, 0.0, 0.0])
    expected = np.linalg.solve(system.to_dense(), rhs)
    np.testing.assert_allclose(block_tridiag_solve(fact, rhs), expected, rtol=1e-12)


def test_all_ones_consistency():
    rng = np.random.default_rng(7)
    system = BlockTridiagSystem(random_spd_blocks(rng, 5, 4), scale=2.3)
    ones = np.ones(5 * 4)
    rhs = system.to_dense() @ ones
    fact = block_tridiag_factorize(system)
    np.testing.assert_allclose(block_tridiag_solve(fact, rhs), ones, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(
    T=st.integers(1, 8),
    b=st.integers(1, 10),
    seed=st.integers(0, 10_000),
    scale=st.floats(0.1, 10.0),
)
def test_solve_matches_dense_assembly(T, b, seed, scale):
    rng = np.random.default_rng(seed)
    system = BlockTridiagSystem(random_spd_blocks(rng, T, b), scale=scale)
    fact = block_tridiag_factorize(system)
    rhs = rng.standard_normal(T * b)
    x = block_tridiag_solve(fact, rhs)
    dense = np.linalg.solve(system.to_dense(), rhs)
    np.testing.assert_allclose(x, dense, rtol=1e-8, atol=1e-10)


def test_pivot_inverses_are_symmetric():
    rng = np.random.default_rng(3)
    system = BlockTridiagSystem(random_spd_blocks(rng, 6, 5))
    fact = block_tridiag_factorize(system)
    for piv in fact.pivot_inverses:
        asym = np.abs(piv - piv.T).max() / max(np.abs(piv).max(), 1.0)
        assert asym <= 1e-10


def test_factorize_once_solve_many_is_deterministic():
    rng = np.random.default_rng(11)
    system = BlockTridiagSystem(random_spd_blocks(rng, 4, 3))
    fact = block_tridiag_factorize(system)
    rhs = rng.standard_normal(12)
    baseline = block_tridiag_solve(fact, rhs)
    for _ in range(100):
        again = block_tridiag_solve(fact, rhs)
        assert np.array_equal(baseline, again)


def test_matrix_rhs_solve():
    rng = np.random.default_rng(5)
    system = BlockTridiagSystem(random_spd_blocks(rng, 3, 2))
    fact = block_tridiag_factorize(system)
    rhs = rng.standard_normal((6, 4))
    x = block_tridiag_solve(fact, rhs)
    np.testing.assert_allclose(system.to_dense() @ x, rhs, atol=1e-10)


def test_singular_block_raises_with_index():
    blocks = np.array([np.eye(2), np.eye(2)])  # A_2 - B_1 = I - I = 0
    with pytest.raises(SingularBlock) as excinfo:
        block_tridiag_factorize(BlockTridiagSystem(blocks))
    assert excinfo.value.index == 1


def test_dimension_mismatch():
    system = BlockTridiagSystem(np.array([2.0 * np.eye(2)]))
    fact = block_tridiag_factorize(system)
    with pytest.raises(DimensionMismatch):
        block_tridiag_solve(fact, np.ones(3))


def test_asymmetric_blocks_rejected():
    bad = np.array([[[1.0, 0.5], [0.0, 1.0]]])
    with pytest.raises(ShapeMismatch):
        BlockTridiagSystem(bad)


def test_sym_solve_identity_and_diagonal():
    v = np.array([3.0, -1.0])
    np.testing.assert_allclose(sym_solve(np.eye(2), v), v)
    np.testing.assert_allclose(sym_solve(np.diag([2.0, 4.0]), np.array([2.0, 4.0])), [1.0, 1.0])


def test_sym_solve_residual_small():
    rng = np.random.default_rng(2)
    m = rng.standard_normal((10, 10))
    m = m @ m.T + 0.5 * np.eye(10)
    rhs = rng.standard_normal(10)
    x = sym_solve(m, rhs)
    assert np.linalg.norm(m @ x - rhs) <= 1e-8 * np.linalg.norm(rhs)


def test_sym_solve_singular_raises():
    m = np.ones((3, 3))
    with pytest.raises(Singular):
        sym_solve(m, np.array([1.0, 0.0, 0.0]))


def test_log_det_examples():
    assert log_det_pd(np.eye(7)) == pytest.approx(0.0)
    assert log_det_pd(np.diag([2.0, 3.0])) == pytest.approx(np.log(6.0))
    assert log_det_pd(np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(np.log(3.0))


def test_log_det_not_pd_raises():
    with pytest.raises(NotPositiveDefinite):
        log_det_pd(np.diag([1.0, -1.0]))


@settings(max_examples=30, deadline=None)
@given(dim=st.integers(1, 8), seed=st.integers(0, 10_000))
def test_log_det_inverse_identity(dim, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((dim, dim))
    m = m @ m.T + 0.5 * np.eye(dim)
    assert log_det_pd(m) + log_det_pd(np.linalg.inv(m)) == pytest.approx(0.0, abs=1e-8)
