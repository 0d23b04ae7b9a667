import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pclsim.numerics import (
    NotSymmetricError,
    SingularMatrixError,
    psd_sqrt,
    solve_linear,
    sym_min_eig,
)


def _rng(seed=0):
    return np.random.default_rng(seed)


class TestSolveLinear:
    def test_identity(self):
        v = np.array([1.0, -2.0, 3.0])
        assert np.allclose(solve_linear(np.eye(3), v), v)

    def test_known_2x2(self):
        m = np.array([[2.0, 0.0], [0.0, 4.0]])
        assert np.allclose(solve_linear(m, np.array([2.0, 8.0])), [1.0, 2.0])

    def test_residual_bound_random_systems(self):
        rng = _rng(1)
        for _ in range(50):
            d = int(rng.integers(1, 12))
            m = rng.standard_normal((d, d)) + 3 * np.eye(d)
            v = rng.standard_normal(d)
            x = solve_linear(m, v)
            assert np.linalg.norm(m @ x - v) <= 1e-10 * (1 + np.linalg.norm(v))

    def test_singular_raises(self):
        m = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(SingularMatrixError):
            solve_linear(m, np.array([1.0, 1.0]))

    def test_zero_matrix_raises(self):
        with pytest.raises(SingularMatrixError):
            solve_linear(np.zeros((2, 2)), np.zeros(2))

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            solve_linear(np.ones((2, 3)), np.ones(2))
        with pytest.raises(ValueError):
            solve_linear(np.eye(2), np.ones(3))


class TestSymMinEig:
    def test_diagonal(self):
        assert sym_min_eig(np.diag([3.0, 1.0, 2.0])) == pytest.approx(1.0)

    def test_antisymmetric_part_ignored(self):
        m = np.array([[1.0, 5.0], [-5.0, 1.0]])  # symmetric part is I
        assert sym_min_eig(m) == pytest.approx(1.0)

    def test_transpose_identical(self):
        rng = _rng(2)
        for _ in range(20):
            m = rng.standard_normal((4, 4))
            assert sym_min_eig(m) == sym_min_eig(m.T)


class TestPsdSqrt:
    def test_square_of_root(self):
        rng = _rng(3)
        for _ in range(20):
            a = rng.standard_normal((5, 5))
            m = a.T @ a
            d = psd_sqrt(m)
            assert np.allclose(d @ d, m, atol=1e-8)
            assert np.allclose(d, d.T)

    def test_no_negative_eigenvalues(self):
        rng = _rng(4)
        for _ in range(20):
            a = rng.standard_normal((6, 6)) * 0.01
            d = psd_sqrt(a.T @ a)
            assert np.linalg.eigvalsh(d).min() >= -1e-8

    def test_small_negative_eigs_clamped(self):
        m = np.diag([1.0, -1e-10])
        d = psd_sqrt(m)
        assert np.allclose(d, np.diag([1.0, 0.0]))

    def test_asymmetric_raises(self):
        with pytest.raises(NotSymmetricError):
            psd_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**32 - 1))
def test_psd_sqrt_of_square_recovers_psd_matrix(d, seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    m = (q * rng.uniform(0.0, 2.0, size=d)) @ q.T
    m = (m + m.T) / 2
    d_root = psd_sqrt(m @ m)
    assert np.allclose(d_root, m, atol=1e-7)
