"""Dense linear algebra kernels against closed-form and LAPACK oracles."""

import math

import numpy as np
import pytest

from hardycalc.numkernel import (
    ConvergenceError,
    SingularMatrixError,
    hermitian_eigs,
    linear_solve,
    mat_exp,
    operator_norm,
    solve_lyapunov,
)


class TestMatExp:
    def test_zero_time_is_identity(self):
        A = np.array([[-1.0, 2.0], [0.0, -3.0]])
        assert np.allclose(mat_exp(A, 0.0), np.eye(2), atol=1e-15)

    def test_scalar_exponential(self):
        out = mat_exp(np.array([[-1.0]]), 1.0)
        assert abs(out[0, 0] - math.exp(-1.0)) < 1e-14

    def test_diagonal(self):
        A = np.diag([-1.0, -2.0, -0.5])
        out = mat_exp(A, 0.7)
        assert np.allclose(np.diag(out), np.exp(np.diag(A) * 0.7), rtol=1e-13)

    def test_jordan_block(self):
        # exp([[1,1],[0,1]]) = e * [[1,1],[0,1]]
        A = np.array([[1.0, 1.0], [0.0, 1.0]])
        out = mat_exp(A, 1.0)
        ref = math.e * np.array([[1.0, 1.0], [0.0, 1.0]])
        assert np.max(np.abs(out - ref)) < 1e-12 * math.e

    def test_group_property(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
            A = A - 3.0 * np.eye(5)
            full = mat_exp(A, 0.9)
            halves = mat_exp(A, 0.45)
            assert np.max(np.abs(halves @ halves - full)) < 1e-11 * np.max(np.abs(full))

    def test_against_eig_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            A = rng.normal(size=(6, 6)) - 2.0 * np.eye(6)
            w, V = np.linalg.eig(A)
            ref = V @ np.diag(np.exp(w * 0.8)) @ np.linalg.inv(V)
            assert np.max(np.abs(mat_exp(A, 0.8) - ref)) < 1e-9

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            mat_exp(np.zeros((2, 3)), 1.0)

    def test_overflow_guard(self):
        with pytest.raises(OverflowError):
            mat_exp(np.array([[1e9]]), 1.0)


class TestLinearSolve:
    def test_exact_small_system(self):
        A = np.array([[3.0, 1.0], [1.0, 2.0]])
        b = np.array([9.0, 8.0])
        x = linear_solve(A, b)
        assert np.allclose(x, [2.0, 3.0], atol=1e-13)

    def test_complex_matrix_rhs(self):
        rng = np.random.default_rng(5)
        A = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
        B = rng.normal(size=(7, 3)) + 1j * rng.normal(size=(7, 3))
        X = linear_solve(A, B)
        assert np.max(np.abs(A @ X - B)) < 1e-11 * np.max(np.abs(B))

    def test_random_accuracy_loop(self):
        rng = np.random.default_rng(17)
        for _ in range(8):
            n = int(rng.integers(2, 12))
            A = rng.normal(size=(n, n)) + np.eye(n) * n
            x_true = rng.normal(size=n)
            x = linear_solve(A, A @ x_true)
            assert np.max(np.abs(x - x_true)) < 1e-10

    def test_singular_raises(self):
        with pytest.raises(SingularMatrixError):
            linear_solve(np.array([[1.0, 1.0], [1.0, 1.0]]), np.array([1.0, 2.0]))


class TestOperatorNorm:
    def test_nilpotent(self):
        assert abs(operator_norm(np.array([[0.0, 2.0], [0.0, 0.0]])) - 2.0) < 1e-12

    def test_diagonal_complex(self):
        assert abs(operator_norm(np.diag([3.0, -4.0j])) - 4.0) < 1e-12

    def test_zero_matrix(self):
        assert operator_norm(np.zeros((3, 3))) == 0.0

    def test_rectangular(self):
        M = np.array([[1.0, 0.0, 0.0], [0.0, 5.0, 0.0]])
        assert abs(operator_norm(M) - 5.0) < 1e-12

    def test_degenerate_top_pair(self):
        # two leading singular values separated by 1e-13: the power iteration
        # cannot resolve the gap and the fallback path must still be exact
        rng = np.random.default_rng(2)
        U, _ = np.linalg.qr(rng.normal(size=(8, 8)))
        V, _ = np.linalg.qr(rng.normal(size=(8, 8)))
        S = np.diag([2.0, 2.0 - 1e-13, 1.0, 0.5, 0.3, 0.2, 0.1, 0.05])
        got = operator_norm(U @ S @ V)
        assert abs(got - 2.0) < 1e-11

    def test_against_svd_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            n = int(rng.integers(2, 10))
            M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            ref = float(np.linalg.svd(M, compute_uv=False)[0])
            assert abs(operator_norm(M) - ref) < 1e-9 * ref

    def test_rejects_non_matrix(self):
        with pytest.raises(ValueError):
            operator_norm(np.zeros(4))


class TestHermitianEigs:
    def test_real_symmetric_pair(self):
        spec = hermitian_eigs(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(spec.eigenvalues, [1.0, 3.0], atol=1e-12)
        assert spec.lambda_min == pytest.approx(1.0, abs=1e-12)
        assert spec.lambda_max == pytest.approx(3.0, abs=1e-12)

    def test_complex_hermitian(self):
        # eigenvalues of [[a, b], [conj(b), a]] are a +- |b|
        H = np.array([[2.0, 1j], [-1j, 2.0]])
        spec = hermitian_eigs(H)
        assert np.allclose(spec.eigenvalues, [1.0, 3.0], atol=1e-12)

    def test_eigenvector_residual(self):
        rng = np.random.default_rng(7)
        for _ in range(6):
            n = int(rng.integers(2, 12))
            B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            H = B + B.conj().T
            spec = hermitian_eigs(H)
            assert spec.residual < 1e-10 * max(1.0, float(np.linalg.norm(H)))
            ref = np.sort(np.linalg.eigvalsh(H))
            assert np.max(np.abs(spec.eigenvalues - ref)) < 1e-10

    def test_ascending_order_and_orthonormal_vectors(self):
        rng = np.random.default_rng(9)
        B = rng.normal(size=(6, 6))
        H = B + B.T
        spec = hermitian_eigs(H)
        assert np.all(np.diff(spec.eigenvalues) >= -1e-12)
        gram = spec.vectors.conj().T @ spec.vectors
        assert np.max(np.abs(gram - np.eye(6))) < 1e-10

    def test_near_converged_input(self):
        # almost diagonal input with off-diagonal mass near the target: the
        # sweep loop must terminate instead of cycling on roundoff
        H = np.diag([1.0, 2.0, 3.0]) + 1e-13 * np.ones((3, 3))
        H = 0.5 * (H + H.T)
        spec = hermitian_eigs(H)
        assert np.allclose(spec.eigenvalues, [1.0, 2.0, 3.0], atol=1e-11)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            hermitian_eigs(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestSolveLyapunov:
    def test_diagonal_closed_form(self):
        # (conj(l_i) + l_j) Q_ij = -R_ij gives Q = diag(1/2, 1/4) for R = I
        Q = solve_lyapunov(np.diag([-1.0, -2.0]), np.eye(2))
        assert np.allclose(Q, np.diag([0.5, 0.25]), atol=1e-13)

    def test_dense_residual(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            n = int(rng.integers(2, 9))
            A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            A = A - (np.abs(np.linalg.eigvals(A).real).max() + 1.0) * np.eye(n)
            B = rng.normal(size=(n, n))
            R = B @ B.T + np.eye(n)
            Q = solve_lyapunov(A, R)
            resid = A.conj().T @ Q + Q @ A + R
            assert np.max(np.abs(resid)) < 1e-9 * np.max(np.abs(R))
            assert np.max(np.abs(Q - Q.conj().T)) < 1e-10

    def test_gramian_relation(self):
        # closed form for the scalar case: q = r / (2 |Re lambda|)
        Q = solve_lyapunov(np.array([[-0.5]]), np.array([[3.0]]))
        assert abs(Q[0, 0] - 3.0) < 1e-13

    def test_rejects_non_hermitian_rhs(self):
        with pytest.raises(ValueError):
            solve_lyapunov(np.diag([-1.0]), np.array([[1j]]))

    def test_marginal_spectrum_raises(self):
        with pytest.raises((SingularMatrixError, ArithmeticError)):
            solve_lyapunov(np.diag([1j, 1j]), np.eye(2))


def test_error_hierarchy():
    assert issubclass(ConvergenceError, RuntimeError)
    assert issubclass(SingularMatrixError, ValueError)
