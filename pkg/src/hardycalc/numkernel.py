"""Deterministic dense complex linear algebra kernel.

Everything downstream (semigroup evaluation, Gramians, norm scans) is built on
the five operations in this module.  They are hand-rolled so that their
numerical behaviour is fully pinned down: no randomized pivoting, no
environment-dependent BLAS dispatch in the algorithmic logic, fixed iteration
orders and start vectors.  numpy supplies array storage and vectorized
arithmetic only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvergenceError",
    "HermitianSpectrum",
    "SingularMatrixError",
    "hermitian_eigs",
    "linear_solve",
    "mat_exp",
    "operator_norm",
    "solve_lyapunov",
]


class SingularMatrixError(ValueError):
    """Raised when a factorization meets a numerically singular pivot."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative kernel exceeds its iteration budget."""


def _as_square(A, name="matrix"):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


# ---------------------------------------------------------------------------
# matrix exponential


# Higham's order/theta staging for the diagonal Pade family: use the lowest
# order whose accuracy region contains ||At||_1, else scale down to order 13.
_PADE_ORDERS = (3, 5, 7, 9, 13)
_PADE_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}
_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}

# Stop before the squaring chain itself becomes the dominant error source.
_EXP_NORM_GUARD = 1e8


def _pade_low(B, order):
    n = B.shape[0]
    b = _PADE_COEFFS[order]
    eye = np.eye(n, dtype=complex)
    powers = {0: eye, 2: B @ B}
    for k in range(4, order + 1, 2):
        powers[k] = powers[k - 2] @ powers[2]
    U = np.zeros_like(B)
    V = np.zeros_like(B)
    for k in range(order, 0, -2):
        U += b[k] * powers[k - 1]
    U = B @ U
    for k in range(order - 1, -1, -2):
        V += b[k] * powers[k]
    return linear_solve(V - U, V + U)


def _pade13(B):
    n = B.shape[0]
    b = _PADE_COEFFS[13]
    eye = np.eye(n, dtype=complex)
    B2 = B @ B
    B4 = B2 @ B2
    B6 = B2 @ B4
    U = B @ (B6 @ (b[13] * B6 + b[11] * B4 + b[9] * B2)
             + b[7] * B6 + b[5] * B4 + b[3] * B2 + b[1] * eye)
    V = (B6 @ (b[12] * B6 + b[10] * B4 + b[8] * B2)
         + b[6] * B6 + b[4] * B4 + b[2] * B2 + b[0] * eye)
    return linear_solve(V - U, V + U)


def mat_exp(A, t=1.0):
    """e^{At} by Pade scaling-and-squaring.

    Order and scaling are chosen from the 1-norm of At.  Relative accuracy is
    at the 1e-12 level for ||At|| <= 50; far larger arguments trip the
    overflow guard because the squaring chain would dominate the error.
    """
    A = _as_square(A)
    if t < 0:
        raise ValueError("mat_exp requires t >= 0")
    B = A * t
    norm1 = float(np.max(np.sum(np.abs(B), axis=0))) if B.size else 0.0
    if norm1 > _EXP_NORM_GUARD:
        raise OverflowError(f"||At||_1 = {norm1:.3g} exceeds the mat_exp guard")
    if norm1 <= _PADE_THETA[13]:
        for order in _PADE_ORDERS:
            if norm1 <= _PADE_THETA[order]:
                return _pade_low(B, order) if order != 13 else _pade13(B)
    s = max(0, int(math.ceil(math.log2(norm1 / _PADE_THETA[13]))))
    F = _pade13(B / (2.0 ** s))
    for _ in range(s):
        F = F @ F
    return F


# ---------------------------------------------------------------------------
# linear solve


def linear_solve(M, B):
    """Solve M X = B by partial-pivot LU plus one refinement step.

    Accepts B as a vector or a matrix of right-hand sides.  Residual is at the
    1e-11 * ||B|| level whenever cond(M) is moderate (all in-package systems).
    """
    M = _as_square(M)
    n = M.shape[0]
    b = np.asarray(B, dtype=complex)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b[:, None]
    if b.shape[0] != n:
        raise ValueError("right-hand side dimension mismatch")

    lu = M.copy()
    perm = np.arange(n)
    scale = float(np.max(np.abs(M))) if n else 0.0
    tiny = max(scale, 1.0) * n * np.finfo(float).eps * 1e-2
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        piv = lu[k, k]
        if abs(piv) <= tiny:
            raise SingularMatrixError("numerically singular pivot in LU")
        lu[k + 1:, k] /= piv
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    if n and abs(lu[n - 1, n - 1]) <= tiny:
        raise SingularMatrixError("numerically singular pivot in LU")

    def lu_solve(rhs):
        y = rhs[perm].astype(complex)
        for k in range(1, n):
            y[k] -= lu[k, :k] @ y[:k]
        for k in range(n - 1, -1, -1):
            y[k] -= lu[k, k + 1:] @ y[k + 1:]
            y[k] /= lu[k, k]
        return y

    x = lu_solve(b)
    x += lu_solve(b - M @ x)  # one refinement pass in working precision
    return x[:, 0] if vector_rhs else x


# ---------------------------------------------------------------------------
# operator norm


# Documented deterministic perturbation used to escape starts that are
# orthogonal to the dominant eigenvector: the harmonic-series direction.
def _perturbation(n):
    d = 1.0 / np.arange(1.0, n + 1.0)
    return d / np.linalg.norm(d)


_TINY = float(np.finfo(float).tiny)


def _power_iteration(Bmat, v, rel_tol, max_iter):
    rho = 0.0
    w = Bmat @ v
    for _ in range(max_iter):
        nw = math.sqrt(float(np.real(np.vdot(w, w))))
        if nw == 0.0:
            return 0.0, True
        v = w / nw
        w = Bmat @ v
        rho = float(np.real(np.vdot(v, w)))
        r = w - rho * v
        resid = math.sqrt(float(np.real(np.vdot(r, r))))
        if resid <= rel_tol * max(rho, _TINY):
            return rho, True
    return rho, False


def operator_norm(M, rel_tol=1e-10, max_iter=300):
    """Largest singular value of M via power iteration on M^H M.

    Deterministic: all-ones start vector; after convergence the iteration is
    restarted once from a fixed perturbed start and the larger Rayleigh value
    wins (guards against a start vector orthogonal to the top eigenvector).
    A tiny gap between the top two singular values can stall the iteration;
    that case falls back to the Jacobi eigensolver, which is gap-independent.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError("operator_norm expects a matrix")
    if M.size == 0:
        return 0.0
    if M.shape[0] == M.shape[1]:
        d = np.diag(M)
        if float(np.max(np.abs(M - np.diag(d)))) == 0.0:
            return float(np.max(np.abs(d)))
    Bmat = M.conj().T @ M
    n = Bmat.shape[0]
    v0 = np.ones(n, dtype=complex) / math.sqrt(n)
    rho1, ok1 = _power_iteration(Bmat, v0, rel_tol, max_iter)
    v1 = (v0 + _perturbation(n)).astype(complex)
    v1 /= np.linalg.norm(v1)
    rho2, ok2 = _power_iteration(Bmat, v1, rel_tol, max_iter)
    if not (ok1 and ok2):
        spec = hermitian_eigs(0.5 * (Bmat + Bmat.conj().T))
        return math.sqrt(max(spec.lambda_max, 0.0))
    return math.sqrt(max(rho1, rho2, 0.0))


# ---------------------------------------------------------------------------
# Hermitian eigenvalues


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigenvalues (ascending) of a Hermitian matrix plus the residual
    max_k ||H v_k - lambda_k v_k||.  vectors[:, k] is the k-th eigenvector."""

    eigenvalues: np.ndarray
    residual: float
    vectors: np.ndarray

    @property
    def lambda_min(self):
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self):
        return float(self.eigenvalues[-1])


_JACOBI_MAX_SWEEPS = 30


def hermitian_eigs(H, hermitian_tol=1e-12):
    """All eigenvalues of a Hermitian matrix by cyclic complex Jacobi.

    Sweeps run until the off-diagonal Frobenius mass is below 1e-12 * ||H||.
    Non-Hermitian input (beyond hermitian_tol, relative) is an error.
    """
    H = _as_square(H, "H")
    n = H.shape[0]
    scale = max(float(np.linalg.norm(H)), 1.0)
    if float(np.linalg.norm(H - H.conj().T)) > hermitian_tol * scale:
        raise ValueError("hermitian_eigs requires a Hermitian matrix")
    A = 0.5 * (H + H.conj().T)
    V = np.eye(n, dtype=complex)
    norm_H = float(np.linalg.norm(A))
    if norm_H == 0.0:
        return HermitianSpectrum(np.zeros(n), 0.0, V)

    def off_norm(X):
        # norm of the strictly off-diagonal part; the difference-of-squares
        # form cancels catastrophically near convergence
        return float(np.linalg.norm(X - np.diag(np.diag(X))))

    target = 1e-12 * norm_H
    rot_threshold = target / max(n, 1)
    for _ in range(_JACOBI_MAX_SWEEPS):
        if off_norm(A) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= rot_threshold:
                    continue
                phi = apq / abs(apq)
                tau = (A[q, q].real - A[p, p].real) / (2.0 * abs(apq))
                sign = 1.0 if tau >= 0 else -1.0
                t_rot = sign / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t_rot * t_rot)
                s = t_rot * c
                Ap = A[:, p].copy()
                Aq = A[:, q].copy()
                A[:, p] = c * Ap - s * np.conj(phi) * Aq
                A[:, q] = s * phi * Ap + c * Aq
                Rp = A[p, :].copy()
                Rq = A[q, :].copy()
                A[p, :] = c * Rp - s * phi * Rq
                A[q, :] = s * np.conj(phi) * Rp + c * Rq
                Vp = V[:, p].copy()
                Vq = V[:, q].copy()
                V[:, p] = c * Vp - s * np.conj(phi) * Vq
                V[:, q] = s * phi * Vp + c * Vq
    else:
        raise ConvergenceError("Jacobi sweeps failed to reduce off-diagonal mass")

    eigs = np.real(np.diag(A))
    order = np.argsort(eigs, kind="stable")
    eigs = eigs[order]
    V = V[:, order]
    Hh = 0.5 * (H + H.conj().T)
    residual = float(np.max(np.linalg.norm(Hh @ V - V * eigs[None, :], axis=0))) if n else 0.0
    return HermitianSpectrum(eigs, residual, V)


# ---------------------------------------------------------------------------
# Lyapunov equation


def solve_lyapunov(A, R):
    """Hermitian Q with A^H Q + Q A = -R.

    Diagonal A gets the exact entrywise formula; dense A goes through the
    Kronecker-product linear system (state dimension is desk scale, so the
    n^2 x n^2 direct solve is acceptable).  The output is Hermitized and the
    residual is verified below 1e-10 * ||R||.
    """
    A = _as_square(A, "A")
    R = _as_square(R, "R")
    if A.shape != R.shape:
        raise ValueError("A and R must have matching shapes")
    n = A.shape[0]
    norm_R = float(np.linalg.norm(R))
    if norm_R > 0 and float(np.linalg.norm(R - R.conj().T)) > 1e-10 * norm_R:
        raise ValueError("R must be Hermitian")
    Rh = 0.5 * (R + R.conj().T)

    off_diag = A - np.diag(np.diag(A))
    if not np.any(off_diag):
        lam = np.diag(A)
        denom = np.conj(lam)[:, None] + lam[None, :]
        if np.min(np.abs(denom)) < 1e-14 * max(1.0, float(np.max(np.abs(lam)))):
            raise SingularMatrixError("Lyapunov system singular: A not stable")
        Q = -Rh / denom
    else:
        eye = np.eye(n, dtype=complex)
        K = np.kron(eye, A.conj().T) + np.kron(A.T, eye)
        try:
            q = linear_solve(K, -Rh.reshape(-1, order="F"))
        except SingularMatrixError as exc:
            raise SingularMatrixError(
                "Lyapunov system singular: A not stable") from exc
        Q = q.reshape((n, n), order="F")
    Q = 0.5 * (Q + Q.conj().T)
    residual = float(np.linalg.norm(A.conj().T @ Q + Q @ A + Rh))
    if residual > 1e-10 * max(norm_R, 1e-300):
        raise ArithmeticError(
            f"Lyapunov residual {residual:.3g} exceeds 1e-10 * ||R||")
    return Q
