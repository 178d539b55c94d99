"""Dense complex linear algebra: Schur factors, a triangular Stein solver,
the reference matrix exponential and cheap spectral estimates."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    BudgetError,
    ConvergenceError,
    DomainError,
    NumericalOverflowError,
    SingularityError,
)

PIVOT_TOL = 1e-14
EXPM_BUDGET = 4096
EIG_BUDGET = 512


@dataclass(frozen=True)
class SchurFactors:
    """``A = Q R Q^H`` with ``Q`` unitary and ``R`` upper triangular."""

    Q: np.ndarray
    R: np.ndarray

    @property
    def n(self):
        return self.R.shape[0]


def schur(A):
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DomainError(f"schur expects a nonempty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("schur: matrix has non-finite entries")
    try:
        R, Q = sla.schur(A, output="complex")
    except sla.LinAlgError as exc:
        raise ConvergenceError(f"Schur QR iteration did not converge (n={A.shape[0]}): {exc}") from exc
    return SchurFactors(Q=Q, R=np.triu(R))


@dataclass(frozen=True)
class SteinProblem:
    """``Y - scale * S @ Y @ B.T = C`` with ``S`` upper triangular."""

    S: np.ndarray
    B: np.ndarray
    C: np.ndarray
    scale: complex = 0.5


class SteinSolver:
    """Solver for ``Y - scale * S Y B^T = C`` with ``S`` upper triangular.

    ``B^T`` is Schur-reduced once at construction, ``B^T = Q R Q^H``. In the
    rotated unknown ``Yh = Y Q`` the operator becomes
    ``L(Yh) = Yh - scale * S Yh R``, triangular in both factors, and is solved
    row by row from the bottom (``M`` triangular solves of size ``N``).
    Unitary rotations leave 2-norms unchanged, so the norm and condition
    estimates below hold for the original Kronecker operator
    ``I - scale * (B kron S)`` as well.
    """

    def __init__(self, S, B, scale=0.5, B_schur=None):
        S = np.atleast_2d(np.asarray(S, dtype=complex))
        if S.shape[0] != S.shape[1]:
            raise DomainError(f"S must be square, got {S.shape}")
        if np.any(np.tril(S, -1) != 0):
            raise DomainError("S must be upper triangular")
        self.S = S
        self.scale = complex(scale)
        if B_schur is None:
            B = np.atleast_2d(np.asarray(B, dtype=complex))
            B_schur = schur(B.T)
        self.Q = B_schur.Q
        self.R = B_schur.R
        self.M = S.shape[0]
        self.N = self.R.shape[0]
        self._check_pivots()

    def _check_pivots(self):
        piv = 1.0 - self.scale * np.outer(np.diag(self.S), np.diag(self.R))
        if piv.size:
            i, j = np.unravel_index(np.argmin(np.abs(piv)), piv.shape)
            if abs(piv[i, j]) < PIVOT_TOL:
                raise SingularityError(
                    f"Stein operator singular: |1 - scale*S[{i},{i}]*R[{j},{j}]| = "
                    f"{abs(piv[i, j]):.3e}",
                    index=(int(i), int(j)),
                )

    # rotated-coordinate kernels
    def _solve_hat(self, Ch):
        S, R, s = self.S, self.R, self.scale
        eye = np.eye(self.N)
        Yh = np.zeros((self.M, self.N), dtype=complex)
        for i in range(self.M - 1, -1, -1):
            rhs = Ch[i].astype(complex, copy=True)
            if i + 1 < self.M:
                rhs += s * ((S[i, i + 1:] @ Yh[i + 1:]) @ R)
            Yh[i] = sla.solve_triangular(eye - s * S[i, i] * R, rhs, trans="T", lower=False)
        return Yh

    def _solve_hat_adjoint(self, Gh):
        S, Rh, sc = self.S, self.R.conj().T, np.conj(self.scale)
        eye = np.eye(self.N)
        Zh = np.zeros((self.M, self.N), dtype=complex)
        for i in range(self.M):
            rhs = Gh[i].astype(complex, copy=True)
            if i > 0:
                rhs += sc * ((S[:i, i].conj() @ Zh[:i]) @ Rh)
            Zh[i] = sla.solve_triangular(eye - sc * np.conj(S[i, i]) * Rh, rhs, trans="T", lower=True)
        return Zh

    def _apply_hat(self, Yh):
        return Yh - self.scale * (self.S @ Yh @ self.R)

    def _apply_hat_adjoint(self, Zh):
        return Zh - np.conj(self.scale) * (self.S.conj().T @ Zh @ self.R.conj().T)

    def solve(self, C):
        C = np.asarray(C, dtype=complex).reshape(self.M, self.N)
        return self._solve_hat(C @ self.Q) @ self.Q.conj().T

    def apply(self, Y):
        """``Y - scale * S Y B^T``."""
        Y = np.asarray(Y, dtype=complex)
        return self._apply_hat(Y @ self.Q) @ self.Q.conj().T

    def residual(self, Y, C):
        return np.linalg.norm(self.apply(Y) - C)

    def _power_norm(self, forward, backward, probes, iters, seed):
        rng = np.random.default_rng(seed)
        best = 0.0
        for _ in range(probes):
            x = rng.standard_normal((self.M, self.N)) + 1j * rng.standard_normal((self.M, self.N))
            x /= np.linalg.norm(x)
            for _ in range(iters):
                y = forward(x)
                best = max(best, float(np.linalg.norm(y)))
                x = backward(y)
                nx = np.linalg.norm(x)
                if nx == 0.0:
                    break
                x /= nx
        return best

    def norm_estimate(self, probes=1, iters=8, seed=0):
        """Lower estimate of the 2-norm of the Stein operator (power iteration)."""
        return self._power_norm(self._apply_hat, self._apply_hat_adjoint, probes, iters, seed)

    def inverse_norm_estimate(self, probes=1, iters=8, seed=0):
        """Lower estimate of the 2-norm of the inverse operator."""
        return self._power_norm(self._solve_hat, self._solve_hat_adjoint, probes, iters, seed)

    def condition_estimate(self, probes=1, iters=8, seed=0):
        return self.norm_estimate(probes, iters, seed) * self.inverse_norm_estimate(probes, iters, seed)


def solve_stein(p):
    """Solve a :class:`SteinProblem`; returns ``Y``."""
    return SteinSolver(p.S, p.B, p.scale).solve(p.C)


def expm_dense(A):
    """Reference ``exp(A)`` (scaling and squaring, Pade degree 13)."""
    A = np.atleast_2d(np.asarray(A))
    if A.shape[0] > EXPM_BUDGET:
        raise BudgetError(f"expm_dense limited to n <= {EXPM_BUDGET}, got {A.shape[0]}")
    with np.errstate(over="ignore", invalid="ignore"):
        E = sla.expm(A)
    if not np.all(np.isfinite(E)):
        raise NumericalOverflowError("matrix exponential overflowed")
    return E


def spectral_radius_estimate(apply_A, n, iters=100, seed=0, restarts=1):
    """Power-iteration estimate of the spectral radius.

    Returns the larger of ``|x^H A x|`` and ``sqrt|x^H A^2 x|`` at the final
    iterate (the latter handles dominant ``+-lambda`` pairs); maximised over
    ``restarts`` random starts. Generally a lower estimate.
    """
    if iters < 1:
        raise DomainError("iters must be >= 1")
    apply_A = _as_callable(apply_A)
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x /= np.linalg.norm(x)
        for _ in range(iters):
            y = apply_A(x)
            ny = np.linalg.norm(y)
            if ny == 0.0:
                break
            x = y / ny
        y = apply_A(x)
        z = apply_A(y)
        est = max(abs(np.vdot(x, y)), np.sqrt(abs(np.vdot(x, z))))
        best = max(best, float(est))
    return best


def eig_dense(A):
    A = np.atleast_2d(np.asarray(A))
    if A.shape[0] > EIG_BUDGET:
        raise BudgetError(f"eig_dense limited to n <= {EIG_BUDGET}, got {A.shape[0]}")
    return np.diag(schur(A).R).copy()


def _as_callable(A):
    if callable(A):
        return A
    return lambda x: A @ x
