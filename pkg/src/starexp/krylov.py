"""Arnoldi process (modified Gram-Schmidt with one reorthogonalisation pass)."""
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .errors import DomainError


@dataclass(frozen=True)
class ArnoldiDecomp:
    V: np.ndarray  # N x k_effective, orthonormal columns
    H: np.ndarray  # k_effective x k_effective upper Hessenberg
    h_next: float
    v_next: np.ndarray | None  # None after a happy breakdown
    beta: float
    k_effective: int

    @property
    def breakdown(self):
        return self.v_next is None


def as_operator(A):
    """Return ``(matvec, n)`` for a dense array, sparse matrix, LinearOperator
    or a ``(callable, n)`` pair."""
    if isinstance(A, tuple):
        fn, n = A
        return fn, int(n)
    if isinstance(A, spla.LinearOperator):
        return A.matvec, A.shape[0]
    if hasattr(A, "shape") and hasattr(A, "__matmul__"):
        return (lambda x: A @ x), A.shape[0]
    raise DomainError(f"cannot interpret {type(A).__name__} as a linear operator")


def arnoldi(apply_A, v, k, breakdown_tol=1e-12):
    """Run ``k`` Arnoldi steps on ``v``.

    ``apply_A`` is a matrix-vector callable. Breakdown is declared when the
    new subdiagonal entry drops below ``breakdown_tol`` times the largest
    ``||A q_j||`` seen so far; the decomposition is then truncated to the
    invariant subspace found.
    """
    v = np.asarray(v, dtype=complex).ravel()
    N = v.size
    beta = float(np.linalg.norm(v))
    if beta == 0.0:
        raise DomainError("Arnoldi start vector is zero")
    if k < 1 or k > N:
        raise DomainError(f"need 1 <= k <= N, got k={k}, N={N}")

    V = np.zeros((N, k + 1), dtype=complex)
    H = np.zeros((k + 1, k), dtype=complex)
    V[:, 0] = v / beta
    a_scale = 0.0
    for j in range(k):
        w = np.asarray(apply_A(V[:, j]), dtype=complex).ravel()
        a_scale = max(a_scale, float(np.linalg.norm(w)))
        for _ in range(2):
            for i in range(j + 1):
                h = np.vdot(V[:, i], w)
                H[i, j] += h
                w -= h * V[:, i]
        h_next = float(np.linalg.norm(w))
        H[j + 1, j] = h_next
        if h_next <= breakdown_tol * a_scale:
            kk = j + 1
            return ArnoldiDecomp(
                V=V[:, :kk].copy(), H=H[:kk, :kk].copy(), h_next=h_next,
                v_next=None, beta=beta, k_effective=kk,
            )
        V[:, j + 1] = w / h_next
    return ArnoldiDecomp(
        V=V[:, :k].copy(), H=H[:k, :k].copy(), h_next=float(H[k, k - 1].real),
        v_next=V[:, k].copy(), beta=beta, k_effective=k,
    )
