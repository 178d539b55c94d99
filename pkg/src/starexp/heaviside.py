"""Legendre coefficient matrices of the Heaviside step ``Theta(t - s)``.

``T_full[k, l] = int int_{tau > rho} p_k(tau) p_l(rho) drho dtau`` is the
finite section of the infinite coefficient matrix. It is tridiagonal with
``T[0, 0] = 1`` and ``T[j, j-1] = -T[j-1, j] = 1/sqrt(4 j^2 - 1)``; the
method itself uses ``T_zeroed``, the same matrix with its last row removed.
"""
import threading
import warnings
from dataclasses import dataclass

import numpy as np

from .dense import SchurFactors, schur
from .errors import BudgetError, ConstructionError, DomainError
from .legendre import eval_phi, gauss_legendre

ORACLE_TOL = 1e-10
KRON_BUDGET = 4096


class InexactQuadratureWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CoeffMatrixSet:
    T_full: np.ndarray
    T_zeroed: np.ndarray
    M: int
    schur: SchurFactors  # of T_zeroed

    @property
    def phi_left(self):
        """``phi_M(-1)``, the initial-time basis vector."""
        return eval_phi(-1.0, self.M)


def _inner_integrals(x, M, rule):
    """``F[i, l] = int_{-1}^{x_i} p_l(rho) drho`` for every outer node ``x_i``."""
    F = np.empty((x.size, M))
    for i, xi in enumerate(x):
        half = 0.5 * (xi + 1.0)
        pts = half * rule.nodes + (half - 1.0)
        F[i] = half * (rule.weights @ eval_phi(pts, M))
    return F


def heaviside_matrix_quadrature(M, quad_order=None):
    """Full ``M x M`` coefficient matrix by nested Gauss-Legendre quadrature.

    By default each level uses the smallest rule that is exact (outer
    integrand degree ``2M - 1``, inner degree ``M - 1``) plus one node;
    larger rules only add rounding.
    """
    outer = gauss_legendre(quad_order or M + 1)
    inner = gauss_legendre(quad_order or M // 2 + 1)
    P = eval_phi(outer.nodes, M)
    F = _inner_integrals(outer.nodes, M, inner)
    return P.T @ (outer.weights[:, None] * F)


def heaviside_coeff(k, l, quad_order=None):
    """Single coefficient ``t_{k,l}`` by nested quadrature.

    Warns with :class:`InexactQuadratureWarning` when ``quad_order`` is too
    low for the polynomial integrand to be integrated exactly.
    """
    if k < 0 or l < 0:
        raise DomainError(f"indices must be nonnegative, got ({k}, {l})")
    needed = k + l + 2
    if quad_order is None:
        quad_order = needed
    elif quad_order < needed:
        warnings.warn(
            f"quad_order={quad_order} < {needed}: t[{k},{l}] may be inexact",
            InexactQuadratureWarning,
            stacklevel=2,
        )
    M = max(k, l) + 1
    rule = gauss_legendre(quad_order)
    pk = eval_phi(rule.nodes, M)[:, k]
    inner = _inner_integrals(rule.nodes, M, rule)[:, l]
    return float(rule.weights @ (pk * inner))


def closed_form_T(M):
    T = np.zeros((M, M))
    T[0, 0] = 1.0
    j = np.arange(1, M)
    off = 1.0 / np.sqrt(4.0 * j * j - 1.0)
    T[j, j - 1] = off
    T[j - 1, j] = -off
    return T


_cache = {}
_cache_lock = threading.Lock()


def build_T(M):
    """Return the (memoised) :class:`CoeffMatrixSet` of size ``M``.

    The tridiagonal closed form is cross-checked entrywise against the
    quadrature oracle; a mismatch above ``1e-10`` raises
    :class:`ConstructionError`.
    """
    if M < 1:
        raise DomainError(f"M must be positive, got {M}")
    with _cache_lock:
        hit = _cache.get(M)
    if hit is not None:
        return hit

    T_full = closed_form_T(M)
    oracle = heaviside_matrix_quadrature(M)
    gap = np.max(np.abs(oracle - T_full))
    if gap > ORACLE_TOL:
        raise ConstructionError(
            f"closed-form Heaviside matrix disagrees with quadrature by {gap:.3e} (M={M})"
        )
    T_zeroed = T_full.copy()
    T_zeroed[-1, :] = 0.0
    factors = schur(T_zeroed)
    for arr in (T_full, T_zeroed, factors.Q, factors.R):
        arr.setflags(write=False)
    built = CoeffMatrixSet(T_full=T_full, T_zeroed=T_zeroed, M=M, schur=factors)
    with _cache_lock:
        return _cache.setdefault(M, built)


@dataclass(frozen=True)
class KronSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    N: int
    M: int

    @property
    def dimension(self):
        return self.N * self.M

    def solve(self):
        """Dense LU solve; returns the ``M x N`` coefficient matrix ``X``."""
        x = np.linalg.solve(self.matrix, self.rhs)
        return x.reshape(self.N, self.M).T


def assemble_kron(A, T, v):
    """Dense system ``(I - A kron T_zeroed / 2) x = v kron phi(-1)``.

    ``A`` is the already time-scaled matrix. Oracle use only: refuses when
    ``N*M`` exceeds 4096.
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    v = np.asarray(v, dtype=complex).ravel()
    N, M = A.shape[0], T.M
    if A.shape != (N, N) or v.size != N:
        raise DomainError(f"shape mismatch: A {A.shape}, v {v.shape}")
    if N * M > KRON_BUDGET:
        raise BudgetError(f"N*M = {N * M} exceeds the dense Kronecker budget {KRON_BUDGET}")
    matrix = np.eye(N * M, dtype=complex) - 0.5 * np.kron(A, T.T_zeroed)
    rhs = np.kron(v, T.phi_left)
    return KronSystem(matrix=matrix, rhs=rhs, N=N, M=M)
