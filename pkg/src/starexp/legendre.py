"""Orthonormal Legendre polynomials on [-1, 1] and quadrature helpers.

All polynomials here are normalised so that ``int_{-1}^{1} p_k(t)^2 dt = 1``,
i.e. ``p_k = sqrt((2k+1)/2) P_k`` with ``P_k`` the classical Legendre polynomial.
"""
from dataclasses import dataclass
from math import factorial

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError

CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, values):
        """Apply the rule to samples ``values`` taken at ``nodes`` (first axis)."""
        return np.tensordot(self.weights, values, axes=(0, 0))


def _check_points(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + CLAMP_TOL) or not np.all(np.isfinite(t)):
        raise DomainError(f"Legendre argument outside [-1, 1]: {t}")
    return np.clip(t, -1.0, 1.0)


def _recurrence_coeffs(k):
    a = np.sqrt((2 * k + 1) * (2 * k + 3)) / (k + 1)
    b = k / (k + 1) * np.sqrt((2 * k + 3) / (2 * k - 1)) if k > 0 else 0.0
    return a, b


def eval_phi(t, M):
    """Values ``[p_0(t), ..., p_{M-1}(t)]``.

    ``t`` may be a scalar or an array; the polynomial index is the trailing
    axis of the result. Arguments up to ``1e-12`` outside the interval are
    clamped onto it.
    """
    if M < 1:
        raise DomainError(f"M must be positive, got {M}")
    t = _check_points(t)
    out = np.empty(t.shape + (M,))
    out[..., 0] = 1.0 / np.sqrt(2.0)
    if M > 1:
        out[..., 1] = np.sqrt(1.5) * t
    for k in range(1, M - 1):
        a, b = _recurrence_coeffs(k)
        out[..., k + 1] = a * t * out[..., k] - b * out[..., k - 1]
    return out


def eval_phi_deriv(t, M):
    """Derivatives ``[p_0'(t), ..., p_{M-1}'(t)]``, same layout as :func:`eval_phi`."""
    p = eval_phi(t, M)
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    dp = np.zeros_like(p)
    if M > 1:
        dp[..., 1] = np.sqrt(1.5)
    for k in range(1, M - 1):
        a, b = _recurrence_coeffs(k)
        dp[..., k + 1] = a * (p[..., k] + t * dp[..., k]) - b * dp[..., k - 1]
    return dp


def gauss_legendre(order):
    """Gauss-Legendre rule with ``order`` nodes on [-1, 1]."""
    if order < 1:
        raise DomainError(f"quadrature order must be positive, got {order}")
    nodes, weights = leggauss(order)
    return QuadratureRule(nodes=nodes, weights=weights, order=order)


def legendre_coefficients(f, M, order=None):
    """Coefficients ``int f p_j`` for ``j < M`` by Gauss-Legendre quadrature.

    ``f`` must accept an array of nodes. The default order ``2(M+2)`` is exact
    for polynomial ``f`` of degree below ``3M+4``.
    """
    rule = gauss_legendre(order or 2 * (M + 2))
    values = np.asarray(f(rule.nodes))
    basis = eval_phi(rule.nodes, M)
    return np.tensordot(rule.weights[:, None] * basis, values, axes=(0, 0))


def monomial_shift_coeffs(k, M):
    """Legendre coefficients of ``(t+1)^k / k!`` truncated to length ``M``.

    The rule is the smallest one exact for the degree ``k + M - 1`` integrand
    (and at least ``k + 2`` nodes); extra nodes only add rounding error to
    the entries beyond ``k`` that should vanish.
    """
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    return legendre_coefficients(
        lambda t: (t + 1.0) ** k / factorial(k), M, order=max(k + 2, (k + M) // 2 + 1)
    )
