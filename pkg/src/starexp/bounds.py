"""A-priori truncation bounds for the star-method and the scalar Laguerre
form of the truncated star-Taylor series they are built on.

Conventions: ``A`` here is the operator on the reference interval, i.e. the
bound concerns ``exp(A (t+1))`` for ``t`` in [-1, 1]. For an interval
``[t0, t_max]`` and physical matrix ``A_phys`` that is
``A = (t_max - t0)/2 * A_phys``.
"""
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dense import SteinSolver, eig_dense, spectral_radius_estimate
from .errors import DomainError, InadmissibleParameters
from .krylov import arnoldi, as_operator

LEMMA33_CONST = 28.0
NORMALITY_TOL = 1e-12


def laguerre(k, z):
    """Laguerre polynomial ``L_k(z)`` by the three-term recurrence."""
    if k < 0:
        raise DomainError(f"degree must be nonnegative, got {k}")
    z = np.asarray(z, dtype=complex)
    prev = np.ones_like(z)
    if k == 0:
        return prev if prev.ndim else complex(prev)
    cur = 1.0 - z
    for n in range(1, k):
        prev, cur = cur, ((2 * n + 1 - z) * cur - n * prev) / (n + 1)
    return cur if cur.ndim else complex(cur)


def is_admissible_center(c):
    c = complex(c)
    return c != 0 and abs(c) < abs(1 - c)


def _require_center(c):
    if not is_admissible_center(c):
        raise DomainError(f"expansion center c={c} must satisfy c != 0 and |c| < |1-c|")


def scalar_star_partial_sum(lam, t, c, ell):
    """``1/(1-c) * sum_{k<=ell} (-c/(1-c))^k L_k(lam (t+1)/c)``.

    Converges to ``exp(lam (t+1))`` as ``ell`` grows.
    """
    c = complex(c)
    _require_center(c)
    z = complex(lam) * (t + 1.0) / c
    y = -c / (1 - c)
    prev, cur = 1.0 + 0j, 1.0 - z
    total = prev
    yk = 1.0 + 0j
    for n in range(1, ell + 1):
        yk *= y
        total += yk * cur
        prev, cur = cur, ((2 * n + 1 - z) * cur - n * prev) / (n + 1)
    return total / (1 - c)


def star_remainder_terms(lam, t, c, ell):
    """Magnitudes of the partial-sum terms, for rounding-error allowances."""
    c = complex(c)
    z = complex(lam) * (t + 1.0) / c
    y = -c / (1 - c)
    return np.array([abs(y ** k * laguerre(k, z)) for k in range(ell + 1)]) / abs(1 - c)


@dataclass(frozen=True)
class BoundParams:
    """Scalars entering the bounds.

    ``kappa=None`` means the eigenvector condition number is unknown; bounds
    are then reported unscaled (as if ``kappa = 1``).
    """

    c: complex
    rho: float
    kappa: float | None = 1.0
    M: int | None = None
    ell: int | None = None
    C_M: float | None = None

    def gamma_ell(self, t):
        return math.exp(2.0 * math.sqrt(self.rho * (t + 1.0) / ((self.ell + 1) * abs(self.c))))

    @property
    def mu_M(self):
        return math.exp(math.sqrt(9.0 * self.rho / ((self.M - 1) * abs(self.c))))

    @property
    def K_M(self):
        c = complex(self.c)
        gap = abs((abs(1 - c) - abs(c) * self.mu_M) * self.M)
        first = math.inf if gap == 0 else 1.0 / gap
        return first + LEMMA33_CONST * self.C_M


@dataclass(frozen=True)
class BoundResult:
    value: float
    branch: str
    violations: tuple = ()
    kappa_applied: bool = True
    simplified: float | None = None

    @property
    def hypotheses_ok(self):
        return not self.violations


def _log_ratio(c):
    return math.log(abs(1 - c) / abs(c))


def lemma_star_bound(params, t, strict=True):
    """Bound on ``|exp(A(t+1)) - [p_ell * Theta](t,-1)|`` for the truncated star-Taylor series.

    ``simplified`` carries the ``e|c| < |1-c|`` form when its hypotheses hold.
    """
    c, rho, ell = complex(params.c), float(params.rho), params.ell
    if ell is None:
        raise DomainError("lemma_star_bound needs ell")
    kappa = 1.0 if params.kappa is None else params.kappa
    violations = []
    if not is_admissible_center(c):
        violations.append(f"|c| < |1-c| with c != 0 fails for c={c}")
        if strict:
            raise InadmissibleParameters(violations)
        return BoundResult(math.inf, "lemma", tuple(violations), params.kappa is not None)
    ell_min = 4.0 * rho * (t + 1.0) / abs(c) / _log_ratio(c) ** 2 - 1.0
    if not ell > ell_min:
        violations.append(f"ell > {ell_min:.6g} fails for ell={ell}")
    gamma = params.gamma_ell(t)
    if not abs(c) * gamma < abs(1 - c):
        violations.append(f"|c| gamma_ell < |1-c| fails (gamma_ell={gamma:.6g})")
    if violations and strict:
        raise InadmissibleParameters(violations)

    denom = abs(1 - c) - abs(c) * gamma
    value = kappa / denom * abs(c * gamma / (1 - c)) ** (ell + 1) if denom > 0 else math.inf
    simplified = None
    if ell + 1 >= 4.0 * rho * (t + 1.0) / abs(c) and math.e * abs(c) < abs(1 - c):
        simplified = kappa / (abs(1 - c) - abs(c) * math.e) * abs(c * math.e / (1 - c)) ** (ell + 1)
    return BoundResult(value, "lemma", tuple(violations), params.kappa is not None, simplified)


def choose_c(rho, M):
    """Expansion center ``-9 rho / (M-1)``; admissibility is the caller's concern."""
    if M < 2:
        raise DomainError(f"M must be >= 2, got {M}")
    return complex(-9.0 * rho / (M - 1))


def theorem_threshold(rho, c):
    """Smallest ``M`` allowed by the general branch of the truncation theorem."""
    c = complex(c)
    return 9.0 * rho / abs(c) / _log_ratio(c) ** 2 + 1.0


def theorem_bound(params, strict=True, branch="auto"):
    """Bound ``kappa K_M M |c mu_M / (1-c)|^(M-1)`` on the method's truncation error.

    ``branch`` is ``"general"``, ``"special"`` (the ``c = -9 rho/(M-1)`` form
    ``kappa K_M M (9 rho e / (M-1))^(M-1)``) or ``"auto"``, which picks
    ``special`` whenever ``c`` equals that value.
    """
    c, rho, M = complex(params.c), float(params.rho), params.M
    if M is None or M < 2:
        raise DomainError("theorem_bound needs M >= 2")
    if params.C_M is None:
        raise DomainError("theorem_bound needs C_M (see estimate_C_M)")
    kappa = 1.0 if params.kappa is None else params.kappa
    special_c = choose_c(rho, M)
    if branch == "auto":
        branch = "special" if rho > 0 and abs(c - special_c) <= 1e-12 * abs(special_c) else "general"

    violations = []
    if not is_admissible_center(c):
        violations.append(f"|c| < |1-c| with c != 0 fails for c={c}")
        if strict:
            raise InadmissibleParameters(violations)
        return BoundResult(math.inf, branch, tuple(violations), params.kappa is not None)
    threshold = theorem_threshold(rho, c)
    if not M >= threshold:
        violations.append(f"M >= {threshold:.6g} fails for M={M}")
    if branch == "special":
        if abs(c - special_c) > 1e-12 * max(abs(special_c), 1e-300):
            violations.append(f"special branch needs c = {special_c.real:.6g}")
        if not M >= 18.0 * rho + 1.0:
            violations.append(f"M >= 18 rho + 1 = {18.0 * rho + 1.0:.6g} fails for M={M}")
    if violations and strict:
        raise InadmissibleParameters(violations)

    if branch == "special":
        factor = (9.0 * rho * math.e / (M - 1)) ** (M - 1)
    else:
        factor = abs(c * params.mu_M / (1 - c)) ** (M - 1)
    value = kappa * params.K_M * M * factor
    return BoundResult(value, branch, tuple(violations), params.kappa is not None)


def _dense(A):
    if sp.issparse(A):
        return A.toarray()
    return np.atleast_2d(np.asarray(A, dtype=complex))


def estimate_C_M(A, T, probes=4, iters=10, seed=0):
    """Randomised estimate of ``||(I - A kron T_zeroed)^{-1}||_2``.

    Power iteration on the inverse through Stein solves; the Kronecker matrix
    is never formed. This is the size-``M`` proxy for the norm involving the
    infinite zero-padded section.
    """
    solver = SteinSolver(T.schur.R, _dense(A), scale=1.0)
    return solver.inverse_norm_estimate(probes=probes, iters=iters, seed=seed)


def kappa_if_normal(A):
    """1.0 when ``A`` is numerically normal, else ``None`` (kappa unknown)."""
    A = _dense(A)
    fro = np.linalg.norm(A)
    if fro == 0:
        return 1.0
    comm = np.linalg.norm(A @ A.conj().T - A.conj().T @ A)
    return 1.0 if comm <= NORMALITY_TOL * fro ** 2 else None


def estimate_rho(A, iters=100, restarts=3, seed=0):
    matvec, n = as_operator(A)
    return spectral_radius_estimate(matvec, n, iters=iters, seed=seed, restarts=restarts)


def expansion_admissible(eigs_A, T, c):
    """Whether the resolvent expansion at ``c`` converges, judged from the
    eigenvalues ``lambda_i theta_j`` of ``A kron T_zeroed``.

    Returns ``(ok, ratio)`` with ``ratio = max |lambda theta - c| / |1 - c|``.
    """
    c = complex(c)
    theta = np.diag(T.schur.R)
    prods = np.outer(np.asarray(eigs_A, dtype=complex), theta).ravel()
    ratio = float(np.max(np.abs(prods - c)) / abs(1 - c))
    return ratio < 1.0, ratio


def eigenvalue_estimates(A, ritz_k=40, seed=0):
    """All eigenvalues for small dense ``A``; Ritz values (points of the
    field of values) otherwise."""
    matvec, n = as_operator(A)
    if n <= 512:
        return eig_dense(_dense(A))
    rng = np.random.default_rng(seed)
    dec = arnoldi(matvec, rng.standard_normal(n), min(ritz_k, n))
    return eig_dense(dec.H)


def stabilize_shift(A, T, margin=1.0):
    """Shift ``alpha`` making every ``(lambda_i - alpha) theta_j`` with
    ``Re theta_j > 0`` lie in the open left half-plane.

    Returns ``(A - alpha I, alpha)``; callers multiply the result by
    ``exp(alpha * scale * (tau + 1))``.
    """
    lam = np.asarray(eigenvalue_estimates(A), dtype=complex)
    theta = np.diag(T.schur.R)
    theta = theta[theta.real > 1e-14]
    if theta.size == 0:
        alpha = float(np.max(lam.real)) + margin
    else:
        # Re((lam - alpha) theta) < 0  <=>  alpha > Re lam - Im lam Im theta / Re theta
        crit = lam.real[:, None] - lam.imag[:, None] * (theta.imag / theta.real)[None, :]
        alpha = float(np.max(crit)) + margin
    n = A.shape[0]
    if sp.issparse(A):
        shifted = (A - alpha * sp.identity(n, format="csr")).tocsr()
    else:
        shifted = np.asarray(A) - alpha * np.eye(n)
    return shifted, alpha
