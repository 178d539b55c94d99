"""Action of ``exp(tA)`` on a vector for every ``t`` in an interval.

The solution is represented by an ``M x N`` coefficient matrix ``X`` solving
the Stein equation ``X - (1/2) T X At^T = phi(-1) v^T`` where ``T`` is the
last-row-zeroed Heaviside coefficient matrix and ``At = (t_max - t0) A``.
For any ``t`` the approximation is ``X^T T^T phi(tau(t))``.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .dense import SteinSolver
from .errors import BudgetError, DomainError, SingularityError
from .heaviside import build_T
from .krylov import arnoldi, as_operator
from .legendre import eval_phi, eval_phi_deriv

DENSE_BUDGET = 3000
EVAL_TOL = 1e-12
INITIAL_TOL = 1e-10
CONDITION_WARN = 1e6


class ConditioningWarning(UserWarning):
    pass


class InitialConditionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class IntervalMap:
    t0: float = 0.0
    t_max: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.t_max)) or self.t_max <= self.t0:
            raise DomainError(f"need t0 < t_max, got [{self.t0}, {self.t_max}]")

    @property
    def width(self):
        return self.t_max - self.t0

    @property
    def scale(self):
        """Factor multiplying ``A`` in the ODE on the reference interval."""
        return 0.5 * self.width

    def to_reference(self, t):
        return 2.0 * (np.asarray(t, dtype=float) - self.t0) / self.width - 1.0

    def check(self, t):
        t = np.asarray(t, dtype=float)
        slack = EVAL_TOL * self.width
        if np.any(t < self.t0 - slack) or np.any(t > self.t_max + slack):
            raise DomainError(f"time {t} outside the interval [{self.t0}, {self.t_max}]")
        return np.clip(t, self.t0, self.t_max)


@dataclass(frozen=True)
class StarExpSolution:
    X: np.ndarray
    Tt_zeroed: np.ndarray
    interval: IntervalMap
    M: int
    method: str
    k_effective: int | None = None
    condition_estimate: float | None = None
    initial_residual: float = field(default=np.nan, compare=False)

    @property
    def N(self):
        return self.X.shape[1]

    @property
    def method_tag(self):
        return self.method if self.k_effective is None else f"{self.method}({self.k_effective})"

    @property
    def coefficients(self):
        """Legendre coefficients ``C`` (``M x N``): ``u(t) = C^T phi(tau)``.

        For ``M = 1`` the zeroed matrix vanishes and the solution is taken
        to be the constant ``v``: ``X = v^T / sqrt(2)``, coefficient ``sqrt(2) v``.
        """
        if self.M == 1:
            return 2.0 * self.X
        return self.Tt_zeroed.T @ self.X

    def _eval_reference(self, tau):
        if self.M == 1:
            return 2.0 * self.X[0] * eval_phi(tau, 1)[0]
        g = self.Tt_zeroed @ eval_phi(tau, self.M)
        return self.X.T @ g

    def evaluate(self, t):
        t = float(self.interval.check(t))
        return self._eval_reference(float(self.interval.to_reference(t)))

    def evaluate_grid(self, ts):
        ts = self.interval.check(np.atleast_1d(np.asarray(ts, dtype=float)))
        out = np.empty((self.N, ts.size), dtype=complex)
        for j, t in enumerate(ts):
            out[:, j] = self._eval_reference(float(self.interval.to_reference(float(t))))
        return out


def evaluate(sol, t):
    return sol.evaluate(t)


def evaluate_grid(sol, ts):
    return sol.evaluate_grid(ts)


def _check_vector(v, N):
    v = np.asarray(v, dtype=complex).ravel()
    if v.size != N:
        raise DomainError(f"vector of length {v.size} for operator of size {N}")
    if not np.any(v):
        raise DomainError("initial vector is zero")
    return v


def _finish(X, T, interval, M, method, v, k_effective=None, cond=None):
    sol = StarExpSolution(
        X=X, Tt_zeroed=np.ascontiguousarray(T.T_zeroed.T), interval=interval, M=M,
        method=method, k_effective=k_effective, condition_estimate=cond,
    )
    u0 = sol.evaluate(interval.t0)
    resid = float(np.linalg.norm(u0 - v) / np.linalg.norm(v))
    object.__setattr__(sol, "initial_residual", resid)
    if resid > INITIAL_TOL:
        warnings.warn(
            f"{method}: relative initial-condition residual {resid:.2e} (M={M} may be too small)",
            InitialConditionWarning, stacklevel=3,
        )
    if cond is not None and cond > CONDITION_WARN:
        warnings.warn(
            f"{method}: Stein operator condition estimate {cond:.2e}; expect an error floor",
            ConditioningWarning, stacklevel=3,
        )
    return sol


def solve_direct(A, v, interval=None, M=16, *, estimate_condition=True, dense_budget=DENSE_BUDGET):
    """Direct variant: Schur-reduce ``At^T`` and solve the full Stein equation."""
    interval = interval or IntervalMap()
    if sp.issparse(A):
        N = A.shape[0]
        if N > dense_budget:
            raise BudgetError(f"N={N} exceeds the dense budget {dense_budget}; use solve_arnoldi")
        A = A.toarray()
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    N = A.shape[0]
    if A.shape != (N, N):
        raise DomainError(f"A must be square, got {A.shape}")
    if N > dense_budget:
        raise BudgetError(f"N={N} exceeds the dense budget {dense_budget}; use solve_arnoldi")
    v = _check_vector(v, N)

    T = build_T(M)
    U, S = T.schur.Q, T.schur.R
    try:
        solver = SteinSolver(S, interval.width * A, 0.5)
        w = U.conj().T @ T.phi_left
        Y = solver.solve(np.outer(w, v))
    except SingularityError as exc:
        raise SingularityError(f"direct star-method: {exc}", index=exc.index) from exc
    cond = solver.condition_estimate() if estimate_condition else None
    return _finish(U @ Y, T, interval, M, "direct", v, cond=cond)


def solve_arnoldi(apply_A, v, interval=None, M=16, k=20, *, breakdown_tol=1e-12,
                  estimate_condition=True):
    """Arnoldi-projected variant: ``Z - (1/2) S Z H^T = w e_1^T ||v||``, ``X = U Z V^T``.

    ``apply_A`` may be a dense or sparse matrix, a LinearOperator, or a
    ``(matvec, n)`` pair. ``k`` larger than ``N`` is reduced to ``N``.
    """
    interval = interval or IntervalMap()
    matvec, N = as_operator(apply_A)
    v = _check_vector(v, N)
    if k < 1:
        raise DomainError(f"Krylov dimension must be >= 1, got {k}")
    width = interval.width
    dec = arnoldi(lambda x: width * matvec(x), v, min(k, N), breakdown_tol=breakdown_tol)

    T = build_T(M)
    U, S = T.schur.Q, T.schur.R
    try:
        solver = SteinSolver(S, dec.H, 0.5)
        w = U.conj().T @ T.phi_left
        e1 = np.zeros(dec.k_effective)
        e1[0] = dec.beta
        Z = solver.solve(np.outer(w, e1))
    except SingularityError as exc:
        raise SingularityError(f"Arnoldi star-method: {exc}", index=exc.index) from exc
    cond = solver.condition_estimate() if estimate_condition else None
    X = (U @ Z) @ dec.V.T
    return _finish(X, T, interval, M, "arnoldi", v, k_effective=dec.k_effective, cond=cond)


def residual_diagnostic(sol, apply_A, n_samples=16):
    """Max relative ODE residual ``||u' - A u|| / ||u||`` at Chebyshev points."""
    if n_samples < 2:
        raise DomainError("n_samples must be >= 2")
    matvec, _ = as_operator(apply_A)
    j = np.arange(1, n_samples + 1)
    taus = np.cos((2 * j - 1) * np.pi / (2 * n_samples))
    C = sol.coefficients
    dtau = 2.0 / sol.interval.width
    worst = 0.0
    for tau in taus:
        u = C.T @ eval_phi(tau, sol.M)
        du = dtau * (C.T @ eval_phi_deriv(tau, sol.M))
        nu = np.linalg.norm(u)
        r = np.linalg.norm(du - matvec(u))
        worst = max(worst, float(r / nu) if nu > 0 else float(r))
    return worst
