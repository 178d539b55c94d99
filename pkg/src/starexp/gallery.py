"""Test matrices for the experiments plus Matrix Market ingestion."""
from dataclasses import dataclass, field
from math import isqrt

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DomainError
from .mmio import load_matrix_market, write_matrix_market

KINDS = (
    "poisson2d",
    "complex_tridiag",
    "decaying_eig",
    "toeplitz_tridiag",
    "toeplitz_penta",
    "chebyshev_dense",
    "from_file",
)

# gallery('toeppen', n) defaults: offsets -2, -1, 0, 1, 2
TOEPPEN_STENCIL = {-2: 1.0, -1: -10.0, 0: 0.0, 1: 10.0, 2: 1.0}

__all__ = [
    "GallerySpec", "generate", "describe", "scale_for_interval",
    "load_matrix_market", "write_matrix_market", "random_orthogonal",
]


@dataclass(frozen=True)
class GallerySpec:
    """Description of a test problem.

    For ``from_file``, ``paths`` holds either one file with ``A`` or a pair
    ``(mass, stiffness)`` giving ``A = mass^{-1} stiffness``; an optional
    ``vector_path`` replaces the seeded random start vector.
    """

    kind: str
    n: int | None = None
    seed: int = 0
    epsilon: float = 1e-13
    paths: tuple = field(default=())
    vector_path: str | None = None


def random_orthogonal(n, rng):
    """Orthogonal factor of a Gaussian matrix, columns sign-fixed by ``diag(R) > 0``."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def _unit_random(n, rng):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _poisson2d(n):
    side = isqrt(n)
    if side * side != n:
        raise DomainError(f"poisson2d needs a perfect-square n, got {n}")
    D = sp.diags([np.ones(side - 1), -2.0 * np.ones(side), np.ones(side - 1)], [-1, 0, 1])
    I = sp.identity(side)
    return (sp.kron(I, D) + sp.kron(D, I)).tocsr()


def _spectral(n, eigs, rng):
    Q = random_orthogonal(n, rng)
    return (Q * eigs) @ Q.T


def generate(spec):
    """Return ``(A, v)`` for ``spec``; ``v`` has unit 2-norm."""
    kind = spec.kind
    if kind not in KINDS:
        raise DomainError(f"unknown gallery kind {kind!r}; choose from {KINDS}")
    if kind == "from_file":
        return _from_file(spec)
    n = spec.n
    if n is None or n < 2:
        raise DomainError(f"{kind} needs n >= 2, got {n}")
    rng = np.random.default_rng(spec.seed)

    if kind == "poisson2d":
        A = _poisson2d(n)
        v = _unit_random(n, rng)
    elif kind == "complex_tridiag":
        A = sp.diags(
            [-1j * np.ones(n - 1), 2j * np.ones(n), -1j * np.ones(n - 1)], [-1, 0, 1], format="lil"
        )
        A[0, 0] += spec.epsilon
        A[n - 1, n - 1] += spec.epsilon
        A = A.tocsr()
        v = np.zeros(n, dtype=complex)
        v[0] = 1.0
    elif kind == "decaying_eig":
        i = np.arange(1, n + 1)
        A = _spectral(n, np.exp(-5.0 * (i - 1) / (n - 1)), rng)
        v = _unit_random(n, rng)
    elif kind == "toeplitz_tridiag":
        A = sp.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr")
        v = _unit_random(n, rng)
    elif kind == "toeplitz_penta":
        offsets = [k for k in TOEPPEN_STENCIL if abs(k) < n]
        diags = [TOEPPEN_STENCIL[k] * np.ones(n - abs(k)) for k in offsets]
        A = sp.diags(diags, offsets, format="csr")
        v = _unit_random(n, rng)
    else:  # chebyshev_dense
        i = np.arange(1, n + 1)
        A = _spectral(n, np.cos((2 * i - 1) * np.pi / (2 * n)), rng)
        v = _unit_random(n, rng)
    return A, v


def _from_file(spec):
    if len(spec.paths) == 1:
        A = load_matrix_market(spec.paths[0])
    elif len(spec.paths) == 2:
        mass = load_matrix_market(spec.paths[0])
        stiff = load_matrix_market(spec.paths[1])
        if sp.issparse(mass):
            K = stiff.toarray() if sp.issparse(stiff) else np.asarray(stiff)
            # splu refuses a complex right-hand side for a real factor
            dtype = np.result_type(mass.dtype, K.dtype)
            lu = spla.splu(sp.csc_matrix(mass, dtype=dtype))
            A = lu.solve(np.asarray(K, dtype=dtype))
        else:
            K = stiff.toarray() if sp.issparse(stiff) else stiff
            A = np.linalg.solve(mass, K)
    else:
        raise DomainError("from_file needs paths = (A,) or (mass, stiffness)")
    if A.shape[0] != A.shape[1]:
        raise DomainError(f"loaded matrix is not square: {A.shape}")
    n = A.shape[0]
    if spec.n is not None and spec.n != n:
        raise DomainError(f"spec.n={spec.n} but file holds an {n} x {n} matrix")
    if spec.vector_path:
        v = load_matrix_market(spec.vector_path)
        v = np.asarray(v.toarray() if sp.issparse(v) else v).ravel()
        if v.size != n:
            raise DomainError(f"vector length {v.size} does not match n={n}")
    else:
        v = _unit_random(n, np.random.default_rng(spec.seed))
    return A, v / np.linalg.norm(v)


def describe(spec):
    """Self-describing metadata for result files."""
    info = {"kind": spec.kind, "n": spec.n, "seed": spec.seed}
    if spec.kind == "complex_tridiag":
        info["epsilon"] = spec.epsilon
        info["vector"] = "e_1"
    if spec.kind == "toeplitz_penta":
        info["stencil"] = {str(k): v for k, v in TOEPPEN_STENCIL.items()}
    if spec.kind == "from_file":
        info["paths"] = list(spec.paths)
    return info


def scale_for_interval(A, t_max):
    """``t_max * A``: maps ``exp(t A)`` on ``[0, t_max]`` to the unit interval."""
    if not t_max > 0:
        raise DomainError(f"t_max must be positive, got {t_max}")
    return t_max * A
