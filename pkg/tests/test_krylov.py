import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from hypothesis import given
from hypothesis import strategies as st

from conftest import crandn
from starexp.dense import eig_dense
from starexp.errors import DomainError
from starexp.krylov import arnoldi, as_operator


def _check_relation(A, dec):
    k = dec.k_effective
    V, H = dec.V, dec.H
    assert np.linalg.norm(V.conj().T @ V - np.eye(k)) <= k * 1e-12
    R = A @ V - V @ H
    if not dec.breakdown:
        R[:, -1] -= dec.h_next * dec.v_next
    normA = spla.norm(A) if sp.issparse(A) else np.linalg.norm(A)
    assert np.linalg.norm(R) <= k * 1e-10 * normA


def test_identity_breaks_down_at_once(rng):
    dec = arnoldi(lambda x: x, crandn(rng, 6), 3)
    assert dec.k_effective == 1 and dec.breakdown
    np.testing.assert_allclose(dec.H, [[1.0]])


def test_k1_is_rayleigh_quotient(rng):
    A, v = crandn(rng, 5, 5), crandn(rng, 5)
    dec = arnoldi(lambda x: A @ x, v, 1)
    q = v / np.linalg.norm(v)
    np.testing.assert_allclose(dec.H, [[q.conj() @ A @ q]], atol=1e-14)
    np.testing.assert_allclose(dec.V[:, 0], q)
    assert dec.beta == pytest.approx(np.linalg.norm(v))


def test_full_dimension_diagonal():
    d = np.arange(1.0, 9.0)
    dec = arnoldi(lambda x: d * x, np.ones(8), 8)
    np.testing.assert_allclose(np.sort(eig_dense(dec.H).real), d, atol=1e-10)


def test_breakdown_on_invariant_subspace():
    A = np.diag([1.0, 2.0, 3.0, 4.0, 5.0])
    v = np.array([1.0, 1.0, 0.0, 0.0, 0.0])
    dec = arnoldi(lambda x: A @ x, v, 5)
    assert dec.k_effective == 2 and dec.breakdown
    _check_relation(A, dec)


@given(st.integers(2, 60), st.integers(0, 2 ** 31))
def test_relation_dense(N, seed):
    rng = np.random.default_rng(seed)
    A, v = crandn(rng, N, N), crandn(rng, N)
    k = int(rng.integers(1, N + 1))
    dec = arnoldi(lambda x: A @ x, v, k)
    _check_relation(A, dec)
    np.testing.assert_allclose(dec.V[:, 0], v / np.linalg.norm(v), atol=1e-15)
    assert np.all(np.tril(dec.H, -2) == 0)


def test_relation_sparse_large():
    A = sp.random(5000, 5000, density=4e-4, random_state=3, format="csr") + sp.identity(5000)
    v = np.random.default_rng(3).standard_normal(5000)
    dec = arnoldi(lambda x: A @ x, v, 200)
    _check_relation(A, dec)


def test_shift_invariance(rng):
    A, v = crandn(rng, 30, 30), crandn(rng, 30)
    sigma = 2.5 - 1.0j
    d1 = arnoldi(lambda x: A @ x, v, 12)
    d2 = arnoldi(lambda x: A @ x + sigma * x, v, 12)
    np.testing.assert_allclose(d1.V, d2.V, atol=1e-10)
    np.testing.assert_allclose(d2.H - d1.H, sigma * np.eye(12), atol=1e-10)


def test_errors(rng):
    with pytest.raises(DomainError):
        arnoldi(lambda x: x, np.zeros(3), 2)
    with pytest.raises(DomainError):
        arnoldi(lambda x: x, np.ones(3), 4)
    with pytest.raises(DomainError):
        as_operator("not a matrix")


def test_as_operator_kinds(rng):
    A = crandn(rng, 4, 4)
    x = crandn(rng, 4)
    for op in (A, sp.csr_matrix(A), spla.aslinearoperator(A), (lambda y: A @ y, 4)):
        f, n = as_operator(op)
        assert n == 4
        np.testing.assert_allclose(f(x), A @ x)
