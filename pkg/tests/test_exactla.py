import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from pinsep.errors import StructuralError
from pinsep.exactla import (EchelonBasis, FpMatrix, FpScalar, check_prime, in_span, intersect, inverse, kernel_basis,
                            matmul, rank, rref, row_space, same_span, solve)

PRIMES = st.sampled_from([2, 3, 5, 7, 251, 257])


@st.composite
def matrices(draw, max_rows=9, max_cols=9, p=None):
    p = draw(PRIMES) if p is None else p
    m = draw(st.integers(1, max_rows))
    n = draw(st.integers(1, max_cols))
    entries = draw(st.lists(st.integers(0, p - 1), min_size=m * n, max_size=m * n))
    return p, np.array(entries, dtype=np.int64).reshape(m, n)


@given(matrices())
def test_rref_matches_reference(pm):
    p, M = pm
    R, r, piv = rref(M, p)
    ref, ref_piv = oracle.rref(M.tolist(), p)
    assert r == len(ref)
    assert piv == ref_piv
    assert R[:r].tolist() == ref
    assert not np.any(R[r:])


@given(matrices())
def test_rref_is_idempotent(pm):
    p, M = pm
    R, r, piv = rref(M, p)
    R2, r2, piv2 = rref(R, p)
    assert np.array_equal(R, R2) and r == r2 and piv == piv2


@given(matrices())
def test_kernel_is_annihilated(pm):
    p, M = pm
    K = kernel_basis(M, p)
    assert K.shape == (M.shape[1] - rank(M, p), M.shape[1])
    if K.shape[0]:
        assert not np.any(matmul(M, K.T, p))
        assert rank(K, p) == K.shape[0]


@given(matrices(), st.data())
def test_solve_finds_preimage(pm, data):
    p, M = pm
    x0 = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=M.shape[1], max_size=M.shape[1])))
    b = matmul(M, x0, p)
    x = solve(M, b, p)
    assert x is not None
    assert np.array_equal(matmul(M, x, p), b)


def test_solve_reports_inconsistency():
    assert solve([[1, 0], [1, 0]], [0, 1], 3) is None


@given(matrices(max_rows=6, max_cols=6), st.data())
def test_matmul_agrees_with_integer_product(pm, data):
    p, A = pm
    cols = data.draw(st.integers(1, 5))
    B = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=A.shape[1] * cols,
                                    max_size=A.shape[1] * cols))).reshape(A.shape[1], cols)
    assert np.array_equal(matmul(A, B, p), (A.astype(object) @ B.astype(object)) % p)


def test_matmul_exact_for_large_modulus():
    p = 2_147_483_647
    rng = np.random.default_rng(3)
    A = rng.integers(0, p, (4, 70))
    B = rng.integers(0, p, (70, 3))
    assert np.array_equal(matmul(A, B, p), (A.astype(object) @ B.astype(object)) % p)


@given(st.integers(1, 6), st.sampled_from([2, 3, 5]), st.data())
def test_inverse_round_trip(n, p, data):
    M = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=n * n, max_size=n * n))).reshape(n, n)
    if rank(M, p) < n:
        with pytest.raises(StructuralError):
            inverse(M, p)
        return
    assert np.array_equal(matmul(M, inverse(M, p), p), np.eye(n, dtype=np.int64))


@given(matrices(max_cols=6, p=3), matrices(max_cols=6, p=3))
def test_intersection_dimension_formula(a, b):
    _, U = a
    _, W = b
    n = min(U.shape[1], W.shape[1])
    U, W = U[:, :n], W[:, :n]
    I = intersect(U, W, 3)
    assert I.shape[0] == rank(U, 3) + rank(W, 3) - rank(np.vstack([U, W]), 3)
    for v in I:
        assert in_span(v, U, 3) and in_span(v, W, 3)


@given(matrices())
def test_echelon_basis_tracks_row_space(pm):
    p, M = pm
    eb = EchelonBasis(M.shape[1], p)
    for row in M:
        eb.add(row)
    assert same_span(eb.rows, M, p)
    assert np.array_equal(eb.rows, row_space(M, p)[0])
    for row in M:
        assert eb.contains(row)
        c = eb.coordinates(row)
        assert np.array_equal(matmul(c, eb.rows, p), row % p)


@given(matrices())
def test_greedy_selects_independent_prefix(pm):
    p, M = pm
    idx = EchelonBasis(M.shape[1], p).greedy(M)
    assert len(idx) == rank(M, p)
    expected, eb = [], EchelonBasis(M.shape[1], p)
    for i, row in enumerate(M):
        if eb.add(row):
            expected.append(i)
    assert idx == expected


def test_prime_check():
    with pytest.raises(StructuralError):
        check_prime(4)
    assert check_prime(7) == 7


def test_typed_wrappers():
    a, b = FpScalar(5, 7), FpScalar(4, 7)
    assert (a * b).value == 6
    with pytest.raises(StructuralError):
        a + FpScalar(1, 5)
    M = FpMatrix([[1, 2], [3, 4]], 5)
    assert (M @ M.inverse()) == FpMatrix.identity(2, 5)
    assert M.rank() == 2


@settings(max_examples=20)
@given(st.integers(60, 140), st.integers(60, 140))
def test_gf2_packing_handles_word_boundaries(m, n):
    rng = np.random.default_rng(m * 1000 + n)
    M = rng.integers(0, 2, (m, n))
    R, r, piv = rref(M, 2)
    ref, ref_piv = oracle.rref(M.tolist(), 2)
    assert piv == ref_piv and R[:r].tolist() == ref
