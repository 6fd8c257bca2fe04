import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from pinsep import (DiffOperator, algebra_from_document, bracket, bracket_development, delta_alpha, derivations,
                    diff_filtration, diff_operators, extend, frobenius_chain, hom_space, iterated_bracket, kaehler,
                    order_of, parse_document, partials_from_pbasis, prime_field, principal_parts, restrict,
                    subalgebra_generated, tensor_square, whole)
from pinsep.classify import find_pbasis
from pinsep.diffcalc import _regular, binom_mod, kaehler_free_rank
from pinsep.errors import PreconditionError
from pinsep.exactla import inverse, matmul
from strategies import presentations


def algebra(doc):
    return algebra_from_document(parse_document(doc))


def truncated(p, n):
    return algebra(f"[algebra]\np = {p}\ngenerators = x\nx^{n} = 0\n")


def operator(C, images):
    """Operator on a one-generator algebra sending ``x^i`` to ``images[i]`` (a monomial map)."""
    X = np.array([C.eval_monomial((i,)) for i in range(C.dim)]).T
    Y = np.array([C.eval_monomial((j,)) * c % C.p if j is not None else C.zero() for j, c in images]).T
    return DiffOperator(matmul(Y, inverse(X, C.p), C.p), C, _regular(C))


def d_dx(C):
    p = C.p
    return operator(C, [(i - 1, i % p) if i else (None, 0) for i in range(C.dim)])


def brute_tensor_powers(p, n, k):
    """dim J^m for ``k[x]/(x^n) ⊗ k[x]/(x^n)``, m = 1..k, in plain Python."""
    basis = list(itertools.product(range(n), repeat=2))
    index = {b: i for i, b in enumerate(basis)}

    def mul(u, v):
        out = [0] * len(basis)
        for (a, b), cu in zip(basis, u):
            if not cu:
                continue
            for (c, d), cv in zip(basis, v):
                if cv and a + c < n and b + d < n:
                    out[index[(a + c, b + d)]] = (out[index[(a + c, b + d)]] + cu * cv) % p
        return out

    # kernel of a ⊗ b -> ab, by brute force over the monomial grading
    J = []
    for (a, b) in basis:
        v = [0] * len(basis)
        v[index[(a, b)]] = 1
        if a + b < n:
            v[index[(a + b, 0)]] = (v[index[(a + b, 0)]] - 1) % p
        if any(v):
            J.append(v)
    J = oracle.rref(J, p)[0]
    dims, power = [], J
    for _ in range(k):
        dims.append(len(power))
        power = oracle.rref([mul(u, v) for u in power for v in J], p)[0] if power else []
    return dims


def test_binomial_examples():
    assert binom_mod(6, 3, 3) == 2
    assert binom_mod(3, 1, 3) == 0
    assert binom_mod(2, 5, 7) == 0


@given(st.integers(0, 200), st.integers(0, 200), st.sampled_from([2, 3, 5, 7]))
def test_binomial_matches_exact(n, k, p):
    assert binom_mod(n, k, p) == math.comb(n, k) % p


def test_tensor_square_of_dual_numbers():
    C = truncated(2, 2)
    T = tensor_square(C)
    assert T.dim == 4
    assert T.J.shape[0] == 2
    ref = brute_tensor_powers(2, 2, 3)
    assert ref == [2, 0, 0]
    assert T.J_power(2).shape[0] == ref[1]
    assert principal_parts(C, None, 1).module.dim == 4 - ref[1]


def test_tensor_square_cube_root_of_zero():
    C = truncated(3, 3)
    T = tensor_square(C)
    ref = brute_tensor_powers(3, 3, 3)
    assert [T.J_power(m).shape[0] for m in (1, 2, 3)] == ref
    assert ref[2] == 0
    assert principal_parts(C, None, 2).module.dim == 9
    z = T.z[0]
    assert not np.any(matmul(z, matmul(z, z, 3), 3))


def test_trivial_extension_has_trivial_tensor_data():
    C = truncated(3, 3)
    T = tensor_square(C, whole(C))
    assert T.dim == 3 and T.J.shape[0] == 0
    assert principal_parts(C, None, 0).module.dim == 3
    assert kaehler(C, whole(C), "quotient").dim == 0
    assert derivations(C, whole(C)).dim == 0


def test_kaehler_examples():
    C = truncated(2, 2)
    for route in ("quotient", "presentation"):
        om = kaehler(C, None, route)
        assert om.dim == 2
    assert kaehler_free_rank(C) == (1, True)
    inst_doc = "[algebra]\np = 2\ngenerators = x, y\nx^2 = 0\ny^2 = 0\n"
    D = algebra(inst_doc)
    B = subalgebra_generated(D, [D.mul(D.gen_vecs[0], D.gen_vecs[1])])
    rank, free = kaehler_free_rank(D, B)
    assert not free
    om = kaehler(D, B, "quotient")
    assert om.dim != rank * D.dim


def test_derivation_examples():
    C = truncated(2, 2)
    der = derivations(C)
    assert der.dim == 2
    D3 = truncated(3, 3)
    assert derivations(D3).dim == 3


@pytest.mark.parametrize("p, n, k, dims", [(3, 3, 2, [3, 6, 9]), (2, 2, 1, [2, 4])])
def test_diff_dimensions(p, n, k, dims):
    C = truncated(p, n)
    for route in ("bracket", "dual"):
        assert [S.dim for S in diff_filtration(C, None, None, k, route)] == dims
    assert diff_operators(C, None, None, 0).dim == C.dim


def test_bracket_examples():
    C = truncated(2, 2)
    D = d_dx(C)
    assert bracket(C.unit, D).is_zero
    one = bracket(C.gen_vecs[0], D)
    assert np.array_equal(one.matrix, np.eye(2, dtype=np.int64))
    assert iterated_bracket([C.gen_vecs[0]] * 2, D).is_zero
    assert order_of(D) == 1
    mult = DiffOperator(C.mult_matrix(C.gen_vecs[0]), C, _regular(C))
    assert order_of(mult) == 0
    assert not np.any(bracket_development(D, [C.gen_vecs[0]] * 2, C.unit))


@settings(max_examples=25)
@given(st.data())
def test_every_linear_map_on_cube_root_has_order_at_most_two(data):
    C = truncated(3, 3)
    M = np.array(data.draw(st.lists(st.integers(0, 2), min_size=9, max_size=9))).reshape(3, 3)
    o = order_of(DiffOperator(M, C, _regular(C)))
    assert o is not None and o <= 2


def test_order_needs_generators():
    C = truncated(3, 9)
    with pytest.raises(PreconditionError):
        order_of(d_dx(C), [C.power(C.gen_vecs[0], 3)])


def test_divided_power_operators_on_x9():
    C = truncated(3, 9)
    S = frobenius_chain(C, prime_field(C)).levels[1]
    assert np.array_equal(delta_alpha(C, (0,)).matrix, np.eye(9, dtype=np.int64))
    d1 = delta_alpha(C, (1,))
    assert not np.any(restrict(d1, S).matrix)
    d3 = delta_alpha(C, (3,))
    R = restrict(d3, S)
    x3, x6 = C.eval_monomial((3,)), C.eval_monomial((6,))
    # restricted operator in the coordinates of k[x^3]
    assert np.array_equal(R(S.coords(x3)), C.unit)
    assert np.array_equal(R(S.coords(x6)), binom_mod(6, 3, 3) * x3 % 3)
    assert order_of(R) == 1


def test_extension_of_d_du_on_x9():
    C = truncated(3, 9)
    S = frobenius_chain(C, prime_field(C)).levels[1]
    xs = find_pbasis(C, S)
    SA = S.algebra
    # d/du on k[u]/(u^3) with u = x^3
    u = S.coords(C.eval_monomial((3,)))
    X = np.array([SA.power(u, i) for i in range(3)]).T
    Y = np.array([SA.zero(), SA.unit, 2 * u % 3]).T
    du = matmul(Y, inverse(X, 3), 3)
    dpart = DiffOperator(matmul(S.embedding, du, 3), SA, _regular(C), 1)
    D = extend(dpart, xs, C, S)
    # xs is some p-basis; compare with the definition on x^3 * x^j
    for j in range(3):
        xj = C.power(xs[0], j)
        assert np.array_equal(D(C.mul(C.eval_monomial((3,)), xj)), xj)
    assert order_of(D) <= 3
    assert np.array_equal(restrict(D, S).matrix, dpart.matrix)


def test_partials_on_a_pbasis():
    C = algebra("[algebra]\np = 2\ngenerators = x, y\nx^2 = 0\ny^2 = 0\n")
    x, y = C.gen_vecs
    parts = partials_from_pbasis([x, y], C)
    xy = C.mul(x, y)
    assert np.array_equal(parts[(1, 0)](xy), y)
    assert np.array_equal(parts[(0, 1)](xy), x)
    assert np.array_equal(parts[(1, 1)](xy), C.unit)
    with pytest.raises(PreconditionError):
        partials_from_pbasis([x], C)


def _random_operator(C, data):
    H = hom_space(C)
    c = data.draw(st.lists(st.integers(0, C.p - 1), min_size=H.dim, max_size=H.dim))
    return H.operator(np.array(c))


def _element(C, data):
    return np.array(data.draw(st.lists(st.integers(0, C.p - 1), min_size=C.dim, max_size=C.dim)))


@settings(max_examples=40)
@given(presentations(max_dim=12), st.data())
def test_p_fold_bracket_is_bracket_with_pth_power(doc, data):
    C = algebra(doc)
    D = _random_operator(C, data)
    x = _element(C, data)
    assert iterated_bracket([x] * C.p, D) == bracket(C.frobenius_power(x, 1), D)


@settings(max_examples=40)
@given(presentations(max_dim=12), st.data())
def test_bracket_development_matches_iteration(doc, data):
    C = algebra(doc)
    D = _random_operator(C, data)
    xs = [_element(C, data) for _ in range(data.draw(st.integers(1, 3)))]
    c = _element(C, data)
    assert np.array_equal(bracket_development(D, xs, c), iterated_bracket(xs, D)(c))


@settings(max_examples=25)
@given(presentations(max_dim=16), st.integers(0, 3))
def test_routes_give_identical_bases(doc, k):
    C = algebra(doc)
    a = diff_filtration(C, None, None, k, "bracket")
    b = diff_filtration(C, None, None, k, "dual")
    assert len(a) == len(b) == k + 1
    for x, y in zip(a, b):
        assert np.array_equal(x.basis, y.basis)
    dims = [S.dim for S in a]
    assert dims == sorted(dims) and dims[0] == C.dim


@settings(max_examples=25)
@given(presentations(max_dim=16), st.data())
def test_extension_restricts_back(doc, data):
    C = algebra(doc)
    A = prime_field(C)
    ch = frobenius_chain(C, A)
    if ch.exponent is None or ch.exponent < 1:
        return
    S = ch.levels[1]
    xs = find_pbasis(C, S)
    if xs is None:
        return
    SA = S.algebra
    k = data.draw(st.integers(0, 2))
    low = diff_operators(SA, None, None, k)
    HS = hom_space(SA)
    c = data.draw(st.lists(st.integers(0, C.p - 1), min_size=low.dim, max_size=low.dim))
    d = HS.operator(matmul(np.array(c), low.basis, C.p))
    dpart = DiffOperator(matmul(S.embedding, d.matrix, C.p), SA, _regular(C), k)
    D = extend(dpart, xs, C, S)
    assert np.array_equal(restrict(D, S).matrix, dpart.matrix)
    o = order_of(D)
    assert o is not None and o <= C.p * k
