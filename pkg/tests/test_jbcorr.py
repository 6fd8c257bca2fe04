import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import corpus
import oracle
from corpus import load
from pinsep import (algebra_from_document, close_subalgebra, constants_of, end_algebra, end_over,
                    enumerate_subalgebras, frobenius_chain, parse_document, prime_field, special_basis,
                    subalgebra_generated, verify_correspondence, whole)
from pinsep.errors import PreconditionError
from pinsep.jbcorr import close_span, constants_of_generators, free_end_over
from pinsep.modules import algebra_as_module, is_direct_summand, is_free
from pinsep.exactla import matmul
from strategies import presentations


def algebra(doc):
    return algebra_from_document(parse_document(doc))


def truncated(p, n):
    return algebra(f"[algebra]\np = {p}\ngenerators = x\nx^{n} = 0\n")


def brute_subalgebras(ref):
    """Every unital subalgebra, as frozen row spaces, by closing over all vectors in plain Python."""
    vectors = [list(v) for v in itertools.product(range(ref.p), repeat=ref.dim)]
    start = tuple(map(tuple, oracle.closure(ref, [])))
    seen, todo = {start}, [start]
    while todo:
        rows = todo.pop()
        for v in vectors:
            S = tuple(map(tuple, oracle.closure(ref, [ref.elem(list(r)) for r in rows] + [ref.elem(v)])))
            if S not in seen:
                seen.add(S)
                todo.append(S)
    return seen


def test_two_rings_share_constants_without_finite_exponent():
    inst = load("kxk")
    C = inst.C
    E = end_algebra(C)
    H1, H2 = (close_subalgebra(E, inst.doc.endomorphisms[n], label=n) for n in ("H1", "H2"))
    assert H1 != H2
    assert H1.dim == H2.dim == 3
    B1, B2 = constants_of(H1), constants_of(H2)
    assert B1 == B2 == prime_field(C)
    rep = verify_correspondence(C, endomorphism_rings=[H1, H2])
    assert rep.hypothesis == "not finite exponent"
    # the full endomorphism ring has the same constants as well
    assert rep.collisions == [{"constants_dim": 1, "rings": ["H1", "H2", "End over k"]}]
    assert rep.ok


def test_dual_numbers_round_trip():
    C = truncated(2, 2)
    E = end_algebra(C)
    assert E.dim == 4 and E.check_tensor_identification()
    H = end_over(C, whole(C), parent=E)
    assert H.dim == 2
    assert constants_of(H) == whole(C)
    assert constants_of(close_subalgebra(E)) == whole(C)
    full = end_over(C, prime_field(C), parent=E)
    assert full.dim == 4 and constants_of(full) == prime_field(C)
    sb = special_basis(full)
    assert sb.size == 2


def test_special_basis_over_first_chain_step():
    inst = load("truncated_x9")
    C, B = inst.C, inst.subs["B"]
    H = end_over(C, B)
    assert H.dim == 27
    sb = special_basis(H)
    assert [np.flatnonzero(t).tolist() for t in sb.elements] == [[0], [1], [2]]
    for i, f in enumerate(sb.operators):
        for j, t in enumerate(sb.elements):
            assert np.array_equal(matmul(f, t, 3), C.unit if i == j else C.zero())


def test_enumeration_matches_brute_force():
    inst = load("exponent_one_counterexample")
    found = enumerate_subalgebras(inst.C)
    ref = oracle.Alg.from_text(corpus.text("exponent_one_counterexample.pinsep"))
    assert len(found) == len(brute_subalgebras(ref)) == 12


def test_exhaustive_round_trips_where_free():
    inst = load("exponent_one_counterexample")
    rep = verify_correspondence(inst.C, enumerate_all=True)
    assert rep.enumerated and rep.ok
    kept = [s for s in rep.subrings if "excluded" not in s]
    assert len(kept) == 8 and all(s["roundtrip"] for s in kept)
    assert {s["dim"] for s in rep.subrings if "excluded" in s} == {2, 3}


def test_non_summand_ring_has_no_special_basis():
    inst = load("exponent_one_counterexample")
    C, B = inst.C, inst.subs["B"]
    H = end_over(C, B)
    assert not H.summand
    with pytest.raises(PreconditionError):
        special_basis(H)


def test_base_must_sit_inside_subring():
    C = truncated(3, 9)
    S = frobenius_chain(C, prime_field(C)).levels[1]
    with pytest.raises(PreconditionError):
        end_over(C, prime_field(C), S)
    with pytest.raises(PreconditionError, match="different algebra"):
        end_over(truncated(3, 9), S)


def test_summand_methods_agree():
    inst = load("exponent_one_counterexample")
    C = inst.C
    E = end_algebra(C)
    for S in enumerate_subalgebras(C):
        H = end_over(C, S, parent=E)
        assert (is_direct_summand(H.submodule, method="system") is not None) == H.summand
    assert not end_over(C, inst.subs["B"], parent=E).summand


@settings(max_examples=10)
@given(presentations(max_dim=8))
def test_correspondence_on_small_algebras(doc):
    C = algebra(doc)
    rep = verify_correspondence(C, enumerate_all=True)
    assert rep.ok, rep.violations
    ch = frobenius_chain(C, prime_field(C))
    E = end_algebra(C)
    for S in ch.levels:
        if is_free(algebra_as_module(C, S)) is None:
            continue
        H = end_over(C, S, parent=E)
        assert constants_of(H) == S
        assert end_over(C, constants_of(H), parent=E) == H


@settings(max_examples=15)
@given(presentations(max_dim=16))
def test_chain_levels_round_trip(doc):
    C = algebra(doc)
    E = end_algebra(C)
    for S in frobenius_chain(C, prime_field(C)).levels:
        if is_free(algebra_as_module(C, S)) is None:
            continue
        H = end_over(C, S, parent=E)
        assert H.dim * S.dim == C.dim * C.dim
        assert constants_of(H) == S
        assert special_basis(H).size * S.dim == C.dim


def test_free_end_matches_dense_ring():
    inst = load("truncated_x9")
    C, B = inst.C, inst.subs["B"]
    F = free_end_over(C, B)
    assert F.rank == 3 and F.dim == 27 and F.dual_pairing_holds()
    H = end_over(C, B)
    assert close_span(C, list(F.ops())).shape[0] == H.dim
    assert all(H.contains(f.reshape(-1)) for f in F.ops())
    assert constants_of_generators(C, F.ops) == B == constants_of(H)


def test_free_end_rejects_non_free_base():
    inst = load("exponent_one_counterexample")
    with pytest.raises(PreconditionError, match="not free"):
        free_end_over(inst.C, inst.subs["B"])


@pytest.mark.parametrize("name", ["composition_counterexample", "trivial_modular"])
def test_structured_round_trips_on_large_algebras(name):
    inst = load(name)
    levels = frobenius_chain(inst.C, inst.k).levels
    rep = verify_correspondence(inst.C, subrings=list(inst.subs.values()) + levels)
    assert rep.ok
    kept = [s for s in rep.subrings if "excluded" not in s]
    assert kept and all(s["roundtrip"] and s["end_roundtrip"] for s in kept)
    assert all(s["end_dim"] == inst.C.dim * s["rank"] for s in kept)


@settings(max_examples=20)
@given(presentations(max_dim=16), st.data())
def test_structured_and_dense_routes_agree(doc, data):
    C = algebra(doc)
    ref = oracle.Alg.from_text(doc)
    seeds = data.draw(st.lists(st.lists(st.integers(0, C.p - 1), min_size=C.dim, max_size=C.dim), max_size=2))
    i0 = ref.index[tuple(0 for _ in ref.names)]
    for s in seeds:
        s[i0] = 0
    B = subalgebra_generated(C, [sum((c * C.eval_monomial(m) for m, c in zip(ref.basis, s)), C.zero()) % C.p
                                 for s in seeds])
    subs = [B] + frobenius_chain(C, prime_field(C)).levels
    fast = verify_correspondence(C, subrings=subs, structured=True)
    slow = verify_correspondence(C, subrings=subs, structured=False)
    keys = ("subring", "dim", "rank", "end_dim", "constants_dim", "roundtrip")
    assert [{k: e.get(k) for k in keys} for e in fast.subrings] == [{k: e.get(k) for k in keys} for e in slow.subrings]
    assert fast.ok and slow.ok


def test_closure_of_a_derivation_is_everything():
    C = truncated(3, 3)
    E = end_algebra(C)
    x = C.gen_vecs[0]
    d = np.array([C.zero(), C.unit, 2 * x % 3]).T
    H = close_subalgebra(E, [d.reshape(-1)])
    assert H.dim == 9
    assert constants_of(H) == prime_field(C)
    assert subalgebra_generated(C, []) == prime_field(C)
