import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from corpus import load
from pinsep import (CModule, Submodule, algebra_as_module, algebra_from_document, derivations, frobenius_chain,
                    hom_space, is_direct_summand, is_free, minimal_generators, parse_document, prime_field,
                    subalgebra_generated)
from pinsep.errors import PreconditionError
from pinsep.modules import quotient_module
from strategies import presentations


def algebra(doc):
    return algebra_from_document(parse_document(doc))


def truncated(p, n):
    return algebra(f"[algebra]\np = {p}\ngenerators = x\nx^{n} = 0\n")


def test_algebra_over_itself():
    C = truncated(3, 9)
    M = algebra_as_module(C)
    gens = minimal_generators(M)
    assert len(gens) == 1 and gens[0][np.nonzero(C.unit)[0][0]] != 0
    assert is_free(M) == 1


def test_fiber_of_the_exponent_one_counterexample():
    inst = load("exponent_one_counterexample")
    C, B = inst.C, inst.subs["B"]
    M = algebra_as_module(C, B)
    assert len(minimal_generators(M)) == 3
    assert is_free(M) is None


def test_zero_module():
    C = truncated(2, 2)
    Z = CModule(C, [np.zeros((0, 0), dtype=np.int64)], dim=0)
    assert minimal_generators(Z) == []
    assert is_free(Z) == 0


def test_rank_over_first_chain_step():
    C = truncated(3, 9)
    S = frobenius_chain(C, prime_field(C)).levels[1]
    assert S.dim == 3
    assert is_free(algebra_as_module(C, S)) == 3


def test_non_local_base_is_rejected():
    K = load("kxk").C
    with pytest.raises(PreconditionError):
        minimal_generators(algebra_as_module(K))


def test_summand_examples():
    C = truncated(2, 2)
    N = algebra_as_module(C)
    whole = Submodule(N, np.eye(2, dtype=np.int64))
    R = is_direct_summand(whole, N)
    assert R is not None and np.array_equal(R % 2, np.eye(2, dtype=np.int64))
    ideal = Submodule(N, [C.gen_vecs[0]])
    assert is_direct_summand(ideal, N) is None
    H = hom_space(C)
    assert is_direct_summand(derivations(C), H.module) is not None


def test_quotient_extremes():
    C = truncated(3, 3)
    N = algebra_as_module(C)
    assert quotient_module(N, Submodule(N, np.zeros((0, 3), dtype=np.int64))).dim == 3
    assert quotient_module(N, Submodule(N, np.eye(3, dtype=np.int64))).dim == 0


def test_unstable_subspace_is_rejected():
    C = truncated(3, 3)
    N = algebra_as_module(C)
    with pytest.raises(PreconditionError):
        Submodule(N, [C.unit])


def _random_local_sub(C, ref, data):
    seeds = data.draw(st.lists(st.lists(st.integers(0, C.p - 1), min_size=ref.dim, max_size=ref.dim),
                               max_size=2))
    # drop constant terms so the generated subalgebra stays local
    i0 = ref.index[tuple(0 for _ in ref.names)]
    for s in seeds:
        s[i0] = 0
    vecs = [sum((c * C.eval_monomial(m) for m, c in zip(ref.basis, s)), C.zero()) % C.p for s in seeds]
    rows = oracle.closure(ref, [ref.elem(s) for s in seeds])
    return subalgebra_generated(C, vecs), rows


@settings(max_examples=40)
@given(presentations(max_dim=24), st.data())
def test_freeness_matches_counting_criterion(doc, data):
    C = algebra(doc)
    ref = oracle.Alg.from_text(doc)
    B, rows = _random_local_sub(C, ref, data)
    assert B.dim == len(rows)
    M = algebra_as_module(C, B)
    gens = minimal_generators(M)
    mB = oracle.max_ideal(ref, rows)
    fiber = ref.dim - oracle.span_dim(oracle.ideal_times(ref, mB, oracle.identity_rows(ref)), ref.p)
    assert len(gens) == fiber
    assert M.submodule(gens).dim == C.dim
    rank = is_free(M)
    assert (rank is not None) == oracle.is_free_over(ref, rows)
    if rank is not None:
        assert rank * B.dim == C.dim
