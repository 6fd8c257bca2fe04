"""Endomorphism algebras and the correspondence between subalgebras and their endomorphism rings.

Endomorphisms of ``C`` are ``d x d`` matrices acting on columns, stored
flattened row-major as vectors of length ``d*d``.  ``End_A(C)`` is a left
``C``-module through postcomposition with multiplication operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import config
from .algebra import FiniteAlgebra, Subalgebra, frobenius_chain, prime_field, subalgebra_generated, whole
from .diffcalc import HomSpace, _regular, tensor_square
from .errors import PreconditionError, ResourceError
from .exactla import EchelonBasis, canon, inverse, kernel_basis, matmul, row_space
from .modules import CModule, Submodule, algebra_as_module, is_direct_summand, is_free, minimal_generators

__all__ = [
    "EndAlgebra",
    "EndSubalgebra",
    "end_algebra",
    "end_over",
    "constants_of",
    "close_subalgebra",
    "special_basis",
    "SpecialBasis",
    "enumerate_subalgebras",
    "verify_correspondence",
    "CorrespondenceReport",
    "FreeEnd",
    "free_end_over",
    "constants_of_generators",
]


def _rank_over(C: FiniteAlgebra, B: Subalgebra) -> int | None:
    """Rank of ``C`` as a free ``B``-module, None when not free."""
    if B.dim == C.dim:
        return 1
    if B.dim == 1:
        return C.dim
    if not B.algebra.is_local:
        raise PreconditionError("freeness over a non-local subalgebra is not decided")
    return is_free(algebra_as_module(C, B))


class EndAlgebra:
    """``End_A(C)`` for ``C`` free over ``A``."""

    def __init__(self, C: FiniteAlgebra, A: Subalgebra | None = None, *, force: bool = False):
        A = prime_field(C) if A is None else A
        rank = _rank_over(C, A)
        if rank is None:
            raise PreconditionError("C is not free over A")
        self.C, self.A, self.rank = C, A, rank
        self.hom = HomSpace(C, A, _regular(C), force=force)
        if self.hom.dim != C.dim * rank:
            raise AssertionError(f"End has dimension {self.hom.dim}, expected {C.dim * rank}")

    @property
    def dim(self) -> int:
        return self.hom.dim

    @property
    def p(self) -> int:
        return self.C.p

    @property
    def n(self) -> int:
        return self.C.dim

    @property
    def basis(self) -> np.ndarray:
        """Flattened basis endomorphisms (rows, canonical rref)."""
        return self.hom.basis

    @property
    def unit(self) -> np.ndarray:
        return np.eye(self.n, dtype=np.int64).reshape(-1)

    def matrix(self, flat) -> np.ndarray:
        return canon(flat, self.p).reshape(self.n, self.n)

    def compose(self, f, g) -> np.ndarray:
        """Flattened ``f o g``."""
        return matmul(self.matrix(f), self.matrix(g), self.p).reshape(-1)

    def multiplication(self, c) -> np.ndarray:
        """The flattened multiplication operator ``L_c``."""
        return self.C.mult_matrix(c).reshape(-1)

    @cached_property
    def embedded_C(self) -> np.ndarray:
        """Multiplication operators of the basis of ``C``, flattened."""
        return np.array([self.multiplication(self.C.basis_vector(i)) for i in range(self.n)])

    @property
    def module(self) -> CModule:
        return self.hom.module

    def coords(self, flats) -> np.ndarray:
        return self.hom.coords(flats)

    def contains(self, flat) -> bool:
        eb = EchelonBasis(self.n * self.n, self.p)
        eb.rows, eb.pivots = self.basis, list(self.hom.pivots)
        return eb.contains(flat)

    def tensor_form(self, flat) -> np.ndarray:
        """The ``C``-linear map ``C (x)_A C -> C``, ``a (x) b -> a f(b)``, in tensor coordinates."""
        T = tensor_square(self.C, self.A, require_free=False)
        f = self.matrix(flat)
        d, p = self.n, self.p
        full = np.zeros((d, d * d), dtype=np.int64)
        for i in range(d):
            full[:, i * d:(i + 1) * d] = matmul(self.C.mult_matrix(self.C.basis_vector(i)), f, p)
        return matmul(full, T.lift, p)

    def from_tensor_form(self, F) -> np.ndarray:
        """Inverse of :meth:`tensor_form`: ``b -> F(1 (x) b)``."""
        T = tensor_square(self.C, self.A, require_free=False)
        d, p = self.n, self.p
        ones = np.kron(self.C.unit.reshape(-1, 1), np.eye(d, dtype=np.int64))
        return matmul(canon(F, p), matmul(T.proj, ones, p), p).reshape(-1)

    def check_tensor_identification(self) -> bool:
        """Basis endomorphisms survive the round trip through tensor form, which is ``C``-linear."""
        T = tensor_square(self.C, self.A, require_free=False)
        p = self.p
        for b in self.basis:
            F = self.tensor_form(b)
            for g, M in zip(self.C.gen_vecs, T.module.gen_action):
                if np.any((matmul(F, M, p) - matmul(self.C.mult_matrix(g), F, p)) % p):
                    return False
            if not np.array_equal(self.from_tensor_form(F), canon(b, p)):
                return False
        return True

    def subalgebra(self, flats) -> "EndSubalgebra":
        return EndSubalgebra(self, flats)


def end_algebra(C: FiniteAlgebra, A: Subalgebra | None = None, *, force: bool = False) -> EndAlgebra:
    return EndAlgebra(C, A, force=force)


class EndSubalgebra:
    """A subspace of ``End_A(C)`` with flags verified at construction."""

    def __init__(self, parent: EndAlgebra, flats, *, label: str | None = None):
        self.parent = parent
        p, n = parent.p, parent.n
        V = canon(np.asarray(flats), p).reshape(-1, n * n)
        self.basis, self.pivots = row_space(V, p)
        self.label = label
        for v in self.basis:
            if not parent.contains(v):
                raise PreconditionError("element is not A-linear")
        self.contains_unit = self.contains(parent.unit)
        self.c_stable = self._c_stable()
        self.composition_closed = self._composition_closed()
        self.retraction = self._summand() if self.c_stable else None

    @property
    def summand(self) -> bool:
        return self.retraction is not None

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def is_unital_subalgebra(self) -> bool:
        return self.contains_unit and self.composition_closed

    def __eq__(self, other):
        if not isinstance(other, EndSubalgebra):
            return NotImplemented
        return self.parent is other.parent and np.array_equal(self.basis, other.basis)

    def __hash__(self):
        return hash((id(self.parent), self.basis.tobytes()))

    def __repr__(self):
        nm = f"{self.label}, " if self.label else ""
        return f"EndSubalgebra({nm}dim={self.dim})"

    @cached_property
    def _echelon(self) -> EchelonBasis:
        eb = EchelonBasis(self.parent.n ** 2, self.parent.p)
        eb.rows, eb.pivots = self.basis, list(self.pivots)
        return eb

    def contains(self, flat) -> bool:
        return self._echelon.contains(flat)

    def issubset(self, other: "EndSubalgebra") -> bool:
        return all(other.contains(b) for b in self.basis)

    @property
    def stacked(self) -> np.ndarray:
        n = self.parent.n
        return self.basis.reshape(-1, n, n)

    def _images_in(self, left: np.ndarray, right: np.ndarray) -> bool:
        """Whether every product ``l o r`` of the stacked families lies in the span."""
        p, n = self.parent.p, self.parent.n
        if left.shape[0] == 0 or right.shape[0] == 0:
            return True
        k = right.shape[0]
        wide = right.transpose(1, 0, 2).reshape(n, k * n)
        for L in left:
            prods = matmul(L, wide, p).reshape(n, k, n).transpose(1, 0, 2)
            if np.any(self._echelon.reduce(prods.reshape(-1, n * n))):
                return False
        return True

    def _c_stable(self) -> bool:
        gens = np.array([self.parent.C.mult_matrix(g) for g in self.parent.C.gen_vecs])
        return self._images_in(gens, self.stacked)

    @cached_property
    def submodule(self) -> Submodule:
        """The span as a submodule of ``End_A(C)`` (requires left ``C``-stability)."""
        if not self.c_stable:
            raise PreconditionError("subspace is not stable under multiplication by C")
        return Submodule(self.parent.module, self.parent.coords(self.basis), check=False)

    @cached_property
    def module_generators(self) -> np.ndarray:
        """Flattened ``C``-module generators: a minimal set for local ``C``, the basis otherwise."""
        if self.c_stable and self.parent.C.is_local:
            S = self.submodule
            gens = minimal_generators(S.module, self._identity_first(S))
            return self._to_flat(S, gens)
        return self.basis

    def _identity_first(self, S: Submodule) -> np.ndarray:
        cands = [np.eye(S.dim, dtype=np.int64)]
        if self.contains_unit:
            cands.insert(0, S.coords(self.parent.coords(self.parent.unit)).reshape(1, -1))
        return np.vstack(cands)

    def _to_flat(self, S: Submodule, gens) -> np.ndarray:
        p = self.parent.p
        if not gens:
            return np.zeros((0, self.parent.n ** 2), dtype=np.int64)
        parent_coords = matmul(np.array(gens), S.basis, p)
        return self.parent.hom.flat(parent_coords)

    def _composition_closed(self) -> bool:
        if self.c_stable and self.parent.C.is_local:
            # (c f) o g = c (f o g), so C-module generators on the left suffice
            n = self.parent.n
            return self._images_in(self.module_generators.reshape(-1, n, n), self.stacked)
        if self.dim > 400:
            raise ResourceError("composition closure check too large")
        return self._images_in(self.stacked, self.stacked)

    def _summand(self) -> np.ndarray | None:
        # End_A(C) is free over C, so the Nakayama test applies when C is local
        return is_direct_summand(self.submodule, method="local" if self.parent.C.is_local else "system")


def end_over(C: FiniteAlgebra, B: Subalgebra, A: Subalgebra | None = None, *,
             parent: EndAlgebra | None = None) -> EndSubalgebra:
    """``End_B(C)`` inside ``End_A(C)``."""
    if B.owner is not C:
        raise PreconditionError("subalgebra belongs to a different algebra")
    E = parent if parent is not None else end_algebra(C, A)
    if not E.A.issubset(B):
        raise PreconditionError("B does not contain the base A")
    gens = list(B.algebra_gens)
    label = f"End over {_sub_label(C, B)}"
    if not gens:
        return EndSubalgebra(E, E.basis, label=label)
    p, n = E.p, E.n
    stacked = E.hom.stacked
    blocks = []
    for g in gens:
        L = C.mult_matrix(g)
        comm = (np.einsum("kab,bc->kac", stacked, L) - np.einsum("ab,kbc->kac", L, stacked)) % p
        blocks.append(comm.reshape(E.dim, -1))
    K = kernel_basis(np.hstack(blocks).T, p)
    flats = E.hom.flat(K) if K.shape[0] else np.zeros((0, n * n), dtype=np.int64)
    return EndSubalgebra(E, flats, label=label)


class FreeEnd:
    """``End_B(C)`` for ``C`` free over ``B``, without the ``d^2``-dimensional ambient space.

    With a ``B``-basis ``t_j`` of ``C`` the operators ``delta_j`` sending
    ``sum_i b_i t_i`` to ``b_j`` form a ``C``-basis; ``f = sum_j f(t_j) delta_j``
    is a ``C``-linear retraction onto it, so the ring is a direct summand.
    """

    def __init__(self, C: FiniteAlgebra, B: Subalgebra):
        if B.owner is not C:
            raise PreconditionError("subalgebra belongs to a different algebra")
        if not B.algebra.is_local:
            raise PreconditionError("freeness over a non-local subalgebra is not decided")
        p, d, m = C.p, C.dim, B.dim
        M = algebra_as_module(C, B)
        # the unit first, so that t_0 = 1 whenever possible
        ts = minimal_generators(M, np.vstack([C.unit.reshape(1, -1), np.eye(d, dtype=np.int64)]))
        if len(ts) * m != d:
            raise PreconditionError("C is not free over B")
        Bt = B.basis.T
        r = len(ts)
        # column (j, k) is b_k t_j, built from whichever family needs fewer multiplication matrices
        if r <= m:
            Phi = np.hstack([matmul(C.mult_matrix(t), Bt, p) for t in ts])
        else:
            T = np.array(ts).T
            cols = [matmul(C.mult_matrix(b), T, p) for b in B.basis]
            Phi = np.stack(cols, axis=2).reshape(d, r * m)
        self.C, self.B, self.ts, self.phi = C, B, np.array(ts), Phi
        self.phi_inv = inverse(Phi, p)
        for g in B.algebra_gens:
            Lg = C.mult_matrix(g)
            act = matmul(Lg, Bt, p)[B.pivots, :]
            block = np.kron(np.eye(self.rank, dtype=np.int64), act)
            if not np.array_equal(matmul(self.phi_inv, matmul(Lg, Phi, p), p), block):
                raise AssertionError("coordinate operators are not B-linear")

    @property
    def rank(self) -> int:
        return len(self.ts)

    @property
    def dim(self) -> int:
        return self.rank * self.C.dim

    def op(self, j: int) -> np.ndarray:
        m = self.B.dim
        return matmul(self.B.basis.T, self.phi_inv[j * m:(j + 1) * m], self.C.p)

    def ops(self):
        return (self.op(j) for j in range(self.rank))

    def dual_pairing_holds(self) -> bool:
        """``delta_i(t_j) = delta_ij``."""
        p, m = self.C.p, self.B.dim
        Y = matmul(self.phi_inv, self.ts.T, p)
        for i in range(self.rank):
            want = np.zeros((self.C.dim, self.rank), dtype=np.int64)
            want[:, i] = self.C.unit
            if not np.array_equal(matmul(self.B.basis.T, Y[i * m:(i + 1) * m], p), want):
                return False
        return True


def free_end_over(C: FiniteAlgebra, B: Subalgebra) -> FreeEnd:
    """``End_B(C)`` through a ``B``-basis of ``C``."""
    return FreeEnd(C, B)


def _generate_within(C: FiniteAlgebra, S: Subalgebra) -> tuple[list[np.ndarray], bool]:
    """Greedy algebra generators taken from ``S`` and whether they generate exactly ``S``.

    The generators of ``C`` are tried before the basis of ``S``.  Equality
    with the generated subalgebra is also the closedness test for ``S``.
    """
    gens: list[np.ndarray] = []
    mats: list[np.ndarray] = []
    T = prime_field(C)
    for b in list(C.gen_vecs) + list(S.basis):
        if T.dim >= S.dim:
            break
        if not S.contains(b) or T.contains(b):
            continue
        gens.append(b)
        mats.append(C.mult_matrix(b))
        T = subalgebra_generated(C, gens, seed_mats=mats)
        if not T.issubset(S):
            return gens, False
    return gens, T == S


def constants_of_generators(C: FiniteAlgebra, ops: Callable[[], Iterable[np.ndarray]], *,
                            batch: int = 16) -> Subalgebra:
    """``{x : f(x y) = x f(y)}`` for ``f`` ranging over ``C``-module generators given by ``ops()``.

    Constraints from ``y = 1``, then from basis elements ``y``, cut down a
    candidate space until it is a subalgebra whose generators commute with
    every ``f``; that candidate is then exactly the space of constants.
    """
    p, d = C.p, C.dim
    K = np.eye(d, dtype=np.int64)  # columns span the candidate space
    ys = [C.unit] + [C.basis_vector(i) for i in range(d)]
    for y in ys:
        Ly = None if np.array_equal(y, C.unit) else C.mult_matrix(y)
        pending: list[np.ndarray] = []

        def cut(K):
            sub = kernel_basis(np.vstack(pending), p)
            pending.clear()
            return matmul(K, sub.T, p) if sub.shape[0] else np.zeros((d, 0), dtype=np.int64)

        for f in ops():
            if K.shape[1] == 0:
                break
            fy = matmul(f, y, p)
            N = f if Ly is None else matmul(f, Ly, p)
            if fy.any():
                N = (N - C.mult_matrix(fy)) % p
            pending.append(matmul(N, K, p))
            if len(pending) >= batch:
                K = cut(K)
        if pending and K.shape[1]:
            K = cut(K)
        S = Subalgebra(C, K.T, name="B_H")
        if not S.contains_unit:
            continue
        gens, closed = _generate_within(C, S)
        if closed and _commutes(C, gens, ops):
            return S
    raise AssertionError("constants do not form a unital subalgebra")


def _commutes(C: FiniteAlgebra, gens: Sequence[np.ndarray], ops: Callable[[], Iterable[np.ndarray]]) -> bool:
    p = C.p
    mats = [C.mult_matrix(g) for g in gens]
    if not mats:
        return True
    for f in ops():
        for L in mats:
            if not np.array_equal(matmul(f, L, p), matmul(L, f, p)):
                return False
    return True


def _mult_table(C: FiniteAlgebra) -> np.ndarray:
    """``T[k] = L_{e_k}``."""
    if C.dim ** 3 > 5 * 10**7:
        raise ResourceError(f"multiplication table too large for dim {C.dim}")
    return np.array([C.mult_matrix(C.basis_vector(k)) for k in range(C.dim)])


def constants_of(H: EndSubalgebra) -> Subalgebra:
    """``{x in C : f(x y) = x f(y) for all f in H, y in C}``."""
    if not (H.contains_unit and H.composition_closed):
        raise PreconditionError("H must be a unital composition-closed subspace")
    C, p, d = H.parent.C, H.parent.p, H.parent.n
    T = _mult_table(C)
    K = np.eye(d, dtype=np.int64)  # columns span the current solution space
    Tflat = T.reshape(d, d * d)
    for f in H.module_generators.reshape(-1, d, d):
        if K.shape[1] == 0:
            break
        # column j of f L_x - L_x f is (f L_{e_j} - L_{f e_j}) x
        fL = np.einsum("ab,jbc->jac", f, T) % p
        Lf = matmul(f.T, Tflat, p).reshape(d, d, d)
        cons = ((fL - Lf) % p).reshape(d * d, d)
        sub = kernel_basis(matmul(cons, K, p), p)
        K = matmul(K, sub.T, p) if sub.shape[0] else np.zeros((d, 0), dtype=np.int64)
    basis = K.T
    B = Subalgebra(C, basis, name="B_H")
    if not (B.contains_unit and B.is_closed()):
        raise AssertionError("constants do not form a unital subalgebra")
    return B


def close_subalgebra(E: EndAlgebra, seeds: Sequence = (), *, label: str | None = None) -> EndSubalgebra:
    """Smallest subspace containing ``seeds`` and ``C``, closed under composition."""
    p, n = E.p, E.n
    seeds = [canon(np.asarray(s), p).reshape(n, n) for s in seeds]
    for s in seeds:
        if not E.contains(s.reshape(-1)):
            raise PreconditionError("seed endomorphism is not A-linear")
    gens = [E.C.mult_matrix(g) for g in E.C.gen_vecs] + seeds
    eb = EchelonBasis(n * n, p)
    eb.extend(np.vstack([E.unit.reshape(1, -1)] + [s.reshape(1, -1) for s in seeds]))
    frontier = eb.rows.copy()
    while frontier.shape[0]:
        stack = frontier.reshape(-1, n, n)
        cand = np.vstack([(np.einsum("ab,kbc->kac", G, stack) % p).reshape(-1, n * n) for G in gens])
        red = eb.reduce(cand)
        red = red[np.any(red, axis=1)]
        if red.shape[0] == 0:
            break
        frontier, _ = row_space(red, p)
        eb.extend(frontier)
    return EndSubalgebra(E, eb.rows, label=label)


@dataclass
class SpecialBasis:
    elements: list[np.ndarray]
    operators: list[np.ndarray]  # d x d matrices

    @property
    def size(self) -> int:
        return len(self.operators)


def _c_matrix_inverse(C: FiniteAlgebra, M: list[list[np.ndarray]]) -> list[list[np.ndarray]]:
    """Inverse of a square matrix with entries in ``C``."""
    l, d, p = len(M), C.dim, C.p
    big = np.zeros((l * d, l * d), dtype=np.int64)
    for a in range(l):
        for j in range(l):
            big[a * d:(a + 1) * d, j * d:(j + 1) * d] = C.mult_matrix(M[a][j])
    inv = inverse(big, p)
    u = C.unit
    return [[matmul(inv[i * d:(i + 1) * d, j * d:(j + 1) * d], u, p) for j in range(l)] for i in range(l)]


def special_basis(H: EndSubalgebra) -> SpecialBasis:
    """``C``-basis ``f_i`` of ``H`` with elements ``t_j`` of ``C`` such that ``f_i(t_j) = delta_ij``."""
    E = H.parent
    C, p, d = E.C, E.p, E.n
    if not H.contains_unit:
        raise PreconditionError("special basis needs H to contain the identity")
    if not H.composition_closed:
        raise PreconditionError("special basis needs H composition-closed")
    if not H.c_stable:
        raise PreconditionError("special basis needs H stable under multiplication by C")
    if not H.summand:
        raise PreconditionError("special basis needs H to be a direct summand")
    if not C.is_local:
        raise PreconditionError("special basis needs C local")
    if not frobenius_chain(C, E.A).finite:
        raise PreconditionError("special basis needs finite exponent")
    gens = H.module_generators.reshape(-1, d, d)
    l = gens.shape[0]
    if H.dim != l * d:
        raise AssertionError("summand of a free module over a local ring is not free")
    eps = C.residue_functional
    R = np.array([matmul(eps.reshape(1, -1), f, p).reshape(-1) for f in gens]).T  # d x l
    picks = EchelonBasis(l, p).greedy(R)
    if len(picks) != l:
        raise AssertionError("residue pairing is degenerate")
    ts = [C.basis_vector(j) for j in picks]
    ev = [[matmul(gens[a], t, p) for t in ts] for a in range(l)]
    inv = _c_matrix_inverse(C, ev)
    ops = []
    for i in range(l):
        f = np.zeros((d, d), dtype=np.int64)
        for a in range(l):
            f = (f + matmul(C.mult_matrix(inv[i][a]), gens[a], p)) % p
        ops.append(f)
    for i, f in enumerate(ops):
        for j, t in enumerate(ts):
            want = C.unit if i == j else np.zeros(d, dtype=np.int64)
            if not np.array_equal(matmul(f, t, p), want):
                raise AssertionError("dual basis condition failed")
    span = close_span(C, ops)
    if span.shape[0] != H.dim or not all(H.contains(v) for v in span):
        raise AssertionError("special operators do not form a C-basis of H")
    return SpecialBasis(ts, ops)


def close_span(C: FiniteAlgebra, ops: Sequence[np.ndarray]) -> np.ndarray:
    """Canonical basis of the ``C``-span of operators."""
    p, d = C.p, C.dim
    rows = []
    for k in range(d):
        L = C.mult_matrix(C.basis_vector(k))
        rows.extend(matmul(L, f, p).reshape(-1) for f in ops)
    if not rows:
        return np.zeros((0, d * d), dtype=np.int64)
    return row_space(np.array(rows), p)[0]


def enumerate_subalgebras(C: FiniteAlgebra, A: Subalgebra | None = None, *,
                          max_dim: int | None = None) -> list[Subalgebra]:
    """All unital subalgebras of ``C`` containing ``A``, by adjoining one element at a time."""
    A = prime_field(C) if A is None else A
    limit = config.ENUMERATION_MAX_DIM if max_dim is None else max_dim
    if C.dim > limit:
        raise ResourceError(f"subalgebra enumeration is limited to dim {limit}")
    p = C.p
    seen: dict[bytes, Subalgebra] = {A.basis.tobytes(): A}
    todo = [A]
    while todo:
        S = todo.pop()
        for v in _projective_complement(S, C):
            T = subalgebra_generated(C, [v], include_sub=S)
            key = T.basis.tobytes()
            if key not in seen:
                seen[key] = T
                todo.append(T)
    return sorted(seen.values(), key=lambda S: (S.dim, S.basis.tobytes()))


def _projective_complement(S: Subalgebra, C: FiniteAlgebra):
    """One nonzero vector per line of a complement of ``S``, first nonzero coordinate 1."""
    p, d = C.p, C.dim
    free = [i for i in range(d) if i not in set(S.pivots)]
    r = len(free)
    for lead in range(r):
        tail = r - lead - 1
        for code in range(p ** tail):
            v = np.zeros(d, dtype=np.int64)
            v[free[lead]] = 1
            for k in range(tail):
                code, v[free[lead + 1 + k]] = divmod(code, p)
            yield v


@dataclass
class CorrespondenceReport:
    finite_exponent: bool
    hypothesis: str
    subrings: list[dict] = field(default_factory=list)
    endomorphism_rings: list[dict] = field(default_factory=list)
    collisions: list[dict] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)
    enumerated: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {"finite_exponent": self.finite_exponent, "hypothesis": self.hypothesis,
                "enumerated": self.enumerated, "subrings": self.subrings,
                "endomorphism_rings": self.endomorphism_rings, "collisions": self.collisions,
                "violations": self.violations}


def _sub_label(C: FiniteAlgebra, B: Subalgebra) -> str:
    if B.name:
        return B.name
    from .algebra import AlgebraElement
    gens = [repr(AlgebraElement(C, g)) for g in B.algebra_gens]
    return "k[" + ", ".join(gens) + "]"


def verify_correspondence(C: FiniteAlgebra, A: Subalgebra | None = None,
                          subrings: Sequence[Subalgebra] | None = None,
                          endomorphism_rings: Sequence[EndSubalgebra] = (), *,
                          enumerate_all: bool | None = None, structured: bool | None = None) -> CorrespondenceReport:
    """Check both round trips between subalgebras over ``A`` and summand subalgebras of ``End_A(C)``.

    Subrings default to the Frobenius chain levels, plus every subalgebra
    when ``C`` is small enough to enumerate.  ``structured`` (default: for
    ``dim C`` above ``config.JB_DENSE_MAX_DIM``) works with :class:`FreeEnd`
    and never forms ``End_A(C)``; explicit endomorphism rings then need the
    dense route.
    """
    A = prime_field(C) if A is None else A
    if structured is None:
        structured = C.dim > config.JB_DENSE_MAX_DIM and not endomorphism_rings
    if structured and endomorphism_rings:
        raise PreconditionError("explicit endomorphism rings need the dense route")
    E = None if structured else end_algebra(C, A)
    chain = frobenius_chain(C, A)
    finite = chain.finite
    rep = CorrespondenceReport(finite, "finite exponent" if finite else "not finite exponent")
    cands: list[Subalgebra] = list(subrings) if subrings is not None else []
    if subrings is None:
        cands.extend(chain.levels if finite else [A, whole(C)])
        if enumerate_all is None:
            enumerate_all = C.dim <= config.ENUMERATION_MAX_DIM
    if enumerate_all:
        cands.extend(enumerate_subalgebras(C, A))
        rep.enumerated = True
    uniq: dict[bytes, Subalgebra] = {}
    for B in cands:
        uniq.setdefault(B.basis.tobytes(), B)
    generated: list[EndSubalgebra] = []
    by_constants: dict[bytes, tuple[int, list[str]]] = {}
    for B in uniq.values():
        entry: dict[str, Any] = {"subring": _sub_label(C, B), "dim": B.dim}
        if not A.issubset(B):
            entry["excluded"] = "does not contain A"
            rep.subrings.append(entry)
            continue
        if structured:
            back = _free_round_trip(C, B, entry, rep, finite)
            if back is not None:
                by_constants.setdefault(back.basis.tobytes(), (back.dim, []))[1].append(f"End over {entry['subring']}")
            rep.subrings.append(entry)
            continue
        try:
            rank = _rank_over(C, B)
        except PreconditionError as exc:
            rank = None
            entry["excluded"] = str(exc)
        if rank is None:
            entry.setdefault("excluded", "C not projective over B")
            rep.subrings.append(entry)
            continue
        H = end_over(C, B, parent=E)
        back = constants_of(H)
        entry.update({"rank": rank, "end_dim": H.dim, "summand": H.summand,
                      "constants_dim": back.dim, "roundtrip": back == B})
        if not back.basis.shape == B.basis.shape or back != B:
            if finite:
                rep.violations.append(f"constants of End over {entry['subring']} differ from it")
        if H.dim != C.dim * rank:
            rep.violations.append(f"End over {entry['subring']} has dimension {H.dim}, expected {C.dim * rank}")
        if finite and not H.summand:
            rep.violations.append(f"End over {entry['subring']} is not a direct summand")
        generated.append(H)
        rep.subrings.append(entry)
    hs: dict[bytes, EndSubalgebra] = {}
    for H in list(endomorphism_rings) + generated:
        hs.setdefault(H.basis.tobytes(), H)
    for i, H in enumerate(hs.values()):
        label = H.label or f"H{i + 1}"
        entry = {"ring": label, "dim": H.dim, "unit": H.contains_unit,
                 "composition_closed": H.composition_closed, "c_stable": H.c_stable, "summand": H.summand}
        if not (H.contains_unit and H.composition_closed):
            entry["excluded"] = "not a unital subalgebra"
            rep.endomorphism_rings.append(entry)
            continue
        B = constants_of(H)
        entry["constants_dim"] = B.dim
        by_constants.setdefault(B.basis.tobytes(), (B.dim, []))[1].append(label)
        if H.summand:
            back = end_over(C, B, parent=E)
            entry["roundtrip"] = back == H
            if back != H and finite:
                rep.violations.append(f"End over the constants of {label} differs from it")
        else:
            entry["excluded"] = "not a direct summand"
        rep.endomorphism_rings.append(entry)
    for bdim, labels in by_constants.values():
        if len(labels) > 1:
            rep.collisions.append({"constants_dim": bdim, "rings": labels})
            if finite:
                rep.violations.append(f"distinct rings {', '.join(labels)} share their constants")
    return rep


def _free_round_trip(C: FiniteAlgebra, B: Subalgebra, entry: dict, rep: CorrespondenceReport,
                     finite: bool) -> Subalgebra | None:
    """Both round trips for ``H = End_B(C)`` through :class:`FreeEnd`; returns the constants of ``H``."""
    name = entry["subring"]
    try:
        F = FreeEnd(C, B)
    except PreconditionError as exc:
        entry["excluded"] = "C not projective over B" if "not free" in str(exc) else str(exc)
        return None
    if not F.dual_pairing_holds():
        raise AssertionError("coordinate operators are not dual to the basis")
    back = constants_of_generators(C, F.ops)
    # H lies in End over its constants, so equal dimensions mean equal rings
    try:
        G = F if back == B else FreeEnd(C, back)
        end_back = G.dim == F.dim
    except PreconditionError:
        end_back = False
    entry.update({"rank": F.rank, "end_dim": F.dim, "summand": True, "constants_dim": back.dim,
                  "roundtrip": back == B, "end_roundtrip": end_back})
    if finite and back != B:
        rep.violations.append(f"constants of End over {name} differ from it")
    if finite and not end_back:
        rep.violations.append(f"End over the constants of End over {name} differs from it")
    return back
