"""Finite-dimensional commutative F_p-algebras, subalgebras and Frobenius chains.

An algebra is stored through the multiplication matrices of a list of
generators (column convention: ``L_g @ v`` is ``g * v``) together with a
*word tree*: basis element ``k`` of the word basis is ``gen[k] * word[parent[k]]``
and word 0 is the unit.  Any multiplication matrix is rebuilt from the tree
one depth level at a time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import config
from .document import Document, Poly, parse_document
from .errors import PreconditionError, ResourceError, StructuralError
from ._kernels import apply_tree_sparse
from .exactla import EchelonBasis, canon, check_prime, inverse, kernel_basis, matmul, row_space, solve

__all__ = [
    "Presentation",
    "FiniteAlgebra",
    "AlgebraElement",
    "Subalgebra",
    "FrobeniusChain",
    "parse_presentation",
    "build_algebra",
    "algebra_from_document",
    "frobenius_power",
    "subalgebra_generated",
    "prime_field",
    "frobenius_chain",
]


# ---------------------------------------------------------------- presentations

@dataclass(frozen=True)
class Presentation:
    """Triangular presentation ``x_i^(p^e_i) = P_i(x_1, ..., x_{i-1})``."""

    p: int
    names: tuple[str, ...]
    exponents: tuple[int, ...]
    polys: tuple[tuple[tuple[tuple[int, ...], int], ...], ...]

    @classmethod
    def make(cls, p: int, names: Sequence[str], exponents: Sequence[int],
             polys: Sequence[Poly] | None = None) -> "Presentation":
        n = len(names)
        if polys is None:
            polys = [{} for _ in range(n)]
        frozen = tuple(tuple(sorted((tuple(k), int(v) % p) for k, v in P.items() if int(v) % p))
                       for P in polys)
        pres = cls(p, tuple(names), tuple(int(e) for e in exponents), frozen)
        pres.validate()
        return pres

    def validate(self):
        check_prime(self.p)
        n = len(self.names)
        if len(self.exponents) != n or len(self.polys) != n:
            raise StructuralError("presentation needs one exponent and one relation per generator")
        if len(set(self.names)) != n:
            raise StructuralError("duplicate generator names")
        for e in self.exponents:
            if e < 1:
                raise StructuralError("relation exponents must be positive")
        for i, P in enumerate(self.polys):
            for exps, c in P:
                if len(exps) != n:
                    raise StructuralError("exponent tuple has the wrong length")
                for j in range(i, n):
                    if exps[j]:
                        raise StructuralError(
                            f"relation for {self.names[i]} mentions {self.names[j]}: not triangular")
                for j in range(i):
                    if exps[j] >= self.p ** self.exponents[j]:
                        raise StructuralError(f"relation for {self.names[i]} is not reduced in {self.names[j]}")

    @property
    def bounds(self) -> tuple[int, ...]:
        return tuple(self.p ** e for e in self.exponents)

    @property
    def dimension(self) -> int:
        return int(np.prod([b for b in self.bounds], dtype=object)) if self.names else 1

    @property
    def is_split(self) -> bool:
        return all(len(P) == 0 for P in self.polys)

    def poly(self, i: int) -> Poly:
        return dict(self.polys[i])


def parse_presentation(text: str) -> Presentation:
    """Parse the ``[algebra]`` section of a document into a :class:`Presentation`."""
    doc = parse_document(text if "[algebra]" in text else "[algebra]\n" + text)
    if doc.kind != "presentation":
        raise StructuralError("document describes structure constants, not a presentation")
    return Presentation.make(doc.p, doc.names, [e for e, _ in doc.relations], [P for _, P in doc.relations])


# ---------------------------------------------------------------- algebras

def _sparse_rows(mats: Sequence[np.ndarray], n: int, force: bool = False):
    """Stacked CSR arrays ``(indptr, indices, data)`` for ``mats``, or None when they are too dense to pay off."""
    if not mats:
        return None
    mats = [np.asarray(M, dtype=np.int64) for M in mats]
    if not force and sum(int(np.count_nonzero(M)) for M in mats) * 8 > len(mats) * n * n:
        return None
    indptr = np.zeros((len(mats), n + 1), dtype=np.int64)
    indices, data = [], []
    off = 0
    for g, M in enumerate(mats):
        r, c = np.nonzero(M)
        indptr[g, 0] = off
        indptr[g, 1:] = off + np.cumsum(np.bincount(r, minlength=n))
        indices.append(c)
        data.append(M[r, c])
        off += len(c)
    return indptr, np.concatenate(indices).astype(np.int64), np.concatenate(data)


class FiniteAlgebra:
    """A commutative unital F_p-algebra of finite dimension ``d``."""

    def __init__(self, p: int, gen_mats: Sequence[np.ndarray], unit, *,
                 labels: Sequence[str] | None = None,
                 gen_names: Sequence[str] | None = None,
                 words: tuple[Sequence[int], Sequence[int]] | None = None,
                 presentation: Presentation | None = None):
        self.p = check_prime(p)
        self.unit = canon(unit, p).reshape(-1)
        self.dim = int(self.unit.shape[0])
        self.gen_mats = [canon(M, p) for M in gen_mats]
        for M in self.gen_mats:
            if M.shape != (self.dim, self.dim):
                raise StructuralError("generator matrix has the wrong shape")
        self.gen_vecs = [M @ self.unit % p for M in self.gen_mats]
        self.gen_names = list(gen_names) if gen_names else [f"g{i + 1}" for i in range(len(self.gen_mats))]
        self.labels = list(labels) if labels else [f"b{i}" for i in range(self.dim)]
        self.presentation = presentation
        if words is None:
            parent, gen, W = self._bfs_words()
        else:
            parent, gen = np.asarray(words[0], dtype=np.int64), np.asarray(words[1], dtype=np.int64)
            W = None
        self.word_parent = parent
        self.word_gen = gen
        self._word_inv = None if W is None or np.array_equal(W, np.eye(self.dim, dtype=np.int64)) \
            else inverse(W, p)
        self._levels = self._word_levels()
        self._parent_arr = np.asarray(self.word_parent, dtype=np.int64)
        self._gen_arr = np.asarray(self.word_gen, dtype=np.int64)

    # -- construction helpers
    def _bfs_words(self):
        d, p = self.dim, self.p
        eb = EchelonBasis(d, p)
        if not np.any(self.unit):
            raise StructuralError("the unit is zero")
        eb.add(self.unit)
        vecs = [self.unit]
        parent, gen = [-1], [-1]
        frontier = [0]
        while frontier and eb.dim < d:
            nxt = []
            for k in frontier:
                for g, M in enumerate(self.gen_mats):
                    v = M @ vecs[k] % p
                    if eb.add(v):
                        vecs.append(v)
                        parent.append(k)
                        gen.append(g)
                        nxt.append(len(vecs) - 1)
            frontier = nxt
        if eb.dim < d:
            raise StructuralError(f"generators span only {eb.dim} of {d} dimensions")
        W = np.array(vecs, dtype=np.int64).T
        return np.array(parent, dtype=np.int64), np.array(gen, dtype=np.int64), W

    def _word_levels(self):
        depth = np.zeros(self.dim, dtype=np.int64)
        for k in range(1, self.dim):
            depth[k] = depth[self.word_parent[k]] + 1
        levels = []
        for t in range(1, int(depth.max()) + 1 if self.dim > 1 else 1):
            idx = np.nonzero(depth == t)[0]
            groups = []
            for g in np.unique(self.word_gen[idx]):
                sel = idx[self.word_gen[idx] == g]
                groups.append((int(g), sel, self.word_parent[sel]))
            levels.append(groups)
        return levels

    # -- basic structure
    @property
    def ngens(self) -> int:
        return len(self.gen_mats)

    def __repr__(self):
        return f"FiniteAlgebra(p={self.p}, dim={self.dim}, gens={self.gen_names})"

    def zero(self) -> np.ndarray:
        return np.zeros(self.dim, dtype=np.int64)

    def basis_vector(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = 1
        return v

    def element(self, v) -> "AlgebraElement":
        return AlgebraElement(self, canon(v, self.p))

    def gen(self, name_or_index) -> "AlgebraElement":
        i = self.gen_names.index(name_or_index) if isinstance(name_or_index, str) else int(name_or_index)
        return AlgebraElement(self, self.gen_vecs[i].copy())

    def _apply_tree(self, start: np.ndarray, mats: Sequence[np.ndarray], sparse=False) -> np.ndarray:
        """Columns ``word_k . start`` where generator ``g`` acts through ``mats[g]``.

        ``sparse`` takes precomputed :func:`_sparse_rows` output; False computes it here.
        """
        d, p = self.dim, self.p
        n = start.shape[0]
        if n * (p - 1) ** 2 >= 2**52:
            cols = np.zeros((n, d), dtype=np.int64)
            cols[:, 0] = start
            for groups in self._levels:
                for g, sel, par in groups:
                    cols[:, sel] = matmul(mats[g], cols[:, par], p)
            return cols
        if p < 2**31:
            if sparse is False:
                sparse = _sparse_rows(mats, n)
            if sparse is not None:
                cols = np.zeros((n, d), dtype=np.int64)
                cols[:, 0] = start
                return apply_tree_sparse(cols, self._parent_arr, self._gen_arr, *sparse, p)
        # float64 products are exact at this size
        fm = [np.asarray(M, dtype=np.float64) for M in mats]
        cols = np.zeros((n, d), dtype=np.float64)
        cols[:, 0] = start
        for groups in self._levels:
            for g, sel, par in groups:
                cols[:, sel] = np.mod(fm[g] @ cols[:, par], p)
        return cols.astype(np.int64)

    def orbit(self, start, mats: Sequence[np.ndarray]) -> np.ndarray:
        """Columns ``w_k . start`` for the word basis ``w_k`` acting through ``mats``."""
        return self._apply_tree(canon(start, self.p).reshape(-1), mats)

    def to_words(self, v) -> np.ndarray:
        """Coordinates of ``v`` in the word basis."""
        v = canon(v, self.p)
        if self._word_inv is None:
            return v
        return matmul(self._word_inv, v, self.p)

    def mult_matrix(self, v) -> np.ndarray:
        """Matrix of ``c -> v * c``."""
        v = canon(v, self.p).reshape(-1)
        if "_gen_sparse" not in self.__dict__:
            self._gen_sparse = _sparse_rows(self.gen_mats, self.dim)
        cols = self._apply_tree(v, self.gen_mats, self._gen_sparse)
        if self._word_inv is not None:
            cols = matmul(cols, self._word_inv, self.p)
        return cols

    def mul(self, u, v) -> np.ndarray:
        return self.mult_matrix(u) @ canon(v, self.p) % self.p

    @cached_property
    def word_matrix(self) -> np.ndarray:
        """Columns are the word basis expressed in the stored basis."""
        return self._apply_tree(self.unit, self.gen_mats)

    @cached_property
    def basis_mult_matrices(self) -> np.ndarray:
        """Array ``T`` with ``T[i] = L_{e_i}``; memory is ``d^3`` entries."""
        if self.dim > 200:
            raise ResourceError(f"basis multiplication table too large for dim {self.dim}")
        return np.array([self.mult_matrix(self.basis_vector(i)) for i in range(self.dim)])

    def power(self, v, n: int) -> np.ndarray:
        result = self.unit.copy()
        base = canon(v, self.p)
        while n > 0:
            if n & 1:
                result = self.mul(base, result)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def power_matrix(self, M: np.ndarray, n: int) -> np.ndarray:
        result = np.eye(self.dim, dtype=np.int64)
        base = M
        while n > 0:
            if n & 1:
                result = matmul(base, result, self.p)
            n >>= 1
            if n:
                base = matmul(base, base, self.p)
        return result

    @cached_property
    def frobenius_matrix(self) -> np.ndarray:
        """Matrix of the F_p-linear map ``c -> c^p``."""
        p = self.p
        mats = [self.power_matrix(M, p) for M in self.gen_mats]
        cols = self._apply_tree(self.unit, mats)
        if self._word_inv is not None:
            cols = matmul(cols, self._word_inv, p)
        return cols

    def frobenius_power(self, v, e: int) -> np.ndarray:
        v = canon(v, self.p)
        for _ in range(e):
            v = self.frobenius_matrix @ v % self.p
        return v

    def eval_monomial(self, exps: Sequence[int]) -> np.ndarray:
        v = self.unit.copy()
        for i, a in enumerate(exps):
            for _ in range(a):
                v = self.gen_mats[i] @ v % self.p
        return v

    def eval_poly(self, poly: Poly) -> np.ndarray:
        v = self.zero()
        for exps, c in poly.items():
            v = (v + c * self.eval_monomial(exps)) % self.p
        return v

    # -- structural checks
    def check_axioms(self, exhaustive_limit: int = 64, samples: int = 64, seed: int = 0) -> list[str]:
        """Return a list of violated axioms (empty when the structure is valid)."""
        p, d = self.p, self.dim
        problems = []
        for i, A in enumerate(self.gen_mats):
            if np.any(A @ self.unit % p != self.gen_vecs[i]):
                problems.append("unit")
            for B in self.gen_mats[i + 1:]:
                if np.any(matmul(A, B, p) != matmul(B, A, p)):
                    problems.append("commutativity")
        if d <= exhaustive_limit:
            T = self.basis_mult_matrices
            if np.any(T @ self.unit % p != np.eye(d, dtype=np.int64)):
                problems.append("unit")
            for i in range(d):
                if np.any(T[i] != T[:, :, i].T):
                    problems.append("commutativity")
                    break
            for i in range(d):
                for j in range(d):
                    # (e_i e_j) e_k = e_i (e_j e_k) for all k
                    lhs = np.tensordot(T[i][:, j], T, axes=(0, 0)) % p
                    rhs = matmul(T[i], T[j], p)
                    if np.any(lhs != rhs):
                        problems.append("associativity")
                        break
                else:
                    continue
                break
        else:
            rng = np.random.default_rng(seed)
            for _ in range(samples):
                a, b, c = (rng.integers(0, p, d) for _ in range(3))
                if np.any(self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c))):
                    problems.append("associativity")
                    break
                if np.any(self.mul(a, b) != self.mul(b, a)):
                    problems.append("commutativity")
                    break
        return sorted(set(problems))

    # -- radical and locality
    @cached_property
    def radical(self) -> np.ndarray:
        """Canonical basis of the nilradical (kernel of a high Frobenius power)."""
        F = self.frobenius_matrix
        G = F
        prev = -1
        while True:
            K, _ = row_space(kernel_basis(G, self.p), self.p) if self.dim else (np.zeros((0, 0)), [])
            if K.shape[0] == prev:
                return K
            prev = K.shape[0]
            G = matmul(F, G, self.p)

    @property
    def is_local(self) -> bool:
        return self.dim - self.radical.shape[0] == 1

    @cached_property
    def residue_functional(self) -> np.ndarray:
        """Row vector ``eps`` with ``eps(rad) = 0`` and ``eps(1) = 1``."""
        self.require_local()
        A = np.vstack([self.radical, self.unit.reshape(1, -1)])
        b = np.zeros(A.shape[0], dtype=np.int64)
        b[-1] = 1
        return solve(A, b, self.p)

    def residue(self, v) -> int:
        return int(self.residue_functional @ canon(v, self.p) % self.p)

    def nontrivial_idempotent(self) -> np.ndarray | None:
        p = self.p
        K = kernel_basis((self.frobenius_matrix - np.eye(self.dim, dtype=np.int64)) % p, p)
        eb = EchelonBasis(self.dim, p, self.unit)
        for x in K:
            if eb.contains(x):
                continue
            for lam in range(p):
                e = self.power((x - lam * self.unit) % p, p - 1)
                if np.any(e) and np.any(e != self.unit):
                    return e
        return None

    def require_local(self):
        if not self.is_local:
            e = self.nontrivial_idempotent()
            msg = "algebra is not local"
            if e is None:
                msg += " (residue field larger than F_p)"
            raise PreconditionError(msg, witness=None if e is None else e.tolist())

    # -- derived algebras
    def quotient(self, ideal_rows) -> tuple["FiniteAlgebra", np.ndarray]:
        """Quotient by an ideal given by spanning rows; returns (algebra, projection)."""
        p, d = self.p, self.dim
        R, piv = row_space(np.asarray(ideal_rows).reshape(-1, d), p) if np.size(ideal_rows) else \
            (np.zeros((0, d), dtype=np.int64), [])
        free = [c for c in range(d) if c not in set(piv)]
        proj = np.zeros((len(free), d), dtype=np.int64)
        proj[:, :] = np.eye(d, dtype=np.int64)[free]
        if piv:
            proj = (proj - R[:, free].T @ np.eye(d, dtype=np.int64)[piv]) % p
        lift = np.eye(d, dtype=np.int64)[:, free]
        mats = [matmul(proj, matmul(M, lift, p), p) for M in self.gen_mats]
        alg = FiniteAlgebra(p, mats, proj @ self.unit % p,
                            labels=[self.labels[c] for c in free], gen_names=self.gen_names)
        return alg, proj

    def ideal_generated(self, elems) -> np.ndarray:
        """Canonical basis of the ideal generated by ``elems``."""
        d, p = self.dim, self.p
        eb = EchelonBasis(d, p)
        for v in np.asarray(elems).reshape(-1, d):
            if np.any(v):
                eb.extend(self.mult_matrix(v).T)
        return eb.rows.copy()


@dataclass(eq=False)
class AlgebraElement:
    """An element of a :class:`FiniteAlgebra` with arithmetic operators."""

    alg: FiniteAlgebra
    vec: np.ndarray

    def __post_init__(self):
        self.vec = canon(self.vec, self.alg.p).reshape(-1)
        if self.vec.shape[0] != self.alg.dim:
            raise StructuralError("coefficient vector length does not match the algebra")

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, AlgebraElement):
            if other.alg is not self.alg:
                raise StructuralError("elements of different algebras")
            return other.vec
        return int(other) * self.alg.unit

    def __add__(self, other):
        return AlgebraElement(self.alg, self.vec + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return AlgebraElement(self.alg, self.vec - self._coerce(other))

    def __rsub__(self, other):
        return AlgebraElement(self.alg, self._coerce(other) - self.vec)

    def __neg__(self):
        return AlgebraElement(self.alg, -self.vec)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return AlgebraElement(self.alg, self.alg.mul(self.vec, self._coerce(other)))
        return AlgebraElement(self.alg, int(other) * self.vec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return AlgebraElement(self.alg, self.alg.power(self.vec, n))

    def __eq__(self, other):
        try:
            return bool(np.array_equal(self.vec, self._coerce(other)))
        except (TypeError, ValueError, StructuralError):
            return NotImplemented

    def __hash__(self):
        return hash(self.vec.tobytes())

    def frobenius(self, e: int = 1) -> "AlgebraElement":
        return AlgebraElement(self.alg, self.alg.frobenius_power(self.vec, e))

    def __repr__(self):
        terms = [f"{c}*{self.alg.labels[i]}" if c != 1 else self.alg.labels[i]
                 for i, c in enumerate(self.vec) if c]
        return " + ".join(terms) if terms else "0"


def frobenius_power(x: AlgebraElement, e: int) -> AlgebraElement:
    """``x^(p^e)`` by ``e`` successive p-th powers."""
    if e < 0:
        raise PreconditionError("e must be non-negative")
    return x.frobenius(e)


def _monomial_label(names: Sequence[str], exps: Sequence[int]) -> str:
    parts = [n if a == 1 else f"{n}^{a}" for n, a in zip(names, exps) if a]
    return "*".join(parts) if parts else "1"


def build_algebra(P: Presentation, max_dim: int | None = None) -> FiniteAlgebra:
    """Reduced-monomial model of a triangular presentation.

    Monomial ``x^a`` sits at index ``sum a_i * stride_i`` with the first
    generator varying fastest.
    """
    P.validate()
    p = P.p
    bounds = P.bounds
    n = len(bounds)
    d = P.dimension
    cap = config.max_dim(max_dim)
    if d > cap:
        raise ResourceError(f"algebra dimension {d} exceeds the cap {cap}")
    strides = [int(np.prod(bounds[:i], dtype=np.int64)) for i in range(n)]
    exps = np.zeros((d, n), dtype=np.int64)
    idx = np.arange(d)
    for i in range(n):
        exps[:, i] = (idx // strides[i]) % bounds[i]
    mats: list[np.ndarray] = []
    for i in range(n):
        L = np.zeros((d, d), dtype=np.int64)
        grow = exps[:, i] + 1 < bounds[i]
        src = idx[grow]
        L[src + strides[i], src] = 1
        wrap = idx[~grow]
        if wrap.size:
            base = wrap - (bounds[i] - 1) * strides[i]  # same monomial with a_i = 0
            block = np.zeros((d, wrap.size), dtype=np.int64)
            for mono, c in P.polys[i]:
                B = np.zeros((d, wrap.size), dtype=np.int64)
                B[base, np.arange(wrap.size)] = 1
                for j, a in enumerate(mono):
                    for _ in range(a):
                        B = matmul(mats[j], B, p)
                block = (block + c * B) % p
            L[:, wrap] = block
        mats.append(L)
    parent = np.full(d, -1, dtype=np.int64)
    gen = np.full(d, -1, dtype=np.int64)
    for k in range(1, d):
        last = max(i for i in range(n) if exps[k, i])
        parent[k] = k - strides[last]
        gen[k] = last
    unit = np.zeros(d, dtype=np.int64)
    unit[0] = 1
    labels = [_monomial_label(P.names, exps[k]) for k in range(d)]
    alg = FiniteAlgebra(p, mats, unit, labels=labels, gen_names=list(P.names),
                        words=(parent, gen), presentation=P)
    alg.monomial_exponents = exps
    return alg


def from_structure_constants(p: int, table, unit, *, labels: Sequence[str] | None = None,
                             generators: Sequence | None = None,
                             gen_names: Sequence[str] | None = None) -> FiniteAlgebra:
    """Algebra from ``table[i][j]`` = coordinates of ``e_i * e_j``.

    Raises :class:`StructuralError` when the table is not commutative,
    associative and unital.
    """
    p = check_prime(p)
    T = canon(np.asarray(table), p)
    d = T.shape[0]
    if T.shape != (d, d, d):
        raise StructuralError("structure constants must have shape (d, d, d)")
    unit = canon(unit, p).reshape(-1)
    # L_{e_i}[:, j] = e_i * e_j
    Ls = np.transpose(T, (0, 2, 1))
    if np.any(T != np.transpose(T, (1, 0, 2))):
        raise StructuralError("structure constants are not commutative")
    if np.any(np.einsum("i,ijk->jk", unit, T) % p != np.eye(d, dtype=np.int64)):
        raise StructuralError("declared unit does not act as the identity")
    for i in range(d):
        for j in range(d):
            lhs = np.einsum("k,kab->ab", T[i, j], Ls) % p
            if np.any(lhs != matmul(Ls[i], Ls[j], p)):
                raise StructuralError(f"structure constants are not associative at ({i}, {j})")
    if generators is None:
        gvecs = [np.eye(d, dtype=np.int64)[i] for i in range(d)]
        names = list(labels) if labels else [f"e{i}" for i in range(d)]
    else:
        gvecs = [canon(g, p).reshape(-1) for g in generators]
        names = list(gen_names) if gen_names else [f"g{i + 1}" for i in range(len(gvecs))]
    mats = [np.einsum("k,kab->ab", g, Ls) % p for g in gvecs]
    return FiniteAlgebra(p, mats, unit, labels=labels, gen_names=names)


def algebra_from_document(doc: Document, max_dim: int | None = None) -> FiniteAlgebra:
    if doc.kind == "presentation":
        P = Presentation.make(doc.p, doc.names, [e for e, _ in doc.relations], [R for _, R in doc.relations])
        return build_algebra(P, max_dim)
    d = len(doc.names)
    T = np.zeros((d, d, d), dtype=np.int64)
    for (i, j), val in doc.products.items():
        vec = _linear_vec(val, d)
        T[i, j] = vec
        T[j, i] = vec
    unit = _linear_vec(doc.unit, d)
    gens = None if doc.structure_gens is None else [_linear_vec(g, d) for g in doc.structure_gens]
    return from_structure_constants(doc.p, T, unit, labels=doc.names, generators=gens)


def _linear_vec(poly: Poly, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=np.int64)
    for exps, c in poly.items():
        if sum(exps) == 0:
            raise StructuralError("constant terms are not allowed in basis coordinates; use the unit")
        v[list(exps).index(1)] += c
    return v


# ---------------------------------------------------------------- subalgebras

class Subalgebra:
    """A unital subalgebra of ``owner`` kept as a canonical rref basis."""

    def __init__(self, owner: FiniteAlgebra, basis: np.ndarray, gens: Sequence[np.ndarray] | None = None,
                 name: str | None = None):
        self.owner = owner
        R, piv = row_space(np.asarray(basis).reshape(-1, owner.dim), owner.p)
        self.basis = R
        self.pivots = piv
        if gens is None:
            gens = list(R)
        self.gens = [canon(g, owner.p).reshape(-1) for g in gens]
        self.name = name

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def p(self) -> int:
        return self.owner.p

    def __repr__(self):
        nm = f"{self.name}, " if self.name else ""
        return f"Subalgebra({nm}dim={self.dim} in dim {self.owner.dim})"

    def __eq__(self, other):
        if not isinstance(other, Subalgebra):
            return NotImplemented
        return self.owner is other.owner and np.array_equal(self.basis, other.basis)

    def __hash__(self):
        return hash((id(self.owner), self.basis.tobytes()))

    @property
    def contains_unit(self) -> bool:
        return self.contains(self.owner.unit)

    def contains(self, v) -> bool:
        eb = self._echelon
        return eb.contains(v)

    @cached_property
    def _echelon(self) -> EchelonBasis:
        eb = EchelonBasis(self.owner.dim, self.p)
        eb.rows = self.basis.copy()
        eb.pivots = list(self.pivots)
        return eb

    def issubset(self, other: "Subalgebra") -> bool:
        return all(other.contains(b) for b in self.basis)

    def coords(self, v) -> np.ndarray:
        """Coordinates of an element of the subalgebra in its rref basis."""
        c = self._echelon.coordinates(v)
        if c is None:
            raise PreconditionError("element does not lie in the subalgebra")
        return c

    def from_coords(self, c) -> np.ndarray:
        return matmul(canon(c, self.p), self.basis, self.p)

    @property
    def embedding(self) -> np.ndarray:
        """``owner.dim x dim`` matrix mapping own coordinates into the owner."""
        return self.basis.T.copy()

    def is_closed(self) -> bool:
        if not self.contains_unit:
            return False
        for b in self.basis:
            L = self.owner.mult_matrix(b)
            prod = matmul(L, self.basis.T, self.p).T
            if np.any(self._echelon.reduce(prod)):
                return False
        return True

    @cached_property
    def algebra_gens(self) -> list[np.ndarray]:
        """Generators (owner coordinates) matching ``algebra.gen_mats``; scalars dropped."""
        return [g for g in self.gens if not self._is_scalar(g)]

    @cached_property
    def algebra(self) -> FiniteAlgebra:
        """The subalgebra as a standalone :class:`FiniteAlgebra` in its own coordinates."""
        p = self.p
        gens = self.algebra_gens
        piv = self.pivots
        mats = []
        for g in gens:
            L = self.owner.mult_matrix(g)
            mats.append(matmul(L, self.basis.T, p)[piv, :])
        unit = self.owner.unit[piv]
        labels = [self._owner_label(b) for b in self.basis]
        names = [self._owner_label(g) for g in gens]
        if len(set(names)) != len(names):
            names = [f"y{i + 1}" for i in range(len(gens))]
        return FiniteAlgebra(p, mats, unit, labels=labels, gen_names=names)

    def _owner_label(self, v) -> str:
        text = repr(AlgebraElement(self.owner, v))
        return f"({text})" if " " in text else text

    def _is_scalar(self, g) -> bool:
        p = self.p
        u = self.owner.unit
        k = int(np.nonzero(u)[0][0])
        lam = int(g[k]) * pow(int(u[k]), p - 2, p) % p
        return bool(np.array_equal(g, lam * u % p))

    def restrict(self, inner: "Subalgebra") -> "Subalgebra":
        """``inner`` (a subalgebra of the same owner inside ``self``) as a subalgebra of :attr:`algebra`."""
        if inner.owner is not self.owner:
            raise PreconditionError("subalgebras have different owners")
        if not inner.issubset(self):
            raise PreconditionError("inner subalgebra is not contained in the outer one")
        piv = self.pivots
        basis = inner.basis[:, piv]
        gens = [g[piv] for g in inner.gens]
        return Subalgebra(self.algebra, basis, gens, name=inner.name)


def whole(C: FiniteAlgebra, name: str = "C") -> Subalgebra:
    return Subalgebra(C, np.eye(C.dim, dtype=np.int64), C.gen_vecs, name=name)


def prime_field(C: FiniteAlgebra, name: str = "k") -> Subalgebra:
    return Subalgebra(C, C.unit.reshape(1, -1), [], name=name)


def subalgebra_generated(C: FiniteAlgebra, seed: Sequence, include_sub: Subalgebra | None = None, *,
                         seed_mats: Sequence[np.ndarray] | None = None, name: str | None = None) -> Subalgebra:
    """Smallest unital subalgebra containing ``seed`` and ``include_sub``."""
    p, d = C.p, C.dim
    seed = [canon(s.vec if isinstance(s, AlgebraElement) else s, p).reshape(-1) for s in seed]
    eb = EchelonBasis(d, p, C.unit)
    gens: list[np.ndarray] = []
    mats: list[np.ndarray] = []
    if include_sub is not None:
        if include_sub.owner is not C:
            raise PreconditionError("include_sub belongs to a different algebra")
        eb.extend(include_sub.basis)
        gens.extend(include_sub.gens)
    if seed_mats is None:
        seed_mats = [C.mult_matrix(s) for s in seed]
    for s, M in zip(seed, seed_mats):
        gens.append(s)
        mats.append(M)
    if include_sub is not None:
        mats.extend(C.mult_matrix(g) for g in include_sub.gens)
    frontier = eb.rows.copy()
    while frontier.shape[0] and mats:
        cand = np.vstack([matmul(M, frontier.T, p).T for M in mats])
        red = eb.reduce(cand)
        red = red[np.any(red, axis=1)]
        if red.shape[0] == 0:
            break
        frontier, _ = row_space(red, p)
        eb.extend(frontier)
    return Subalgebra(C, eb.rows, gens, name=name)


@dataclass
class FrobeniusChain:
    """Levels ``C = C^[0] ⊇ C^[1] ⊇ ...`` with ``C^[e] = A[C^(p^e)]``."""

    levels: list[Subalgebra]
    exponent: int | None
    base: Subalgebra
    dims: list[int] = field(init=False)

    def __post_init__(self):
        self.dims = [L.dim for L in self.levels]

    @property
    def finite(self) -> bool:
        return self.exponent is not None

    def level(self, e: int) -> Subalgebra:
        """``C^[e]``; levels past the exponent equal the base."""
        if e < len(self.levels):
            return self.levels[e]
        if self.finite:
            return self.base
        return self.levels[-1]


def frobenius_chain(C: FiniteAlgebra, A: Subalgebra, *, max_levels: int = 64) -> FrobeniusChain:
    """Compute ``C^[e] = A[x_1^(p^e), ..., x_n^(p^e)]`` until it reaches ``A``."""
    if A.owner is not C:
        raise PreconditionError("base subalgebra belongs to a different algebra")
    if not A.contains_unit:
        raise PreconditionError("base subalgebra does not contain the unit")
    p = C.p
    top = whole(C)
    levels = [top]
    if top == A:
        return FrobeniusChain([A], 0, A)
    vecs = [v.copy() for v in C.gen_vecs]
    mats = [M.copy() for M in C.gen_mats]
    for e in range(1, max_levels + 1):
        vecs = [C.frobenius_matrix @ v % p for v in vecs]
        mats = [C.power_matrix(M, p) for M in mats]
        lvl = subalgebra_generated(C, vecs, A, seed_mats=mats, name=f"C^[{e}]")
        if lvl == A:
            levels.append(A)
            return FrobeniusChain(levels, e, A)
        if lvl == levels[-1]:
            return FrobeniusChain(levels, None, A)
        levels.append(lvl)
    return FrobeniusChain(levels, None, A)


def itertools_product(bounds: Sequence[int]):
    return itertools.product(*[range(b) for b in bounds])
