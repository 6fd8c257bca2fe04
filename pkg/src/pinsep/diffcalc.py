"""Differential calculus of a finite extension ``A ⊂ C``.

Everything is computed inside concrete coordinate spaces:

* ``C ⊗_k C`` is the space of ``d x d`` matrices ``W`` (entry ``W[i, j]`` is
  the coefficient of ``e_i ⊗ e_j``), flattened row-major.  ``C ⊗_A C`` is its
  quotient by the span of ``w (a ⊗ 1 - 1 ⊗ a)``.
* ``Hom_A(C, M)`` is a subspace of ``m x d`` matrices, flattened row-major
  (index ``b * d + j``), kept as a canonical rref basis.

Differential operators of order ``<= k`` are obtained in two independent
ways: recursively through commutators with the generators of ``C``, and as
the maps killing ``J^(k+1)`` under ``c ⊗ c' -> c D(c')``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import config
from .algebra import FiniteAlgebra, Subalgebra, prime_field, subalgebra_generated, whole
from .errors import PreconditionError, ResourceError, RouteError
from .exactla import EchelonBasis, canon, inverse, kernel_basis, matmul, row_space, solve
from .modules import (CModule, Submodule, algebra_as_module, complement_projection, is_free,
                      minimal_generators, quotient_module)

__all__ = [
    "DiffOperator",
    "HomSpace",
    "TensorSquare",
    "PrincipalParts",
    "KaehlerModule",
    "hom_space",
    "tensor_square",
    "principal_parts",
    "kaehler",
    "kaehler_free_rank",
    "derivations",
    "diff_operators",
    "diff_filtration",
    "bracket",
    "iterated_bracket",
    "order_of",
    "bracket_development",
    "binom_mod",
    "pbasis_frame",
    "partials_from_pbasis",
    "delta_alpha",
    "restrict",
    "extend",
]


def _base(C: FiniteAlgebra, A: Subalgebra | None) -> Subalgebra:
    if A is None:
        return prime_field(C)
    if A.owner is not C:
        raise PreconditionError("base subalgebra belongs to a different algebra")
    return A


def binom_mod(n: int, k: int, p: int) -> int:
    """``binomial(n, k) mod p`` digit by digit in base ``p``."""
    if k < 0 or k > n:
        return 0
    out = 1
    while n or k:
        a, b = n % p, k % p
        if b > a:
            return 0
        out = out * math.comb(a, b) % p
        n //= p
        k //= p
    return out


# ---------------------------------------------------------------- operators

@dataclass
class DiffOperator:
    """A linear map ``source -> target`` with an order bound (None = unknown)."""

    matrix: np.ndarray
    source: FiniteAlgebra
    target: CModule
    order_bound: int | None = None

    def __post_init__(self):
        self.matrix = canon(self.matrix, self.source.p)
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise PreconditionError("operator matrix does not match source and target")

    def __call__(self, c) -> np.ndarray:
        return matmul(self.matrix, canon(c, self.source.p), self.source.p)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.matrix)


def _ad(M: CModule, D: np.ndarray, x) -> np.ndarray:
    p = M.p
    L = M.alg.mult_matrix(x)
    return (matmul(M.action(x), D, p) - matmul(D, L, p)) % p


def bracket(x, D: DiffOperator) -> DiffOperator:
    """``[x, D](c) = x D(c) - D(x c)``."""
    x = canon(x, D.source.p).reshape(-1)
    b = None if D.order_bound is None else max(D.order_bound - 1, 0)
    return DiffOperator(_ad(D.target, D.matrix, x), D.source, D.target, b)


def iterated_bracket(xs: Sequence, D: DiffOperator) -> DiffOperator:
    """``[x_1, [x_2, ... [x_n, D]...]]``."""
    for x in reversed(list(xs)):
        D = bracket(x, D)
    return D


def bracket_development(D: DiffOperator, xs: Sequence, c) -> np.ndarray:
    """Closed form of ``[x_1, [..., [x_n, D]]](c)`` as a signed sum over subsets."""
    C, M, p = D.source, D.target, D.source.p
    xs = [canon(x, p).reshape(-1) for x in xs]
    c = canon(c, p).reshape(-1)
    n = len(xs)
    total = np.zeros(M.dim, dtype=np.int64)
    for mask in range(1 << n):
        inside = C.unit.copy()
        outside = c.copy()
        size = 0
        for i in range(n):
            if mask >> i & 1:
                inside = C.mul(inside, xs[i])
                size += 1
            else:
                outside = C.mul(outside, xs[i])
        term = matmul(M.action(inside), D(outside), p)
        total = (total + (-1) ** (n - size) * term) % p
    return total


def order_of(D: DiffOperator, generators: Sequence | None = None, base: Subalgebra | None = None,
             limit: int | None = None) -> int | None:
    """Least ``n`` with every ``(n+1)``-fold generator bracket of ``D`` zero.

    Returns None when no such ``n`` exists up to ``limit``.
    """
    C, M, p = D.source, D.target, D.source.p
    gens = C.gen_vecs if generators is None else [canon(g, p).reshape(-1) for g in generators]
    if generators is not None:
        A = _base(C, base)
        if subalgebra_generated(C, gens, A) != whole(C):
            raise PreconditionError("the given elements do not generate the algebra")
    if not np.any(D.matrix):
        return 0
    if limit is None:
        limit = M.dim * C.dim
    ops = [(M.action(g), C.mult_matrix(g)) for g in gens]
    md = M.dim * C.dim
    level, _ = row_space(D.matrix.reshape(1, -1), p)
    for n in range(limit + 1):
        nxt = []
        for rho, L in ops:
            Ds = level.reshape(-1, M.dim, C.dim)
            nxt.append(((rho @ Ds - Ds @ L) % p).reshape(-1, md))
        stacked = np.vstack(nxt) if nxt else np.zeros((0, md), dtype=np.int64)
        if not np.any(stacked):
            return n
        level, _ = row_space(stacked, p)
    return None


# ---------------------------------------------------------------- Hom_A(C, M)

class HomSpace:
    """``Hom_A(C, M)`` with the left ``C``-action ``(c D)(x) = c D(x)``."""

    def __init__(self, C: FiniteAlgebra, A: Subalgebra | None, M: CModule, *, force: bool = False):
        self.C, self.A, self.M = C, _base(C, A), M
        p, d, m = C.p, C.dim, M.dim
        if M.alg is not C:
            raise PreconditionError("target module must be a module over the source algebra")
        estimate = m * d // self.A.dim
        if estimate > config.MAX_HOM_DIM and not force:
            raise ResourceError(f"Hom space of dimension about {estimate} exceeds {config.MAX_HOM_DIM}")
        gens = self.A.algebra_gens
        if gens:
            if (m * d) ** 2 * len(gens) > 4 * 10**8 and not force:
                raise ResourceError("linearity system too large")
            Id, Im = np.eye(d, dtype=np.int64), np.eye(m, dtype=np.int64)
            blocks = [(np.kron(M.action(a), Id) - np.kron(Im, C.mult_matrix(a).T)) % p for a in gens]
            K = kernel_basis(np.vstack(blocks), p)
            self.basis, self.pivots = row_space(K, p)
        else:
            self.basis = np.eye(m * d, dtype=np.int64)
            self.pivots = list(range(m * d))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def p(self) -> int:
        return self.C.p

    @property
    def stacked(self) -> np.ndarray:
        """Basis as an array of ``m x d`` matrices."""
        return self.basis.reshape(-1, self.M.dim, self.C.dim)

    def coords(self, D) -> np.ndarray:
        """Coordinates of flattened maps (rows) lying in the space."""
        V = canon(D, self.p).reshape(-1, self.M.dim * self.C.dim)
        return V[:, self.pivots]

    def flat(self, coords) -> np.ndarray:
        return matmul(canon(coords, self.p).reshape(-1, self.dim), self.basis, self.p)

    def operator(self, coords, order_bound: int | None = None) -> DiffOperator:
        mat = self.flat(coords).reshape(self.M.dim, self.C.dim)
        return DiffOperator(mat, self.C, self.M, order_bound)

    def _apply(self, fn) -> np.ndarray:
        """Matrix (rows = basis elements) of coordinates of ``fn`` applied to the basis."""
        out = fn(self.stacked) % self.p
        return self.coords(out.reshape(self.dim, -1))

    def action_matrix(self, c) -> np.ndarray:
        rho = self.M.action(c)
        return self._apply(lambda Hs: rho @ Hs).T

    def ad_matrix(self, x) -> np.ndarray:
        """Rows: coordinates of ``[x, D_h]`` for basis elements ``D_h``."""
        rho = self.M.action(x)
        L = self.C.mult_matrix(x)
        return self._apply(lambda Hs: rho @ Hs - Hs @ L)

    @cached_property
    def module(self) -> CModule:
        acts = [self.action_matrix(g) for g in self.C.gen_vecs]
        return CModule(self.C, acts, dim=self.dim)

    def submodule(self, coords) -> Submodule:
        return Submodule(self.module, coords)


_HOM_CACHE: dict = {}


def hom_space(C: FiniteAlgebra, A: Subalgebra | None = None, M: CModule | None = None, *,
              force: bool = False) -> HomSpace:
    """``Hom_A(C, M)``; ``M`` defaults to ``C``."""
    if M is None:
        M = _regular(C)
    key = (id(C), None if A is None else A.basis.tobytes(), id(M))
    hit = _HOM_CACHE.get(key)
    if hit is not None and hit.C is C and hit.M is M:
        return hit
    H = HomSpace(C, A, M, force=force)
    if len(_HOM_CACHE) > 64:
        _HOM_CACHE.clear()
    _HOM_CACHE[key] = H
    return H


def _regular(C: FiniteAlgebra) -> CModule:
    mod = getattr(C, "_regular_module", None)
    if mod is None:
        mod = algebra_as_module(C)
        C._regular_module = mod
    return mod


# ---------------------------------------------------------------- tensor square

class TensorSquare:
    """``C ⊗_A C`` with its left ``C``-action, multiplication map and ideal ``J``."""

    def __init__(self, C: FiniteAlgebra, A: Subalgebra):
        p, d = C.p, C.dim
        self.C, self.A = C, A
        Id = np.eye(d, dtype=np.int64)
        eb = EchelonBasis(d * d, p)
        for a in A.algebra_gens:
            L = C.mult_matrix(a)
            eb.extend(((np.kron(L, Id) - np.kron(Id, L)) % p).T)
        self.proj, self.lift = complement_projection(eb.rows, eb.pivots, d * d, p)
        self.dim = self.proj.shape[0]
        left = [matmul(self.proj, matmul(np.kron(L, Id), self.lift, p), p) for L in C.gen_mats]
        self.right = [matmul(self.proj, matmul(np.kron(Id, L), self.lift, p), p) for L in C.gen_mats]
        self.z = [(R - Lf) % p for R, Lf in zip(self.right, left)]
        self.module = CModule(C, left, dim=self.dim)
        mu = np.zeros((d, d * d), dtype=np.int64)
        for i in range(d):
            mu[:, i * d:(i + 1) * d] = C.mult_matrix(C.basis_vector(i))
        self.mu = matmul(mu, self.lift, p)
        self._powers = [np.eye(self.dim, dtype=np.int64)]

    def pure(self, a, b) -> np.ndarray:
        """Coordinates of ``a ⊗ b``."""
        p = self.C.p
        W = np.outer(canon(a, p), canon(b, p)).reshape(-1) % p
        return matmul(self.proj, W, p)

    @property
    def J(self) -> np.ndarray:
        return self.J_power(1)

    def J_power(self, m: int) -> np.ndarray:
        """Canonical basis of ``J^m`` (``J^0`` is everything)."""
        p = self.C.p
        while len(self._powers) <= m:
            if len(self._powers) == 1:
                K = kernel_basis(self.mu, p)
                nxt, _ = row_space(K, p) if K.shape[0] else (np.zeros((0, self.dim), dtype=np.int64), [])
            else:
                prev = self._powers[-1]
                if prev.shape[0] == 0:
                    nxt = prev
                else:
                    nxt, _ = row_space(np.vstack([matmul(Z, prev.T, p).T for Z in self.z]), p) \
                        if self.z else (np.zeros((0, self.dim), dtype=np.int64), [])
            self._powers.append(nxt)
        return self._powers[m]

    def stable_power(self) -> int:
        """Least ``m`` with ``J^m = J^(m+1)``."""
        m = 0
        while self.J_power(m).shape[0] != self.J_power(m + 1).shape[0]:
            m += 1
        return m


def tensor_square(C: FiniteAlgebra, A: Subalgebra | None = None, *, require_free: bool = True) -> TensorSquare:
    """``C ⊗_A C``; with ``require_free`` the extension must be free."""
    A = _base(C, A)
    cache = C.__dict__.setdefault("_tensor_cache", {})
    key = A.basis.tobytes()
    if require_free and is_free(algebra_as_module(C, A)) is None:
        raise PreconditionError("C is not free over the base")
    if key not in cache:
        if C.dim > 60:
            raise ResourceError(f"tensor square of a {C.dim}-dimensional algebra is too large")
        cache[key] = TensorSquare(C, A)
    return cache[key]


@dataclass
class PrincipalParts:
    """``P^k = (C ⊗_A C) / J^(k+1)`` with ``delta`` the matrix of ``c -> class(1 ⊗ c)``."""

    order: int
    module: CModule
    delta: np.ndarray
    tensor: TensorSquare

    @property
    def delta_operator(self) -> DiffOperator:
        return DiffOperator(self.delta, self.tensor.C, self.module, self.order)


def principal_parts(C: FiniteAlgebra, A: Subalgebra | None = None, k: int = 1, *,
                    require_free: bool = False) -> PrincipalParts:
    T = tensor_square(C, A, require_free=require_free)
    p = C.p
    sub = Submodule(T.module, T.J_power(k + 1), check=False)
    Q = quotient_module(T.module, sub)
    ones = np.array([T.pure(C.unit, C.basis_vector(j)) for j in range(C.dim)]).T
    return PrincipalParts(k, Q, matmul(Q.projection, ones, p), T)


@dataclass
class KaehlerModule:
    """``Omega_{C/A}`` with ``d`` the matrix of the universal derivation."""

    module: CModule
    d: np.ndarray
    route: str

    @property
    def dim(self) -> int:
        return self.module.dim


def _formal_gradient(C: FiniteAlgebra) -> np.ndarray:
    """``G[w]`` = differential of basis element ``w`` in ``C^n`` (shape ``d x n x d``).

    Uses the monomial exponents of a presented algebra, otherwise the word tree.
    """
    p, d, n = C.p, C.dim, C.ngens
    cached = C.__dict__.get("_gradient")
    if cached is not None:
        return cached
    G = np.zeros((d, n, d), dtype=np.int64)
    exps = getattr(C, "monomial_exponents", None)
    if exps is not None:
        index = {tuple(e): k for k, e in enumerate(exps)}
        for k, e in enumerate(exps):
            for j in range(n):
                if e[j]:
                    f = list(e)
                    f[j] -= 1
                    G[k, j, index[tuple(f)]] = e[j] % p
    else:
        W = _word_gradients(C)
        inv = C._word_inv
        G = W if inv is None else np.tensordot(inv.T, W, axes=(1, 0)) % p
    C._gradient = G
    return G


def _gradient_of(C: FiniteAlgebra, v) -> np.ndarray:
    G = _formal_gradient(C)
    return np.tensordot(canon(v, C.p), G, axes=(0, 0)) % C.p


def _kaehler_relations(C: FiniteAlgebra, A: Subalgebra, route: str) -> np.ndarray:
    """Relations (``r x n x d``) whose ``C``-span is the kernel of ``C^n -> Omega``."""
    p = C.p
    rels = []
    if route == "presentation":
        P = C.presentation
        if P is None or getattr(C, "monomial_exponents", None) is None:
            raise RouteError("the algebra carries no presentation")
        for i in range(len(P.names)):
            poly = C.eval_poly(P.poly(i))
            rels.append(_gradient_of(C, poly))
    else:
        for g, L in enumerate(C.gen_mats):
            for k in range(C.dim):
                w = C.word_matrix[:, k]
                lhs = matmul(L, _word_gradient(C, k).T, p).T
                lhs[g] = (lhs[g] + w) % p
                rhs = np.tensordot(C.to_words(matmul(L, w, p)), _word_gradients(C), axes=(0, 0)) % p
                rels.append((lhs - rhs) % p)
    for a in A.algebra_gens:
        rels.append(_gradient_of(C, a))
    out = np.array(rels, dtype=np.int64).reshape(-1, C.ngens, C.dim)
    return out[np.any(out.reshape(out.shape[0], -1), axis=1)]


def _word_gradients(C: FiniteAlgebra) -> np.ndarray:
    cached = C.__dict__.get("_word_gradient")
    if cached is None:
        p, d, n = C.p, C.dim, C.ngens
        W = np.zeros((d, n, d), dtype=np.int64)
        words = C.word_matrix
        for k in range(1, d):
            par, g = C.word_parent[k], C.word_gen[k]
            W[k] = matmul(C.gen_mats[g], W[par].T, p).T
            W[k, g] = (W[k, g] + words[:, par]) % p
        C._word_gradient = cached = W
    return cached


def _word_gradient(C: FiniteAlgebra, k: int) -> np.ndarray:
    return _word_gradients(C)[k]


def _route(C: FiniteAlgebra, route: str) -> str:
    if route == "auto":
        return "presentation" if getattr(C, "monomial_exponents", None) is not None else "generators"
    if route not in ("presentation", "generators", "quotient"):
        raise RouteError(f"unknown route {route!r}")
    return route


def kaehler(C: FiniteAlgebra, A: Subalgebra | None = None, route: str = "auto") -> KaehlerModule:
    """``Omega_{C/A}`` as a ``C``-module.

    ``quotient`` builds ``J / J^2`` inside ``C ⊗_A C``; ``presentation`` (or
    ``generators`` for algebras without a presentation) takes the free module on
    ``dx_i`` modulo the differentials of the relations and of the base.
    """
    A = _base(C, A)
    p, d = C.p, C.dim
    route = _route(C, route)
    if route == "quotient":
        T = tensor_square(C, A, require_free=False)
        J2 = Submodule(T.module, T.J_power(2), check=False)
        Q = quotient_module(T.module, J2)
        img = matmul(Q.projection, T.J.T, p).T
        sub = Submodule(Q, img, check=False)
        diffs = np.array([(T.pure(C.unit, C.basis_vector(j)) - T.pure(C.basis_vector(j), C.unit)) % p
                          for j in range(d)])
        dmat = sub.coords(matmul(Q.projection, diffs.T, p).T).T
        return KaehlerModule(sub.module, dmat, route)
    n = C.ngens
    if n * d > 4000:
        raise ResourceError("module of differentials too large to build explicitly")
    rels = _kaehler_relations(C, A, route)
    free = CModule(C, [np.kron(np.eye(n, dtype=np.int64), L) for L in C.gen_mats], dim=n * d)
    rows = []
    for r in rels:
        blocks = np.vstack([C.mult_matrix(r[j]) for j in range(n)])
        rows.append(blocks.T)
    rows = np.vstack(rows) if rows else np.zeros((0, n * d), dtype=np.int64)
    sub = Submodule(free, rows, check=False)
    Q = quotient_module(free, sub)
    grads = np.array([_gradient_of(C, C.basis_vector(j)).reshape(-1) for j in range(d)])
    dmat = matmul(Q.projection, grads.T, p)
    return KaehlerModule(Q, dmat, route)


def kaehler_free_rank(C: FiniteAlgebra, A: Subalgebra | None = None, route: str = "auto"):
    """``(rank, free)`` for ``Omega_{C/A}`` over local ``C`` by elimination with unit pivots.

    ``rank`` is the minimal number of generators; ``free`` tells whether the
    module is free of that rank.
    """
    A = _base(C, A)
    C.require_local()
    p, n = C.p, C.ngens
    route = _route(C, route)
    if route == "quotient":
        om = kaehler(C, A, "quotient")
        r = len(minimal_generators(om.module))
        return r, om.dim == r * C.dim
    R = _kaehler_relations(C, A, route).astype(np.int64)  # rows x cols x d
    eps = C.residue_functional
    cols = list(range(n))
    R = R.copy()
    while R.shape[0] and cols:
        E = np.tensordot(R, eps, axes=(2, 0)) % p  # rows x cols
        hits = np.argwhere(E != 0)
        if hits.size == 0:
            break
        k, j = (int(t) for t in hits[0])
        u = R[k, j]
        uinv = solve(C.mult_matrix(u), C.unit, p)
        pivot_row = R[k].copy()
        keep = [t for t in range(R.shape[0]) if t != k]
        R = R[keep]
        colj = R[:, j, :].T.copy()  # d x rows
        for l in range(R.shape[1]):
            if l == j or not np.any(pivot_row[l]):
                continue
            v = C.mul(uinv, pivot_row[l])
            R[:, l, :] = (R[:, l, :] - matmul(C.mult_matrix(v), colj, p).T) % p
        R = np.delete(R, j, axis=1)
        del cols[j]
    rank = len(cols)
    return rank, not np.any(R)


# ---------------------------------------------------------------- derivations and Diff

def derivations(C: FiniteAlgebra, A: Subalgebra | None = None, M: CModule | None = None) -> Submodule:
    """``Der_A(C, M)`` as a submodule of :func:`hom_space`."""
    H = hom_space(C, A, M)
    M = H.M
    p, d, m = C.p, C.dim, M.dim
    Hs = H.stacked
    rho_basis = np.array([M.action(C.basis_vector(j)) for j in range(d)])
    blocks = [(Hs @ C.unit % p).reshape(H.dim, m)]
    for g, L in zip(C.gen_vecs, C.gen_mats):
        t1 = Hs @ L
        t2 = M.action(g) @ Hs
        Dg = Hs @ g % p  # h x m
        t3 = np.einsum("jab,hb->haj", rho_basis, Dg)
        blocks.append(((t1 - t2 - t3) % p).reshape(H.dim, m * d))
    cons = np.hstack(blocks)
    K = kernel_basis(cons.T, p)
    return H.submodule(K)


def _reduce(X: np.ndarray, R: np.ndarray, piv: Sequence[int], p: int) -> np.ndarray:
    if R.shape[0] == 0:
        return X % p
    return (X - matmul(X[:, list(piv)], R, p)) % p


def _filtration_bracket(H: HomSpace, k: int, until_full: bool = False) -> list[np.ndarray]:
    p = H.p
    ads = [H.ad_matrix(g) for g in H.C.gen_vecs]
    prev = np.zeros((0, H.dim), dtype=np.int64)
    piv: list[int] = []
    out = []
    for _ in range(k + 1):
        if ads:
            cons = np.hstack([_reduce(X, prev, piv, p) for X in ads])
            K = kernel_basis(cons.T, p)
        else:
            K = np.eye(H.dim, dtype=np.int64)
        cur, piv = row_space(K, p) if K.shape[0] else (np.zeros((0, H.dim), dtype=np.int64), [])
        out.append(cur)
        prev = cur
        if until_full and cur.shape[0] == H.dim:
            break
    return out


def _filtration_dual(H: HomSpace, A: Subalgebra, k: int, until_full: bool = False) -> list[np.ndarray]:
    C, M, p = H.C, H.M, H.p
    d, m = C.dim, M.dim
    T = tensor_square(C, A, require_free=False)
    rho_basis = np.array([M.action(C.basis_vector(w)) for w in range(d)])
    Hs = H.stacked
    local = C.is_local
    out = []
    for j in range(k + 1):
        Jk = T.J_power(j + 1)
        if Jk.shape[0] == 0:
            out.append(np.eye(H.dim, dtype=np.int64))
            if until_full:
                break
            continue
        if local:
            sub = Submodule(T.module, Jk, check=False)
            gens = np.array(minimal_generators(sub.module))
            W = matmul(gens, Jk, p)
        else:
            W = Jk
        Ws = matmul(T.lift, W.T, p).T.reshape(-1, d, d)
        rows = []
        for Wm in Ws:
            G = np.einsum("wj,wab->abj", Wm, rho_basis) % p  # m x m x d
            # phi_D(W)[a] = sum_{b,j} G[a,b,j] D[b,j] for each basis D
            rows.append(np.einsum("abj,hbj->ah", G, Hs) % p)
        K = kernel_basis(np.vstack(rows), p)
        cur, _ = row_space(K, p) if K.shape[0] else (np.zeros((0, H.dim), dtype=np.int64), [])
        out.append(cur)
        if until_full and cur.shape[0] == H.dim:
            break
    return out


def diff_filtration(C: FiniteAlgebra, A: Subalgebra | None = None, M: CModule | None = None, k: int = 1,
                    route: str = "bracket", *, force: bool = False, until_full: bool = False) -> list[Submodule]:
    """``[Diff^0, ..., Diff^k]`` as submodules of ``Hom_A(C, M)``.

    With ``until_full`` the list stops at the first order reaching all of ``Hom``.
    """
    A = _base(C, A)
    H = hom_space(C, A, M, force=force)
    if route == "bracket":
        bases = _filtration_bracket(H, k, until_full)
    elif route == "dual":
        bases = _filtration_dual(H, A, k, until_full)
    else:
        raise RouteError(f"unknown route {route!r}")
    return [Submodule(H.module, b, check=False) for b in bases]


def diff_operators(C: FiniteAlgebra, A: Subalgebra | None = None, M: CModule | None = None, k: int = 1,
                   route: str = "bracket", *, force: bool = False) -> Submodule:
    """``Diff^k_A(C, M)`` as a submodule of ``Hom_A(C, M)``."""
    if k < 0:
        raise PreconditionError("order must be non-negative")
    return diff_filtration(C, A, M, k, route, force=force)[-1]


# ---------------------------------------------------------------- p-bases and explicit operators

def _alphas(bounds: Sequence[int]) -> list[tuple[int, ...]]:
    """Exponent tuples with the first variable varying fastest."""
    return [tuple(reversed(a)) for a in itertools.product(*[range(b) for b in reversed(bounds)])]


def reduced_monomials(C: FiniteAlgebra, xs: Sequence, bound: int | Sequence[int]) -> tuple[np.ndarray, list]:
    """Columns ``x^alpha`` for ``0 <= alpha_i < bound_i`` (first variable fastest)."""
    p = C.p
    xs = [canon(x, p).reshape(-1) for x in xs]
    bounds = [bound] * len(xs) if isinstance(bound, int) else list(bound)
    cols = [C.unit.copy()]
    alphas = [()]
    for x, b in zip(xs, bounds):
        L = C.mult_matrix(x)
        new_cols, new_alphas = [], []
        cur = np.array(cols).T
        for e in range(b):
            for c, a in zip(cur.T, alphas):
                new_cols.append(c)
                new_alphas.append(a + (e,))
            cur = matmul(L, cur, p)
        # reorder so the first variable varies fastest
        order = sorted(range(len(new_alphas)), key=lambda t: tuple(reversed(new_alphas[t])))
        cols = [new_cols[t] for t in order]
        alphas = [new_alphas[t] for t in order]
    return np.array(cols, dtype=np.int64).T, alphas


def pbasis_frame(xs: Sequence, C: FiniteAlgebra, B: Subalgebra | None = None) -> np.ndarray | None:
    """Matrix with columns ``b_j x^alpha`` (index ``j * p^n + alpha``), or None if singular.

    Raises :class:`PreconditionError` when some ``x_i^p`` lies outside ``B``.
    """
    B = _base(C, B)
    p = C.p
    xs = [canon(x, p).reshape(-1) for x in xs]
    for x in xs:
        if not B.contains(C.frobenius_power(x, 1)):
            raise PreconditionError("p-th power of a candidate lies outside the base")
    if B.dim * p ** len(xs) != C.dim:
        return None
    X, _ = reduced_monomials(C, xs, p)
    Phi = _products(C, B.basis, X.T)
    if row_space(Phi.T, p)[0].shape[0] != C.dim:
        return None
    return Phi


def _products(C: FiniteAlgebra, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Columns ``u_j * v_a`` at index ``j * len(V) + a`` for rows ``u_j`` of ``U`` and ``v_a`` of ``V``."""
    p = C.p
    if U.shape[0] <= V.shape[0]:
        return np.hstack([matmul(C.mult_matrix(u), V.T, p) for u in U])
    blocks = np.array([matmul(C.mult_matrix(v), U.T, p) for v in V])  # a x d x j
    return np.transpose(blocks, (1, 2, 0)).reshape(C.dim, -1)


def _shift_matrix(alphas: list, beta: Sequence[int], p: int) -> np.ndarray:
    index = {a: t for t, a in enumerate(alphas)}
    S = np.zeros((len(alphas), len(alphas)), dtype=np.int64)
    for t, a in enumerate(alphas):
        c = 1
        for ai, bi in zip(a, beta):
            c = c * binom_mod(ai, bi, p) % p
        if c:
            S[index[tuple(ai - bi for ai, bi in zip(a, beta))], t] = c
    return S


def partials_from_pbasis(xs: Sequence, C: FiniteAlgebra, B: Subalgebra | None = None,
                         betas: Sequence[Sequence[int]] | None = None) -> dict[tuple, DiffOperator]:
    """Operators ``∂_beta`` with ``∂_beta(x^alpha) = binom(alpha, beta) x^(alpha - beta)`` over ``B``.

    Defaults to all ``beta`` in ``[0, p)^n``.
    """
    B = _base(C, B)
    p = C.p
    Phi = pbasis_frame(xs, C, B)
    if Phi is None:
        raise PreconditionError("elements do not form a p-basis")
    Phi_inv = inverse(Phi, p)
    alphas = _alphas([p] * len(xs))
    if betas is None:
        betas = alphas
    M = _regular(C)
    out = {}
    Ib = np.eye(B.dim, dtype=np.int64)
    for beta in betas:
        S = np.kron(Ib, _shift_matrix(alphas, beta, p))
        mat = matmul(Phi, matmul(S, Phi_inv, p), p)
        out[tuple(beta)] = DiffOperator(mat, C, M, int(sum(beta)))
    return out


def delta_alpha(C: FiniteAlgebra, alpha: Sequence[int]) -> DiffOperator:
    """``Δ_alpha(x^beta) = binom(beta, alpha) x^(beta - alpha)`` on a split presented algebra."""
    P = C.presentation
    if P is None or not P.is_split:
        raise PreconditionError("operator is defined for split presentations only")
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != len(P.names) or any(a < 0 or a >= b for a, b in zip(alpha, P.bounds)):
        raise PreconditionError("multi-index out of range")
    p = C.p
    exps = C.monomial_exponents
    index = {tuple(e): k for k, e in enumerate(exps)}
    D = np.zeros((C.dim, C.dim), dtype=np.int64)
    for k, e in enumerate(exps):
        c = 1
        for b, a in zip(e, alpha):
            c = c * binom_mod(int(b), a, p) % p
        if c:
            D[index[tuple(int(b) - a for b, a in zip(e, alpha))], k] = c
    return DiffOperator(D, C, _regular(C), int(sum(alpha)))


def restricted_module(M: CModule, S: Subalgebra) -> CModule:
    """``M`` viewed as a module over the subalgebra ``S`` of its acting algebra."""
    if S.owner is not M.alg:
        raise PreconditionError("subalgebra of a different algebra")
    acts = [M.action(g) for g in S.algebra_gens]
    return CModule(S.algebra, acts, dim=M.dim, action_fn=lambda v: M.action(S.from_coords(v)))


def restrict(D: DiffOperator, S: Subalgebra) -> DiffOperator:
    """Restriction of ``D`` to ``S`` (typically ``C^[1]``), with bound ``floor(bound / p)``."""
    if S.owner is not D.source:
        raise PreconditionError("subalgebra of a different algebra")
    p = D.source.p
    mat = matmul(D.matrix, S.embedding, p)
    b = None if D.order_bound is None else D.order_bound // p
    return DiffOperator(mat, S.algebra, restricted_module(D.target, S), b)


def extend(dpart: DiffOperator, xs: Sequence, C: FiniteAlgebra, S: Subalgebra,
           *, verify: bool = True) -> DiffOperator:
    """``D(sum lambda_alpha x^alpha) = sum x^alpha ∂(lambda_alpha)`` for a p-basis ``xs`` over ``S``.

    ``dpart`` maps ``S`` (own coordinates) into ``C``.  The bound is ``p * k``
    and is re-checked with :func:`order_of` when ``verify`` is set.
    """
    p = C.p
    if dpart.source is not S.algebra or dpart.target.dim != C.dim:
        raise PreconditionError("operator must map the subalgebra into the algebra")
    Phi = pbasis_frame(xs, C, S)
    if Phi is None:
        raise PreconditionError("elements do not form a p-basis")
    X, _ = reduced_monomials(C, xs, p)
    P = X.shape[1]
    images = np.zeros((C.dim, S.dim * P), dtype=np.int64)
    for j in range(S.dim):
        col = dpart.matrix[:, j]
        images[:, j * P:(j + 1) * P] = matmul(C.mult_matrix(col), X, p)
    mat = matmul(images, inverse(Phi, p), p)
    b = None if dpart.order_bound is None else p * dpart.order_bound
    D = DiffOperator(mat, C, _regular(C), b)
    if verify and b is not None:
        o = order_of(D)
        if o is None or o > b:
            raise AssertionError(f"extended operator has order {o} above the bound {b}")
    return D
