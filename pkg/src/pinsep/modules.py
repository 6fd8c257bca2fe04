"""Finite modules over finite local F_p-algebras.

A :class:`CModule` is an F_p-vector space with one action matrix per
generator of the acting algebra.  Over a local algebra with residue field
F_p, Nakayama's lemma reduces freeness and direct-summand questions to
dimension counts on ``M / mM``.
"""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra, Subalgebra
from .errors import PreconditionError, ResourceError, StructuralError
from .exactla import EchelonBasis, canon, inverse, matmul, row_space, solve

__all__ = [
    "CModule",
    "Submodule",
    "algebra_as_module",
    "minimal_generators",
    "is_free",
    "free_basis",
    "is_direct_summand",
    "quotient_module",
]

# unknowns in the generic retraction system
_RETRACTION_LIMIT = 6000


class CModule:
    """A finite-dimensional module over ``alg``.

    ``gen_action[i]`` is the matrix of the ``i``-th generator of ``alg``.
    """

    def __init__(self, alg: FiniteAlgebra, gen_action: Sequence[np.ndarray], dim: int | None = None,
                 labels: Sequence[str] | None = None, action_fn=None):
        self.alg = alg
        self._action_fn = action_fn
        self.p = alg.p
        if len(gen_action) != alg.ngens:
            raise StructuralError("one action matrix per algebra generator is required")
        self.gen_action = [canon(M, self.p) for M in gen_action]
        if dim is None:
            if not self.gen_action:
                raise StructuralError("module dimension required when the algebra has no generators")
            dim = self.gen_action[0].shape[0]
        self.dim = int(dim)
        for M in self.gen_action:
            if M.shape != (self.dim, self.dim):
                raise StructuralError("action matrix has the wrong shape")
        self.labels = list(labels) if labels else None

    def __repr__(self):
        return f"CModule(dim={self.dim} over algebra of dim {self.alg.dim})"

    def action(self, v) -> np.ndarray:
        """Matrix by which the algebra element ``v`` acts."""
        if self._action_fn is not None:
            return self._action_fn(canon(v, self.p).reshape(-1))
        w = self.alg.to_words(v)
        R = self.word_actions
        return np.tensordot(w, R, axes=(0, 0)) % self.p

    @cached_property
    def word_actions(self) -> np.ndarray:
        """Array of action matrices of the word basis of ``alg``."""
        if self.alg.dim * self.dim * self.dim > 5 * 10**7:
            raise ResourceError("word action table too large")
        out = np.zeros((self.alg.dim, self.dim, self.dim), dtype=np.int64)
        I = np.eye(self.dim, dtype=np.int64)
        for j in range(self.dim):
            out[:, :, j] = self.alg.orbit(I[j], self.gen_action).T
        return out

    def orbit(self, v) -> np.ndarray:
        """Columns ``w_k . v`` for the word basis of the acting algebra."""
        return self.alg.orbit(v, self.gen_action)

    def check_axioms(self) -> list[str]:
        """Violated module axioms (empty when the action is well defined)."""
        p = self.p
        problems = []
        A = self.gen_action
        for i in range(len(A)):
            for j in range(i + 1, len(A)):
                if np.any(matmul(A[i], A[j], p) != matmul(A[j], A[i], p)):
                    problems.append("actions do not commute")
        # g * w_k must act as the word expansion of the product g w_k
        R = self.word_actions
        W = self.alg.word_matrix
        for g, M in enumerate(A):
            prods = self.alg.to_words(matmul(self.alg.gen_mats[g], W, p))
            for k in range(self.alg.dim):
                rhs = np.tensordot(prods[:, k], R, axes=(0, 0)) % p
                if np.any(matmul(M, R[k], p) != rhs):
                    problems.append("action does not respect the algebra relations")
                    break
        return sorted(set(problems))

    @cached_property
    def residues(self) -> list[int]:
        self.alg.require_local()
        return [self.alg.residue(g) for g in self.alg.gen_vecs]

    @cached_property
    def max_ideal_image(self) -> EchelonBasis:
        """``mM`` for the maximal ideal ``m`` of the (local) acting algebra."""
        eb = EchelonBasis(self.dim, self.p)
        I = np.eye(self.dim, dtype=np.int64)
        for lam, M in zip(self.residues, self.gen_action):
            eb.extend(((M - lam * I) % self.p).T)
        return eb

    def submodule(self, vectors) -> "Submodule":
        """Submodule generated by ``vectors``."""
        vecs = canon(np.asarray(vectors).reshape(-1, self.dim), self.p)
        eb = EchelonBasis(self.dim, self.p)
        eb.extend(vecs)
        frontier = eb.rows.copy()
        while frontier.shape[0] and self.gen_action:
            cand = np.vstack([matmul(M, frontier.T, self.p).T for M in self.gen_action])
            red = eb.reduce(cand)
            red = red[np.any(red, axis=1)]
            if red.shape[0] == 0:
                break
            frontier, _ = row_space(red, self.p)
            eb.extend(frontier)
        return Submodule(self, eb.rows)

    def is_stable(self, rows) -> bool:
        eb = EchelonBasis(self.dim, self.p, rows)
        for M in self.gen_action:
            if eb.dim and np.any(eb.reduce(matmul(M, eb.rows.T, self.p).T)):
                return False
        return True


class Submodule:
    """An action-stable subspace of a :class:`CModule` in canonical rref form."""

    def __init__(self, parent: CModule, basis, check: bool = True):
        self.parent = parent
        R, piv = row_space(np.asarray(basis).reshape(-1, parent.dim), parent.p)
        self.basis = R
        self.pivots = piv
        if check and not parent.is_stable(R):
            raise PreconditionError("subspace is not stable under the action")

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Submodule):
            return NotImplemented
        return self.parent is other.parent and np.array_equal(self.basis, other.basis)

    def __hash__(self):
        return hash((id(self.parent), self.basis.tobytes()))

    def __repr__(self):
        return f"Submodule(dim={self.dim} of {self.parent.dim})"

    def contains(self, v) -> bool:
        eb = EchelonBasis(self.parent.dim, self.parent.p)
        eb.rows, eb.pivots = self.basis, list(self.pivots)
        return eb.contains(v)

    def issubset(self, other: "Submodule") -> bool:
        return all(other.contains(b) for b in self.basis)

    def coords(self, V) -> np.ndarray:
        """Coordinates of vectors of the submodule (rows of ``V``) in its basis."""
        return canon(V, self.parent.p)[..., self.pivots]

    @cached_property
    def module(self) -> CModule:
        p = self.parent.p
        acts = [matmul(M, self.basis.T, p)[self.pivots, :] for M in self.parent.gen_action]
        return CModule(self.parent.alg, acts, dim=self.dim)


def algebra_as_module(C: FiniteAlgebra, B: Subalgebra | None = None) -> CModule:
    """``C`` as a module over itself, or over the subalgebra ``B``."""
    if B is None:
        return CModule(C, C.gen_mats, dim=C.dim, labels=C.labels, action_fn=C.mult_matrix)
    if B.owner is not C:
        raise PreconditionError("subalgebra belongs to a different algebra")
    acts = [C.mult_matrix(g) for g in B.algebra_gens]
    return CModule(B.algebra, acts, dim=C.dim, labels=C.labels,
                   action_fn=lambda v: C.mult_matrix(B.from_coords(v)))


def minimal_generators(M: CModule, candidates=None) -> list[np.ndarray]:
    """Greedy Nakayama selection of generators, scanning ``candidates`` in order.

    ``candidates`` defaults to the standard basis of ``M``.
    """
    if not M.alg.is_local:
        M.alg.require_local()
    if M.dim == 0:
        return []
    eb = M.max_ideal_image
    if candidates is None:
        candidates = np.eye(M.dim, dtype=np.int64)
    cand = canon(np.asarray(candidates).reshape(-1, M.dim), M.p)
    idx = eb.greedy(cand)
    if eb.dim + len(idx) != M.dim:
        raise PreconditionError("candidates do not generate the module")
    return [cand[i].copy() for i in idx]


def free_basis(M: CModule) -> list[np.ndarray] | None:
    """A basis of ``M`` as a free module, or None when ``M`` is not free."""
    gens = minimal_generators(M)
    r = len(gens)
    if M.dim != r * M.alg.dim:
        return None
    if r and M.submodule(gens).dim != M.dim:
        raise AssertionError("Nakayama generators failed to generate the module")
    return gens


def is_free(M: CModule) -> int | None:
    """Rank of ``M`` if it is free over its (local) acting algebra, else None."""
    basis = free_basis(M)
    return None if basis is None else len(basis)


def _phi_matrix(M: CModule, gens: Sequence[np.ndarray]) -> np.ndarray:
    return np.hstack([M.orbit(g) for g in gens]) if gens else np.zeros((M.dim, 0), dtype=np.int64)


def is_direct_summand(S: Submodule, N: CModule | None = None, *, method: str = "auto") -> np.ndarray | None:
    """A module retraction ``N -> S`` (matrix into S-coordinates) or None.

    ``method`` is ``"system"`` (solve for all retractions), ``"local"``
    (Nakayama criterion, needs a local algebra and free ``N``) or ``"auto"``.
    """
    if N is None:
        N = S.parent
    if S.parent is not N:
        raise PreconditionError("submodule does not belong to the given module")
    if not N.is_stable(S.basis):
        raise PreconditionError("subspace is not stable under the action")
    p = N.p
    s, n = S.dim, N.dim
    if s == n:
        return np.eye(n, dtype=np.int64)[S.pivots, :] if s else np.zeros((0, n), dtype=np.int64)
    if s == 0:
        return np.zeros((0, n), dtype=np.int64)
    if method == "auto":
        method = "system" if s * n <= _RETRACTION_LIMIT else "local"
    if method == "system":
        return _retraction_system(S, N)
    if method != "local":
        raise ValueError(f"unknown method {method!r}")
    N.alg.require_local()
    nb = free_basis(N)
    if nb is None:
        if s * n <= 4 * _RETRACTION_LIMIT:
            return _retraction_system(S, N)
        raise ResourceError("summand test needs a free ambient module at this size")
    Sm = S.module
    sgens = minimal_generators(Sm)
    if Sm.dim != len(sgens) * Sm.alg.dim:
        return None  # summands of free modules over local rings are free
    lifted = [matmul(S.basis.T, g, p) for g in sgens]
    if lifted and len(N.max_ideal_image.greedy(np.array(lifted))) != len(lifted):
        return None
    comp = minimal_generators(N, np.vstack(lifted + [np.eye(n, dtype=np.int64)]))
    # comp starts with the lifted generators of S
    Phi = _phi_matrix(N, comp)
    Phi_inv = inverse(Phi, p)
    d = N.alg.dim
    keep = np.zeros(Phi.shape[1], dtype=np.int64)
    keep[: len(lifted) * d] = 1
    P = matmul(Phi * keep, Phi_inv, p)
    R = P[S.pivots, :]
    _verify_retraction(R, S, N)
    return R


def _action_on_sub(S: Submodule, M: np.ndarray) -> np.ndarray:
    return matmul(M, S.basis.T, S.parent.p)[S.pivots, :]


def _retraction_system(S: Submodule, N: CModule) -> np.ndarray | None:
    p = N.p
    s, n = S.dim, N.dim
    blocks = []
    rhs = []
    Is, In = np.eye(s, dtype=np.int64), np.eye(n, dtype=np.int64)
    for M in N.gen_action:
        rho_s = _action_on_sub(S, M)
        # R M - rho_s R = 0, unknown R flattened row-major
        blocks.append((np.kron(Is, M.T) - np.kron(rho_s, In)) % p)
        rhs.append(np.zeros(s * n, dtype=np.int64))
    blocks.append(np.kron(Is, S.basis))
    rhs.append(Is.reshape(-1))
    x = solve(np.vstack(blocks), np.concatenate(rhs), p)
    if x is None:
        return None
    R = x.reshape(s, n)
    _verify_retraction(R, S, N)
    return R


def _verify_retraction(R: np.ndarray, S: Submodule, N: CModule):
    p = N.p
    if np.any(matmul(R, S.basis.T, p) != np.eye(S.dim, dtype=np.int64)):
        raise AssertionError("retraction does not restrict to the identity")
    for M in N.gen_action:
        if np.any(matmul(R, M, p) != matmul(_action_on_sub(S, M), R, p)):
            raise AssertionError("retraction is not a module map")


def quotient_module(N: CModule, S: Submodule) -> CModule:
    """``N / S`` on the coordinates of the non-pivot columns of ``S``.

    The returned module carries ``projection`` (``N -> N/S``) and ``lift``.
    """
    if S.parent is not N:
        raise PreconditionError("submodule does not belong to the given module")
    p = N.p
    proj, lift = complement_projection(S.basis, S.pivots, N.dim, p)
    acts = [matmul(proj, matmul(M, lift, p), p) for M in N.gen_action]
    Q = CModule(N.alg, acts, dim=proj.shape[0])
    Q.projection = proj
    Q.lift = lift
    return Q


def complement_projection(R: np.ndarray, pivots: Sequence[int], n: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Projection ``F_p^n -> F_p^n / rowspace(R)`` onto non-pivot coordinates, and its section."""
    free = [c for c in range(n) if c not in set(pivots)]
    I = np.eye(n, dtype=np.int64)
    proj = I[free].copy()
    if len(pivots):
        proj = (proj - matmul(R[:, free].T, I[list(pivots)], p)) % p
    return proj, I[:, free].copy()


def residue_rank(M: CModule) -> int:
    """``dim M / mM``."""
    return M.dim - M.max_ideal_image.dim
