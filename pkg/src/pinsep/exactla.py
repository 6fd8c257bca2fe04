"""Exact dense linear algebra over the prime field F_p.

Matrices are plain ``numpy`` integer arrays holding canonical residues in
``[0, p)``; every function takes the modulus explicitly.  Elimination runs
in compiled kernels: rows are bit-packed into ``uint64`` words when p = 2
and stored one byte per entry for odd p < 256.

:class:`FpScalar` and :class:`FpMatrix` are thin typed wrappers around the
same functions for callers that prefer objects carrying their modulus.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import StructuralError

__all__ = [
    "FpScalar",
    "FpMatrix",
    "EchelonBasis",
    "check_prime",
    "canon",
    "rref",
    "rank",
    "row_space",
    "kernel_basis",
    "solve",
    "matmul",
    "inverse",
    "intersect",
    "in_span",
    "same_span",
]


@lru_cache(maxsize=None)
def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not _is_prime(int(p)):
        raise StructuralError(f"modulus {p!r} is not a prime")
    if p >= 2**31:
        raise StructuralError("moduli above 2^31 are not supported")
    return int(p)


def canon(M, p: int) -> np.ndarray:
    """Return ``M`` as an int64 array of residues in ``[0, p)``."""
    A = np.asarray(M)
    if A.dtype == object:
        A = np.array([[int(v) for v in row] for row in A], dtype=np.int64) if A.ndim == 2 \
            else np.array([int(v) for v in A], dtype=np.int64)
    return np.mod(A.astype(np.int64, copy=False), p)


# ---------------------------------------------------------------- packing

def _pack_gf2(A: np.ndarray) -> np.ndarray:
    m, n = A.shape
    nw = max(1, (n + 63) // 64)
    bits = np.zeros((m, nw * 64), dtype=np.uint8)
    bits[:, :n] = A & 1
    # little-endian bit order inside each 64-bit word
    packed = np.packbits(bits.reshape(m, nw, 8, 8)[:, :, :, ::-1], axis=-1)
    return packed.reshape(m, nw * 8).view("<u8").reshape(m, nw).copy()


def _unpack_gf2(W: np.ndarray, n: int) -> np.ndarray:
    m, nw = W.shape
    raw = np.ascontiguousarray(W.astype("<u8")).view(np.uint8).reshape(m, nw, 8)
    bits = np.unpackbits(raw, axis=-1).reshape(m, nw, 8, 8)[:, :, :, ::-1]
    return bits.reshape(m, nw * 64)[:, :n].astype(np.int64)


# ---------------------------------------------------------------- elimination

def rref(M, p: int) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row echelon form of ``M`` over F_p.

    Returns ``(R, rank, pivots)`` where ``R`` has the shape of ``M`` with the
    zero rows at the bottom and ``pivots`` is strictly increasing.
    """
    p = check_prime(p)
    A = canon(M, p)
    if A.ndim != 2:
        raise StructuralError("rref expects a 2-dimensional matrix")
    m, n = A.shape
    if m == 0 or n == 0:
        return A.copy(), 0, []
    if p == 2:
        W = _pack_gf2(A)
        piv = _kernels.rref_gf2(W, n)
        R = _unpack_gf2(W, n)
    else:
        work = A.astype(np.uint8) if p < 256 else A.copy()
        piv = _kernels.rref_modp(work, p)
        R = work.astype(np.int64)
    pivots = [int(c) for c in piv]
    return R, len(pivots), pivots


def rank(M, p: int) -> int:
    return rref(M, p)[1]


def row_space(M, p: int) -> tuple[np.ndarray, list[int]]:
    """Canonical basis (nonzero rref rows) of the row space of ``M``."""
    A = canon(M, p)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    R, r, piv = rref(A, p)
    return R[:r].copy(), piv


def kernel_basis(A, p: int) -> np.ndarray:
    """Basis of ``{x : A x = 0}`` as the rows of a ``(cols - rank) x cols`` array.

    Vectors are ordered by their free column; the free coordinate is 1.
    """
    A = canon(A, p)
    m, n = A.shape
    R, r, piv = rref(A, p)
    free = [c for c in range(n) if c not in set(piv)]
    K = np.zeros((len(free), n), dtype=np.int64)
    if not free:
        return K
    K[np.arange(len(free)), free] = 1
    if r:
        K[:, piv] = np.mod(-R[:r][:, free].T, p)
    return K


def solve(A, b, p: int) -> np.ndarray | None:
    """Some ``x`` with ``A x = b``, free variables set to 0, or None."""
    A = canon(A, p)
    b = canon(b, p).reshape(-1)
    if A.ndim != 2 or A.shape[0] != b.shape[0]:
        raise StructuralError(f"dimension mismatch: {A.shape} vs {b.shape}")
    m, n = A.shape
    R, r, piv = rref(np.hstack([A, b.reshape(-1, 1)]), p)
    if r and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = R[i, n]
    return x


def matmul(A, B, p: int) -> np.ndarray:
    """Product ``A @ B`` mod p through float64 BLAS in exact-sized chunks."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape[-1] != B.shape[0]:
        raise StructuralError(f"dimension mismatch: {A.shape} @ {B.shape}")
    k = A.shape[-1]
    if (p - 1) ** 2 >= 2**52:
        # a single product is not exact in float64
        return np.mod(A.astype(object) @ B.astype(object), p).astype(np.int64)
    step = int(2**52 // max(1, (p - 1) ** 2))
    if k <= step:
        return np.mod(A.astype(np.float64, copy=False) @ B.astype(np.float64, copy=False), p).astype(np.int64)
    out = np.zeros((A.shape[0], B.shape[-1]) if B.ndim == 2 else (A.shape[0],), dtype=np.int64)
    for s in range(0, k, step):
        part = A[..., s:s + step].astype(np.float64) @ B[s:s + step].astype(np.float64)
        out = np.mod(out + np.mod(np.rint(part), p).astype(np.int64), p)
    return out


def inverse(A, p: int) -> np.ndarray:
    A = canon(A, p)
    n = A.shape[0]
    if A.shape != (n, n):
        raise StructuralError("inverse of a non-square matrix")
    R, r, piv = rref(np.hstack([A, np.eye(n, dtype=np.int64)]), p)
    if r < n or piv[n - 1] != n - 1:
        raise StructuralError("matrix is singular")
    return R[:, n:].copy()


def intersect(U, W, p: int) -> np.ndarray:
    """Canonical basis of ``rowspace(U) ∩ rowspace(W)``."""
    U = canon(U, p).reshape(-1, np.shape(U)[-1])
    W = canon(W, p).reshape(-1, np.shape(W)[-1])
    n = U.shape[1]
    if U.shape[0] == 0 or W.shape[0] == 0:
        return np.zeros((0, n), dtype=np.int64)
    U, _ = row_space(U, p)
    W, _ = row_space(W, p)
    K = kernel_basis(np.vstack([U, W]).T, p)
    if K.shape[0] == 0:
        return np.zeros((0, n), dtype=np.int64)
    return row_space(matmul(K[:, : U.shape[0]], U, p), p)[0]


def in_span(v, M, p: int) -> bool:
    M = canon(M, p)
    if M.size == 0:
        return not np.any(canon(v, p))
    return rank(np.vstack([M, canon(v, p).reshape(1, -1)]), p) == rank(M, p)


def same_span(U, W, p: int) -> bool:
    a, _ = row_space(U, p)
    b, _ = row_space(W, p)
    return a.shape == b.shape and bool(np.array_equal(a, b))


# ---------------------------------------------------------------- incremental basis

class EchelonBasis:
    """A subspace of F_p^n kept in reduced row echelon form.

    Reducing a vector against the basis is a single matrix product because
    every pivot column is zero outside its own row.
    """

    def __init__(self, n: int, p: int, rows=None):
        self.n = int(n)
        self.p = check_prime(p)
        self.rows = np.zeros((0, self.n), dtype=np.int64)
        self.pivots: list[int] = []
        if rows is not None:
            self.extend(rows)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def copy(self) -> "EchelonBasis":
        e = EchelonBasis(self.n, self.p)
        e.rows = self.rows.copy()
        e.pivots = list(self.pivots)
        return e

    def reduce(self, V) -> np.ndarray:
        V = canon(V, self.p)
        if not self.pivots:
            return V
        single = V.ndim == 1
        V2 = V.reshape(1, -1) if single else V
        out = np.mod(V2 - matmul(V2[:, self.pivots], self.rows, self.p), self.p)
        return out[0] if single else out

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v))

    def extend(self, V) -> int:
        """Add the rows of ``V``; return the number of new dimensions."""
        V = canon(V, self.p)
        if V.ndim == 1:
            V = V.reshape(1, -1)
        if V.shape[0] == 0:
            return 0
        V = self.reduce(V)
        V = V[np.any(V, axis=1)]
        if V.shape[0] == 0:
            return 0
        new, newpiv = row_space(V, self.p)
        if not newpiv:
            return 0
        old = self.rows
        if old.shape[0]:
            old = np.mod(old - matmul(old[:, newpiv], new, self.p), self.p)
        rows = np.vstack([old, new])
        piv = self.pivots + newpiv
        order = np.argsort(piv, kind="stable")
        self.rows = rows[order]
        self.pivots = [piv[i] for i in order]
        return len(newpiv)

    def add(self, v) -> bool:
        return self.extend(v) > 0

    def greedy(self, V) -> list[int]:
        """Indices of rows of ``V`` that are independent of the basis and of earlier rows.

        The basis itself is left unchanged.
        """
        V = canon(V, self.p)
        if V.ndim == 1:
            V = V.reshape(1, -1)
        if V.shape[0] == 0:
            return []
        R = self.reduce(V)
        _, _, piv = rref(R.T, self.p)
        return list(piv)

    def coordinates(self, v) -> np.ndarray | None:
        """Coefficients of ``v`` in the basis rows, or None if outside."""
        v = canon(v, self.p)
        if np.any(self.reduce(v)):
            return None
        return v[..., self.pivots].copy()


# ---------------------------------------------------------------- typed wrappers

@dataclass(frozen=True)
class FpScalar:
    """An element of F_p with its modulus."""

    value: int
    p: int

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _other(self, o) -> int:
        if isinstance(o, FpScalar):
            if o.p != self.p:
                raise StructuralError(f"mismatched moduli {self.p} and {o.p}")
            return o.value
        return int(o)

    def __add__(self, o):
        return FpScalar(self.value + self._other(o), self.p)

    __radd__ = __add__

    def __sub__(self, o):
        return FpScalar(self.value - self._other(o), self.p)

    def __rsub__(self, o):
        return FpScalar(self._other(o) - self.value, self.p)

    def __mul__(self, o):
        return FpScalar(self.value * self._other(o), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpScalar(-self.value, self.p)

    def inverse(self) -> "FpScalar":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return FpScalar(pow(self.value, self.p - 2, self.p), self.p)

    def __truediv__(self, o):
        return self * FpScalar(self._other(o), self.p).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FpScalar(pow(self.value, e, self.p), self.p)

    def __int__(self):
        return self.value

    def __eq__(self, o):
        if isinstance(o, FpScalar):
            return self.p == o.p and self.value == o.value
        if isinstance(o, (int, np.integer)):
            return self.value == int(o) % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))


class FpMatrix:
    """A matrix over F_p; immutable after construction."""

    __slots__ = ("_a", "p")

    def __init__(self, entries, p: int | None = None):
        if p is None:
            p = _common_modulus(entries)
        self.p = check_prime(p)
        a = canon(_strip_scalars(entries, self.p), self.p)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise StructuralError("FpMatrix entries must form a 2-dimensional grid")
        a.setflags(write=False)
        self._a = a

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "FpMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls(np.eye(n, dtype=np.int64), p)

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    def __getitem__(self, idx):
        v = self._a[idx]
        if np.ndim(v) == 0:
            return FpScalar(int(v), self.p)
        return v

    def _check(self, other: "FpMatrix"):
        if other.p != self.p:
            raise StructuralError(f"mismatched moduli {self.p} and {other.p}")

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        self._check(other)
        return FpMatrix(matmul(self._a, other._a, self.p), self.p)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        self._check(other)
        return FpMatrix(self._a + other._a, self.p)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        self._check(other)
        return FpMatrix(self._a - other._a, self.p)

    def __eq__(self, other):
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash((self.p, self._a.shape, self._a.tobytes()))

    def __repr__(self):
        return f"FpMatrix(p={self.p}, {self._a.tolist()})"

    def transpose(self) -> "FpMatrix":
        return FpMatrix(self._a.T, self.p)

    def rref(self) -> tuple["FpMatrix", int, list[int]]:
        R, r, piv = rref(self._a, self.p)
        return FpMatrix(R, self.p), r, piv

    def rank(self) -> int:
        return rank(self._a, self.p)

    def solve(self, b) -> np.ndarray | None:
        b = b.array.reshape(-1) if isinstance(b, FpMatrix) else _strip_scalars(b, self.p)
        return solve(self._a, b, self.p)

    def kernel_basis(self) -> list[np.ndarray]:
        return list(kernel_basis(self._a, self.p))

    def inverse(self) -> "FpMatrix":
        return FpMatrix(inverse(self._a, self.p), self.p)


def _common_modulus(entries) -> int:
    moduli = {e.p for e in _flatten(entries) if isinstance(e, FpScalar)}
    if len(moduli) > 1:
        raise StructuralError(f"mismatched moduli {sorted(moduli)}")
    if not moduli:
        raise StructuralError("modulus required for plain integer entries")
    return moduli.pop()


def _strip_scalars(entries, p: int):
    if isinstance(entries, np.ndarray) and entries.dtype != object:
        return entries
    flat = list(_flatten(entries))
    for e in flat:
        if isinstance(e, FpScalar) and e.p != p:
            raise StructuralError(f"mismatched moduli {p} and {e.p}")

    def conv(x):
        if isinstance(x, FpScalar):
            return x.value
        if isinstance(x, (list, tuple, np.ndarray)):
            return [conv(y) for y in x]
        return int(x)

    return np.array(conv(entries), dtype=np.int64)


def _flatten(x) -> Iterable:
    if isinstance(x, (list, tuple)) or (isinstance(x, np.ndarray) and x.dtype == object):
        for y in x:
            yield from _flatten(y)
    else:
        yield x


def vectors_equal(a: Sequence[int], b: Sequence[int]) -> bool:
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))
