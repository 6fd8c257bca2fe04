"""Compiled Gauss-Jordan kernels.

Both kernels reduce their argument in place and return the pivot columns.
They are sequential, so results never depend on thread scheduling.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _inv_mod(a, p):
    # p is prime, so a^(p-2) is the inverse
    result = 1
    base = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


@njit(cache=True)
def rref_modp(A, p):
    m, n = A.shape
    pivots = np.empty(min(m, n), dtype=np.int64)
    nz = np.empty(n, dtype=np.int64)
    r = 0
    for c in range(n):
        if r == m:
            break
        k = -1
        for i in range(r, m):
            if A[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(c, n):
                t = A[r, j]
                A[r, j] = A[k, j]
                A[k, j] = t
        inv = _inv_mod(np.int64(A[r, c]), p)
        cnt = 0
        for j in range(c, n):
            v = np.int64(A[r, j])
            if v != 0:
                if inv != 1:
                    v = (v * inv) % p
                    A[r, j] = v
                nz[cnt] = j
                cnt += 1
        for i in range(m):
            if i == r:
                continue
            f = np.int64(A[i, c])
            if f == 0:
                continue
            g = p - f
            for t in range(cnt):
                j = nz[t]
                A[i, j] = (np.int64(A[i, j]) + g * np.int64(A[r, j])) % p
        pivots[r] = c
        r += 1
    return pivots[:r]


@njit(cache=True)
def rref_gf2(W, ncols):
    m = W.shape[0]
    nw = W.shape[1]
    pivots = np.empty(min(m, ncols), dtype=np.int64)
    r = 0
    one = np.uint64(1)
    for c in range(ncols):
        if r == m:
            break
        w = c >> 6
        bit = one << np.uint64(c & 63)
        k = -1
        for i in range(r, m):
            if W[i, w] & bit:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(w, nw):
                t = W[r, j]
                W[r, j] = W[k, j]
                W[k, j] = t
        for i in range(m):
            if i != r and (W[i, w] & bit):
                for j in range(w, nw):
                    W[i, j] ^= W[r, j]
        pivots[r] = c
        r += 1
    return pivots[:r]


@njit(cache=True)
def apply_tree_sparse(cols, parent, gen, indptr, indices, data, p):
    # cols[:, k] = M_gen[k] @ cols[:, parent[k]], words in breadth-first order
    n, d = cols.shape
    for k in range(1, d):
        g, src = gen[k], parent[k]
        for i in range(n):
            acc = 0
            for t in range(indptr[g, i], indptr[g, i + 1]):
                acc = (acc + data[t] * cols[indices[t], src]) % p
            cols[i, k] = acc
    return cols
