"""Decision procedures for finite extensions ``A ⊂ C`` of local F_p-algebras.

Every verdict is a :class:`Verdict` carrying a witness: p-bases, failing
chain levels, dimension tables or retraction sizes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import config
from .algebra import (FiniteAlgebra, FrobeniusChain, Presentation, Subalgebra, build_algebra, frobenius_chain,
                      prime_field, subalgebra_generated, whole)
from .diffcalc import (_formal_gradient, _kaehler_relations, _route, derivations, diff_filtration, hom_space,
                       kaehler_free_rank, pbasis_frame, reduced_monomials, tensor_square)
from .errors import PreconditionError, ResourceError
from .exactla import EchelonBasis, canon, kernel_basis, matmul, row_space, solve
from .modules import (CModule, Submodule, algebra_as_module, free_basis, is_direct_summand, is_free,
                      quotient_module)

__all__ = [
    "Verdict",
    "ClassificationReport",
    "GNGSData",
    "NGSPresentation",
    "leg",
    "exponent_at_most_one",
    "is_pbasis",
    "find_pbasis",
    "is_galois",
    "is_f_extension",
    "is_purely_inseparable",
    "gngs",
    "ngs_presentation",
    "theoremA_report",
    "fiber_check",
    "der_generates_end",
    "galois_battery",
    "classify",
    "pi_witness",
]


@dataclass
class Verdict:
    """``value`` is True, False or None (not applicable / skipped)."""

    value: bool | None
    witness: dict = field(default_factory=dict)
    note: str = ""

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"value": self.value}
        if self.witness:
            out["witness"] = _jsonable(self.witness)
        if self.note:
            out["note"] = self.note
        return out

    def __bool__(self):
        return bool(self.value)


@dataclass
class ClassificationReport:
    entries: dict[str, Any] = field(default_factory=dict)
    timing: dict[str, float] = field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries[key]

    def __setitem__(self, key, value):
        self.entries[key] = value

    def to_dict(self, timing: bool = False) -> dict:
        out = {k: (v.to_dict() if hasattr(v, "to_dict") else _jsonable(v)) for k, v in self.entries.items()}
        if timing:
            out["timing"] = {k: round(v, 4) for k, v in self.timing.items()}
        return out


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if hasattr(x, "to_dict"):
        return x.to_dict()
    return x


# ---------------------------------------------------------------- helpers

def leg(C: FiniteAlgebra, lower: Subalgebra | None, upper: Subalgebra | None) -> tuple[FiniteAlgebra, Subalgebra]:
    """The extension ``lower ⊂ upper`` as a standalone algebra with a base subalgebra."""
    lower = prime_field(C) if lower is None else lower
    if upper is None or upper == whole(C):
        return C, lower
    if not lower.issubset(upper):
        raise PreconditionError("lower ring is not contained in the upper ring")
    return upper.algebra, upper.restrict(lower)


def exponent_at_most_one(C: FiniteAlgebra, B: Subalgebra) -> bool:
    F = C.frobenius_matrix
    return all(B.contains(F @ g % C.p) for g in C.gen_vecs)


def _centered(C: FiniteAlgebra, v) -> np.ndarray:
    return (canon(v, C.p) - C.residue(v) * C.unit) % C.p


def _cotangent_relations(C: FiniteAlgebra, B: Subalgebra) -> EchelonBasis:
    """``m^2 + m_B C`` for local ``C`` with maximal ideal ``m``."""
    p = C.p
    rad = C.radical
    eb = EchelonBasis(C.dim, p)
    ideal_gens = [_centered(C, g) for g in C.gen_vecs] + [_centered(C, b) for b in B.algebra_gens]
    for g in ideal_gens:
        if np.any(g):
            eb.extend(matmul(C.mult_matrix(g), rad.T, p).T)
    for b in B.algebra_gens:
        b = _centered(C, b)
        if np.any(b):
            eb.extend(C.mult_matrix(b).T)
    return eb


def _minimal_algebra_generators(C: FiniteAlgebra, B: Subalgebra, candidates=None) -> list[np.ndarray]:
    """Greedy choice among ``candidates`` spanning ``m / (m^2 + m_B C)``."""
    C.require_local()
    eb = _cotangent_relations(C, B)
    target = C.dim - 1  # dim m
    cands = C.gen_vecs if candidates is None else [canon(c, C.p).reshape(-1) for c in candidates]
    if not cands:
        return []
    idx = eb.greedy(np.array([_centered(C, g) for g in cands]))
    if eb.dim + len(idx) != target:
        raise PreconditionError("candidates do not generate the algebra")
    return [canon(cands[i], C.p).reshape(-1) for i in idx]


# ---------------------------------------------------------------- exponent one

def is_pbasis(xs: Sequence, C: FiniteAlgebra, B: Subalgebra | None = None) -> bool:
    """Whether the reduced monomials in ``xs`` form a ``B``-basis of ``C``."""
    return pbasis_frame(xs, C, B) is not None


def _require_exponent_one(C: FiniteAlgebra, B: Subalgebra):
    if not exponent_at_most_one(C, B):
        raise PreconditionError("extension has exponent larger than one")


def find_pbasis(C: FiniteAlgebra, B: Subalgebra | None = None, *, _omega=None) -> list[np.ndarray] | None:
    """A p-basis of ``C`` over ``B`` chosen among the generators, or None."""
    B = prime_field(C) if B is None else B
    _require_exponent_one(C, B)
    rank, free = kaehler_free_rank(C, B) if _omega is None else _omega
    if not free:
        return None
    xs = _minimal_algebra_generators(C, B)
    if len(xs) != rank:
        raise AssertionError("minimal generators disagree with the rank of the differentials")
    if not is_pbasis(xs, C, B):
        raise AssertionError("free differentials without a p-basis")
    return xs


def _labels(C: FiniteAlgebra, xs) -> list[str]:
    from .algebra import AlgebraElement
    return [repr(AlgebraElement(C, x)) for x in xs]


def is_galois(C: FiniteAlgebra, B: Subalgebra | None = None) -> Verdict:
    """Exponent-one extension with free differentials (local case)."""
    B = prime_field(C) if B is None else B
    _require_exponent_one(C, B)
    rank, free = kaehler_free_rank(C, B)
    w: dict[str, Any] = {"dim_top": C.dim, "dim_base": B.dim, "omega_generators": rank, "omega_free": free}
    ratio = C.dim // B.dim if C.dim % B.dim == 0 else None
    w["rank_over_base"] = ratio
    if free:
        xs = find_pbasis(C, B, _omega=(rank, free))
        w["pbasis"] = _labels(C, xs)
        if C.dim != B.dim * C.p ** len(xs) or is_free(algebra_as_module(C, B)) is None:
            raise AssertionError("Galois verdict without a free module of rank p^n")
    return Verdict(free, w)


# ---------------------------------------------------------------- chains

def _chain(C: FiniteAlgebra, A: Subalgebra, chain: FrobeniusChain | None) -> FrobeniusChain:
    return frobenius_chain(C, A) if chain is None else chain


def is_f_extension(C: FiniteAlgebra, A: Subalgebra | None = None, chain: FrobeniusChain | None = None) -> Verdict:
    """``C`` free over every chain level ``C^[e]``."""
    A = prime_field(C) if A is None else A
    ch = _chain(C, A, chain)
    if not ch.finite:
        return Verdict(None, {"chain_dims": ch.dims}, "not finite exponent")
    ranks = []
    for e, lvl in enumerate(ch.levels):
        r = 1 if e == 0 else is_free(algebra_as_module(C, lvl))
        ranks.append(r)
        if r is None:
            return Verdict(False, {"failing_level": e, "dim": C.dim, "dim_level": lvl.dim,
                                   "divisible": C.dim % lvl.dim == 0, "chain_dims": ch.dims})
    return Verdict(True, {"ranks": ranks, "chain_dims": ch.dims})


def _chain_pair(C: FiniteAlgebra, ch: FrobeniusChain, e: int) -> tuple[FiniteAlgebra, Subalgebra]:
    top, low = ch.levels[e], ch.levels[e + 1]
    if e == 0:
        return C, low
    return top.algebra, top.restrict(low)


def is_purely_inseparable(C: FiniteAlgebra, A: Subalgebra | None = None,
                          chain: FrobeniusChain | None = None) -> Verdict:
    """Every chain step ``C^[e+1] ⊂ C^[e]`` is Galois."""
    A = prime_field(C) if A is None else A
    ch = _chain(C, A, chain)
    if not ch.finite:
        return Verdict(None, {"chain_dims": ch.dims}, "not finite exponent")
    levels = []
    value = True
    for e in range(ch.exponent):
        top, base = _chain_pair(C, ch, e)
        v = is_galois(top, base)
        levels.append({"level": e, **v.witness, "galois": v.value})
        if not v.value:
            value = False
            break
    w = {"exponent": ch.exponent, "chain_dims": ch.dims, "levels": levels}
    if not value:
        w["failing_level"] = levels[-1]["level"]
    return Verdict(value, w)


# ---------------------------------------------------------------- GNGS / NGS

@dataclass
class GNGSData:
    elements: list[np.ndarray]
    n: list[int]
    e: list[int]
    labels: list[str]

    @property
    def sum_identity(self) -> bool:
        return sum(self.n) == sum(self.e)

    @property
    def index_identity(self) -> bool:
        n_ext = self.n + [0]
        return all(n_ext[ei] < i + 1 <= n_ext[ei - 1] for i, ei in enumerate(self.e))

    def to_dict(self) -> dict:
        return {"elements": self.labels, "n": self.n, "e": self.e,
                "sum_n": sum(self.n), "sum_e": sum(self.e)}


def gngs(C: FiniteAlgebra, A: Subalgebra | None = None, chain: FrobeniusChain | None = None) -> GNGSData:
    """Elements whose ``p^e``-th powers minimally generate every chain level."""
    A = prime_field(C) if A is None else A
    A.algebra.require_local()
    C.require_local()
    ch = _chain(C, A, chain)
    if not ch.finite:
        raise PreconditionError("extension does not have finite exponent")
    E = ch.exponent
    p = C.p
    F = C.frobenius_matrix
    cands = [_centered(C, g) for g in C.gen_vecs]
    chosen: list[np.ndarray] = []
    added_at: list[int] = []
    n = [0] * E
    for e in range(E - 1, -1, -1):
        top, base = (C, A) if e == 0 else (ch.levels[e].algebra, ch.levels[e].restrict(A))
        to_top = (lambda v: v) if e == 0 else ch.levels[e].coords
        eb = _cotangent_relations(top, base)
        target = top.dim - 1

        def power(v, e=e):
            for _ in range(e):
                v = F @ v % p
            return v

        vecs = np.array([_centered(top, to_top(power(x))) for x in chosen + cands])
        idx = eb.greedy(vecs)
        if idx[:len(chosen)] != list(range(len(chosen))):
            raise AssertionError("previously chosen elements became dependent")
        fresh = [i - len(chosen) for i in idx[len(chosen):]]
        eb.extend(vecs[idx])
        for i in fresh:
            chosen.append(cands[i])
            added_at.append(e)
        n[e] = len(chosen)
        if eb.dim != target:
            raise AssertionError("chain level not generated by powers of the generators")
    es = [a + 1 for a in added_at]
    G = GNGSData(chosen, n, es, _labels(C, chosen))
    if not (G.sum_identity and G.index_identity):
        raise AssertionError("exponent sequence violates its defining identities")
    return G


@dataclass
class NGSPresentation:
    exponents: list[int]
    polys: list[dict | None]
    isomorphism: bool
    witness: dict
    presentation: Presentation | None = None

    def to_dict(self) -> dict:
        polys = []
        for P in self.polys:
            polys.append(None if P is None else {"*".join(map(str, k)): list(v) for k, v in sorted(P.items())})
        return {"exponents": self.exponents, "isomorphism": self.isomorphism,
                "relations": polys, **_jsonable(self.witness)}


def ngs_presentation(C: FiniteAlgebra, A: Subalgebra | None = None, G: GNGSData | None = None) -> NGSPresentation:
    """Solve ``x_i^(p^e(i)) = P_i`` and decide whether the presented algebra maps isomorphically."""
    A = prime_field(C) if A is None else A
    G = gngs(C, A) if G is None else G
    p = C.p
    xs, es = G.elements, G.e
    polys: list[dict | None] = []
    missing = []
    for i, (x, ei) in enumerate(zip(xs, es)):
        q = p ** ei
        lhs = C.frobenius_power(x, ei)
        earlier = [(j, xs[j]) for j in range(i) if es[j] > ei]
        if earlier:
            ys = [C.frobenius_power(xj, ei) for _, xj in earlier]
            X, alphas = reduced_monomials(C, ys, [p ** (es[j] - ei) for j, _ in earlier])
        else:
            X, alphas = C.unit.reshape(-1, 1), [()]
        cols = np.hstack([matmul(C.mult_matrix(a), X, p) for a in A.basis])
        sol = solve(cols, lhs, p)
        if sol is None:
            polys.append(None)
            missing.append(i)
            continue
        P: dict = {}
        nA = A.dim
        P_mat = sol.reshape(nA, len(alphas))
        for t, alpha in enumerate(alphas):
            coef = P_mat[:, t]
            if np.any(coef):
                exps = [0] * len(xs)
                for (j, _), b in zip(earlier, alpha):
                    exps[j] = b * q
                P[tuple(exps)] = tuple(int(c) for c in coef)
        polys.append(P)
    bound = A.dim * p ** sum(es)
    X, _ = reduced_monomials(C, xs, [p ** ei for ei in es]) if xs else (C.unit.reshape(-1, 1), [()])
    span = np.hstack([matmul(C.mult_matrix(a), X, p) for a in A.basis])
    rank = row_space(span.T, p)[0].shape[0]
    iso = not missing and bound == C.dim and rank == C.dim
    witness = {"free_dimension": bound, "dim": C.dim, "image_rank": rank, "unsolved": missing}
    pres = None
    if not missing and A.dim == 1:
        names = [f"x{i + 1}" for i in range(len(xs))]
        mono = [{k: v[0] for k, v in P.items()} for P in polys]
        pres = Presentation.make(p, names, es, mono)
    return NGSPresentation(list(es), polys, iso, witness, pres)


# ---------------------------------------------------------------- five-way report

def _all_free(modules) -> tuple[bool, list]:
    ranks = []
    for k, M in modules:
        r = is_free(M)
        ranks.append([k, r])
        if r is None:
            return False, ranks
    return True, ranks


def theoremA_report(C: FiniteAlgebra, A: Subalgebra | None = None, *, max_dim: int | None = None,
                    chain: FrobeniusChain | None = None) -> ClassificationReport:
    """Evaluate the five equivalent characterisations of pure inseparability independently."""
    A = prime_field(C) if A is None else A
    ch = _chain(C, A, chain)
    rep = ClassificationReport()
    limit = config.THEOREM_A_MAX_DIM if max_dim is None else max_dim
    t0 = time.perf_counter()
    rep["chain_pi"] = is_purely_inseparable(C, A, ch)
    rep.timing["chain_pi"] = time.perf_counter() - t0
    if not ch.finite:
        for key in ("principal_parts", "principal_parts_powers", "diff_summands", "diff_power_summands"):
            rep[key] = Verdict(None, note="not finite exponent")
        rep["agreement"] = None
        return rep
    if C.dim > limit:
        for key in ("principal_parts", "principal_parts_powers", "diff_summands", "diff_power_summands"):
            rep[key] = Verdict(None, note=f"skipped: dimension {C.dim} above {limit}")
        rep["agreement"] = None
        return rep
    p = C.p
    T = tensor_square(C, A, require_free=False)
    s = T.stable_power()
    top = max(s, 1)
    t0 = time.perf_counter()
    pp = {}

    def parts(k):
        if k not in pp:
            sub = Submodule(T.module, T.J_power(k + 1), check=False)
            pp[k] = quotient_module(T.module, sub)
        return pp[k]

    ok, ranks = _all_free((k, parts(k)) for k in range(top + 1))
    rep["principal_parts"] = Verdict(ok, {"orders": ranks, "stable_power": s})
    powers = []
    e = 0
    while True:
        powers.append(p ** e)
        if p ** e >= top:
            break
        e += 1
    ok, ranks = _all_free((k, parts(k)) for k in powers)
    rep["principal_parts_powers"] = Verdict(ok, {"orders": ranks})
    rep.timing["principal_parts"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    fext = is_f_extension(C, A, ch)
    if not fext.value:
        w = {"f_extension": False, "failing_level": fext.witness.get("failing_level")}
        rep["diff_summands"] = Verdict(False, w)
        rep["diff_power_summands"] = Verdict(False, w)
    else:
        H = hom_space(C, A)
        # Diff^k reaches Hom once k passes the nilpotency of the brackets
        filt = diff_filtration(C, A, None, H.dim, "bracket", until_full=True)
        summ = []
        ok = True
        for k, S in enumerate(filt):
            r = is_direct_summand(S, H.module)
            summ.append([k, S.dim, r is not None])
            if r is None:
                ok = False
                break
        rep["diff_summands"] = Verdict(ok, {"f_extension": True, "orders": summ})
        summ = []
        ok = True
        e = 0
        while True:
            k = p ** e
            S = filt[min(k, len(filt) - 1)]
            r = is_direct_summand(S, H.module)
            summ.append([k, S.dim, r is not None])
            if r is None:
                ok = False
                break
            if k >= len(filt) - 1:
                break
            e += 1
        rep["diff_power_summands"] = Verdict(ok, {"f_extension": True, "orders": summ})
    rep.timing["diff"] = time.perf_counter() - t0
    vals = [rep[k].value for k in ("chain_pi", "principal_parts", "principal_parts_powers",
                                    "diff_summands", "diff_power_summands")]
    rep["agreement"] = len(set(vals)) == 1
    return rep


# ---------------------------------------------------------------- fibers and Der

def fiber_check(C: FiniteAlgebra, A: Subalgebra) -> Verdict:
    """Check ``p.i.(C/A) <=> F-extension(C/A) and p.i.(C/mC over F_p)``."""
    Aalg = A.algebra
    Aalg.require_local()
    rad = matmul(Aalg.radical, A.basis, C.p) if Aalg.radical.shape[0] else np.zeros((0, C.dim), dtype=np.int64)
    ideal = C.ideal_generated(rad) if rad.shape[0] else np.zeros((0, C.dim), dtype=np.int64)
    Fib, _ = C.quotient(ideal)
    pi = is_purely_inseparable(C, A)
    fext = is_f_extension(C, A)
    fib_pi = is_purely_inseparable(Fib, prime_field(Fib))
    if pi.value is None or fext.value is None or fib_pi.value is None:
        return Verdict(None, {"fiber_dim": Fib.dim}, "not finite exponent")
    rhs = bool(fext.value and fib_pi.value)
    return Verdict(pi.value == rhs, {"fiber_dim": Fib.dim, "pi": pi.value, "f_extension": fext.value,
                                     "fiber_pi": fib_pi.value})


def der_generates_end(C: FiniteAlgebra, A: Subalgebra | None = None) -> bool:
    """Whether ``C`` and ``Der_A(C)`` generate ``End_A(C)`` under composition."""
    A = prime_field(C) if A is None else A
    H = hom_space(C, A)
    der = derivations(C, A)
    p, d = C.p, C.dim
    gens = [C.mult_matrix(g) for g in C.gen_vecs]
    gens += [m.reshape(d, d) for m in H.flat(der.basis)] if der.dim else []
    eb = EchelonBasis(d * d, p, np.eye(d, dtype=np.int64).reshape(1, -1))
    frontier = eb.rows.copy()
    while frontier.shape[0] and gens:
        Fs = frontier.reshape(-1, d, d)
        cand = np.vstack([((G @ Fs) % p).reshape(-1, d * d) for G in gens])
        red = eb.reduce(cand)
        red = red[np.any(red, axis=1)]
        if red.shape[0] == 0:
            break
        frontier, _ = row_space(red, p)
        eb.extend(frontier)
    return eb.dim == H.dim


class _FreeDerivations:
    """``Der_B(C)`` as values on the generators, with ``End_B(C)`` in coordinates ``f -> (f(t_j))_j``.

    Needs ``C`` local and free over ``B`` with basis ``t_j``; nothing of size ``d^2`` is formed.
    """

    def __init__(self, C: FiniteAlgebra, B: Subalgebra, ts: Sequence[np.ndarray]):
        p, d, n = C.p, C.dim, C.ngens
        self.C, self.B = C, B
        self.T = np.array(ts, dtype=np.int64).T  # d x r
        R = _kaehler_relations(C, B, _route(C, "auto"))
        zero = np.zeros((d, d), dtype=np.int64)
        # sum_i rel_i * v_i = 0 for every relation
        blocks = [np.hstack([C.mult_matrix(rel[i]) if np.any(rel[i]) else zero for i in range(n)]) for rel in R]
        self.values = kernel_basis(np.vstack(blocks), p) if blocks else np.eye(n * d, dtype=np.int64)
        self.G = _formal_gradient(C)  # d x n x d

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def operator(self, v: np.ndarray) -> np.ndarray:
        C, p, d = self.C, self.C.p, self.C.dim
        V = v.reshape(C.ngens, d)
        out = np.zeros((d, d), dtype=np.int64)
        for i in range(C.ngens):
            if np.any(V[i]):
                out = (out + matmul(C.mult_matrix(V[i]), self.G[:, i, :].T, p)) % p
        return out

    def is_derivation(self, D: np.ndarray) -> bool:
        C, p = self.C, self.C.p
        for g, L in zip(C.gen_vecs, C.gen_mats):
            DL = matmul(D, L, p)
            rhs = (matmul(L, D, p) + C.mult_matrix(matmul(D, g, p))) % p
            if not np.array_equal(DL, rhs):
                return False
        return all(not np.any(matmul(D, b, p)) for b in self.B.algebra_gens)

    def coordinates(self, D: np.ndarray) -> np.ndarray:
        return matmul(D, self.T, self.C.p).T  # r x d

    def minimal_generators(self) -> tuple[list[np.ndarray], bool]:
        """Nakayama generators of ``Der`` and whether ``Der`` is free on them."""
        C, p, n, d = self.C, self.C.p, self.C.ngens, self.C.dim
        V = self.values.reshape(-1, n, d)
        eb = EchelonBasis(n * d, p)
        for g in C.gen_vecs:
            L = C.mult_matrix(_centered(C, g))
            eb.extend(matmul(V.reshape(-1, d), L.T, p).reshape(-1, n * d))
        idx = eb.greedy(self.values)
        gens = [self.values[i] for i in idx]
        return gens, self.dim == len(gens) * d

    def span_of_words(self, gens: Sequence[np.ndarray]) -> bool:
        """Whether the words in ``gens`` span ``End_B(C)`` over ``C``.

        Residues decide a positive answer early; otherwise the full ``C``-span is tracked.
        """
        C, p, d = self.C, self.C.p, self.C.dim
        r = self.T.shape[1]
        eps = C.residue_functional
        ops = [self.operator(v) for v in gens]
        ident = np.eye(d, dtype=np.int64)
        res = EchelonBasis(r, p)
        frontier = [ident]
        while frontier and res.dim < r:
            res.add(self.coordinates(frontier[0]) @ eps % p)
            nxt = []
            for W in frontier:
                for D in ops:
                    DW = matmul(D, W, p)
                    if res.add(self.coordinates(DW) @ eps % p):
                        nxt.append(DW)
            frontier = nxt
        if res.dim == r:
            return True
        span = EchelonBasis(r * d, p)
        frontier = [ident]
        self._add_span(span, ident)
        while frontier:
            nxt = []
            for W in frontier:
                for D in ops:
                    DW = matmul(D, W, p)
                    if not span.contains(self.coordinates(DW).reshape(-1)):
                        self._add_span(span, DW)
                        nxt.append(DW)
            frontier = nxt
        return span.dim == r * d

    def _add_span(self, span: EchelonBasis, W: np.ndarray):
        C = self.C
        w = self.coordinates(W)
        span.extend(np.vstack([C.mult_matrix(wj) for wj in w]).T)


def _structured_battery(C: FiniteAlgebra, B: Subalgebra) -> tuple[bool, bool]:
    """``(End = C[Der], Der is a summand)`` for ``C`` free over ``B``, in coordinates of a ``B``-basis."""
    ts = free_basis(algebra_as_module(C, B))
    if ts is None:
        return False, False
    fd = _FreeDerivations(C, B, ts)
    gens, free = fd.minimal_generators()
    for v in gens:
        if not fd.is_derivation(fd.operator(v)):
            raise AssertionError("generator values do not give a derivation")
    eps = C.residue_functional
    residues = [fd.coordinates(fd.operator(v)) @ eps % C.p for v in gens]
    summand = free and EchelonBasis(len(ts), C.p, residues or None).dim == len(gens)
    return fd.span_of_words(gens), summand


def galois_battery(C: FiniteAlgebra, B: Subalgebra | None = None, *, structured: bool | None = None) -> dict[str, bool]:
    """The equivalent Galois characterisations evaluated independently.

    ``structured`` (default: above ``config.GALOIS_DENSE_MAX_DIM``) avoids the dense ``End_B(C)``.
    """
    B = prime_field(C) if B is None else B
    _require_exponent_one(C, B)
    if structured is None:
        structured = C.dim > config.GALOIS_DENSE_MAX_DIM
    xs = _minimal_algebra_generators(C, B)
    if structured:
        _, free = kaehler_free_rank(C, B)
        by_der, summand = _structured_battery(C, B)
        return {"pbasis": is_pbasis(xs, C, B), "omega_free": free, "end_generated_by_der": by_der,
                "der_summand": summand}
    H = hom_space(C, B)
    der = derivations(C, B)
    rank, free = kaehler_free_rank(C, B)
    summand = is_direct_summand(der, H.module)
    # End = C[Der] and the summand property also hold for some non-projective extensions
    projective = is_free(algebra_as_module(C, B)) is not None
    return {
        "pbasis": is_pbasis(xs, C, B),
        "omega_free": free,
        "end_generated_by_der": projective and der_generates_end(C, B),
        "der_summand": projective and summand is not None,
    }


# ---------------------------------------------------------------- driver

_SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def pi_witness(rep: "ClassificationReport", p: int, base: str = "A", top: str = "C") -> str | None:
    """One-line reason why the extension is not purely inseparable, or None."""
    pi = rep["purely_inseparable"]
    if pi.value is not False:
        return None
    fext = rep["f_extension"]
    if fext.value is False:
        e = fext.witness["failing_level"]
        q = str(p ** e).translate(_SUPERSCRIPT)
        line = f"dim {base}[{top}{q}] = {fext.witness['dim_level']}"
        if not fext.witness["divisible"]:
            return line + f" does not divide {fext.witness['dim']}"
        return line + f", {top} not free over it"
    e = pi.witness.get("failing_level")
    return f"chain step {e} is not Galois"


def classify(C: FiniteAlgebra, A: Subalgebra | None = None, *, theorem_a: bool = False,
             max_dim: int | None = None, names: tuple[str, str] = ("A", "C")) -> ClassificationReport:
    """Exponent, chain, Galois/F-extension/p.i. verdicts and GNGS data."""
    A = prime_field(C) if A is None else A
    rep = ClassificationReport()
    t0 = time.perf_counter()
    ch = frobenius_chain(C, A)
    rep.timing["chain"] = time.perf_counter() - t0
    rep["dim"] = C.dim
    rep["dim_base"] = A.dim
    rep["chain_dims"] = ch.dims
    rep["exponent"] = ch.exponent
    rep["finite_exponent"] = ch.finite
    if ch.finite and ch.exponent <= 1:
        t0 = time.perf_counter()
        rep["galois"] = is_galois(C, A)
        rep.timing["galois"] = time.perf_counter() - t0
    else:
        rep["galois"] = Verdict(False if ch.finite else None,
                                {"exponent": ch.exponent}, "exponent larger than one" if ch.finite else
                                "not finite exponent")
    t0 = time.perf_counter()
    rep["f_extension"] = is_f_extension(C, A, ch)
    rep.timing["f_extension"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    rep["purely_inseparable"] = is_purely_inseparable(C, A, ch)
    rep.timing["purely_inseparable"] = time.perf_counter() - t0
    reason = pi_witness(rep, C.p, *names)
    if reason:
        rep["witness"] = reason
    if ch.finite and C.is_local:
        t0 = time.perf_counter()
        G = gngs(C, A, ch)
        rep["gngs"] = G
        rep["ngs"] = ngs_presentation(C, A, G)
        rep.timing["gngs"] = time.perf_counter() - t0
    if theorem_a:
        ta = theoremA_report(C, A, max_dim=max_dim, chain=ch)
        rep["theorem_a"] = {k: v for k, v in ta.entries.items()}
        rep.timing.update({f"theorem_a.{k}": v for k, v in ta.timing.items()})
    return rep
