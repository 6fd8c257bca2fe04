"""Property suite run by ``pinsep selftest`` over corpus files."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Callable

import numpy as np

from .algebra import _linear_vec, algebra_from_document, frobenius_chain, prime_field, subalgebra_generated, whole
from .classify import classify, exponent_at_most_one, galois_battery, leg
from .document import parse_document
from .errors import PinsepError, PreconditionError, ResourceError, StructuralError

GROUPS = ("algebra", "classify", "diff", "jb", "towers")
DIFF_MAX_DIM = 30


class _Case:
    def __init__(self, path: Path):
        self.path = path
        self.doc = parse_document(path.read_text(encoding="utf-8"))
        self.C = algebra_from_document(self.doc)
        self.subs = {}
        for name, polys in self.doc.subrings.items():
            if self.doc.kind == "presentation":
                gens = [self.C.eval_poly(g) for g in polys]
            else:
                gens = [_linear_vec(g, self.C.dim) % self.C.p for g in polys]
            self.subs[name] = subalgebra_generated(self.C, gens, name=name)

    def sub(self, name: str):
        if name in ("A", "k") and name not in self.subs:
            return prime_field(self.C)
        if name == "C":
            return whole(self.C)
        return self.subs[name]


def _oracle_table(files: list[Path]) -> dict:
    table = {}
    for d in sorted({f.parent for f in files}):
        path = d / "verdicts.json"
        if path.exists():
            table.update(json.loads(path.read_text()))
    return table


def _check_algebra(case: _Case, table: dict) -> list[str]:
    C, p = case.C, case.C.p
    out = [f"axiom {a}" for a in C.check_axioms()]
    rng = np.random.default_rng(0)
    for _ in range(8):
        a, b = rng.integers(0, p, C.dim), rng.integers(0, p, C.dim)
        F = C.frobenius_matrix
        if np.any(F @ ((a + b) % p) % p != (F @ a + F @ b) % p):
            out.append("Frobenius not additive")
            break
        if np.any(C.frobenius_power(C.mul(a, b), 1) != C.mul(F @ a % p, F @ b % p)):
            out.append("Frobenius not multiplicative")
            break
    ch = frobenius_chain(C, prime_field(C))
    if any(x < y for x, y in zip(ch.dims, ch.dims[1:])):
        out.append("chain dimensions increase")
    return out


def _check_classify(case: _Case, table: dict) -> list[str]:
    out = []
    ref = table.get(case.path.name, {})
    for name, expect in ref.items():
        if ":" not in name:
            continue
        lo, hi = name.split(":")
        top, base = leg(case.C, case.sub(lo), case.sub(hi))
        rep = classify(top, base)
        if rep["chain_dims"] != expect["chain_dims"]:
            out.append(f"{name}: chain {rep['chain_dims']} != oracle {expect['chain_dims']}")
        for key in ("f_extension", "purely_inseparable"):
            if key in expect and rep[key].value != expect[key]:
                out.append(f"{name}: {key} {rep[key].value} != oracle {expect[key]}")
        if name == "A:C" and "gngs" in rep.entries and rep["gngs"].e and \
                sum(rep["gngs"].e) != ref.get("sum_of_exponents", sum(rep["gngs"].e)):
            out.append("sum of exponents differs from oracle")
    rep = classify(case.C)
    if "gngs" in rep.entries:
        G = rep["gngs"]
        if not G.sum_identity:
            out.append("GNGS sum identity fails")
        if rep["ngs"].isomorphism != rep["purely_inseparable"].value:
            out.append("NGS isomorphism verdict differs from p.i. verdict")
    for name, (top, base) in exponent_one_legs(case):
        verdicts = galois_battery(top, base)
        if len(set(verdicts.values())) != 1:
            out.append(f"{name}: Galois characterisations disagree: {verdicts}")
    return out


def exponent_one_legs(case: _Case):
    """``(name, (top, base))`` for declared pairs ``lo ⊂ hi`` with local ``hi`` and ``hi^p ⊆ lo``."""
    names = ["A", *case.subs, "C"]
    for i, lo in enumerate(names):
        for hi in names[i + 1:]:
            low, up = case.sub(lo), case.sub(hi)
            if not low.issubset(up):
                continue
            top, base = leg(case.C, low, up)
            if top.is_local and exponent_at_most_one(top, base):
                yield f"{lo}:{hi}", (top, base)


def _check_diff(case: _Case, table: dict) -> list[str]:
    from .diffcalc import bracket, diff_filtration, hom_space, iterated_bracket

    C, p = case.C, case.C.p
    if C.dim > DIFF_MAX_DIM:
        raise ResourceError(f"dim {C.dim} above {DIFF_MAX_DIM}")
    out = []
    k = min(3, C.dim)
    a = diff_filtration(C, None, None, k, "bracket")
    b = diff_filtration(C, None, None, k, "dual")
    if any(not np.array_equal(x.basis, y.basis) for x, y in zip(a, b)):
        out.append("bracket and dual routes differ")
    if a[0].dim != C.dim:
        out.append("Diff^0 is not C")
    rng = np.random.default_rng(1)
    H = hom_space(C)
    for _ in range(4):
        D = H.operator(rng.integers(0, p, H.dim))
        x = rng.integers(0, p, C.dim)
        lhs = iterated_bracket([x] * p, D)
        rhs = bracket(C.frobenius_power(x, 1), D)
        if lhs != rhs:
            out.append("p-fold bracket differs from bracket with x^p")
            break
    return out


def _check_jb(case: _Case, table: dict) -> list[str]:
    from .jbcorr import verify_correspondence

    C = case.C
    ch = frobenius_chain(C, prime_field(C))
    rep = verify_correspondence(C, None, list(case.subs.values()) + (ch.levels if ch.finite else []))
    return list(rep.violations)


def _check_towers(case: _Case, table: dict) -> list[str]:
    from .towers import TowerSpec, tower_report

    if "B" not in case.subs:
        raise PreconditionError("no subring B declared")
    T = TowerSpec(case.C, prime_field(case.C), case.subs["B"])
    if not T.chain.finite:
        raise PreconditionError("A⊂C does not have finite exponent")
    return [f"tower check {v} fails" for v in tower_report(T).violations]


CHECKS: dict[str, Callable[[_Case, dict], list[str]]] = {
    "algebra": _check_algebra,
    "classify": _check_classify,
    "diff": _check_diff,
    "jb": _check_jb,
    "towers": _check_towers,
}


def run_selftest(files: list[Path], only: str | None = None) -> dict:
    """Run the property groups (or one of them) on ``files``; ordering follows ``files``."""
    groups = [only] if only else list(GROUPS)
    table = _oracle_table(files)
    results, failures = [], 0
    for path in files:
        entry = {"file": path.name, "groups": {}}
        try:
            case = _Case(path)
        except StructuralError as exc:
            msg = str(exc)
            kind = "associativity" if "associativ" in msg else "structure"
            entry["groups"]["load"] = [f"{kind} failure: {msg}"]
            failures += 1
            results.append(entry)
            continue
        except PinsepError as exc:
            entry["groups"]["load"] = [f"load failure: {exc}"]
            failures += 1
            results.append(entry)
            continue
        for g in groups:
            try:
                problems = CHECKS[g](case, table)
            except (PreconditionError, ResourceError) as exc:
                entry["groups"][g] = {"skipped": str(exc)}
                continue
            entry["groups"][g] = problems or "pass"
            failures += len(problems)
        results.append(entry)
    return {"groups": groups, "files": results, "failures": failures}
