"""Towers ``A ⊂ B ⊂ C``: leg verdicts, auxiliary rings ``B[C^(p^e)]`` and tower criteria.

Criteria are never used as shortcuts.  Whenever the hypotheses of a
criterion hold, its conclusion is recomputed from scratch and compared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from .algebra import FiniteAlgebra, FrobeniusChain, Subalgebra, frobenius_chain, subalgebra_generated
from .classify import (Verdict, _jsonable, exponent_at_most_one, is_f_extension, is_galois, is_purely_inseparable,
                       leg)
from .errors import PreconditionError
from .exactla import matmul

__all__ = [
    "TowerSpec",
    "LegReport",
    "classify_leg",
    "fiber_dim",
    "TowerReport",
    "tower_report",
    "thmC_check",
    "exponent2_characterization",
    "composition_check",
    "galois_composition_check",
    "pi_galois_composition_check",
    "exponent_one_tower_check",
]


@dataclass
class LegReport:
    name: str
    dim_top: int
    dim_base: int
    exponent: int | None
    chain_dims: list[int]
    pi: Verdict
    f_extension: Verdict
    galois: Verdict
    fiber_dim: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"leg": self.name, "dim_top": self.dim_top, "dim_base": self.dim_base, "exponent": self.exponent,
                "chain_dims": self.chain_dims, "purely_inseparable": self.pi.to_dict(),
                "f_extension": self.f_extension.to_dict(), "galois": self.galois.to_dict(),
                "fiber_dim": self.fiber_dim}


def _galois(C: FiniteAlgebra, A: Subalgebra) -> Verdict:
    if not exponent_at_most_one(C, A):
        return Verdict(False, {"dim_top": C.dim, "dim_base": A.dim}, "exponent exceeds one")
    return is_galois(C, A)


def fiber_dim(C: FiniteAlgebra, A: Subalgebra) -> int | None:
    """``dim C / m_A C`` for local ``A``, else None."""
    Aalg = A.algebra
    if not Aalg.is_local:
        return None
    if Aalg.radical.shape[0] == 0:
        return C.dim
    rad = matmul(Aalg.radical, A.basis, C.p)
    return C.dim - C.ideal_generated(rad).shape[0]


def classify_leg(name: str, C: FiniteAlgebra, A: Subalgebra) -> LegReport:
    ch = frobenius_chain(C, A)
    return LegReport(name, C.dim, A.dim, ch.exponent if ch.finite else None, ch.dims,
                     is_purely_inseparable(C, A, ch), is_f_extension(C, A, ch), _galois(C, A), fiber_dim(C, A))


@dataclass
class TowerSpec:
    """``A ⊆ B ⊆ C`` with both subalgebras given in coordinates of ``C``."""

    C: FiniteAlgebra
    A: Subalgebra
    B: Subalgebra

    def __post_init__(self):
        if self.A.owner is not self.C or self.B.owner is not self.C:
            raise PreconditionError("subalgebras must live in C")
        if not self.A.issubset(self.B):
            raise PreconditionError("A is not contained in B")

    @property
    def trivial(self) -> bool:
        return self.A == self.B

    @cached_property
    def chain(self) -> FrobeniusChain:
        return frobenius_chain(self.C, self.A)

    @cached_property
    def chain_over_B(self) -> FrobeniusChain:
        return frobenius_chain(self.C, self.B)

    def auxiliary(self, e: int) -> Subalgebra:
        """``B[C^(p^e)]``."""
        C = self.C
        seeds = [C.frobenius_power(g, e) for g in C.gen_vecs]
        return subalgebra_generated(C, seeds, include_sub=self.B)

    def legs(self) -> dict[str, tuple[FiniteAlgebra, Subalgebra]]:
        return {"A:C": (self.C, self.A), "A:B": leg(self.C, self.A, self.B), "B:C": (self.C, self.B)}

    @cached_property
    def leg_reports(self) -> dict[str, LegReport]:
        return {name: classify_leg(name, *pair) for name, pair in self.legs().items()}

    def over_A(self, S: Subalgebra) -> tuple[FiniteAlgebra, Subalgebra]:
        return leg(self.C, self.A, S)


def _leg_f_extension(T: TowerSpec, S: Subalgebra) -> Verdict:
    return is_f_extension(*T.over_A(S))


def _leg_pi(T: TowerSpec, S: Subalgebra) -> Verdict:
    return is_purely_inseparable(*T.over_A(S))


def _not_applicable(reason: str, **witness) -> Verdict:
    return Verdict(None, dict(witness), f"not applicable: {reason}")


def thmC_check(T: TowerSpec) -> Verdict:
    """F-extension hypotheses on ``A ⊂ B``, ``B ⊂ C``, ``A ⊂ B[C^p]`` imply the tower is purely inseparable."""
    L = T.leg_reports
    if not L["A:C"].pi.value:
        return _not_applicable("A⊂C is not purely inseparable")
    aux = T.auxiliary(1)
    hyp = {"B:C f_extension": bool(L["B:C"].f_extension.value),
           "A:B f_extension": bool(L["A:B"].f_extension.value),
           "A:B[C^p] f_extension": bool(_leg_f_extension(T, aux).value)}
    failed = [k for k, v in hyp.items() if not v]
    w: dict[str, Any] = {"hypotheses": hyp, "failed": failed, "dim_B[C^p]": aux.dim}
    if failed:
        return Verdict(None, w, "hypotheses fail: " + ", ".join(failed))
    concl = {"A:B pi": bool(L["A:B"].pi.value), "B:C pi": bool(L["B:C"].pi.value),
             "A:B[C^p] pi": bool(_leg_pi(T, aux).value)}
    w["conclusion"] = concl
    return Verdict(all(concl.values()), w)


def exponent2_characterization(T: TowerSpec) -> Verdict:
    """For exponent two: tower purely inseparable iff ``A ⊂ B`` and ``B ⊂ C`` are F-extensions."""
    L = T.leg_reports
    ac = L["A:C"]
    if ac.exponent != 2:
        return _not_applicable(f"exponent of A⊂C is {ac.exponent}, not 2")
    if not ac.pi.value:
        return _not_applicable("A⊂C is not purely inseparable")
    tower = bool(L["A:B"].pi.value and L["B:C"].pi.value)
    fext = bool(L["A:B"].f_extension.value and L["B:C"].f_extension.value)
    return Verdict(tower == fext, {"tower_pi": tower, "legs_f_extension": fext})


def composition_check(T: TowerSpec) -> Verdict:
    """``A ⊂ B[C^(p^e)]`` F-extensions for ``0 <= e < exp(C/B)`` imply ``A ⊂ C`` purely inseparable."""
    L = T.leg_reports
    if not (L["A:B"].pi.value and L["B:C"].pi.value):
        return _not_applicable("A⊂B and B⊂C must be purely inseparable")
    eB = L["B:C"].exponent
    hyp = {}
    dims = {}
    for e in range(eB):
        S = T.auxiliary(e)
        dims[e] = S.dim
        hyp[e] = bool(_leg_f_extension(T, S).value)
    raw = bool(L["A:C"].pi.value)
    w: dict[str, Any] = {"exponent_C_over_B": eB, "aux_dims": dims, "aux_f_extension": hyp, "pi_A:C": raw}
    failed = [e for e, v in hyp.items() if not v]
    if failed:
        w["failed"] = failed
        return Verdict(None, w, "hypotheses fail at e=" + ", ".join(map(str, failed)))
    return Verdict(raw, w)


def galois_composition_check(T: TowerSpec) -> Verdict:
    """``A ⊂ B``, ``B ⊂ C`` Galois: ``A ⊂ C`` purely inseparable iff F-extension, then ``A[C^p] ⊂ B`` Galois."""
    L = T.leg_reports
    if not (L["A:B"].galois.value and L["B:C"].galois.value):
        return _not_applicable("A⊂B and B⊂C must be Galois")
    pi, fext = bool(L["A:C"].pi.value), bool(L["A:C"].f_extension.value)
    w: dict[str, Any] = {"pi": pi, "f_extension": fext}
    ok = pi == fext
    if pi:
        ok = ok and _frobenius_image_galois(T, w)
    return Verdict(ok, w)


def pi_galois_composition_check(T: TowerSpec) -> Verdict:
    """``A ⊂ B`` purely inseparable, ``B ⊂ C`` Galois: ``A ⊂ C`` purely inseparable iff F-extension."""
    L = T.leg_reports
    if not (L["A:B"].pi.value and L["B:C"].galois.value):
        return _not_applicable("needs A⊂B purely inseparable and B⊂C Galois")
    pi, fext = bool(L["A:C"].pi.value), bool(L["A:C"].f_extension.value)
    w: dict[str, Any] = {"pi": pi, "f_extension": fext}
    ok = pi == fext
    if pi:
        ok = ok and _frobenius_image_galois(T, w)
    return Verdict(ok, w)


def _frobenius_image_galois(T: TowerSpec, w: dict) -> bool:
    """Record and test that ``A[C^p] ⊂ B`` is Galois."""
    Ap = T.chain.levels[1] if len(T.chain.levels) > 1 else T.A
    if not Ap.issubset(T.B):
        w["A[C^p] in B"] = False
        return False
    v = _galois(*leg(T.C, Ap, T.B))
    w["A[C^p] in B"] = True
    w["A[C^p]:B galois"] = bool(v.value)
    return bool(v.value)


def exponent_one_tower_check(T: TowerSpec) -> Verdict:
    """``A ⊂ C`` Galois: ``B ⊂ C`` Galois iff F-extension, and then ``A ⊂ B`` is Galois too."""
    L = T.leg_reports
    if not L["A:C"].galois.value:
        return _not_applicable("A⊂C is not Galois")
    bc_g, bc_f = bool(L["B:C"].galois.value), bool(L["B:C"].f_extension.value)
    w: dict[str, Any] = {"B:C galois": bc_g, "B:C f_extension": bc_f}
    ok = bc_g == bc_f
    if bc_g:
        w["A:B galois"] = bool(L["A:B"].galois.value)
        ok = ok and w["A:B galois"]
    return Verdict(ok, w)


CHECKS = {
    "tower_criterion": thmC_check,
    "exponent_two": exponent2_characterization,
    "composition": composition_check,
    "galois_composition": galois_composition_check,
    "pi_then_galois": pi_galois_composition_check,
    "exponent_one_tower": exponent_one_tower_check,
}


@dataclass
class TowerReport:
    dims: dict[str, int]
    legs: dict[str, LegReport]
    auxiliaries: list[dict] = field(default_factory=list)
    checks: dict[str, Verdict] = field(default_factory=dict)
    single_leg: bool = False

    @property
    def violations(self) -> list[str]:
        return [k for k, v in self.checks.items() if v.value is False]

    def summary(self) -> list[str]:
        out = []
        for name, L in self.legs.items():
            out.append(_leg_line(name, L))
        return out

    def to_dict(self) -> dict[str, Any]:
        return {"dims": self.dims, "single_leg": self.single_leg,
                "legs": {k: v.to_dict() for k, v in self.legs.items()},
                "auxiliaries": _jsonable(self.auxiliaries),
                "checks": {k: v.to_dict() for k, v in self.checks.items()},
                "summary": self.summary(), "violations": self.violations}


def _leg_line(name: str, L: LegReport) -> str:
    a, b = name.split(":")
    head = f"{a}⊂{b}: "
    if L.pi.value is None:
        return head + "not of finite exponent"
    if L.pi.value:
        kind = "Galois" if L.galois.value else "purely inseparable"
        return head + f"{kind} (exponent {L.exponent}, chain {L.chain_dims})"
    text = head + "not purely inseparable"
    fw = L.f_extension.witness
    if L.f_extension.value is False:
        text += (f"; F-extension fails at e={fw['failing_level']} "
                 f"(dim {fw['dim_level']} ∤ {fw['dim']})" if not fw["divisible"] else
                 f"; F-extension fails at e={fw['failing_level']} (not free over dim {fw['dim_level']})")
    else:
        text += f"; chain step {L.pi.witness.get('failing_level')} not Galois"
    if L.galois.value is False and L.exponent == 1 and L.fiber_dim is not None:
        text += f"; not Galois, fiber rank {L.fiber_dim}"
    return text


def tower_report(T: TowerSpec) -> TowerReport:
    """Verdicts on all legs, auxiliary rings and tower criteria."""
    if not T.chain.finite:
        raise PreconditionError("A⊂C does not have finite exponent")
    dims = {"A": T.A.dim, "B": T.B.dim, "C": T.C.dim}
    if T.trivial:
        ac = classify_leg("A:C", T.C, T.A)
        return TowerReport(dims, {"A:C": ac}, single_leg=True)
    legs = T.leg_reports
    aux = []
    for e in range(1, T.chain.exponent):
        S = T.auxiliary(e)
        f = _leg_f_extension(T, S)
        aux.append({"e": e, "dim": S.dim, "f_extension": f.value})
    checks = {name: fn(T) for name, fn in CHECKS.items()}
    return TowerReport(dims, legs, aux, checks)

