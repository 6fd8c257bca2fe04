"""Command line interface: ``pinsep classify|tower|jb|diff|selftest``.

Exit codes: 0 success (a false verdict is still success), 1 self-test
failure, 2 parse error, 3 precondition or resource error.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import click
import numpy as np

from . import __version__, config
from .algebra import (AlgebraElement, FiniteAlgebra, Subalgebra, _linear_vec, algebra_from_document,
                      frobenius_chain, prime_field, subalgebra_generated, whole)
from .classify import _jsonable, classify, leg
from .diffcalc import DiffOperator, _regular
from .document import Document, parse_document
from .exactla import matmul
from .errors import ParseError, PinsepError, PreconditionError, ResourceError, StructuralError

EXIT_OK, EXIT_SELFTEST, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3


class Loaded:
    """A parsed document with its algebra and named subrings."""

    def __init__(self, path: Path, max_dim: int | None):
        self.path = path
        raw = path.read_bytes()
        self.digest = hashlib.sha256(raw).hexdigest()
        self.doc: Document = parse_document(raw.decode("utf-8"))
        self.C: FiniteAlgebra = algebra_from_document(self.doc, config.max_dim(max_dim))
        self._subs: dict[str, Subalgebra] = {}

    def subring(self, name: str) -> Subalgebra:
        if name in self._subs:
            return self._subs[name]
        C, doc = self.C, self.doc
        if name in doc.subrings:
            gens = [C.eval_poly(g) if doc.kind == "presentation" else _linear_vec(g, C.dim) % C.p for g in doc.subrings[name]]
            S = subalgebra_generated(C, gens, name=name)
        elif name in ("A", "k"):
            S = prime_field(C, name)
        elif name == "C":
            S = whole(C)
        else:
            raise PreconditionError(f"document declares no subring {name!r}")
        self._subs[name] = S
        return S

    def leg(self, spec: str | None) -> tuple[str, str]:
        spec = spec or self.doc.task.get("leg") or "A:C"
        if spec.count(":") != 1:
            raise click.BadParameter("expected X:Y", param_hint="--leg")
        lo, hi = (s.strip() for s in spec.split(":"))
        return lo, hi

    def pair(self, lo: str, hi: str) -> tuple[FiniteAlgebra, Subalgebra]:
        lower, upper = self.subring(lo), self.subring(hi)
        if not lower.issubset(upper):
            raise PreconditionError(f"{lo} is not contained in {hi}")
        return leg(self.C, lower, upper)


def _report(command: str, loaded: Loaded | None, result: Any) -> dict:
    out = {"tool": "pinsep", "version": __version__, "command": command}
    if loaded is not None:
        out["input"] = {"file": loaded.path.name, "sha256": loaded.digest}
    out["result"] = _jsonable(result)
    return out


def _render_text(obj: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}-")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list, str)) or isinstance(x, str) and len(x) < 24
                                       for x in v)


def _scalar(v) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{}"
    return str(v)


def emit(report: dict, fmt: str):
    if fmt == "json":
        click.echo(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        click.echo("\n".join(_render_text(report)))


def _run(fn: Callable[[], dict], fmt: str):
    """Run a command body, mapping library errors to exit codes."""
    try:
        report = fn()
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    except (PreconditionError, ResourceError, StructuralError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PRECONDITION)
    except PinsepError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PRECONDITION)
    emit(report, fmt)


_format = click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text", show_default=True)
_max_dim = click.option("--max-dim", type=int, default=None, help="Algebra dimension cap (also PINSEP_MAX_DIM).")
_force = click.option("--force", is_flag=True, help="Ignore size thresholds.")
_leg = click.option("--leg", default=None, help="Extension X:Y between named subrings (A, k, C or declared names).")
_file = click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))


@click.group()
@click.version_option(__version__, prog_name="pinsep")
def main():
    """Classify purely inseparable extensions of finite F_p-algebras."""


@main.command("classify")
@_file
@_leg
@click.option("--theorem-a", is_flag=True, help="Also evaluate the differential-operator characterisations.")
@click.option("--timing", is_flag=True, help="Include timings (output is then not reproducible).")
@_format
@_force
@_max_dim
def cmd_classify(file, leg, theorem_a, timing, fmt, force, max_dim):
    """Exponent, Frobenius chain, Galois / F-extension / purely inseparable verdicts."""

    def body():
        L = Loaded(file, max_dim)
        lo, hi = L.leg(leg)
        top, base = L.pair(lo, hi)
        limit = None if not force else 10**9
        rep = classify(top, base, theorem_a=theorem_a, max_dim=limit, names=(lo, hi))
        result = {"leg": f"{lo}:{hi}"}
        result.update(rep.to_dict(timing=timing))
        return _report("classify", L, result)

    _run(body, fmt)


@main.command("tower")
@_file
@click.option("--lower", default="A", show_default=True)
@click.option("--middle", default="B", show_default=True)
@_format
@_max_dim
def cmd_tower(file, lower, middle, fmt, max_dim):
    """Verdicts on all legs of A ⊂ B ⊂ C and the tower criteria."""
    from .towers import TowerSpec, tower_report

    def body():
        L = Loaded(file, max_dim)
        mid = middle if middle in L.doc.subrings or middle in ("A", "k", "C") else lower
        T = TowerSpec(L.C, L.subring(lower), L.subring(mid))
        return _report("tower", L, tower_report(T).to_dict())

    _run(body, fmt)


@main.command("jb")
@_file
@click.option("--base", default="A", show_default=True)
@click.option("--enumerate/--no-enumerate", "enum", default=None,
              help="Enumerate every subalgebra (default: when dim C is small).")
@_format
@_force
@_max_dim
def cmd_jb(file, base, enum, fmt, force, max_dim):
    """Round trips between subalgebras and endomorphism rings."""
    from .jbcorr import FreeEnd, close_subalgebra, end_algebra, end_over, special_basis, verify_correspondence

    def body():
        L = Loaded(file, max_dim)
        C, A = L.C, L.subring(base)
        dense = C.dim <= config.JB_DENSE_MAX_DIM or bool(L.doc.endomorphisms)
        E = end_algebra(C, A, force=force) if dense else None
        subs = [L.subring(n) for n in L.doc.subrings] + list(_chain_levels(C, A))
        rings = [close_subalgebra(E, seeds, label=name) for name, seeds in L.doc.endomorphisms.items()]
        rep = verify_correspondence(C, A, subs, rings, enumerate_all=enum, structured=not dense)
        result = rep.to_dict()
        bases = {}
        if rep.finite_exponent and C.is_local and not dense:
            for name in L.doc.subrings:
                try:
                    F = FreeEnd(C, L.subring(name))
                except PreconditionError as exc:
                    bases[f"End over {name}"] = {"error": str(exc)}
                    continue
                bases[f"End over {name}"] = {"size": F.rank,
                                             "elements": [repr(AlgebraElement(C, t)) for t in F.ts]}
        elif rep.finite_exponent and C.is_local:
            for name in L.doc.subrings:
                try:
                    rings.append(end_over(C, L.subring(name), A, parent=E))
                except PreconditionError as exc:
                    bases[f"End over {name}"] = {"error": str(exc)}
            for H in rings:
                try:
                    sb = special_basis(H)
                except PreconditionError as exc:
                    bases[H.label] = {"error": str(exc)}
                    continue
                bases[H.label] = {"size": sb.size,
                                  "elements": [repr(AlgebraElement(C, t)) for t in sb.elements]}
        result["special_bases"] = bases
        return _report("jb", L, result)

    _run(body, fmt)


def _chain_levels(C: FiniteAlgebra, A: Subalgebra):
    ch = frobenius_chain(C, A)
    return ch.levels if ch.finite else []


@main.command("diff")
@_file
@click.option("--order", "-k", type=int, default=None, help="Largest order (default: task order or 1).")
@click.option("--op", type=click.Choice(["dims", "basis", "delta", "res", "ext"]), default="dims",
              show_default=True)
@_leg
@_format
@_force
@_max_dim
def cmd_diff(file, order, op, leg, fmt, force, max_dim):
    """Dimensions of Diff^j for j <= k by bracket constraints and by duals of principal parts."""
    from .diffcalc import diff_filtration

    def body():
        L = Loaded(file, max_dim)
        k = order if order is not None else int(L.doc.task.get("order", 1))
        if k < 0:
            raise PreconditionError("order must be non-negative")
        lo, hi = L.leg(leg)
        C, A = L.pair(lo, hi)
        bracket = diff_filtration(C, A, None, k, "bracket", force=force)
        dual = diff_filtration(C, A, None, k, "dual", force=force)
        result: dict[str, Any] = {
            "leg": f"{lo}:{hi}", "order": k,
            "dims_bracket": [S.dim for S in bracket], "dims_dual": [S.dim for S in dual],
            "routes_agree": all(np.array_equal(a.basis, b.basis) for a, b in zip(bracket, dual)),
        }
        if op != "dims":
            result[op] = _diff_dump(op, C, A, bracket[-1], k)
        return _report("diff", L, result)

    _run(body, fmt)


def _diff_dump(op: str, C: FiniteAlgebra, A: Subalgebra, top, k: int):
    from .classify import find_pbasis
    from .diffcalc import delta_alpha, diff_operators, extend, hom_space, order_of, restrict

    p = C.p
    if op == "basis":
        H = hom_space(C, A)
        return [H.flat(c).reshape(C.dim, C.dim).tolist() for c in top.basis]
    if op == "delta":
        P = C.presentation
        if P is None:
            raise PreconditionError("operator dump needs a presented algebra")
        out = []
        for alpha in itertools.product(*[range(b) for b in P.bounds]):
            if sum(alpha) > k:
                continue
            D = delta_alpha(C, alpha)
            out.append({"alpha": list(alpha), "order": order_of(D), "matrix": D.matrix.tolist()})
        return out
    # res and ext move operators between C and the first chain step S = A[C^p]
    ch = frobenius_chain(C, A)
    if ch.exponent is None or ch.exponent < 1:
        raise PreconditionError("needs a non-trivial Frobenius chain of finite length")
    S = ch.levels[1]
    H = hom_space(C, A)
    if op == "res":
        out = []
        for c in top.basis:
            D = H.operator(c, k)
            R = restrict(D, S)
            o = order_of(R)
            out.append({"order": order_of(D), "restricted_order": o, "bound": R.order_bound,
                        "within_bound": o is not None and o <= R.order_bound})
        return out
    xs = find_pbasis(C, S)
    if xs is None:
        raise PreconditionError("C has no p-basis over its first chain step")
    SA = S.algebra
    low = diff_operators(SA, S.restrict(A), None, k)
    HS = hom_space(SA, S.restrict(A))
    out = []
    for c in low.basis:
        d = HS.operator(c, k)
        dpart = DiffOperator(matmul(S.embedding, d.matrix, p), SA, _regular(C), k)
        E = extend(dpart, xs, C, S)
        back = restrict(E, S)
        out.append({"order": order_of(d), "extended_order": order_of(E), "bound": p * k,
                    "restriction_matches": bool(np.array_equal(back.matrix, dpart.matrix))})
    return out


@main.command("selftest")
@click.argument("path", required=False, type=click.Path(exists=True, path_type=Path))
@click.option("--filter", "only", type=click.Choice(["algebra", "classify", "diff", "jb", "towers"]),
              default=None, help="Run one property group.")
@_format
def cmd_selftest(path, only, fmt):
    """Property suite over the bundled corpus (or a file or directory)."""
    from .selftest import run_selftest

    files = _corpus_files(path)
    result = run_selftest(files, only)
    report = _report("selftest", None, result)
    emit(report, fmt)
    if result["failures"]:
        sys.exit(EXIT_SELFTEST)


def _corpus_files(path: Path | None) -> list[Path]:
    if path is None:
        root = resources.files("pinsep") / "corpus"
        return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".pinsep"))
    if path.is_dir():
        return sorted(path.glob("*.pinsep"))
    return [path]


if __name__ == "__main__":
    main()
