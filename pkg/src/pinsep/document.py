"""Reader for ``.pinsep`` input documents.

A document is line oriented UTF-8 text split into sections::

    # comments run to the end of the line
    [algebra]
    p = 3
    generators = x, y
    x^3 = 0
    y^3 = x^2 + 2*x

    [subring B]
    generators = x

    [task]
    leg = A:C

Relations ``g^N = poly`` must appear once per generator, ``N`` a power of
``p``, and ``poly`` may only mention earlier generators.  Instead of
generators and relations the algebra can be given by structure constants::

    [algebra]
    p = 2
    basis = e, f
    unit = e + f
    e*e = e
    f*f = f

Unlisted products are zero and products are symmetric.  Optional
``[endomorphisms NAME]`` sections hold ``seed = [[...], ...]`` matrices in
basis coordinates (column convention: ``seed @ v``).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import ParseError, StructuralError
from .exactla import check_prime

Poly = dict  # exponent tuple -> coefficient

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_SECTION = re.compile(r"^\[\s*([A-Za-z_]+)(?:\s+([A-Za-z0-9_]+))?\s*\]$")


@dataclass
class Document:
    p: int
    kind: str  # "presentation" or "structure"
    names: list[str]
    relations: list[tuple[int, Poly]] = field(default_factory=list)  # (e_i, P_i)
    products: dict[tuple[int, int], Poly] = field(default_factory=dict)
    unit: Poly | None = None
    structure_gens: list[Poly] | None = None
    subrings: dict[str, list[Poly]] = field(default_factory=dict)
    endomorphisms: dict[str, list[list[list[int]]]] = field(default_factory=dict)
    task: dict[str, str] = field(default_factory=dict)


def parse_polynomial(text: str, names: list[str], p: int, *, line: int = 0, col: int = 1) -> Poly:
    """Parse ``c*g1^a1*...`` terms joined by ``+`` or ``-`` into a dict."""
    index = {n: i for i, n in enumerate(names)}
    src = text
    pos = 0
    poly: Poly = {}
    n = len(names)

    def err(msg: str, at: int):
        raise ParseError(msg, line, col + at)

    def skip_ws():
        nonlocal pos
        while pos < len(src) and src[pos] in " \t":
            pos += 1

    def number() -> int | None:
        nonlocal pos
        m = re.match(r"\d+", src[pos:])
        if not m:
            return None
        pos += m.end()
        return int(m.group())

    skip_ws()
    if pos == len(src):
        err("empty polynomial", pos)
    sign = 1
    first = True
    while True:
        skip_ws()
        if pos < len(src) and src[pos] in "+-":
            sign = -1 if src[pos] == "-" else 1
            pos += 1
            skip_ws()
        elif not first:
            err(f"expected '+' or '-', found {src[pos]!r}", pos)
        first = False
        coef = 1
        exps = [0] * n
        have_factor = False
        c = number()
        if c is not None:
            coef = c
            skip_ws()
            if pos < len(src) and src[pos] == "*":
                pos += 1
                skip_ws()
            else:
                have_factor = True  # bare constant term
        if not have_factor:
            while True:
                skip_ws()
                m = _NAME.match(src, pos)
                if not m:
                    err("expected a generator name", pos)
                name = m.group()
                if name not in index:
                    err(f"unknown generator {name!r}", pos)
                pos = m.end()
                skip_ws()
                a = 1
                if pos < len(src) and src[pos] == "^":
                    pos += 1
                    skip_ws()
                    a = number()
                    if a is None:
                        err("expected an exponent", pos)
                exps[index[name]] += a
                skip_ws()
                if pos < len(src) and src[pos] == "*":
                    pos += 1
                    continue
                break
        key = tuple(exps)
        poly[key] = (poly.get(key, 0) + sign * coef) % p
        skip_ws()
        if pos == len(src):
            break
    return {k: v for k, v in poly.items() if v}


def _is_power_of(n: int, p: int) -> int | None:
    e = 0
    while n > 1 and n % p == 0:
        n //= p
        e += 1
    return e if n == 1 and e >= 1 else None


def parse_document(text: str) -> Document:
    """Parse a complete input document; raises :class:`ParseError`."""
    sections: list[tuple[str, str | None, int, list[tuple[int, str]]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            sections.append((m.group(1).lower(), m.group(2), lineno, []))
            continue
        if line.startswith("["):
            raise ParseError("malformed section header", lineno, 1)
        if not sections:
            raise ParseError("content before the first section", lineno, 1)
        sections[-1][3].append((lineno, raw.split("#", 1)[0].rstrip()))

    alg = [s for s in sections if s[0] == "algebra"]
    if len(alg) != 1:
        raise ParseError("exactly one [algebra] section is required", alg[1][2] if len(alg) > 1 else 1, 1)
    doc = _parse_algebra(alg[0])
    labels = doc.names
    for kind, name, lineno, lines in sections:
        if kind == "algebra":
            continue
        if kind == "subring":
            if not name:
                raise ParseError("subring section needs a name", lineno, 1)
            if name in doc.subrings:
                raise ParseError(f"duplicate subring {name!r}", lineno, 1)
            gens: list[Poly] = []
            for ln, raw in lines:
                key, val, vcol = _key_value(raw, ln)
                if key != "generators":
                    raise ParseError(f"unknown subring key {key!r}", ln, 1)
                gens.extend(_poly_list(val, labels, doc.p, ln, vcol))
            doc.subrings[name] = gens
        elif kind == "endomorphisms":
            if not name:
                raise ParseError("endomorphisms section needs a name", lineno, 1)
            seeds = []
            for ln, raw in lines:
                key, val, vcol = _key_value(raw, ln)
                if key != "seed":
                    raise ParseError(f"unknown endomorphism key {key!r}", ln, 1)
                try:
                    mat = json.loads(val)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"bad matrix: {exc.msg}", ln, vcol + exc.colno - 1) from None
                if not (isinstance(mat, list) and all(isinstance(r, list) for r in mat)):
                    raise ParseError("seed must be a list of rows", ln, vcol)
                seeds.append([[int(v) % doc.p for v in r] for r in mat])
            doc.endomorphisms[name] = seeds
        elif kind == "task":
            for ln, raw in lines:
                key, val, _ = _key_value(raw, ln)
                doc.task[key] = val.strip()
        else:
            raise ParseError(f"unknown section [{kind}]", lineno, 1)
    return doc


def _key_value(raw: str, ln: int) -> tuple[str, str, int]:
    if "=" not in raw:
        raise ParseError("expected 'key = value'", ln, 1)
    key, val = raw.split("=", 1)
    return key.strip().lower(), val, len(key) + 2


def _poly_list(val: str, names: list[str], p: int, ln: int, vcol: int) -> list[Poly]:
    out = []
    offset = 0
    for part in val.split(","):
        if part.strip():
            out.append(parse_polynomial(part, names, p, line=ln, col=vcol + offset))
        offset += len(part) + 1
    return out


def _parse_algebra(section) -> Document:
    _, _, lineno, lines = section
    p = None
    names: list[str] | None = None
    basis: list[str] | None = None
    body: list[tuple[int, str]] = []
    for ln, raw in lines:
        stripped = raw.strip()
        low = stripped.lower()
        if re.match(r"^p\s*=", low):
            try:
                p = int(stripped.split("=", 1)[1])
                check_prime(p)
            except (ValueError, StructuralError):
                raise ParseError("p must be a prime", ln, 1) from None
        elif re.match(r"^generators\s*=", low) and basis is None and names is None:
            names = _name_list(stripped.split("=", 1)[1], ln)
        elif re.match(r"^basis\s*=", low):
            basis = _name_list(stripped.split("=", 1)[1], ln)
        else:
            body.append((ln, raw))
    if p is None:
        raise ParseError("[algebra] must declare p", lineno, 1)
    if basis is not None:
        return _parse_structure(p, basis, body)
    if names is None:
        raise ParseError("[algebra] must declare generators or basis", lineno, 1)
    relations: dict[int, tuple[int, Poly]] = {}
    for ln, raw in body:
        if "=" not in raw:
            raise ParseError("expected a relation 'g^N = poly'", ln, 1)
        lhs, rhs = raw.split("=", 1)
        m = re.match(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\^\s*(\d+)\s*$", lhs)
        if not m:
            raise ParseError("relation must start with 'g^N'", ln, 1)
        g, N = m.group(1), int(m.group(2))
        if g not in names:
            raise ParseError(f"unknown generator {g!r}", ln, lhs.index(g) + 1)
        i = names.index(g)
        if i in relations:
            raise ParseError(f"second relation for {g!r}", ln, 1)
        e = _is_power_of(N, p)
        if e is None:
            raise ParseError(f"exponent {N} is not a positive power of p={p}", ln, lhs.index("^") + 2)
        poly = parse_polynomial(rhs, names, p, line=ln, col=len(lhs) + 2)
        for exps in poly:
            later = [j for j in range(i, len(names)) if exps[j]]
            if later:
                raise ParseError(
                    f"relation for {g!r} mentions {names[later[0]]!r}, which is not an earlier generator",
                    ln, len(lhs) + 2)
        relations[i] = (e, poly)
    missing = [names[i] for i in range(len(names)) if i not in relations]
    if missing:
        raise ParseError(f"no relation for generator(s) {', '.join(missing)}", lineno, 1)
    for i in range(len(names)):
        for exps in relations[i][1]:
            for j in range(i):
                if exps[j] >= p ** relations[j][0]:
                    raise ParseError(
                        f"relation for {names[i]!r} has degree {exps[j]} in {names[j]!r}, "
                        f"not reduced below {p ** relations[j][0]}", lineno, 1)
    return Document(p=p, kind="presentation", names=names,
                    relations=[relations[i] for i in range(len(names))])


def _parse_structure(p: int, basis: list[str], body) -> Document:
    doc = Document(p=p, kind="structure", names=basis)
    for ln, raw in body:
        if "=" not in raw:
            raise ParseError("expected 'a*b = linear combination'", ln, 1)
        lhs, rhs = raw.split("=", 1)
        key = lhs.strip().lower()
        if key == "unit":
            doc.unit = parse_polynomial(rhs, basis, p, line=ln, col=len(lhs) + 2)
            _check_linear(doc.unit, ln)
            continue
        if key == "generators":
            doc.structure_gens = _poly_list(rhs, basis, p, ln, len(lhs) + 2)
            for g in doc.structure_gens:
                _check_linear(g, ln)
            continue
        m = re.match(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\*\s*([A-Za-z_][A-Za-z0-9_]*)\s*$", lhs)
        if not m or m.group(1) not in basis or m.group(2) not in basis:
            raise ParseError("expected a product 'a*b' of basis labels", ln, 1)
        i, j = basis.index(m.group(1)), basis.index(m.group(2))
        val = parse_polynomial(rhs, basis, p, line=ln, col=len(lhs) + 2)
        _check_linear(val, ln)
        key2 = (min(i, j), max(i, j))
        if key2 in doc.products and doc.products[key2] != val:
            raise ParseError("conflicting products (multiplication must be commutative)", ln, 1)
        doc.products[key2] = val
    if doc.unit is None:
        raise ParseError("structure-constant algebras must declare 'unit'", body[0][0] if body else 1, 1)
    return doc


def _check_linear(poly: Poly, ln: int):
    for exps in poly:
        if sum(exps) > 1:
            raise ParseError("expected a linear combination of basis labels", ln, 1)


def _name_list(text: str, ln: int) -> list[str]:
    out = [t.strip() for t in text.split(",") if t.strip()]
    for t in out:
        if not _NAME.fullmatch(t):
            raise ParseError(f"bad name {t!r}", ln, 1)
    if len(set(out)) != len(out):
        raise ParseError("duplicate names", ln, 1)
    return out
