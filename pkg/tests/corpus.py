"""Shared loaders for corpus documents."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

from pinsep import algebra_from_document, parse_document, prime_field, subalgebra_generated
from pinsep.algebra import _linear_vec

CORPUS = Path(str(resources.files("pinsep") / "corpus"))
FIXTURES = Path(__file__).parent / "fixtures"


def text(name: str) -> str:
    return (CORPUS / name).read_text(encoding="utf-8")


def names() -> list[str]:
    return sorted(p.name for p in CORPUS.glob("*.pinsep"))


@lru_cache(maxsize=None)
def verdicts() -> dict:
    return json.loads((CORPUS / "verdicts.json").read_text())


class Instance:
    def __init__(self, name: str):
        self.name = name
        self.doc = parse_document(text(name))
        self.C = algebra_from_document(self.doc)
        self.k = prime_field(self.C)
        self.subs = {}
        for sub, polys in self.doc.subrings.items():
            if self.doc.kind == "presentation":
                gens = [self.C.eval_poly(g) for g in polys]
            else:
                gens = [_linear_vec(g, self.C.dim) % self.C.p for g in polys]
            self.subs[sub] = subalgebra_generated(self.C, gens, name=sub)


@lru_cache(maxsize=None)
def load(name: str) -> Instance:
    if not name.endswith(".pinsep"):
        name += ".pinsep"
    return Instance(name)
