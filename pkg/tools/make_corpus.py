"""Regenerate the randomized corpus files and the oracle verdict table.

Run from the repository root::

    python3 tools/make_corpus.py

Random presentations are drawn from a fixed seed and kept until the set
holds eight purely inseparable and eight other instances.  Verdicts come
from ``tests/oracle.py`` only.
"""

from __future__ import annotations

import itertools
import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracle  # noqa: E402

CORPUS = ROOT / "src" / "pinsep" / "corpus"
NAMES = ["x", "y", "z"]
ORACLE_MAX_DIM = 81


def _monomial(exps, names):
    parts = []
    for n, a in zip(names, exps):
        if a == 1:
            parts.append(n)
        elif a > 1:
            parts.append(f"{n}^{a}")
    return "*".join(parts)


def random_presentation(rng: random.Random) -> str | None:
    p = rng.choice([2, 2, 3])
    n = rng.choice([2, 3])
    choices = [p, p * p] if p == 3 else [2, 4, 8]
    bounds = [rng.choice(choices) for _ in range(n)]
    dim = 1
    for b in bounds:
        dim *= b
    if dim > 30:
        return None
    names = NAMES[:n]
    lines = [f"p = {p}", "generators = " + ", ".join(names)]
    for i in range(n):
        terms = []
        if i and rng.random() < 0.75:
            earlier = [range(b) for b in bounds[:i]]
            monos = [m for m in itertools.product(*earlier) if any(m)]
            for m in rng.sample(monos, min(len(monos), rng.choice([1, 1, 2]))):
                c = rng.randrange(1, p)
                mono = _monomial(m, names[:i])
                terms.append(mono if c == 1 else f"{c}*{mono}")
        lines.append(f"{names[i]}^{bounds[i]} = " + (" + ".join(terms) if terms else "0"))
    return "[algebra]\n" + "\n".join(lines) + "\n"


def main():
    rng = random.Random(20240611)
    pos, neg, seen = [], [], set()
    while len(pos) < 8 or len(neg) < 8:
        text = random_presentation(rng)
        if text is None or text in seen:
            continue
        seen.add(text)
        C = oracle.Alg.from_text(text)
        v = oracle.verdicts(C)
        bucket = pos if v["purely_inseparable"] else neg
        if len(bucket) < 8:
            bucket.append(text)
    for old in CORPUS.glob("random_*.pinsep"):
        old.unlink()
    for i, text in enumerate(pos + neg, 1):
        (CORPUS / f"random_{i:02d}.pinsep").write_text(f"# randomized instance {i}\n" + text)
    table = {}
    for path in sorted(CORPUS.glob("*.pinsep")):
        text = path.read_text()
        if "basis =" in text:
            continue
        C = oracle.Alg.from_text(text)
        if C.dim > ORACLE_MAX_DIM:
            continue
        entry = {"A:C": oracle.verdicts(C), "sum_of_exponents": oracle.sum_of_exponents(C)}
        if "[subring B]" in text:
            B = oracle.subring_rows(C, text, "B")
            entry["A:B"] = oracle.verdicts(C, None, B)
            entry["B:C"] = oracle.verdicts(C, B)
            entry["dim_B"] = len(B)
        table[path.name] = entry
    (CORPUS / "verdicts.json").write_text(json.dumps(table, indent=2, sort_keys=True) + "\n")
    print(f"{len(pos)} purely inseparable, {len(neg)} not; {len(table)} oracle entries")


if __name__ == "__main__":
    main()
