"""Hypothesis strategies for small triangular presentations."""

from __future__ import annotations

import itertools

from hypothesis import strategies as st

NAMES = ["x", "y", "z"]


def _monomial(exps, names):
    parts = []
    for n, a in zip(names, exps):
        if a == 1:
            parts.append(n)
        elif a > 1:
            parts.append(f"{n}^{a}")
    return "*".join(parts)


@st.composite
def presentations(draw, max_dim=27, primes=(2, 3), max_gens=3):
    """Document text of a triangular presentation ``x_i^(p^e_i) = P_i(x_1..x_{i-1})``."""
    p = draw(st.sampled_from(primes))
    n = draw(st.integers(1, max_gens))
    bounds = []
    for _ in range(n):
        rest = max_dim
        for b in bounds:
            rest //= b
        choices = [p ** e for e in (1, 2, 3) if p ** e <= rest]
        if not choices:
            break
        bounds.append(draw(st.sampled_from(choices)))
    names = NAMES[:len(bounds)]
    lines = [f"p = {p}", "generators = " + ", ".join(names)]
    for i, b in enumerate(bounds):
        monos = [m for m in itertools.product(*[range(c) for c in bounds[:i]]) if any(m)]
        chosen = draw(st.lists(st.sampled_from(monos), max_size=2, unique=True)) if monos else []
        terms = []
        for m in chosen:
            c = draw(st.integers(1, p - 1))
            mono = _monomial(m, names[:i])
            terms.append(mono if c == 1 else f"{c}*{mono}")
        lines.append(f"{names[i]}^{b} = " + (" + ".join(terms) if terms else "0"))
    return "[algebra]\n" + "\n".join(lines) + "\n"
