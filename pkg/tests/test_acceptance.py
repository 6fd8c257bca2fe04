"""End-to-end acceptance checks, one test per criterion.

Each test attaches a one-line summary; conftest prints a pass/fail line per criterion.
"""

import random
import time

import numpy as np

import corpus
from corpus import load
from pinsep import (DiffOperator, bracket, bracket_development, classify, close_subalgebra, constants_of,
                    diff_filtration, diff_operators, end_algebra, extend, find_pbasis, frobenius_chain, galois_battery,
                    gngs, hom_space, is_f_extension, is_galois, is_purely_inseparable, iterated_bracket, leg,
                    ngs_presentation, order_of, prime_field, restrict, theoremA_report, verify_correspondence, whole)
from pinsep.classify import exponent_at_most_one
from pinsep.diffcalc import _regular
from pinsep.exactla import matmul
from pinsep.towers import TowerSpec, fiber_dim, tower_report

SMALL = 30
NAMES = [n[:-len(".pinsep")] for n in corpus.names()]


def ring(inst, name):
    return inst.k if name == "A" else whole(inst.C) if name == "C" else inst.subs[name]


def legs(inst):
    """Declared pairs ``lo ⊂ hi`` among A, the named subrings and C."""
    names = ["A", *inst.subs, "C"]
    for i, lo in enumerate(names):
        for hi in names[i + 1:]:
            low, up = ring(inst, lo), ring(inst, hi)
            if low.issubset(up):
                yield f"{lo}:{hi}", leg(inst.C, low, up)


def local_instances(max_dim=None):
    out = []
    for name in NAMES:
        inst = load(name)
        if inst.C.is_local and (max_dim is None or inst.C.dim <= max_dim):
            out.append(inst)
    return out


def test_criterion_01_failed_tower(record_property):
    t0 = time.perf_counter()
    inst = load("ex_6_2")
    C, B = inst.C, inst.subs["B"]
    whole_rep = classify(C)
    top_rep = classify(*leg(C, B, whole(C)), names=("B", "C"))
    low_rep = classify(*leg(C, inst.k, B), names=("A", "B"))
    elapsed = time.perf_counter() - t0
    record_property("detail", f"chain {whole_rep['chain_dims']}, witness '{low_rep['witness']}', {elapsed:.1f} s")
    assert whole_rep["chain_dims"] == [729, 9, 1]
    assert whole_rep["purely_inseparable"].value is True
    assert top_rep["purely_inseparable"].value is True
    assert low_rep["purely_inseparable"].value is False
    assert low_rep["witness"].startswith("dim A[B³] = 4")
    assert elapsed < 30


def test_criterion_02_composition_of_galois_legs(record_property):
    t0 = time.perf_counter()
    inst = load("composition_counterexample")
    C, A, B = inst.C, inst.k, inst.subs["B"]
    galois_low = is_galois(*leg(C, A, B)).value
    galois_top = is_galois(*leg(C, B, whole(C))).value
    ch = frobenius_chain(C, A)
    fext = is_f_extension(C, A, ch).value
    pi = is_purely_inseparable(C, A, ch).value
    composition = tower_report(TowerSpec(C, A, B)).checks["galois_composition"].value
    elapsed = time.perf_counter() - t0
    record_property("detail", f"level dims {ch.dims}, {elapsed:.1f} s")
    assert galois_low is True and galois_top is True
    assert ch.dims[1] == 5
    assert fext is False and pi is False
    assert composition is True
    assert elapsed < 10


def test_criterion_03_exponent_one_tower(record_property):
    t0 = time.perf_counter()
    inst = load("exponent_one_counterexample")
    C, B = inst.C, inst.subs["B"]
    top, base = leg(C, inst.k, B)
    low = is_galois(top, base).value
    xs = find_pbasis(top, base)
    fiber = fiber_dim(C, B)
    high = is_galois(C, B).value
    elapsed = time.perf_counter() - t0
    record_property("detail", f"fiber dim {fiber}, {elapsed:.2f} s")
    xy = C.mul(*C.gen_vecs)
    assert low is True
    assert len(xs) == 1 and np.array_equal(matmul(B.embedding, xs[0], C.p), xy)
    assert fiber == 3
    assert high is False
    assert elapsed < 1


def test_criterion_04_shared_constants(record_property):
    t0 = time.perf_counter()
    inst = load("kxk")
    C = inst.C
    E = end_algebra(C)
    H1, H2 = (close_subalgebra(E, inst.doc.endomorphisms[n], label=n) for n in ("H1", "H2"))
    B1, B2 = constants_of(H1), constants_of(H2)
    rep = verify_correspondence(C, endomorphism_rings=[H1, H2])
    elapsed = time.perf_counter() - t0
    record_property("detail", f"dims {H1.dim}, {H2.dim}; flag '{rep.hypothesis}', {elapsed:.2f} s")
    assert H1 != H2 and H1.dim == H2.dim == 3
    e, f = C.basis_vector(0), C.basis_vector(1)
    assert B1 == B2 == prime_field(C)
    assert B1.dim == 1 and B1.contains((e + f) % C.p) and not B1.contains(e)
    assert rep.hypothesis == "not finite exponent"
    assert elapsed < 1


def test_criterion_05_five_characterisations(record_property):
    t0 = time.perf_counter()
    verdicts, disagreements = [], []
    for inst in local_instances():
        for name, (top, base) in legs(inst):
            if top.dim > SMALL:
                continue
            rep = theoremA_report(top, base)
            if rep["agreement"] is None:
                continue
            verdicts.append(rep["chain_pi"].value)
            if rep["agreement"] is not True:
                disagreements.append(f"{inst.name} {name}")
    elapsed = time.perf_counter() - t0
    yes, no = verdicts.count(True), verdicts.count(False)
    record_property("detail", f"{len(verdicts)} extensions, {yes} p.i., {no} not, {elapsed:.0f} s")
    assert disagreements == []
    assert len(verdicts) >= 20 and yes >= 8 and no >= 8
    assert elapsed < 120


def test_criterion_06_route_equivalence(record_property):
    mismatches, checked = [], 0
    for inst in local_instances(SMALL):
        C = inst.C
        ch = frobenius_chain(C, inst.k)
        top = len(C.gen_vecs) * C.p ** ch.exponent - 1
        a = diff_filtration(C, None, None, top, "bracket")
        b = diff_filtration(C, None, None, top, "dual")
        for k, (x, y) in enumerate(zip(a, b)):
            checked += 1
            if not np.array_equal(x.basis, y.basis):
                mismatches.append(f"{inst.name} k={k}")
        if a[-1].dim != C.dim ** 2:
            mismatches.append(f"{inst.name}: top order gives dim {a[-1].dim}")
    record_property("detail", f"{checked} (instance, k) pairs")
    assert mismatches == []


def test_criterion_07_extension_restricts_back(record_property):
    rng = random.Random(20261019)
    setups = []
    for inst in local_instances(SMALL):
        C = inst.C
        ch = frobenius_chain(C, inst.k)
        if not ch.finite or ch.exponent < 1:
            continue
        S = ch.levels[1]
        xs = find_pbasis(C, S)
        if xs is not None:
            setups.append((inst.name, C, S, xs))
    violations, count = [], 0
    while count < 60:
        name, C, S, xs = setups[count % len(setups)]
        k = rng.randrange(3)
        SA = S.algebra
        low = diff_operators(SA, None, None, k)
        coeffs = np.array([rng.randrange(C.p) for _ in range(low.dim)])
        d = hom_space(SA).operator(matmul(coeffs, low.basis, C.p))
        dpart = DiffOperator(matmul(S.embedding, d.matrix, C.p), SA, _regular(C), k)
        D = extend(dpart, xs, C, S)
        o = order_of(D)
        if not np.array_equal(restrict(D, S).matrix, dpart.matrix) or o is None or o > C.p * k:
            violations.append(f"{name} k={k}")
        count += 1
    record_property("detail", f"{count} triples on {len(setups)} instances")
    assert violations == []


def test_criterion_08_galois_characterisations(record_property):
    pairs, disagreements = 0, []
    for name in NAMES:
        inst = load(name)
        for legname, (top, base) in legs(inst):
            if not top.is_local or not exponent_at_most_one(top, base):
                continue
            pairs += 1
            verdicts = galois_battery(top, base)
            if len(set(verdicts.values())) != 1:
                disagreements.append(f"{name} {legname}: {verdicts}")
    record_property("detail", f"{pairs} exponent-one pairs")
    assert disagreements == []
    assert pairs > 0


def test_criterion_09_correspondence_round_trips(record_property):
    violations, checked = [], 0
    for name in NAMES:
        inst = load(name)
        C = inst.C
        ch = frobenius_chain(C, inst.k)
        subs = list(inst.subs.values()) + (ch.levels if ch.finite else [])
        rings = []
        if inst.doc.endomorphisms:
            E = end_algebra(C)
            rings = [close_subalgebra(E, seeds, label=n) for n, seeds in inst.doc.endomorphisms.items()]
        rep = verify_correspondence(C, subrings=subs, endomorphism_rings=rings,
                                    enumerate_all=C.dim <= 8)
        checked += sum(1 for s in rep.subrings if "excluded" not in s)
        violations += [f"{name}: {v}" for v in rep.violations]
    record_property("detail", f"{checked} free subrings over {len(NAMES)} instances")
    assert violations == []


def test_criterion_10_generator_exponents(record_property):
    violations, count = [], 0
    for inst in local_instances():
        C = inst.C
        G = gngs(C)
        count += 1
        if sum(G.n) != sum(G.e) or not G.sum_identity:
            violations.append(f"{inst.name}: sum of n {sum(G.n)} != sum of e {sum(G.e)}")
        iso = ngs_presentation(C, None, G).isomorphism
        if iso != is_purely_inseparable(C).value:
            violations.append(f"{inst.name}: presentation verdict {iso}")
    record_property("detail", f"{count} local instances")
    assert violations == []


def test_criterion_11_bracket_identities(record_property):
    rng = random.Random(11)
    small = [inst.C for inst in local_instances(12)]
    violations = []
    cases = 120
    for i in range(cases):
        C = small[i % len(small)]
        H = hom_space(C)
        D = H.operator(np.array([rng.randrange(C.p) for _ in range(H.dim)]))
        x = np.array([rng.randrange(C.p) for _ in range(C.dim)])
        if iterated_bracket([x] * C.p, D) != bracket(C.frobenius_power(x, 1), D):
            violations.append(f"case {i}: p-fold bracket")
        xs = [np.array([rng.randrange(C.p) for _ in range(C.dim)]) for _ in range(rng.randint(1, 3))]
        c = np.array([rng.randrange(C.p) for _ in range(C.dim)])
        if not np.array_equal(bracket_development(D, xs, c), iterated_bracket(xs, D)(c)):
            violations.append(f"case {i}: development")
    record_property("detail", f"{cases} cases on {len(small)} algebras")
    assert violations == []
