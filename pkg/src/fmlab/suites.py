"""Named verification suites.

Each suite re-checks a family of semantic claims at fixed, recorded
parameters: formula-defined relations against directly computed ones,
transformation contracts on randomized instances, the extension engine on
its recipe seeds, and so on.  Suites are deterministic — randomized parts
draw from a seeded generator and the seed is part of the report, so every
failure comes with a reproduction command.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

import numpy as np

from . import arithx, quantifiers as quantmod, sets as setsmod
from .evaluator import define_relation, ef_equivalent, evaluate, evaluate_fast
from .model import (BrModel, PartialArithModel, builtin_registry,
                    full_multiplication, powerset_structure, relativize,
                    word_model, zero_rows)
from .randform import random_formula
from .syntax import Exists, parse, quantifier_rank
from .transforms import mso_translate, relativize_formula, substitute

DEFAULT_SEED = 271828


@dataclass
class Claim:
    label: str
    ok: bool
    detail: str = ""


@dataclass
class SuiteReport:
    name: str
    seed: int
    claims: list

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.claims)

    def lines(self) -> list[str]:
        out = [f"suite {self.name} (seed {self.seed})"]
        for c in self.claims:
            mark = "PASS" if c.ok else "FAIL"
            line = f"  {mark}  {c.label}"
            if c.detail:
                line += f"  [{c.detail}]"
            out.append(line)
        if not self.ok:
            out.append(f"  reproduce: fmlab check {self.name} "
                       f"--seed {self.seed}")
        return out


def _unary(xs) -> frozenset:
    return frozenset((x,) for x in xs)


def _identity_model(n: int) -> BrModel:
    return BrModel(n, {}, {}, list(range(n)))


def _random_fo_model(rng, n, arities, p=0.4) -> BrModel:
    rels = {name: {t for t in itertools.product(range(n), repeat=ar)
                   if rng.random() < p}
            for name, ar in arities.items()}
    f = list(range(n))
    rng.shuffle(f)
    return BrModel(n, arities, rels, f)


def _masks(n: int):
    return range(1 << n)


def _mask_rel(mask: int, n: int) -> frozenset:
    return _unary(i for i in range(n) if mask >> i & 1)


# ---------------------------------------------------------------------------
# arithmetic from the equicardinality quantifier

ADDITION_NS = range(2, 65)


def _suite_haertig_addition(seed) -> list[Claim]:
    reg = {"I": quantmod.hartig()}
    phi = parse("@le(y, z) & I(u: u < x; v: y < v & @le(v, z))", {},
                quantmod.registry_shapes(reg))
    bad = None
    for n in ADDITION_NS:
        got = define_relation(_identity_model(n), phi, ("x", "y", "z"),
                              quantifiers=reg)
        want = frozenset((a, b, a + b) for a in range(n) for b in range(n)
                         if a + b < n)
        if got != want:
            bad = n
            break
    return [Claim("equicardinality formula defines restricted addition "
                  "for every n in 2..64",
                  bad is None, "" if bad is None else f"mismatch at n={bad}")]


ORDER_NS = range(1, 65)
ORDER_TRIALS = 20


def _suite_order_from_plus(seed) -> list[Claim]:
    rng = random.Random(seed)
    phi = parse("E z. x + z = y")
    bad_id = None
    bad_rand = None
    for n in ORDER_NS:
        fs = [list(range(n))]
        for _ in range(ORDER_TRIALS):
            f = list(range(n))
            rng.shuffle(f)
            fs.append(f)
        for trial, f in enumerate(fs):
            got = define_relation(BrModel(n, {}, {}, f), phi, ("x", "y"))
            want = frozenset((a, b) for a in range(n) for b in range(n)
                             if f[a] <= f[b])
            if got != want:
                if trial == 0:
                    bad_id = n
                else:
                    bad_rand = (n, trial)
    return [
        Claim("addition witness formula defines the order for the identity "
              "permutation, n <= 64", bad_id is None,
              "" if bad_id is None else f"mismatch at n={bad_id}"),
        Claim(f"same for {ORDER_TRIALS} random permutations per n <= 64",
              bad_rand is None,
              "" if bad_rand is None else f"mismatch at n,trial={bad_rand}"),
    ]


# ---------------------------------------------------------------------------
# the multiplication extension engine

MULEXT_NS = (10, 20, 40, 60)
MULEXT_SEEDS = 200


def _random_partial_mult(rng, n: int) -> PartialArithModel:
    p = rng.random()
    picked = {t for t in sorted(full_multiplication(n)) if rng.random() < p}
    picked |= zero_rows(n)
    return PartialArithModel(n, picked)


def _suite_mulext_lemma(seed) -> list[Claim]:
    rng = random.Random(seed)
    bad = {}
    for n in MULEXT_NS:
        for i in range(MULEXT_SEEDS):
            pm = _random_partial_mult(rng, n)
            mu = arithx.mu_step(pm)
            where = (n, i)
            if not all(a * b == c < n for a, b, c in mu.mult) or \
                    {(b, a, c) for a, b, c in mu.mult} != mu.mult:
                bad.setdefault("mult", where)
            g0 = [0] + [pm.gamma(a) for a in range(1, n)]
            g1 = [0] + [mu.gamma(a) for a in range(1, n)]
            if any(g1[a] < g0[a] for a in range(1, n)):
                bad.setdefault("mono", where)
            if any((g1[a] >= b) != (g1[b] >= a)
                   for a in range(1, n) for b in range(1, n)):
                bad.setdefault("sym", where)
            for a in range(1, n):
                top = min(a * a + a, n - 1)
                for b in range(a + 1, top + 1):
                    bound = min(g0[a] // ((b - 1) // a), (n - 1) // b)
                    if g1[b] < bound:
                        bad.setdefault("spread", where)

    def claim(key, label):
        return Claim(label, key not in bad,
                     "" if key not in bad else f"seed index (n,i)={bad[key]}")

    return [
        claim("mult", "one extension round outputs a symmetric partial "
                      "multiplication (200 seeds at n=10,20,40,60)"),
        claim("mono", "the filled rectangle never shrinks"),
        claim("sym", "rectangle reach is symmetric in its two sides"),
        claim("spread", "reach spreads from a to each b <= a^2 + a at the "
                        "guaranteed rate"),
    ]


MULEXT_PROP_NS = (64, 100, 216)
MULEXT_PROP_ROUNDS = 6


def _suite_mulext_prop(seed) -> list[Claim]:
    witness_fail = None
    full_fail = None
    for n in MULEXT_PROP_NS:
        try:
            a_star, pm = arithx.choose_seed(n, 3)
        except ValueError:
            witness_fail = n
            continue
        if not arithx.check_extension_hypothesis(pm, 3, a_star):
            witness_fail = n
            continue
        final = arithx.pi_extend(pm, rounds=MULEXT_PROP_ROUNDS)
        if not final.is_full():
            full_fail = n
    return [
        Claim("a rectangle seed satisfying the k=3 width hypothesis exists "
              "at n=64,100,216", witness_fail is None,
              "" if witness_fail is None else f"no witness at n={witness_fail}"),
        Claim("six extension rounds reach the full restricted multiplication",
              full_fail is None,
              "" if full_fail is None else f"not full at n={full_fail}"),
    ]


# ---------------------------------------------------------------------------
# numerical set diagnostics

SET_E_NS = (18, 36, 72, 144)
SET_SQ_NS = (100, 1000, 10000)
SET_F_NS = (23, 119, 719)


def _suite_set_criteria(seed) -> list[Claim]:
    fact = setsmod.factorials()
    pows = setsmod.powers_of_two()
    squares = setsmod.squares()
    got = setsmod.f_omega(fact, 23)
    c1 = Claim("factorials at n=23: least offset 8, least period 1",
               got == (8, 1), f"got {got}")
    recheck = (setsmod.is_periodic_on(fact, 23, 8, 1)
               and not any(setsmod.is_periodic_on(fact, 23, l, w)
                           for l in range(1, 8) for w in range(1, l + 1)))
    c2 = Claim("offset/period for factorials re-validated by direct "
               "periodicity checks", recheck)
    worst = min((setsmod.f_omega(pows, n)[0] - (-(-n // 9)), n)
                for n in SET_E_NS)
    c3 = Claim("powers of two: least offset at least ceil(n/9) for "
               "n=18,36,72,144", worst[0] >= 0,
               "" if worst[0] >= 0 else f"short by {-worst[0]} at n={worst[1]}")
    sq = setsmod.nonperiodicity_criterion(squares, 5, 0, list(SET_SQ_NS))
    c4 = Claim("non-periodicity criterion (k=5, l=0) holds for squares at "
               "n=100,1000,10000", all(sq.values()), f"{sq}")
    fa = setsmod.nonperiodicity_criterion(fact, 10, 5, list(SET_F_NS))
    c5 = Claim("non-periodicity criterion (k=10, l=5) fails for factorials "
               "at n=23,119,719", not any(fa.values()), f"{fa}")
    return [c1, c2, c3, c4, c5]


LOOSE_NS = (10_000, 100_000)


def _suite_looseness_examples(seed) -> list[Claim]:
    claims = []
    eps10 = Fraction(1, 10)
    for label, s in (("squares", setsmod.squares()),
                     ("range of x^2 + x", setsmod.poly_range([0, 1, 1]))):
        reports = [setsmod.loose_at(s, n, eps10) for n in LOOSE_NS]
        ok = all(r.verdict == "loose-at-n" and setsmod.recheck_report(s, r)
                 for r in reports)
        claims.append(Claim(f"{label} are loose at eps=1/10 for n=1e4,1e5 "
                            "(witnesses re-validated)", ok,
                            "; ".join(f"n={r.n}: {r.verdict}" for r in reports)))
    pows = setsmod.powers_of_two()
    eps4 = Fraction(1, 4)
    rl = setsmod.loose_at(pows, 4096, eps4)
    rp = setsmod.pseudoloose_at(pows, 4096, eps4)
    claims.append(Claim("powers of two are neither loose nor pseudoloose at "
                        "eps=1/4, n=4096",
                        rl.verdict == "neither" and rp.verdict == "neither",
                        f"loose scan: {rl.verdict} (t={rl.witness_t}, "
                        f"gamma={rl.gamma_value}); pseudoloose scan: "
                        f"{rp.verdict} (word={rp.witness_word!r})"))
    comp = setsmod.complement(setsmod.squares())
    rc = setsmod.pseudoloose_at(comp, 10_000, Fraction(1, 20))
    claims.append(Claim("complement of the squares is pseudoloose at "
                        "eps=1/20, n=1e4 (witness re-validated)",
                        rc.verdict == "pseudoloose-at-n"
                        and setsmod.recheck_report(comp, rc),
                        f"word={rc.witness_word!r}, t={rc.witness_t}"))
    return claims


# ---------------------------------------------------------------------------
# formula transformations

REL_QUANT_NAMES = ("C_Sq", "C_E", "I", "D", "D_2")
REL_INSTANCES = 500


def _suite_relativization(seed) -> list[Claim]:
    rng = random.Random(seed)
    reg = {name: quantmod.builtin_quantifiers()[name]
           for name in REL_QUANT_NAMES}
    shapes = quantmod.registry_shapes(reg)
    guard = parse("P(v)", {"P": 1})
    bad = None
    done = 0
    while done < REL_INSTANCES:
        n = rng.randrange(2, 9)
        m = _random_fo_model(rng, n, {"U": 1, "R": 2, "P": 1})
        u = sorted(a for (a,) in m.rels["P"])
        if not u:
            continue
        phi = random_formula(rng, {"U": 1, "R": 2}, rng.randrange(1, 4),
                             ("x",), quants=shapes, builtins=("le", "lt"))
        guarded = relativize_formula(phi, guard, "v", registry=reg)
        sub, idx = relativize(m, u)
        for x in u:
            big = evaluate(m, guarded, {"x": x}, quantifiers=reg)
            small = evaluate(sub, phi, {"x": idx[x]}, quantifiers=reg)
            if big != small:
                bad = (done, x)
                break
        if bad:
            break
        done += 1
    claims = [Claim(f"guarded formula on the full model agrees with the bare "
                    f"formula on the induced substructure "
                    f"({REL_INSTANCES} random instances, n <= 8)",
                    bad is None,
                    "" if bad is None else f"instance,point={bad}")]
    rejected = 0
    try:
        relativize_formula(parse("x + y = z"), guard, "v")
    except ValueError:
        rejected += 1
    try:
        relativize_formula(parse("Maj(x: U(x))", {"U": 1}, {"Maj": [1]}),
                           guard, "v",
                           registry=quantmod.builtin_quantifiers())
    except ValueError:
        rejected += 1
    try:
        relativize_formula(parse("U(x)", {"U": 1}),
                           parse("R(v, w)", {"R": 2}), "v")
    except ValueError:
        rejected += 1
    claims.append(Claim("arithmetic built-ins, domain-dependent quantifiers "
                        "and non-unary guards are rejected", rejected == 3,
                        f"{rejected}/3 rejected"))
    return claims


SUBST_INSTANCES = 500


def _suite_substitution(seed) -> list[Claim]:
    rng = random.Random(seed)
    base = {"U": 1, "R": 2}
    bad = None
    for i in range(SUBST_INSTANCES):
        n = rng.randrange(1, 7)
        m = _random_fo_model(rng, n, base)
        body = random_formula(rng, base, rng.randrange(1, 4), ("p", "q"))
        phi = random_formula(rng, {**base, "S": 2}, rng.randrange(1, 4),
                             ("x",))
        subbed = substitute(phi, {"S": (("p", "q"), body)})
        s_ext = define_relation(m, body, ("p", "q"))
        m_s = m.with_relations({"S": s_ext}, {"S": 2})
        x = rng.randrange(n)
        if evaluate(m, subbed, {"x": x}) != evaluate(m_s, phi, {"x": x}):
            bad = i
            break
    claims = [Claim(f"substituting a definition agrees with evaluating "
                    f"against the defined relation ({SUBST_INSTANCES} random "
                    f"instances, n <= 6)", bad is None,
                    "" if bad is None else f"instance={bad}")]
    try:
        substitute(parse("S(x, y)", {"S": 2}),
                   {"S": (("p",), parse("U(p)", {"U": 1}))})
        claims.append(Claim("arity mismatches are rejected", False))
    except ValueError:
        claims.append(Claim("arity mismatches are rejected", True))
    return claims


# ---------------------------------------------------------------------------
# quantifier constructions

REG_UI_BASES = 10
REG_UI_PADDINGS = 100


def _pad_structure(rng, n0, rels0, f0, n):
    """Embed an n0-point slot structure into n points, preserving the
    relative order of the image; fresh points carry no relation tuples."""
    image = sorted(rng.sample(range(n), n0))
    fbig = list(range(n))
    rng.shuffle(fbig)
    img_by_rank = sorted(image, key=lambda e: fbig[e])
    base_by_rank = sorted(range(n0), key=lambda e: f0[e])
    sigma = dict(zip(base_by_rank, img_by_rank))
    mapped = [frozenset(tuple(sigma[x] for x in t) for t in rel)
              for rel in rels0]
    return mapped, fbig


def _suite_regularization_ui(seed) -> list[Claim]:
    rng = random.Random(seed)
    bases = [quantmod.cardinality(setsmod.squares(), "C_Sq"),
             quantmod.hartig(),
             quantmod.language_quantifier(quantmod.lang_anbn())]
    bad = None
    for q in bases:
        qreg = quantmod.regularize(q)
        for b in range(REG_UI_BASES):
            n0 = rng.randrange(1, 7)
            f0 = list(range(n0))
            rng.shuffle(f0)
            rels0 = [frozenset(t for t in
                               itertools.product(range(n0), repeat=ar)
                               if rng.random() < 0.5)
                     for ar in qreg.slot_arities]
            want = qreg.decide(n0, rels0, f0)
            for p in range(REG_UI_PADDINGS):
                n = rng.randrange(n0, 11)
                mapped, fbig = _pad_structure(rng, n0, rels0, f0, n)
                if qreg.decide(n, mapped, fbig) != want:
                    bad = (q.name, b, p)
                    break
    claims = [Claim("regularized verdicts are invariant under "
                    f"{REG_UI_PADDINGS} random paddings per base structure "
                    "(bases: C_Sq, I, the a^nb^n word quantifier; n <= 10)",
                    bad is None,
                    "" if bad is None else f"quantifier,base,padding={bad}")]
    # contrast: the bare word-language quantifier is padding sensitive
    q = quantmod.language_quantifier(quantmod.lang_anbn())
    inside = q.decide(2, [_unary({0}), _unary({1})], [0, 1])
    padded = q.decide(3, [_unary({0}), _unary({1})], [0, 1, 2])
    claims.append(Claim("the bare word quantifier is not padding invariant "
                        "(so the extra slot is doing real work)",
                        inside and not padded))
    return claims


# the tailored order: first slot-only, then second-slot-only, then the rest,
# ambient order within each block
TAILORED_ORDER = (
    "(((U(x) <-> U(y)) & (V(x) <-> V(y))) & @le(x, y))"
    " | (U(x) & !V(x) & !(U(y) & !V(y)))"
    " | (!U(x) & V(x) & (U(y) <-> V(y)))"
    " | (U(x) & V(x) & !U(y) & !V(y))")

LIFT_NS = range(1, 10)


def _order_lookup() -> tuple[bool, list]:
    """Evaluate the tailored-order formula on a probe structure covering
    every (class of x, class of y, ambient comparison) combination and read
    off its truth table; reports whether the readings are consistent."""
    n = 8
    cls = [x % 4 for x in range(n)]
    m = BrModel(n, {"U": 1, "V": 1},
                {"U": {(x,) for x in range(n) if cls[x] & 1},
                 "V": {(x,) for x in range(n) if cls[x] & 2}},
            list(range(n)))
    rel = define_relation(m, parse(TAILORED_ORDER, {"U": 1, "V": 1}),
                          ("x", "y"))
    table = {}
    consistent = True
    for x in range(n):
        for y in range(n):
            key = (cls[x], cls[y], x <= y)
            val = (x, y) in rel
            if table.setdefault(key, val) != val:
                consistent = False
    lut = [[(table[(a, b, False)], table[(a, b, True)]) for b in range(4)]
           for a in range(4)]
    return consistent, lut


def _suite_lift_hartig(seed) -> list[Claim]:
    rng = random.Random(seed)
    lifted = quantmod.lift_over_order(
        quantmod.language_quantifier(quantmod.lang_ambmck()))
    consistent, lut = _order_lookup()
    claims = [Claim("the tailored-order formula depends only on membership "
                    "classes and the ambient comparison", consistent)]
    bad = None
    for n in LIFT_NS:
        dom = range(n)
        f = list(dom)
        pairs = [((x, y), x <= y) for x in dom for y in dom]
        bits = [[w >> i & 1 for i in range(n)] for w in _masks(n)]
        pcs = [sum(b) for b in bits]
        for um in _masks(n):
            ub = bits[um]
            pu = pcs[um]
            for vm in _masks(n):
                vb = bits[vm]
                cl = [ub[i] + 2 * vb[i] for i in range(n)]
                order = frozenset(t for t, le in pairs
                                  if lut[cl[t[0]]][cl[t[1]]][le])
                slots = [frozenset((i,) for i in dom if cl[i] == 1),
                         frozenset((i,) for i in dom if cl[i] == 2),
                         frozenset((i,) for i in dom if cl[i] in (0, 3)),
                         order]
                if lifted.decide(n, slots, f) != (pu == pcs[vm]):
                    bad = (n, um, vm)
                    break
            if bad:
                break
        if bad:
            break
    claims.append(Claim("the ordered lift applied along the tailored order "
                        "decides equicardinality on all (U, V), n <= 9",
                        bad is None,
                        "" if bad is None else f"n,Umask,Vmask={bad}"))
    # full-formula route on a sample, against the same verdicts
    reg = {"Qab": quantmod.lift_over_order(replace(
        quantmod.language_quantifier(quantmod.lang_ambmck()), name="Qab"))}
    reg = {"Qab_le": reg["Qab"]}
    qtext = ("Qab_le(x: U(x) & !V(x); y: V(y) & !U(y); z: U(z) <-> V(z); "
             f"t, u: {TAILORED_ORDER.replace('x', 't').replace('y', 'u')})")
    phi = parse(qtext, {"U": 1, "V": 1}, quantmod.registry_shapes(reg))
    bad2 = None
    for i in range(60):
        n = rng.randrange(1, 8)
        m = _random_fo_model(rng, n, {"U": 1, "V": 1}, p=0.5)
        got = evaluate(m, phi, {}, quantifiers=reg)
        want = len(m.rels["U"]) == len(m.rels["V"])
        if got != want:
            bad2 = i
            break
    claims.append(Claim("the same construction written as one formula "
                        "agrees on 60 random models (random f, n <= 7)",
                        bad2 is None,
                        "" if bad2 is None else f"instance={bad2}"))
    return claims


RC_SET = (2, 5)
RC_NS = range(1, 13)


def _rc_quantifiers():
    s = setsmod.explicit(RC_SET)
    builtins = builtin_registry({"rcS": s})
    sentence = parse("E x. (@set:rcS(x) & A y. (U(y) <-> @le(y, x)))",
                     {"U": 1})
    make = lambda engine: quantmod.regularize(quantmod.quantifier_from_sentence(
        "Qrc", [("U", 1)], sentence, builtins=builtins, engine=engine))
    return make("fast"), make("topdown")


def _suite_rc_unary(seed) -> list[Claim]:
    rng = random.Random(seed)
    qfast, qslow = _rc_quantifiers()
    splus1 = setsmod.explicit([k + 1 for k in RC_SET])
    card = quantmod.cardinality(splus1, "C_S1")
    bad = None
    for n in RC_NS:
        f = list(range(n))
        for mask in _masks(n):
            rel = _mask_rel(mask, n)
            if qfast.decide(n, [rel, rel], f) != card.decide(n, [rel], f):
                bad = (n, mask)
                break
    claims = [Claim("regularized initial-segment quantifier applied to "
                    "(U, U) agrees with the shifted cardinality quantifier "
                    "on every U, n <= 12", bad is None,
                    "" if bad is None else f"n,mask={bad}")]
    reg = {"QrcReg": qslow}
    phi = parse("QrcReg(x: U(x); y: U(y))", {"U": 1},
                quantmod.registry_shapes(reg))
    bad2 = None
    for n in range(1, 9):
        for mask in _masks(n):
            m = BrModel(n, {"U": 1}, {"U": set(_mask_rel(mask, n))},
                        list(range(n)))
            got = evaluate(m, phi, {}, quantifiers=reg)
            if got != (bin(mask).count("1") in splus1):
                bad2 = (n, mask)
                break
    claims.append(Claim("the same check through formula evaluation, "
                        "exhaustive for n <= 8", bad2 is None,
                        "" if bad2 is None else f"n,mask={bad2}"))
    bad3 = None
    for i in range(200):
        n = rng.randrange(1, 11)
        f = list(range(n))
        rng.shuffle(f)
        v = {x for x in range(n) if rng.random() < 0.6}
        u = {x for x in v if rng.random() < 0.6}
        by_rank = sorted(v, key=lambda e: f[e])
        initial = u == set(by_rank[:len(u)])
        want = len(u) in splus1 and initial
        if qfast.decide(n, [_unary(u), _unary(v)], f) != want:
            bad3 = i
            break
    claims.append(Claim("on slot pairs U within V: verdict iff |U| is a "
                        "shifted member and U is an initial segment of V "
                        "(200 random instances, random f)", bad3 is None,
                        "" if bad3 is None else f"instance={bad3}"))
    return claims


DIVMOD_MS = (2, 3, 5)
DIVMOD_NS = range(1, 13)
DIVMOD_FULL_N = 8
DIVMOD_SAMPLES = 20


def _divmod_formulas(m: int):
    cname, dname = f"Cmod{m}", f"Dmod{m}"
    reg = {cname: quantmod.cardinality(
               setsmod.shifted(1, setsmod.multiples(m)), cname),
           dname: quantmod.divisibility_by(m)}
    shapes = quantmod.registry_shapes(reg)
    vocab = {"U": 1}
    direct = parse(f"{cname}(x: U(x))", vocab, shapes)
    via_div = parse(f"E z. (U(z) & {dname}(x: U(x) & !(x = z)))",
                    vocab, shapes)
    zs = [f"z{i}" for i in range(1, m)]
    distinct = [f"!({a} = {b})" for a, b in itertools.combinations(zs, 2)]
    inner = " & ".join([f"U({z})" for z in zs] + distinct) or "z1 = z1"
    strip = " & ".join([f"!(x = {z})" for z in zs])
    body = f"({inner}) & {cname}(x: U(x) & {strip})"
    for z in reversed(zs):
        body = f"E {z}. ({body})"
    div_via_card = parse(f"(A x. !U(x)) | ({body})", vocab, shapes)
    div_direct = parse(f"{dname}(x: U(x))", vocab, shapes)
    return reg, direct, via_div, div_direct, div_via_card


def _suite_divmod_interdef(seed) -> list[Claim]:
    from .evaluator import TruthTables
    rng = random.Random(seed)
    per_m = {m: _divmod_formulas(m) for m in DIVMOD_MS}
    bad_direct = None
    bad_inter = None
    for n in DIVMOD_NS:
        if n <= DIVMOD_FULL_N:
            masks = list(_masks(n))
        else:
            masks = [rng.randrange(1 << n) for _ in range(DIVMOD_SAMPLES)]
        full = n <= DIVMOD_FULL_N
        for mask in (_masks(n) if full else masks):
            model = BrModel(n, {"U": 1}, {"U": set(_mask_rel(mask, n))},
                            list(range(n)))
            size = bin(mask).count("1")
            for m, (reg, direct, via_div, div_direct, via_card) in \
                    per_m.items():
                tt = TruthTables(model, quantifiers=reg)
                res = {phi: bool(tt.table(phi)[1] & 1)
                       for phi in (direct, via_div, div_direct, via_card)}
                if res[direct] != (size % m == 1):
                    bad_direct = (m, n, mask)
                if res[via_div] != res[direct] or \
                        res[via_card] != res[div_direct] or \
                        res[div_direct] != (size % m == 0):
                    bad_inter = (m, n, mask)
        if bad_direct and bad_inter:
            break
    return [
        Claim("shifted cardinality application holds iff the witness count "
              "is 1 mod m (m=2,3,5; every U for n <= 8, sampled to n = 12)",
              bad_direct is None,
              "" if bad_direct is None else f"m,n,mask={bad_direct}"),
        Claim("each of the two quantifiers defines the other "
              "(congruences checked on the same models)",
              bad_inter is None,
              "" if bad_inter is None else f"m,n,mask={bad_inter}"),
    ]


# ---------------------------------------------------------------------------
# the split-at-the-median equicardinality construction

MEDIAN_NS = range(1, 11)
MEDIAN_FULL_N = 5
MEDIAN_SAMPLES = 40


def _median_quantifier():
    lang = quantmod.neutral_letter_extension(quantmod.lang_anbn(), "e")
    return replace(quantmod.language_quantifier(lang), name="QL1")


def _median_formula():
    def slotq(a, b):
        return (f"QL1(x: {a('x')}; y: {b('y')}; "
                f"w: !(({a('w')}) | ({b('w')})))")

    def odd(w, z):
        return (f"({w}({z}) & "
                + slotq(lambda v: f"{w}({v}) & {v} < {z}",
                        lambda v: f"{w}({v}) & {z} < {v}") + ")")

    def even(w, z):
        return (f"({w}({z}) & "
                + slotq(lambda v: f"{w}({v}) & @le({v}, {z})",
                        lambda v: f"{w}({v}) & {z} < {v}") + ")")

    def bridge(w1, w2, strict_first):
        cmp1 = (lambda v: f"{w1}({v}) & {v} < z") if strict_first else \
               (lambda v: f"{w1}({v}) & @le({v}, z)")
        return slotq(cmp1, lambda v: f"{w2}({v}) & z2 < {v}")

    d0 = "(A x. !U(x)) & (A x. !V(x))"
    d1 = (f"E z. E z2. ({odd('U', 'z')} & {odd('V', 'z2')} & "
          f"{bridge('U', 'V', True)})")
    d2 = (f"E z. E z2. ({odd('V', 'z')} & {odd('U', 'z2')} & "
          f"{bridge('V', 'U', True)})")
    d3 = (f"E z. E z2. ({even('U', 'z')} & {even('V', 'z2')} & "
          f"{bridge('U', 'V', False)})")
    d4 = (f"E z. E z2. ({even('V', 'z')} & {even('U', 'z2')} & "
          f"{bridge('V', 'U', False)})")
    text = f"({d0}) | ({d1}) | ({d2}) | ({d3}) | ({d4})"
    return parse(text, {"U": 1, "V": 1}, {"QL1": [1, 1, 1]})


def _median_tables(n: int):
    """Per-mask data for the vectorized route: popcount, split points and
    their neighbours for the odd and even median subformulas."""
    size = 1 << n
    pc = np.zeros(size, np.int64)
    mb_odd = np.zeros(size, np.int64)
    ma_odd = np.zeros(size, np.int64)
    ze = np.zeros(size, np.int64)
    ma_even = np.zeros(size, np.int64)
    for w in range(size):
        pos = [i for i in range(n) if w >> i & 1]
        k = len(pos)
        pc[w] = k
        if k % 2 == 1:
            i = (k - 1) // 2
            mb_odd[w] = pos[i - 1] if i else -1
            ma_odd[w] = pos[i + 1] if i + 1 < k else n
        elif k:
            i = k // 2 - 1
            ze[w] = pos[i]
            ma_even[w] = pos[i + 1]
    return pc, mb_odd, ma_odd, ze, ma_even


def _median_verdicts(n: int) -> np.ndarray:
    """The disjunction's verdict for every (U mask, V mask), computed from
    the split-point data (validated against real formula evaluation by the
    sampled claim)."""
    pc, mb_odd, ma_odd, ze, ma_even = _median_tables(n)
    odd = pc % 2 == 1
    even = (pc % 2 == 0) & (pc > 0)
    eq = pc[:, None] == pc[None, :]
    d0 = (pc[:, None] == 0) & (pc[None, :] == 0)
    both_odd = odd[:, None] & odd[None, :]
    both_even = even[:, None] & even[None, :]
    d1 = both_odd & eq & (mb_odd[:, None] < ma_odd[None, :])
    d2 = both_odd & eq & (mb_odd[None, :] < ma_odd[:, None])
    d3 = both_even & eq & (ze[:, None] < ma_even[None, :])
    d4 = both_even & eq & (ze[None, :] < ma_even[:, None])
    return d0 | d1 | d2 | d3 | d4


def _suite_median_trick(seed) -> list[Claim]:
    rng = random.Random(seed)
    phi = _median_formula()
    reg = {"QL1": _median_quantifier()}
    bad = None
    verdicts = {}
    for n in MEDIAN_NS:
        v = _median_verdicts(n)
        verdicts[n] = v
        pc = np.array([bin(w).count("1") for w in _masks(n)])
        if not np.array_equal(v, pc[:, None] == pc[None, :]):
            um, vm = map(int, np.argwhere(
                v != (pc[:, None] == pc[None, :]))[0])
            bad = (n, um, vm)
    claims = [Claim("the case disjunction decides |U| = |V| on all (U, V), "
                    "n <= 10", bad is None,
                    "" if bad is None else f"n,Umask,Vmask={bad}")]
    bad2 = None
    for n in MEDIAN_NS:
        if n <= MEDIAN_FULL_N:
            cases = [(um, vm) for um in _masks(n) for vm in _masks(n)]
        else:
            cases = [(rng.randrange(1 << n), rng.randrange(1 << n))
                     for _ in range(MEDIAN_SAMPLES)]
        for um, vm in cases:
            m = BrModel(n, {"U": 1, "V": 1},
                        {"U": set(_mask_rel(um, n)),
                         "V": set(_mask_rel(vm, n))}, list(range(n)))
            if evaluate(m, phi, {}, quantifiers=reg) != bool(verdicts[n][um, vm]):
                bad2 = (n, um, vm)
                break
        if bad2:
            break
    claims.append(Claim("real formula evaluation matches the vectorized "
                        "route (exhaustive n <= 5, sampled to n = 10)",
                        bad2 is None,
                        "" if bad2 is None else f"n,Umask,Vmask={bad2}"))
    bad3 = None
    for i in range(40):
        n = rng.randrange(1, 9)
        m = _random_fo_model(rng, n, {"U": 1, "V": 1}, p=0.5)
        got = evaluate(m, phi, {}, quantifiers=reg)
        if got != (len(m.rels["U"]) == len(m.rels["V"])):
            bad3 = i
            break
    claims.append(Claim("the formula also decides equicardinality under 40 "
                        "random permutations", bad3 is None,
                        "" if bad3 is None else f"instance={bad3}"))
    return claims


# ---------------------------------------------------------------------------
# subset-sort translation and its limits

MSO_KS = (1, 2, 3, 4)
MSO_CORPUS = 30
POWERSET_KS = (1, 2, 3, 4, 5)


def _suite_mso_counterexample(seed) -> list[Claim]:
    rng = random.Random(seed)
    corpus = []
    while len(corpus) < MSO_CORPUS:
        body = random_formula(rng, {"E": 2}, rng.randrange(1, 3), ("x",),
                              builtins=("le", "lt"))
        phi = Exists("x", body)
        if quantifier_rank(phi) <= 3:
            corpus.append(phi)
    bad = None
    for k in MSO_KS:
        mk = powerset_structure(k)
        wk = word_model("a" * k)
        for i, phi in enumerate(corpus):
            if evaluate(mk, phi, {}) != evaluate(wk, mso_translate(phi), {}):
                bad = (k, i)
                break
        if bad:
            break
    claims = [Claim(f"subset-structure truth transfers to the translated "
                    f"sentence on unary words, k = 1..4 "
                    f"({MSO_CORPUS} rank <= 3 sentences)", bad is None,
                    "" if bad is None else f"k,sentence={bad}")]
    pq = quantmod.powerset_quantifier()
    got = {k: pq.decide((m := powerset_structure(k)).n, [m.rels["E"]], m.f)
           for k in POWERSET_KS}
    want = {k: k in (1, 4) for k in POWERSET_KS}
    claims.append(Claim("the subset-membership quantifier accepts the "
                        "canonical structure iff the atom count is a "
                        "square, k <= 5", got == want, f"{got}"))
    m4 = powerset_structure(2)
    broken = set(m4.rels["E"])
    broken.discard(next(iter(broken)))
    claims.append(Claim("dropping one membership pair is detected",
                        not pq.decide(m4.n, [frozenset(broken)], m4.f)))
    return claims


def _suite_neutral_letter(seed) -> list[Claim]:
    anbn = quantmod.lang_anbn()
    par = quantmod.lang_parity()
    return [
        Claim("'e' is neutral for the extended a^nb^n language "
              "(all words below length 8)",
              quantmod.is_neutral_letter(
                  quantmod.neutral_letter_extension(anbn, "e"), "e", 8)),
        Claim("'e' is neutral for the extended even-a language",
              quantmod.is_neutral_letter(
                  quantmod.neutral_letter_extension(par, "e"), "e", 8)),
        Claim("'a' is not neutral for a^nb^n",
              not quantmod.is_neutral_letter(anbn, "a", 8)),
    ]


EF_PAIRS = 50


def _suite_ef_games(seed) -> list[Claim]:
    rng = random.Random(seed)
    w7 = word_model("a" * 7)
    w9 = word_model("a" * 9)
    claims = [
        Claim("seven and nine points are 3-round equivalent over the order",
              ef_equivalent(w7, w9, 3)),
        Claim("a fourth round separates them",
              not ef_equivalent(w7, w9, 4)),
    ]
    refl_bad = None
    sym_bad = None
    for i in range(EF_PAIRS):
        n1, n2 = rng.randrange(1, 9), rng.randrange(1, 9)
        m1 = _random_fo_model(rng, n1, {"P": 1})
        m2 = _random_fo_model(rng, n2, {"P": 1})
        if not (ef_equivalent(m1, m1, 3) and ef_equivalent(m2, m2, 3)):
            refl_bad = i
        if ef_equivalent(m1, m2, 3) != ef_equivalent(m2, m1, 3):
            sym_bad = i
    claims.append(Claim(f"equivalence is reflexive on {EF_PAIRS} random "
                        "models, n <= 8", refl_bad is None,
                        "" if refl_bad is None else f"pair={refl_bad}"))
    claims.append(Claim("and symmetric on the same pairs", sym_bad is None,
                        "" if sym_bad is None else f"pair={sym_bad}"))
    return claims


# ---------------------------------------------------------------------------
# registry

SUITES: dict[str, Callable] = {
    "haertig-addition": _suite_haertig_addition,
    "order-from-plus": _suite_order_from_plus,
    "mulext-lemma": _suite_mulext_lemma,
    "mulext-prop": _suite_mulext_prop,
    "set-criteria": _suite_set_criteria,
    "looseness-examples": _suite_looseness_examples,
    "relativization": _suite_relativization,
    "substitution": _suite_substitution,
    "regularization-ui": _suite_regularization_ui,
    "lift-hartig": _suite_lift_hartig,
    "rc-unary": _suite_rc_unary,
    "divmod-interdef": _suite_divmod_interdef,
    "median-trick": _suite_median_trick,
    "mso-counterexample": _suite_mso_counterexample,
    "neutral-letter": _suite_neutral_letter,
    "ef-games": _suite_ef_games,
}


def run_suite(name: str, seed: int = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: "
                       + ", ".join(sorted(SUITES)))
    seed = DEFAULT_SEED if seed is None else seed
    return SuiteReport(name, seed, SUITES[name](seed))


def run_all(seed: int = None) -> list[SuiteReport]:
    return [run_suite(name, seed) for name in SUITES]
