import random

import pytest
from hypothesis import given, settings, strategies as st

from fmlab import quantifiers as Q, sets
from fmlab.evaluator import (BudgetExceeded, TruthTables, define_relation,
                             ef_equivalent, evaluate, evaluate_fast,
                             evaluate_naive)
from fmlab.model import BrModel, word_model
from fmlab.syntax import parse


def fo_model(rng, n):
    arities = {"U": 1, "R": 2}
    rels = {"U": {(a,) for a in range(n) if rng.random() < 0.5},
            "R": {(a, b) for a in range(n) for b in range(n)
                  if rng.random() < 0.3}}
    f = list(range(n))
    rng.shuffle(f)
    return BrModel(n, arities, rels, f)


VOCAB = {"U": 1, "R": 2}


def test_basic_clauses():
    m = BrModel(4, VOCAB, {"U": {(0,), (2,)}, "R": {(0, 1)}})
    ev = lambda s, **kw: evaluate(m, parse(s, VOCAB), kw)
    assert ev("U(x)", x=0) and not ev("U(x)", x=1)
    assert ev("R(x, y)", x=0, y=1) and not ev("R(x, y)", x=1, y=0)
    assert ev("x = y", x=2, y=2) and not ev("x = y", x=2, y=3)
    assert evaluate(m, parse("E x. U(x) & !U(y)", VOCAB), {"y": 1})
    assert not evaluate(m, parse("A x. (U(x) -> E y. R(x, y))", VOCAB), {})
    assert evaluate(m, parse("A x. (R(x, y) -> U(x))", VOCAB), {"y": 1})


def test_builtins_read_through_f():
    m = BrModel(4, {}, {}, f=[3, 2, 1, 0])
    # element 0 has the largest f-value
    assert evaluate(m, parse("x <= y"), {"x": 3, "y": 0})
    assert not evaluate(m, parse("x <= y"), {"x": 0, "y": 3})
    assert evaluate(m, parse("x + y = z"), {"x": 3, "y": 2, "z": 2})
    assert not evaluate(m, parse("x + y = z"), {"x": 3, "y": 2, "z": 0})
    assert evaluate(m, parse("@set:sq(x)"), {"x": 3})  # f-value 0


def test_count_clause():
    m = BrModel(5, VOCAB, {"U": {(0,), (1,), (3,)}, "R": set()})
    # y's f-value (= y itself here) must equal the number of witnesses
    assert evaluate(m, parse("# x = y. U(x)", VOCAB), {"y": 3})
    assert not evaluate(m, parse("# x = y. U(x)", VOCAB), {"y": 2})


def test_qapp_clause():
    m = BrModel(6, VOCAB, {"U": {(0,), (1,)}, "R": set()})
    phi = parse("I(x: U(x); y: !U(y))", VOCAB, {"I": [1, 1]})
    assert not evaluate(m, phi, {})
    m2 = BrModel(4, VOCAB, {"U": {(0,), (1,)}, "R": set()})
    assert evaluate(m2, phi, {})


def test_mso_clauses():
    m = word_model("aabb")
    vocab = {"P_a": 1, "P_b": 1}
    # some set contains exactly the a-positions
    phi = parse("EX X. A x. (X(x) <-> P_a(x))", vocab)
    assert evaluate(m, phi, {})
    phi2 = parse("AX X. E x. X(x)", vocab)
    assert not evaluate(m, phi2, {})  # the empty set has no member


def test_mso_cap_and_budget():
    m = BrModel(20, {}, {})
    with pytest.raises(BudgetExceeded):
        evaluate(m, parse("EX X. E x. X(x)"), {})
    with pytest.raises(BudgetExceeded):
        evaluate(BrModel(8, {}, {}),
                 parse("E x. E y. E z. (x <= y & y <= z)"), {}, budget=3)


def test_unassigned_free_variable_is_an_error():
    m = BrModel(3, {}, {})
    with pytest.raises(ValueError):
        evaluate(m, parse("x = y"), {"x": 0})


FORMULAS = [
    "E x. A y. R(x, y) -> U(y)",
    "A x. E y. (R(x, y) | x = y) & x <= y",
    "I(x: U(x); y: E z. R(y, z))",
    "D_2(x: U(x) | E y. R(x, y))",
    "Maj(x: x <= y)",
    "# x = y. (U(x) & x <= y)",
    "E x. # z = x. R(x, z)",
    "!(E x. U(x)) <-> A x. !U(x)",
    "Maj2(x,y: R(x, y) | U(x))",
    "E x. (x + y = z | @times(x, y, z))",
]


@given(st.integers(1, 5), st.integers(0, len(FORMULAS) - 1),
       st.randoms(use_true_random=False))
@settings(max_examples=120, deadline=None)
def test_three_engines_agree(n, which, rng):
    m = fo_model(rng, n)
    quants = Q.builtin_quantifiers()
    phi = parse(FORMULAS[which], VOCAB, Q.registry_shapes(quants))
    from fmlab.syntax import free_variables
    a = {v: rng.randrange(n) for v in free_variables(phi)}
    r1 = evaluate(m, phi, a, quantifiers=quants)
    r2 = evaluate_naive(m, phi, a, quantifiers=quants)
    r3 = evaluate_fast(m, phi, a, quantifiers=quants)
    assert r1 == r2 == r3


@given(st.integers(1, 4), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_engines_agree_on_mso(n, rng):
    m = fo_model(rng, n)
    phi = parse("EX X. ((A x. (X(x) -> U(x))) & E x. X(x))", VOCAB)
    assert (evaluate(m, phi, {}) == evaluate_naive(m, phi, {})
            == evaluate_fast(m, phi, {}))


def test_truth_tables_match_pointwise():
    rng = random.Random(13)
    for _ in range(10):
        n = rng.randrange(2, 6)
        m = fo_model(rng, n)
        phi = parse("(U(x) & x <= y) | R(y, x)", VOCAB)
        tt = TruthTables(m)
        vs, bits = tt.table(phi)
        assert vs == ("x", "y")
        for x in range(n):
            for y in range(n):
                want = evaluate_naive(m, phi, {"x": x, "y": y})
                assert bool(bits >> (x + n * y) & 1) == want


def test_define_relation():
    m = BrModel(5, {}, {})
    rel = define_relation(m, parse("x + y = z"), ("x", "y", "z"))
    assert (2, 2, 4) in rel and (2, 3, 4) not in rel
    assert len(rel) == sum(1 for x in range(5) for y in range(5)
                           if x + y < 5)
    with pytest.raises(ValueError):
        define_relation(m, parse("x <= y"), ("x",))


def test_sentence_defined_quantifier():
    # "the two slots have equal size" via a counting sentence; the count
    # quantifier compares against an f-value, which tops out at n-1, so
    # the both-slots-full case needs its own disjunct
    phi = parse("((A x. S0(x)) & (A x. S1(x)))"
                " | (E y. ((# x = y. S0(x)) & (# x = y. S1(x))))",
                {"S0": 1, "S1": 1})
    q = Q.quantifier_from_sentence("eqsize", [("S0", 1), ("S1", 1)], phi)
    i = Q.hartig()
    rng = random.Random(2)
    for _ in range(40):
        n = rng.randrange(1, 7)
        rels = [frozenset((a,) for a in range(n) if rng.random() < 0.5)
                for _ in range(2)]
        f = list(range(n))
        rng.shuffle(f)
        assert q.decide(n, rels, f) == i.decide(n, rels, f)


# -- games -------------------------------------------------------------------

def test_ef_chain_thresholds():
    a7, a9 = word_model("a" * 7), word_model("a" * 9)
    assert ef_equivalent(a7, a9, 3)
    assert not ef_equivalent(a7, a9, 4)
    assert ef_equivalent(word_model("a" * 8), word_model("a" * 9), 3)


def test_ef_distinguishes_letters():
    # one round only compares single points; the order flip needs two
    assert ef_equivalent(word_model("ab"), word_model("ba"), 1)
    assert not ef_equivalent(word_model("ab"), word_model("ba"), 2)
    assert ef_equivalent(word_model("ab"), word_model("ab"), 4)


def test_ef_caps():
    big = word_model("a" * 13)
    with pytest.raises(ValueError):
        ef_equivalent(big, big, 2)
    small = word_model("aa")
    with pytest.raises(ValueError):
        ef_equivalent(small, small, 5)


def test_ef_reflexive_symmetric():
    rng = random.Random(21)
    for _ in range(25):
        n1, n2 = rng.randrange(1, 7), rng.randrange(1, 7)
        m1, m2 = fo_model(rng, n1), fo_model(rng, n2)
        r = rng.randrange(0, 3)
        assert ef_equivalent(m1, m1, r)
        assert ef_equivalent(m1, m2, r) == ef_equivalent(m2, m1, r)


def test_ef_respects_low_rank_sentences():
    # if duplicator wins r rounds, rank-<=r sentences cannot separate
    rng = random.Random(8)
    sentences = [parse(s, VOCAB) for s in
                 ["E x. U(x)", "A x. E y. R(x, y)",
                  "E x. (U(x) & A y. x <= y)"]]
    for _ in range(30):
        m1, m2 = fo_model(rng, rng.randrange(1, 6)), fo_model(rng, rng.randrange(1, 6))
        for r in (2, 3):
            if ef_equivalent(m1, m2, r):
                for s in sentences:
                    assert evaluate(m1, s, {}) == evaluate(m2, s, {})
