import random

import pytest
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from fmlab import arithx, sets
from fmlab.arithx import (check_extension_hypothesis, choose_seed,
                          default_rounds, mu_relation, mu_relation_oracle,
                          mu_step, nu_from_set, pi_extend, pi_trace,
                          seed_multiplication, synthesize_multiplication)
from fmlab.model import (PartialArithModel, full_multiplication,
                         partial_arith, zero_rows)


def random_pm(rng, n, p=0.5, with_zero=True):
    base = sorted(full_multiplication(n))
    picked = {t for t in base if rng.random() < p}
    if with_zero:
        picked |= zero_rows(n)
    return PartialArithModel(n, picked)


def test_mu_formula_parses():
    phi = arithx.mu_formula()
    from fmlab.syntax import free_variables, quantifier_rank
    assert free_variables(phi) == {"x", "y", "z"}
    assert quantifier_rank(phi) == 8


@given(st.integers(2, 8), st.randoms(use_true_random=False))
@settings(max_examples=25, deadline=None)
def test_mu_fast_path_matches_formula(n, rng):
    pm = random_pm(rng, n, p=rng.random(), with_zero=rng.random() < 0.8)
    assert mu_relation(pm) == mu_relation_oracle(pm)


def test_mu_output_is_partial_multiplication():
    rng = random.Random(3)
    for _ in range(20):
        pm = random_pm(rng, rng.randrange(2, 12))
        out = mu_step(pm)
        assert all(a * b == c < out.n for a, b, c in out.mult)
        assert {(b, a, c) for a, b, c in out.mult} == out.mult


@given(st.integers(3, 14), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_extension_round_growth_properties(n, rng):
    pm = random_pm(rng, n, p=rng.random())
    mu = mu_step(pm)
    for a in range(1, n):
        # never shrinks
        assert mu.gamma(a) >= pm.gamma(a)
    for a in range(1, n):
        for b in range(1, n):
            # symmetric reach
            assert (mu.gamma(a) >= b) == (mu.gamma(b) >= a)
    for a in range(1, n):
        for b in range(a + 1, min(a * a + a, n - 1) + 1):
            bound = min(pm.gamma(a) // ((b - 1) // a), (n - 1) // b)
            assert mu.gamma(b) >= bound


@given(st.integers(3, 12), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_extension_round_doubling(n, rng):
    pm = random_pm(rng, n, p=rng.random())
    trace = pi_trace(pm, 3)
    for prev, cur in zip(trace[1:], trace[2:]):
        for a in range(1, n):
            assert cur.gamma(a) >= min(2 * prev.gamma(a), (n - 1) // a)


def test_default_rounds():
    assert default_rounds(2) == 4
    assert default_rounds(3) == 6
    assert default_rounds(4) == 6
    assert default_rounds(5) == 8
    with pytest.raises(ValueError):
        default_rounds(1)


def test_seed_multiplication_shape():
    pm = seed_multiplication(64, 4)
    assert (4, 6, 24) in pm.mult and (6, 4, 24) in pm.mult
    assert pm.gamma(4) >= 6
    with pytest.raises(ValueError):
        seed_multiplication(10, 12)
    with pytest.raises(ValueError):
        seed_multiplication(10, 5, height=3)


def test_hypothesis_check():
    pm = seed_multiplication(64, 4)
    assert check_extension_hypothesis(pm, 3, 4)
    assert not check_extension_hypothesis(pm, 3, 2)   # below n^(1/3)
    assert not check_extension_hypothesis(pm, 3, 60)  # above n^(2/3)/3
    small = PartialArithModel(8, zero_rows(8))
    assert not check_extension_hypothesis(small, 3, 2)  # n < k^2


def test_rectangle_seed_extends_to_full():
    for n in (27, 64):
        a_star, pm = choose_seed(n, 3)
        assert check_extension_hypothesis(pm, 3, a_star)
        final = pi_extend(pm, k=3)
        assert final.is_full()


def test_nu_from_set_square_gaps():
    nu = nu_from_set(sets.squares(), 100, 4)
    # positions 4,9,...,81 have following gaps >= 4
    assert nu.gamma(4) >= 8
    assert (3, 5, 15) in nu.mult
    assert all(a * b == c for a, b, c in nu.mult)


def test_synthesize_multiplication_from_squares():
    res = synthesize_multiplication(sets.squares(), 100, Fraction(1, 3))
    assert res.ok and res.k == 4 and res.final.is_full()
    assert res.t is not None and res.rounds == default_rounds(res.k)


def test_synthesize_needs_wide_enough_scale():
    with pytest.raises(ValueError):
        synthesize_multiplication(sets.squares(), 50, Fraction(1, 3), k=2)
