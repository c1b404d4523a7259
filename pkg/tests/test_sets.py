from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fmlab import sets
from fmlab.sets import (INFINITY, delta, f_omega, gamma_s, is_periodic_on,
                        loose_at, nonperiodicity_criterion, occurrence_set,
                        parse_set_spec, pseudoloose_at, recheck_report)


Sq = sets.squares()
E = sets.powers_of_two()
F = sets.factorials()
Nat = sets.naturals()


def some_sets():
    return [Sq, E, F, Nat, sets.multiples(3), sets.primes(),
            sets.poly_range([0, 1, 1]), sets.floor_power_range(3, 2)]


def test_delta_examples():
    assert delta(Sq, 4) == 5
    assert delta(sets.explicit([0]), 0) == INFINITY
    assert delta(F, 6) == 18
    with pytest.raises(ValueError):
        delta(Sq, 5)


def test_gamma_examples():
    assert gamma_s(Sq, 30, 3) == 5
    assert gamma_s(Nat, 50, 2) == 0
    assert gamma_s(E, 100, 10) == 3


def gamma_oracle(s, n, t):
    # direct definition, element by element
    count = 0
    for m in s.elements_below(n):
        if m + t < n and s.next_above(m) - m >= t:
            count += 1
    return count


@given(st.integers(0, 7), st.integers(2, 80), st.integers(1, 12))
def test_gamma_matches_oracle(which, n, t):
    s = some_sets()[which]
    assert gamma_s(s, n, t) == gamma_oracle(s, n, t)


@given(st.integers(0, 7), st.integers(2, 80), st.integers(1, 12), st.integers(0, 5))
def test_gamma_nonincreasing_in_t(which, n, t, dt):
    s = some_sets()[which]
    assert gamma_s(s, n, t + dt) <= gamma_s(s, n, t)


def test_f_omega_examples():
    assert f_omega(F, 23) == (8, 1)
    assert f_omega(Nat, 10) == (1, 1)
    f18, _ = f_omega(E, 18)
    assert f18 >= 2


@given(st.integers(0, 7), st.integers(2, 40))
@settings(max_examples=60)
def test_f_omega_against_definition(which, n):
    s = some_sets()[which]
    f, omega = f_omega(s, n)
    assert 0 < omega <= f
    assert is_periodic_on(s, n, f, omega)
    # no smaller l works with any omega
    for l in range(1, f):
        assert not any(is_periodic_on(s, n, l, w) for w in range(1, l + 1))
    # omega is least at l = f
    for w in range(1, omega):
        assert not is_periodic_on(s, n, f, w)


def test_nonperiodicity_criterion_examples():
    assert nonperiodicity_criterion(Sq, 5, 0, [100])[100] is True
    assert nonperiodicity_criterion(F, 1, 5, [23])[23] is False
    assert nonperiodicity_criterion(Nat, 1, 0, [1])[1] is True


def test_occurrence_set_examples():
    assert occurrence_set(Sq, "1", 20).elements_below(20) == [0, 1, 4, 9, 16]
    assert occurrence_set(Sq, "10", 10).elements_below(10) == [1, 4, 9]
    assert occurrence_set(sets.explicit([]), "0", 3).elements_below(3) == [0, 1, 2]


@given(st.integers(0, 7), st.integers(1, 40))
def test_delta_next_element_invariant(which, bound):
    s = some_sets()[which]
    for m in s.elements_below(bound):
        d = delta(s, m)
        if d is not INFINITY:
            assert s.contains(m + d)
            assert not any(s.contains(k) for k in range(m + 1, m + d))


# -- estimates tying gamma to the periodicity measures ----------------------

@given(st.integers(0, 7), st.integers(4, 60), st.integers(1, 10))
@settings(max_examples=80)
def test_gap_count_periodicity_estimate(which, n, t):
    # t*(gamma(n,t)-1) <= 2*f(n) or t <= omega(n)
    s = some_sets()[which]
    f, omega = f_omega(s, n)
    assert t * (gamma_s(s, n, t) - 1) <= 2 * f or t <= omega


@given(st.integers(0, 7), st.integers(4, 60),
       st.lists(st.integers(0, 1), min_size=1, max_size=3))
@settings(max_examples=80)
def test_occurrence_set_periodicity_estimate(which, n, wbits):
    # f_T(n) <= f_S(n)+|w|, and omega_T(n) <= omega_S(n) when 3f+3|w| <= n
    s = some_sets()[which]
    w = "".join(map(str, wbits))
    t_set = occurrence_set(s, w, n + len(w) + 2)
    f_s, om_s = f_omega(s, n)
    f_t, om_t = f_omega(t_set, n)
    assert f_t <= f_s + len(w)
    if 3 * f_s + 3 * len(w) <= n:
        assert om_t <= om_s


# -- looseness --------------------------------------------------------------

def test_loose_examples():
    r = loose_at(Sq, 10 ** 4, Fraction(1, 10))
    assert r.verdict == "loose-at-n"
    assert recheck_report(Sq, r)
    assert loose_at(Nat, 100, Fraction(1, 2)).verdict == "neither"


def test_powers_of_two_loose_at_4096_boundary():
    # Literal reading of the definition: t=256 gives gamma=4 and
    # t*gamma = 1024 = eps*n exactly, so the verdict is loose.  The
    # "sufficiently large n" bound that would rule this out only kicks in
    # far above n=4096.
    r = loose_at(E, 4096, Fraction(1, 4))
    assert r.verdict == "loose-at-n"
    assert r.witness_t == 256 and r.gamma_value == 4
    assert recheck_report(E, r)


def test_pseudoloose_examples():
    r = pseudoloose_at(Sq, 10 ** 4, Fraction(1, 10))
    assert r.verdict == "pseudoloose-at-n" and r.witness_word == "1"
    r2 = pseudoloose_at(sets.complement(Sq), 10 ** 4, Fraction(1, 20))
    assert r2.verdict == "pseudoloose-at-n"
    assert r2.note == "policy-limited"
    assert recheck_report(sets.complement(Sq), r2)


small_eps = st.integers(2, 12).flatmap(
    lambda q: st.integers(1, q - 1).map(lambda p: Fraction(p, q)))


@given(st.integers(0, 7), st.integers(10, 200), small_eps)
@settings(max_examples=60)
def test_loose_reports_revalidate(which, n, eps):
    s = some_sets()[which]
    assert recheck_report(s, loose_at(s, n, eps))
    assert recheck_report(s, pseudoloose_at(s, n, eps, max_word_len=2))


# -- specs and membership ---------------------------------------------------

@given(st.integers(0, 7), st.integers(1, 60))
def test_membership_agrees_with_enumeration(which, bound):
    s = some_sets()[which]
    listed = s.elements_below(bound)
    assert listed == [k for k in range(bound) if s.contains(k)]
    assert listed == sorted(set(listed))


def test_spec_round_trip():
    for text in ["sq", "pow2", "fact", "primes", "mult:4", "poly:0,1,1",
                 "floorpow:3/2", "list:1,2,6", "shift:+2:sq", "compl:sq"]:
        s = parse_set_spec(text)
        assert s.spec == text
        s2 = parse_set_spec(s.spec)
        assert s2.elements_below(50) == s.elements_below(50)


def test_floor_power_range():
    s = parse_set_spec("floorpow:3/2")
    # floor(x^1.5) for x = 0..5: 0,1,2,5,8,11
    for v in [0, 1, 2, 5, 8, 11]:
        assert s.contains(v)
    assert not s.contains(3) and not s.contains(4)
    assert s.elements_below(12) == [0, 1, 2, 5, 8, 11]
