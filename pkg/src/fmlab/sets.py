"""Exact subsets of the naturals: generators, gap statistics, periodicity
measures and the looseness diagnostics built on top of them.

All membership decisions use exact integer arithmetic; rational exponent
bounds like t >= n^(p/q) are decided by comparing t^q with n^p.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterator, Optional

import numpy as np

VALUE_HORIZON = 2 ** 62
STEP_HORIZON = 10 ** 7

INFINITY = float("inf")


class HorizonExceeded(Exception):
    """Raised when an element search runs past the configured horizon."""


def floor_nth_root(x: int, q: int) -> int:
    """Largest m with m**q <= x, exact."""
    if x < 0 or q < 1:
        raise ValueError("need x >= 0, q >= 1")
    if x in (0, 1) or q == 1:
        return x
    m = int(round(x ** (1.0 / q)))
    while m ** q > x:
        m -= 1
    while (m + 1) ** q <= x:
        m += 1
    return m


def floor_power(x: int, p: int, q: int) -> int:
    """floor(x^(p/q)) = largest m with m**q <= x**p."""
    return floor_nth_root(x ** p, q)


def ceil_power(x: int, p: int, q: int) -> int:
    """ceil(x^(p/q)) = least t with t**q >= x**p."""
    f = floor_power(x, p, q)
    return f if f ** q == x ** p else f + 1


def _prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class NumericalSet:
    """A subset of the naturals given by a generator descriptor.

    `contains` is an exact decision procedure; `iter_elements` yields the
    elements in increasing order (possibly forever).
    """

    def __init__(self, spec: str, contains: Callable[[int], bool],
                 iterate: Callable[[], Iterator[int]], finite: bool = False):
        self.spec = spec
        self._contains = contains
        self._iterate = iterate
        self.finite = finite

    def __repr__(self) -> str:
        return f"NumericalSet({self.spec!r})"

    def contains(self, k: int) -> bool:
        if k < 0:
            return False
        return self._contains(k)

    __contains__ = contains

    def iter_elements(self) -> Iterator[int]:
        return self._iterate()

    def elements_below(self, bound: int) -> list[int]:
        out = []
        for steps, x in enumerate(self.iter_elements()):
            if x >= bound:
                break
            if steps > STEP_HORIZON:
                raise HorizonExceeded(f"more than {STEP_HORIZON} elements below {bound}")
            out.append(x)
        return out

    def char_word(self, bound: int) -> list[int]:
        """Characteristic 0/1 word of the set on [0, bound)."""
        word = [0] * bound
        for m in self.elements_below(bound):
            word[m] = 1
        return word

    def next_above(self, m: int):
        """Least element > m, or None when the set is finite and exhausted."""
        steps = 0
        for x in self.iter_elements():
            steps += 1
            if x > m:
                if x > VALUE_HORIZON:
                    raise HorizonExceeded(f"next element above {m} exceeds value horizon")
                return x
            if steps > STEP_HORIZON:
                raise HorizonExceeded(f"no element above {m} within {STEP_HORIZON} steps")
        if self.finite:
            return None
        raise HorizonExceeded(f"generator {self.spec} exhausted unexpectedly")


def _scan_iterator(contains: Callable[[int], bool]) -> Callable[[], Iterator[int]]:
    def it() -> Iterator[int]:
        for k in itertools.count():
            if contains(k):
                yield k
    return it


def multiples(m: int) -> NumericalSet:
    if m < 1:
        raise ValueError("mult:m needs m >= 1")
    return NumericalSet(f"mult:{m}", lambda k: k % m == 0,
                        lambda: (m * i for i in itertools.count()))


def naturals() -> NumericalSet:
    return multiples(1)


def squares() -> NumericalSet:
    return NumericalSet("sq", lambda k: isqrt(k) ** 2 == k,
                        lambda: (i * i for i in itertools.count()))


def poly_range(coeffs: list[int]) -> NumericalSet:
    """{p(x) : x in N} for p with nonnegative integer coefficients,
    lowest degree first."""
    if not coeffs or any(c < 0 for c in coeffs):
        raise ValueError("poly needs nonnegative coefficients, at least one")
    cs = list(coeffs)

    def p(x: int) -> int:
        acc = 0
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    increasing = any(c > 0 for c in cs[1:])

    def contains(k: int) -> bool:
        if not increasing:
            return k == cs[0]
        lo, hi = 0, 1
        while p(hi) < k:
            hi *= 2
        while lo < hi:
            mid = (lo + hi) // 2
            if p(mid) < k:
                lo = mid + 1
            else:
                hi = mid
        return p(lo) == k

    def iterate() -> Iterator[int]:
        if not increasing:
            yield cs[0]
            return
        prev = None
        for i in itertools.count():
            v = p(i)
            if v != prev:
                yield v
            prev = v

    return NumericalSet("poly:" + ",".join(map(str, cs)), contains, iterate,
                        finite=not increasing)


def floor_power_range(p: int, q: int) -> NumericalSet:
    """{floor(x^(p/q)) : x in N} for a rational exponent p/q > 1."""
    if q < 1 or Fraction(p, q) <= 1:
        raise ValueError("floorpow needs exponent p/q > 1")

    def value(x: int) -> int:
        return floor_power(x, p, q)

    def contains(k: int) -> bool:
        # value() is nondecreasing; binary search an x with value(x) == k.
        lo, hi = 0, 1
        while value(hi) < k:
            hi *= 2
        while lo < hi:
            mid = (lo + hi) // 2
            if value(mid) < k:
                lo = mid + 1
            else:
                hi = mid
        return value(lo) == k

    def iterate() -> Iterator[int]:
        prev = None
        for x in itertools.count():
            v = value(x)
            if v != prev:
                yield v
            prev = v

    return NumericalSet(f"floorpow:{p}/{q}", contains, iterate)


def powers_of_two() -> NumericalSet:
    return NumericalSet("pow2", lambda k: k > 0 and k & (k - 1) == 0,
                        lambda: (2 ** i for i in itertools.count()))


def factorials() -> NumericalSet:
    def contains(k: int) -> bool:
        if k < 1:
            return False
        f, i = 1, 1
        while f < k:
            i += 1
            f *= i
        return f == k

    def iterate() -> Iterator[int]:
        f, i = 1, 1
        yield 1
        while True:
            i += 1
            f *= i
            yield f

    return NumericalSet("fact", contains, iterate)


def primes() -> NumericalSet:
    return NumericalSet("primes", _prime, _scan_iterator(_prime))


def explicit(values) -> NumericalSet:
    vals = sorted(set(values))
    if any(v < 0 for v in vals):
        raise ValueError("explicit sets live in the naturals")
    members = frozenset(vals)
    return NumericalSet("list:" + ",".join(map(str, vals)),
                        lambda k: k in members, lambda: iter(vals), finite=True)


def shifted(c: int, inner: NumericalSet) -> NumericalSet:
    if c < 0:
        raise ValueError("shift amount must be nonnegative")
    return NumericalSet(f"shift:+{c}:{inner.spec}",
                        lambda k: k >= c and inner.contains(k - c),
                        lambda: (x + c for x in inner.iter_elements()),
                        finite=inner.finite)


def complement(inner: NumericalSet) -> NumericalSet:
    def contains(k: int) -> bool:
        return not inner.contains(k)
    return NumericalSet(f"compl:{inner.spec}", contains, _scan_iterator(contains))


def parse_set_spec(text: str) -> NumericalSet:
    """Parse a set-spec string: mult:m, sq, poly:c0,c1,..., floorpow:p/q,
    pow2, fact, primes, list:a,b,c, shift:+c:<spec>, compl:<spec>."""
    text = text.strip()
    if text == "sq":
        return squares()
    if text == "pow2":
        return powers_of_two()
    if text == "fact":
        return factorials()
    if text == "primes":
        return primes()
    if text == "nat":
        return naturals()
    if text.startswith("mult:"):
        return multiples(int(text[5:]))
    if text.startswith("poly:"):
        return poly_range([int(c) for c in text[5:].split(",")])
    if text.startswith("floorpow:"):
        p, q = text[9:].split("/")
        return floor_power_range(int(p), int(q))
    if text.startswith("list:"):
        body = text[5:]
        return explicit([int(v) for v in body.split(",")] if body else [])
    if text.startswith("shift:+"):
        amount, rest = text[7:].split(":", 1)
        return shifted(int(amount), parse_set_spec(rest))
    if text.startswith("compl:"):
        return complement(parse_set_spec(text[6:]))
    raise ValueError(f"unknown set spec {text!r}")


# ---------------------------------------------------------------------------
# gap statistics


def delta(s: NumericalSet, m: int):
    """Gap from m to the next element of s above it; INFINITY when the set is
    finite and m is its maximum."""
    if not s.contains(m):
        raise ValueError(f"{m} is not in {s.spec}")
    nxt = s.next_above(m)
    return INFINITY if nxt is None else nxt - m


def _elements_and_gaps(s: NumericalSet, n: int) -> tuple[list[int], list[int]]:
    """Elements of s below n together with each element's gap to its
    successor, capped at n (only comparisons with t < n are ever made)."""
    elems = s.elements_below(n)
    if not elems:
        return [], []
    gaps = []
    for a, b in zip(elems, elems[1:]):
        gaps.append(min(b - a, n))
    last = elems[-1]
    try:
        nxt = s.next_above(last)
    except HorizonExceeded:
        nxt = None
    gaps.append(n if nxt is None else min(nxt - last, n))
    return elems, gaps


def gamma_s(s: NumericalSet, n: int, t: int) -> int:
    """|{m in s : gap to next element >= t and m + t < n}|."""
    if n < 1 or t < 1:
        raise ValueError("need n, t >= 1")
    elems, gaps = _elements_and_gaps(s, n)
    return sum(1 for m, g in zip(elems, gaps) if g >= t and m + t < n)


def f_omega(s: NumericalSet, n: int) -> tuple[int, int]:
    """Least l such that for some omega with 0 < omega <= l the set is
    periodic with period omega on {i : l-omega <= i <= n-(l-omega)}, together
    with the least such omega at that l.

    For period omega, the constraint pairs are (i, i+omega) with both ends in
    the interval; a violation at i is harmless once a = l - omega exceeds
    min(i, n - omega - i).  So the least workable l for a given omega is
    omega + A(omega) with A(omega) = max over violations of that minimum + 1,
    and f is the minimum of this over omega.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    chi = np.zeros(n + 1, dtype=bool)
    for m in s.elements_below(n + 1):
        chi[m] = True
    best = None
    best_omega = None
    for omega in range(1, n + 2):
        if best is not None and omega >= best:
            break
        diff = chi[: n + 1 - omega] != chi[omega:]
        idx = np.nonzero(diff)[0]
        if idx.size:
            a = int(np.minimum(idx, (n - omega) - idx).max()) + 1
        else:
            a = 0
        total = omega + a
        if best is None or total < best:
            best = total
            best_omega = omega
    return best, best_omega


def is_periodic_on(s: NumericalSet, n: int, l: int, omega: int) -> bool:
    """Direct re-check: is s periodic with period omega on the interval
    {i : l-omega <= i <= n-(l-omega)}?  (Used as an oracle for f_omega.)"""
    if not 0 < omega <= l:
        return False
    a = l - omega
    chi = s.char_word(n + 1)
    for i in range(a, n - a - omega + 1):
        if i < 0 or i + omega > n:
            continue
        if chi[i] != chi[i + omega]:
            return False
    return True


def nonperiodicity_criterion(s: NumericalSet, k: int, l: int,
                             ns: list[int]) -> dict[int, bool]:
    """For each n: whether k * f(n) * omega(n)**l >= n."""
    out = {}
    for n in ns:
        f, omega = f_omega(s, n)
        out[n] = k * f * omega ** l >= n
    return out


def occurrence_set(s: NumericalSet, w: str, bound: int) -> NumericalSet:
    """Positions m < bound where the word w occurs in the characteristic
    sequence of s."""
    if not w or any(c not in "01" for c in w):
        raise ValueError("w must be a nonempty binary word")
    chi = s.char_word(bound + len(w))
    bits = [int(c) for c in w]
    hits = [m for m in range(bound)
            if all(chi[m + i] == b for i, b in enumerate(bits))]
    return explicit(hits)


# ---------------------------------------------------------------------------
# looseness


@dataclass
class LoosenessReport:
    n: int
    epsilon: Fraction
    verdict: str  # "loose-at-n" | "pseudoloose-at-n" | "neither"
    witness_t: Optional[int] = None
    witness_word: Optional[str] = None
    gamma_value: Optional[int] = None
    note: str = ""


def _t_range(n: int, epsilon: Fraction) -> tuple[int, int]:
    p, q = epsilon.numerator, epsilon.denominator
    lo = max(1, ceil_power(n, p, q))
    hi = floor_power(n, q - p, q)
    return lo, hi


def _loose_scan(s: NumericalSet, n: int, epsilon: Fraction):
    """First t in [ceil(n^eps), floor(n^(1-eps))] with t*gamma(n,t) >= eps*n,
    together with the gamma value; None if there is none."""
    p, q = epsilon.numerator, epsilon.denominator
    lo, hi = _t_range(n, epsilon)
    if lo > hi:
        return None
    elems, gaps = _elements_and_gaps(s, n)
    if not elems:
        return None
    ev = np.array(elems, dtype=np.int64)
    gv = np.array(gaps, dtype=np.int64)
    for t in range(lo, hi + 1):
        gamma = int(np.count_nonzero((gv >= t) & (ev < n - t)))
        if q * t * gamma >= p * n:
            return t, gamma
    return None


def loose_at(s: NumericalSet, n: int, epsilon: Fraction) -> LoosenessReport:
    if not 0 < epsilon < 1:
        raise ValueError("need 0 < epsilon < 1")
    lo, hi = _t_range(n, epsilon)
    if lo > hi:
        return LoosenessReport(n, epsilon, "neither", note="empty t-range")
    hit = _loose_scan(s, n, epsilon)
    if hit is None:
        return LoosenessReport(n, epsilon, "neither")
    t, gamma = hit
    return LoosenessReport(n, epsilon, "loose-at-n", witness_t=t,
                           gamma_value=gamma)


def candidate_words(max_len: int) -> list[str]:
    """The word policy for the pseudolooseness scan: "1", all-zero words and
    words with exactly one 1, up to the length cap."""
    words = ["1"]
    for s_len in range(1, max_len + 1):
        words.append("0" * s_len)
        for i in range(s_len):
            w = ["0"] * s_len
            w[i] = "1"
            if "".join(w) != "1":
                words.append("".join(w))
    return words


def pseudoloose_at(s: NumericalSet, n: int, epsilon: Fraction,
                   max_word_len: int = 4) -> LoosenessReport:
    """Scan occurrence sets of candidate words for looseness.  The word
    policy is a deliberate restriction of the all-words condition, so the
    report is flagged policy-limited."""
    if not 0 < epsilon < 1:
        raise ValueError("need 0 < epsilon < 1")
    p, q = epsilon.numerator, epsilon.denominator
    for w in candidate_words(max_word_len):
        if len(w) ** q > n ** (q - p):  # require |w| <= n^(1-eps)
            continue
        t_set = occurrence_set(s, w, n)
        hit = _loose_scan(t_set, n, epsilon)
        if hit is not None:
            t, gamma = hit
            return LoosenessReport(n, epsilon, "pseudoloose-at-n",
                                   witness_t=t, witness_word=w,
                                   gamma_value=gamma, note="policy-limited")
    return LoosenessReport(n, epsilon, "neither", note="policy-limited")


def recheck_report(s: NumericalSet, report: LoosenessReport) -> bool:
    """Re-validate a loose/pseudoloose verdict from its stored witnesses."""
    if report.verdict == "neither":
        return True
    n, eps = report.n, report.epsilon
    p, q = eps.numerator, eps.denominator
    t, w = report.witness_t, report.witness_word
    lo, hi = _t_range(n, eps)
    if not lo <= t <= hi:
        return False
    base = s if report.verdict == "loose-at-n" else occurrence_set(s, w, n)
    gamma = gamma_s(base, n, t)
    return gamma == report.gamma_value and q * t * gamma >= p * n
