"""Growing a partial multiplication into the full one.

The engine of the arithmetic side of the workbench: a single extension
round (`mu_step`) combines known products through addition, iterating it
(`pi_extend`) recovers multiplication on the whole domain whenever the
start relation is wide enough (`check_extension_hypothesis`).  Sparse
sets with large gaps supply such start relations (`nu_from_set`), and
`synthesize_multiplication` chains the pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import (BrModel, PartialArithModel, full_multiplication,
                    partial_arith, zero_rows)
from .sets import NumericalSet, occurrence_set
from .syntax import Formula, parse

ARITH_VOCAB = {"A": 3, "M": 3}

MU_TEXT = """
E t. E t1'. E u. E u1'. E v. E v1'. (
  M(u, {y}, v) & M(u1', {y}, v1')
  & (E s. E s1'. (M(t, u, s) & M(t1', u1', s1') & A(s, s1', {x})))
  & (E s. E s1'. (M(t, v, s) & M(t1', v1', s1') & A(s, s1', {z}))))
"""


def mu_formula() -> Formula:
    """The one-round extension formula: z is a known product of x and y
    combined through the two-term decompositions x = tu + t'u' and
    z = t(uy) + t'(u'y)."""
    half = lambda x, y, z: MU_TEXT.format(x=x, y=y, z=z)
    return parse(f"({half('x', 'y', 'z')}) | ({half('y', 'x', 'z')})",
                 ARITH_VOCAB)


def mu_relation_oracle(pm: PartialArithModel, cap: int = 14) -> frozenset:
    """Direct evaluation of the extension formula; small domains only."""
    from .evaluator import define_relation
    if pm.n > cap:
        raise ValueError(f"oracle evaluation capped at n <= {cap}")
    return define_relation(pm.as_br_model(), mu_formula(), ("x", "y", "z"))


def _half_round(n: int, mult: frozenset) -> set:
    """Tuples (x, y, xy) with x = tu + t'u' over pairs usable at y."""
    out = set()
    limit = (1 << n) - 1
    for y in range(n):
        vals = set()
        for t, u, tu in mult:
            uy = u * y
            if uy < n and (u, y, uy) in mult and tu * y < n \
                    and (t, uy, tu * y) in mult:
                vals.add(tu)
        if not vals:
            continue
        mask = 0
        for v in vals:
            mask |= 1 << v
        sums = 0
        for v in vals:
            sums |= mask << v
        sums &= limit
        x = 0
        while sums:
            if sums & 1 and x * y < n:
                out.add((x, y, x * y))
            sums >>= 1
            x += 1
    return out


def mu_relation(pm: PartialArithModel) -> frozenset:
    half = _half_round(pm.n, pm.mult)
    return frozenset(half | {(y, x, z) for x, y, z in half})


def mu_step(pm: PartialArithModel) -> PartialArithModel:
    return PartialArithModel(pm.n, mu_relation(pm))


def default_rounds(k: int) -> int:
    if k < 2:
        raise ValueError("k must be at least 2")
    return 2 * math.ceil(math.log2(k)) + 2


def pi_extend(pm: PartialArithModel, k: Optional[int] = None,
              rounds: Optional[int] = None) -> PartialArithModel:
    """Iterate the extension round; the default count suffices under the
    width hypothesis."""
    if rounds is None:
        if k is None:
            raise ValueError("give k or an explicit round count")
        rounds = default_rounds(k)
    for _ in range(rounds):
        pm = mu_step(pm)
    return pm


def pi_trace(pm: PartialArithModel, rounds: int) -> list:
    """The iterates [pm, mu(pm), mu^2(pm), ...] for property checks."""
    out = [pm]
    for _ in range(rounds):
        out.append(mu_step(out[-1]))
    return out


def check_extension_hypothesis(pm: PartialArithModel, k: int,
                               a_star: int) -> bool:
    """Exact check of the width hypothesis: n >= k^2,
    n^(1/k) <= a* <= n^(1-1/k)/k and k * a* * gamma(M, a*) >= n."""
    n = pm.n
    if k < 2 or n < k * k or not 0 < a_star < n:
        return False
    if a_star ** k < n:
        return False
    if (k * a_star) ** k > n ** (k - 1):
        return False
    return k * a_star * pm.gamma(a_star) >= n


# ---------------------------------------------------------------------------
# start relations


def seed_multiplication(n: int, a_star: int, height: Optional[int] = None,
                        commutative: bool = True) -> PartialArithModel:
    """Zero rows plus the complete product rectangle [0..a*] x [0..height];
    the default height makes the k=3 width hypothesis hold."""
    if not 1 <= a_star < n:
        raise ValueError("a_star out of range")
    if height is None:
        height = -(-n // (3 * a_star))
    if a_star * height >= n:
        raise ValueError("rectangle does not fit below n")
    triples = set(zero_rows(n))
    for a in range(1, a_star + 1):
        for b in range(1, height + 1):
            triples.add((a, b, a * b))
    return partial_arith(n, triples, close_commutative=commutative)


def choose_seed(n: int, k: int = 3):
    """A start relation and witness satisfying the width hypothesis, if
    one of the rectangle seeds does; returns (a_star, model)."""
    lo = math.ceil(n ** (1 / k))
    while lo ** k < n:
        lo += 1
    hi = n
    for a_star in range(lo, hi):
        if (k * a_star) ** k > n ** (k - 1):
            break
        try:
            pm = seed_multiplication(n, a_star)
        except ValueError:
            continue
        if check_extension_hypothesis(pm, k, a_star):
            return a_star, pm
    raise ValueError(f"no rectangle seed fits n={n}, k={k}")


def nu_from_set(s: NumericalSet, n: int, t: int,
                word: str = "1") -> PartialArithModel:
    """Products read off the gap structure of a sparse set: positions of
    `word` in the characteristic sequence whose following gap is at least
    t carry disjoint length-a intervals, so counting their union
    multiplies a <= t by b <= (number of such positions)."""
    if t < 1:
        raise ValueError("t must be positive")
    s_len = len(word)
    occ = occurrence_set(s, word, n)
    members = occ.elements_below(max(n - s_len - t + 1, 0))
    prime = []
    for m in members:
        nxt = occ.next_above(m)
        if (nxt is None or nxt - m >= t) and m + t < n:
            prime.append(m)
    width = len(prime)
    triples = set(zero_rows(n))
    for a in range(1, t + 1):
        for b in range(1, width + 1):
            if a * b >= n:
                break
            triples.add((a, b, a * b))
    return partial_arith(n, triples, close_commutative=True)


@dataclass
class SynthesisResult:
    ok: bool
    n: int
    k: int
    t: Optional[int]
    word: str
    rounds: int
    start: Optional[PartialArithModel]
    final: Optional[PartialArithModel]
    note: str = ""


def synthesize_multiplication(s: NumericalSet, n: int, eps: Fraction,
                              k: Optional[int] = None,
                              word: str = "1") -> SynthesisResult:
    """From a set loose at scale eps to full multiplication on n points:
    pick k with k * eps > 1, find a workable t, build the start relation
    and iterate the extension rounds."""
    if k is None:
        k = int(1 / eps) + 1
    if k * eps <= 1:
        raise ValueError("need k * eps > 1")
    rounds = default_rounds(k)
    lo = math.ceil(n ** (1 / k))
    while lo ** k < n:
        lo += 1
    for t in range(lo, n):
        if (k * t) ** k > n ** (k - 1):
            break
        start = nu_from_set(s, n, t, word)
        if check_extension_hypothesis(start, k, t):
            final = pi_extend(start, rounds=rounds)
            ok = final.is_full()
            return SynthesisResult(ok, n, k, t, word, rounds, start, final,
                                   "" if ok else "extension fell short")
    return SynthesisResult(False, n, k, None, word, rounds, None, None,
                           "no admissible width witness")
