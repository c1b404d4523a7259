"""Finite relational structures over {0,..,n-1} carrying a permutation f
that interprets built-in numerical relations, plus the special model
families used by the verification suites (word models, powerset membership
structures, partial arithmetic)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from . import sets as setsmod
from .sets import NumericalSet


class BrModel:
    """A structure with domain {0,..,n-1}, named relations, and a
    permutation f (the bijection onto an initial segment of the naturals
    through which built-ins are read)."""

    def __init__(self, n: int, arities: dict[str, int],
                 relations: dict[str, Iterable[tuple]], f=None):
        if n < 1:
            raise ValueError("domain must be nonempty")
        self.n = n
        self.arities = dict(arities)
        if f is None:
            f = tuple(range(n))
        else:
            f = tuple(f)
        if sorted(f) != list(range(n)):
            raise ValueError("f must be a permutation of the domain")
        self.f = f
        rels = {}
        for name, ar in self.arities.items():
            tuples = frozenset(tuple(t) for t in relations.get(name, ()))
            for t in tuples:
                if len(t) != ar:
                    raise ValueError(f"tuple {t} does not match arity {ar} of {name}")
                if any(not (0 <= x < n) for x in t):
                    raise ValueError(f"tuple {t} outside domain of size {n}")
            rels[name] = tuples
        extra = set(relations) - set(self.arities)
        if extra:
            raise ValueError(f"relations without declared arity: {sorted(extra)}")
        self.rels = rels

    def __eq__(self, other):
        return (isinstance(other, BrModel) and self.n == other.n
                and self.f == other.f and self.arities == other.arities
                and self.rels == other.rels)

    def __hash__(self):
        return hash((self.n, self.f, tuple(sorted(self.rels.items()))))

    def __repr__(self):
        return f"BrModel(n={self.n}, rels={sorted(self.rels)})"

    def f_inverse(self) -> tuple:
        inv = [0] * self.n
        for a, v in enumerate(self.f):
            inv[v] = a
        return tuple(inv)

    def domain_in_f_order(self) -> list[int]:
        """Domain elements sorted by their f-value."""
        return sorted(range(self.n), key=lambda a: self.f[a])

    def with_relations(self, extra: dict[str, Iterable[tuple]],
                       arities: dict[str, int]) -> "BrModel":
        ar = dict(self.arities)
        ar.update(arities)
        rels = {k: v for k, v in self.rels.items()}
        rels.update(extra)
        return BrModel(self.n, ar, rels, self.f)


@dataclass(frozen=True)
class NumericalRelation:
    """A fixed relation on the naturals usable as a built-in."""
    name: str
    arity: int
    holds: Callable[..., bool]

    def eval_on(self, m: BrModel, tup: tuple) -> bool:
        if len(tup) != self.arity:
            raise ValueError(f"{self.name} expects {self.arity} arguments")
        return bool(self.holds(*(m.f[a] for a in tup)))


def _bit(x: int, y: int) -> bool:
    # bit y of x
    return (x >> y) & 1 == 1


def builtin_registry(set_registry: Optional[dict[str, NumericalSet]] = None
                     ) -> dict[str, NumericalRelation]:
    """The standard built-ins; `set:<id>` names resolve through the given
    set registry (or the set-spec grammar as a fallback)."""
    regs = {
        "le": NumericalRelation("le", 2, lambda x, y: x <= y),
        "lt": NumericalRelation("lt", 2, lambda x, y: x < y),
        "plus": NumericalRelation("plus", 3, lambda x, y, z: x + y == z),
        "times": NumericalRelation("times", 3, lambda x, y, z: x * y == z),
        "bit": NumericalRelation("bit", 2, _bit),
    }
    set_registry = dict(set_registry or {})

    class _Registry(dict):
        def __missing__(self, key):
            if key.startswith("set:"):
                ident = key[4:]
                s = set_registry.get(ident)
                if s is None:
                    s = setsmod.parse_set_spec(ident)
                rel = NumericalRelation(key, 1, s.contains)
                self[key] = rel
                return rel
            raise KeyError(key)

    out = _Registry()
    out.update(regs)
    return out


def builtin_eval(rel: NumericalRelation, m: BrModel, tup: tuple) -> bool:
    return rel.eval_on(m, tup)


def relativize(m: BrModel, universe) -> tuple[BrModel, dict[int, int]]:
    """Substructure on `universe` with the order-collapsed permutation:
    f_U(a) <= f_U(b) iff f(a) <= f(b).  Returns the model and the
    old-element -> new-element mapping."""
    u = sorted(set(universe))
    if not u:
        raise ValueError("cannot relativize to the empty set")
    if any(not (0 <= a < m.n) for a in u):
        raise ValueError("universe not within the domain")
    idx = {a: i for i, a in enumerate(u)}
    by_f = sorted(u, key=lambda a: m.f[a])
    new_f = [0] * len(u)
    for rank, a in enumerate(by_f):
        new_f[idx[a]] = rank
    rels = {}
    for name, tuples in m.rels.items():
        rels[name] = {tuple(idx[x] for x in t) for t in tuples
                      if all(x in idx for x in t)}
    return BrModel(len(u), m.arities, rels, new_f), idx


def br_isomorphic(m1: BrModel, m2: BrModel) -> bool:
    """The permutation condition forces the only candidate isomorphism
    h = g^-1 . f; check that it preserves all relations both ways."""
    if m1.arities != m2.arities:
        raise ValueError("vocabulary mismatch")
    if m1.n != m2.n:
        return False
    g_inv = m2.f_inverse()
    h = tuple(g_inv[m1.f[a]] for a in range(m1.n))
    for name, tuples in m1.rels.items():
        mapped = {tuple(h[x] for x in t) for t in tuples}
        if mapped != m2.rels[name]:
            return False
    return True


PADDING_SEARCH_CAP = 16


def is_padding(small: BrModel, big: BrModel, witness=None
               ) -> tuple[bool, Optional[frozenset]]:
    """Is `big` a padding of `small`: some U with big|U isomorphic to small
    and every relation of big contained in U?  Exhaustive search over U up
    to the size cap; above it a candidate witness must be supplied."""
    if small.arities != big.arities:
        raise ValueError("vocabulary mismatch")
    support = {x for tuples in big.rels.values() for t in tuples for x in t}

    def check(u) -> bool:
        if not support <= set(u) or len(u) != small.n:
            return False
        sub, _ = relativize(big, u)
        return br_isomorphic(small, sub)

    if witness is not None:
        w = frozenset(witness)
        return (True, w) if check(w) else (False, None)
    if big.n > PADDING_SEARCH_CAP:
        raise ValueError(f"domain above the search cap {PADDING_SEARCH_CAP}; "
                         "supply a witness")
    if len(support) > small.n:
        return False, None
    rest = sorted(set(range(big.n)) - support)
    for extra in itertools.combinations(rest, small.n - len(support)):
        u = frozenset(support | set(extra))
        if check(u):
            return True, u
    return False, None


def word_model(w: str, alphabet=None) -> BrModel:
    """The word as a structure: position i carries the unary letter
    predicate P_<letter>; f is the identity (reading order)."""
    if not w:
        raise ValueError("empty word")
    letters = list(alphabet) if alphabet is not None else sorted(set(w))
    if set(w) - set(letters):
        raise ValueError("word uses letters outside the alphabet")
    arities = {f"P_{a}": 1 for a in letters}
    rels = {f"P_{a}": {(i,) for i, c in enumerate(w) if c == a} for a in letters}
    return BrModel(len(w), arities, rels)


def model_word(m: BrModel, letters) -> Optional[str]:
    """Read the word encoded by unary slots back off a model: positions in
    f-order, each carrying exactly one letter.  None if the slots do not
    partition the domain."""
    out = []
    rels = [m.rels[f"P_{a}"] for a in letters]
    for a in m.domain_in_f_order():
        hits = [c for c, r in zip(letters, rels) if (a,) in r]
        if len(hits) != 1:
            return None
        out.append(hits[0])
    return "".join(out)


POWERSET_CAP = 5


def powerset_structure(k: int, cap: int = POWERSET_CAP) -> BrModel:
    """k atom points followed by the 2^k-1 nonempty subsets in lexicographic
    order (atom 0 most significant); E relates each atom to the subsets
    containing it."""
    if not 1 <= k <= cap:
        raise ValueError(f"k must be in 1..{cap}")
    subsets = sorted((tuple(1 if i in s else 0 for i in range(k))
                      for r in range(1, k + 1)
                      for s in map(frozenset, itertools.combinations(range(k), r))),
                     )
    edges = set()
    for j, bits in enumerate(subsets):
        for i, b in enumerate(bits):
            if b:
                edges.add((i, k + j))
    return BrModel(k + 2 ** k - 1, {"E": 2}, {"E": edges})


# ---------------------------------------------------------------------------
# partial arithmetic


class PartialArithModel:
    """Domain size n with full restricted addition (derived) and a partial
    multiplication relation (every triple satisfies a*b = c < n)."""

    def __init__(self, n: int, mult: Iterable[tuple]):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        m = frozenset(tuple(t) for t in mult)
        bad = [t for t in m
               if len(t) != 3 or any(not 0 <= x < n for x in t) or t[0] * t[1] != t[2]]
        if bad:
            raise ValueError(f"seed tuples violate a*b=c<n: {sorted(bad)[:10]}")
        self.mult = m

    def __eq__(self, other):
        return (isinstance(other, PartialArithModel)
                and self.n == other.n and self.mult == other.mult)

    def __repr__(self):
        return f"PartialArithModel(n={self.n}, |M|={len(self.mult)})"

    def add_contains(self, a: int, b: int, c: int) -> bool:
        return 0 <= a and 0 <= b and a + b == c < self.n

    def addition_triples(self):
        for a in range(self.n):
            for b in range(self.n - a):
                yield (a, b, a + b)

    def gamma(self, k: int) -> int:
        return gamma_control(self.mult, k)

    def is_full(self) -> bool:
        return self.mult == frozenset(full_multiplication(self.n))

    def as_br_model(self) -> BrModel:
        return BrModel(self.n, {"A": 3, "M": 3},
                       {"A": set(self.addition_triples()), "M": self.mult})


def full_multiplication(n: int) -> set[tuple]:
    return {(a, b, a * b) for a in range(n) for b in range(n) if a * b < n}


def zero_rows(n: int) -> set[tuple]:
    return {(a, 0, 0) for a in range(n)} | {(0, b, 0) for b in range(n)}


def partial_arith(n: int, seed: Iterable[tuple],
                  close_commutative: bool = False,
                  add_zero_rows: bool = False) -> PartialArithModel:
    m = set(tuple(t) for t in seed)
    if close_commutative:
        m |= {(b, a, c) for a, b, c in m}
    if add_zero_rows:
        m |= zero_rows(n)
    return PartialArithModel(n, m)


def gamma_control(mult: frozenset, k: int) -> int:
    """Biggest r with r=0 or (a,b,ab) present for every a<=k, b<=r.
    Zero products count: the b=0 column (and a=0 row) must be present for
    r >= 1."""
    if any((a, 0, 0) not in mult for a in range(k + 1)):
        return 0
    r = 0
    while True:
        b = r + 1
        if all((a, b, a * b) in mult for a in range(k + 1)):
            r = b
        else:
            return r


# ---------------------------------------------------------------------------
# model file format


def parse_model(text: str) -> BrModel:
    """Line format: `model` / `n <int>` / optional `f <images>` /
    `rel <name> <arity> : (t) (t) ...` / `end`.  Unary tuples may omit
    parentheses."""
    lines = [ln.strip() for ln in text.splitlines()
             if ln.strip() and not ln.strip().startswith("#")]
    if not lines or lines[0] != "model" or lines[-1] != "end":
        raise ValueError("model file must be bracketed by 'model' and 'end'")
    n = None
    f = None
    arities: dict[str, int] = {}
    rels: dict[str, set] = {}
    for ln in lines[1:-1]:
        parts = ln.split()
        if parts[0] == "n":
            n = int(parts[1])
        elif parts[0] == "f":
            f = [int(x) for x in parts[1:]]
        elif parts[0] == "rel":
            name, ar = parts[1], int(parts[2])
            if ":" not in ln:
                raise ValueError(f"missing ':' in relation line {ln!r}")
            body = ln.split(":", 1)[1]
            tuples = set()
            if ar == 1 and "(" not in body:
                tuples = {(int(tok),) for tok in body.split()}
            else:
                depth = 0
                cur = ""
                for ch in body:
                    if ch == "(":
                        depth += 1
                        cur = ""
                    elif ch == ")":
                        depth -= 1
                        if depth < 0:
                            raise ValueError(f"unbalanced parens in {ln!r}")
                        tuples.add(tuple(int(tok) for tok in
                                         cur.replace(",", " ").split()))
                    elif depth:
                        cur += ch
                    elif ch not in " \t":
                        raise ValueError(f"stray token in tuple list of {ln!r}")
                if depth:
                    raise ValueError(f"unbalanced parens in {ln!r}")
            arities[name] = ar
            rels[name] = tuples
        else:
            raise ValueError(f"unknown model line {ln!r}")
    if n is None:
        raise ValueError("model file missing size line 'n <int>'")
    return BrModel(n, arities, rels, f)


def format_model(m: BrModel) -> str:
    out = ["model", f"n {m.n}"]
    if m.f != tuple(range(m.n)):
        out.append("f " + " ".join(map(str, m.f)))
    for name in sorted(m.rels):
        tuples = " ".join("(" + " ".join(map(str, t)) + ")"
                          for t in sorted(m.rels[name]))
        out.append(f"rel {name} {m.arities[name]} : {tuples}".rstrip())
    out.append("end")
    return "\n".join(out) + "\n"
