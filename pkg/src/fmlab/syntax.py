"""Formula AST, concrete grammar, parser and printer.

Conventions: first-order variables start with a lowercase letter, set
variables with an uppercase letter; a leading-uppercase name applied to
arguments is a vocabulary relation if it is declared, otherwise a set
variable.  Built-in atoms are written @le(x,y), @plus(x,y,z), @set:Sq(x),
with x<y / x<=y / x+y=z as sugar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str
    args: tuple


@dataclass(frozen=True)
class BuiltinAtom(Formula):
    name: str
    args: tuple


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class SetAtom(Formula):
    setvar: str
    arg: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    sub: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    sub: Formula


@dataclass(frozen=True)
class Count(Formula):
    """#x=y.sub — the number of witnesses for x equals the value of y."""
    var: str
    target: str
    sub: Formula


@dataclass(frozen=True)
class QApp(Formula):
    """Application of a named generalized quantifier; each slot binds a
    tuple of distinct variables in its own subformula."""
    qname: str
    slots: tuple  # of (vars tuple, Formula)

    def __post_init__(self):
        for vs, _ in self.slots:
            if len(set(vs)) != len(vs):
                raise ValueError(f"slot variables must be distinct: {vs}")


@dataclass(frozen=True)
class SetExists(Formula):
    setvar: str
    sub: Formula


@dataclass(frozen=True)
class SetForall(Formula):
    setvar: str
    sub: Formula


def conj(parts):
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts):
    parts = list(parts)
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def is_set_var(name: str) -> bool:
    return bool(name) and name[0].isupper()


def free_variables(phi: Formula) -> set[str]:
    """Free first-order variables."""
    if isinstance(phi, (Atom, BuiltinAtom)):
        return set(phi.args)
    if isinstance(phi, Eq):
        return {phi.left, phi.right}
    if isinstance(phi, SetAtom):
        return {phi.arg}
    if isinstance(phi, Not):
        return free_variables(phi.sub)
    if isinstance(phi, (And, Or, Imp, Iff)):
        return free_variables(phi.left) | free_variables(phi.right)
    if isinstance(phi, (Exists, Forall)):
        return free_variables(phi.sub) - {phi.var}
    if isinstance(phi, Count):
        return (free_variables(phi.sub) - {phi.var}) | {phi.target}
    if isinstance(phi, QApp):
        out = set()
        for vs, sub in phi.slots:
            out |= free_variables(sub) - set(vs)
        return out
    if isinstance(phi, (SetExists, SetForall)):
        return free_variables(phi.sub)
    raise TypeError(f"not a formula: {phi!r}")


def free_set_variables(phi: Formula) -> set[str]:
    if isinstance(phi, SetAtom):
        return {phi.setvar}
    if isinstance(phi, (Atom, BuiltinAtom, Eq)):
        return set()
    if isinstance(phi, Not):
        return free_set_variables(phi.sub)
    if isinstance(phi, (And, Or, Imp, Iff)):
        return free_set_variables(phi.left) | free_set_variables(phi.right)
    if isinstance(phi, (Exists, Forall, Count)):
        return free_set_variables(phi.sub)
    if isinstance(phi, QApp):
        out = set()
        for _, sub in phi.slots:
            out |= free_set_variables(sub)
        return out
    if isinstance(phi, (SetExists, SetForall)):
        return free_set_variables(phi.sub) - {phi.setvar}
    raise TypeError(f"not a formula: {phi!r}")


def quantifier_rank(phi: Formula) -> int:
    """Nesting depth; every binder (including a generalized-quantifier
    application, whatever its tuple widths) counts one."""
    if isinstance(phi, (Atom, BuiltinAtom, Eq, SetAtom)):
        return 0
    if isinstance(phi, Not):
        return quantifier_rank(phi.sub)
    if isinstance(phi, (And, Or, Imp, Iff)):
        return max(quantifier_rank(phi.left), quantifier_rank(phi.right))
    if isinstance(phi, (Exists, Forall, Count, SetExists, SetForall)):
        return 1 + quantifier_rank(phi.sub)
    if isinstance(phi, QApp):
        return 1 + max(quantifier_rank(sub) for _, sub in phi.slots)
    raise TypeError(f"not a formula: {phi!r}")


def subformulas(phi: Formula):
    yield phi
    if isinstance(phi, Not):
        yield from subformulas(phi.sub)
    elif isinstance(phi, (And, Or, Imp, Iff)):
        yield from subformulas(phi.left)
        yield from subformulas(phi.right)
    elif isinstance(phi, (Exists, Forall, Count, SetExists, SetForall)):
        yield from subformulas(phi.sub)
    elif isinstance(phi, QApp):
        for _, sub in phi.slots:
            yield from subformulas(sub)


# ---------------------------------------------------------------------------
# lexer


TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><->|->|<=|[()\.;:,=<+&|!#@])
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


def tokenize(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append((m.group(), pos))
        pos = m.end()
    out.append(("<eof>", len(text)))
    return out


RESERVED = {"E", "A", "EX", "AX"}


class Parser:
    """Recursive-descent parser.  `vocab` maps relation names to arities
    (None accepts any name); `quants` maps quantifier names to their slot
    arity lists (None accepts any shape)."""

    def __init__(self, text: str, vocab: Optional[dict] = None,
                 quants: Optional[dict] = None):
        self.toks = tokenize(text)
        self.i = 0
        self.vocab = vocab
        self.quants = quants

    def peek(self):
        return self.toks[self.i][0]

    def pos(self):
        return self.toks[self.i][1]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok[0]

    def expect(self, tok):
        if self.peek() != tok:
            raise ParseError(f"expected {tok!r}, found {self.peek()!r}", self.pos())
        return self.next()

    def ident(self):
        tok = self.peek()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok):
            raise ParseError(f"expected a name, found {tok!r}", self.pos())
        return self.next()

    def fo_var(self):
        v = self.ident()
        if is_set_var(v):
            raise ParseError(f"{v!r} is not a first-order variable", self.pos())
        return v

    # precedence chain ------------------------------------------------------

    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        out = self.imp()
        while self.peek() == "<->":
            self.next()
            out = Iff(out, self.imp())
        return out

    def imp(self) -> Formula:
        out = self.or_()
        while self.peek() == "->":
            self.next()
            out = Imp(out, self.or_())
        return out

    def or_(self) -> Formula:
        out = self.and_()
        while self.peek() == "|":
            self.next()
            out = Or(out, self.and_())
        return out

    def and_(self) -> Formula:
        out = self.neg()
        while self.peek() == "&":
            self.next()
            out = And(out, self.neg())
        return out

    def neg(self) -> Formula:
        if self.peek() == "!":
            self.next()
            return Not(self.neg())
        return self.quant_or_prim()

    def quant_or_prim(self) -> Formula:
        tok = self.peek()
        if tok == "#":
            self.next()
            var = self.fo_var()
            self.expect("=")
            target = self.fo_var()
            self.expect(".")
            return Count(var, target, self.neg())
        # `E(`/`A(` is a relation atom: a binder always takes a bare variable
        if tok in ("E", "A") and self.toks[self.i + 1][0] != "(":
            self.next()
            var = self.fo_var()
            self.expect(".")
            body = self.neg()
            return Exists(var, body) if tok == "E" else Forall(var, body)
        if tok in ("EX", "AX") and self.toks[self.i + 1][0] != "(":
            self.next()
            sv = self.ident()
            if not is_set_var(sv):
                raise ParseError(f"{sv!r} is not a set variable", self.pos())
            self.expect(".")
            body = self.neg()
            return SetExists(sv, body) if tok == "EX" else SetForall(sv, body)
        if self.quants is not None and tok in self.quants:
            return self.qapp(self.next())
        if (self.quants is None and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok)
                and tok not in RESERVED and self._looks_like_qapp()):
            return self.qapp(self.next())
        return self.prim()

    def _looks_like_qapp(self) -> bool:
        # with no registry, disambiguate Q(...) from R(...) by the presence
        # of ':' or ';' before the matching close paren, or a varlist+dot
        j = self.i + 1
        if j < len(self.toks) and self.toks[j][0] != "(":
            # `Q x,y. ...` sugar
            depth = 0
            while j < len(self.toks):
                t = self.toks[j][0]
                if t == ".":
                    return True
                if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", t) or t == ",":
                    j += 1
                    continue
                return False
            return False
        depth = 0
        while j < len(self.toks):
            t = self.toks[j][0]
            if t == "(":
                depth += 1
            elif t == ")":
                depth -= 1
                if depth == 0:
                    return False
            elif depth == 1 and t in (":", ";"):
                return True
            j += 1
        return False

    def qapp(self, qname: str) -> Formula:
        if self.peek() == "(":
            self.next()
            slots = [self.slot()]
            while self.peek() == ";":
                self.next()
                slots.append(self.slot())
            self.expect(")")
        else:
            vars_ = [self.fo_var()]
            while self.peek() == ",":
                self.next()
                vars_.append(self.fo_var())
            self.expect(".")
            slots = self.sugared_slots(qname, vars_)
        phi = QApp(qname, tuple(slots))
        self.check_qapp(phi)
        return phi

    def slot(self):
        vars_ = [self.fo_var()]
        while self.peek() == ",":
            self.next()
            vars_.append(self.fo_var())
        self.expect(":")
        return (tuple(vars_), self.formula())

    def sugared_slots(self, qname, vars_):
        # `Q x,y. (phi; psi)` distributes one variable per slot;
        # `Q x,y. phi` is a single slot binding the whole tuple.
        if self.peek() == "(":
            save = self.i
            self.next()
            first = self.formula()
            if self.peek() == ";":
                bodies = [first]
                while self.peek() == ";":
                    self.next()
                    bodies.append(self.formula())
                self.expect(")")
                if len(bodies) != len(vars_):
                    raise ParseError(
                        f"{qname}: {len(vars_)} bound variables for "
                        f"{len(bodies)} slot formulas", self.pos())
                return [((v,), b) for v, b in zip(vars_, bodies)]
            self.i = save
        return [(tuple(vars_), self.neg())]

    def check_qapp(self, phi: QApp):
        if self.quants is None:
            return
        shape = self.quants[phi.qname]
        got = [len(vs) for vs, _ in phi.slots]
        if got != list(shape):
            raise ParseError(
                f"{phi.qname} expects slot arities {list(shape)}, got {got}",
                self.pos())

    def prim(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.next()
            out = self.formula()
            self.expect(")")
            return out
        if tok == "@":
            self.next()
            name = self.ident()
            if self.peek() == ":":
                self.next()
                name = name + ":" + self.ident()
            self.expect("(")
            args = [self.fo_var()]
            while self.peek() == ",":
                self.next()
                args.append(self.fo_var())
            self.expect(")")
            return BuiltinAtom(name, tuple(args))
        name = self.ident()
        if self.peek() == "(":
            self.next()
            args = [self.fo_var()]
            while self.peek() == ",":
                self.next()
                args.append(self.fo_var())
            self.expect(")")
            if self.vocab is not None and name in self.vocab:
                if len(args) != self.vocab[name]:
                    raise ParseError(
                        f"{name} has arity {self.vocab[name]}, got {len(args)}",
                        self.pos())
                return Atom(name, tuple(args))
            if is_set_var(name) and (self.vocab is not None):
                if len(args) != 1:
                    raise ParseError(f"set variable {name} applied to "
                                     f"{len(args)} arguments", self.pos())
                return SetAtom(name, args[0])
            if self.vocab is None:
                if is_set_var(name) and len(args) == 1:
                    # without a vocabulary, a unary uppercase application is
                    # read as a relation atom (the common case); use EX/AX
                    # bound names for set atoms when parsing untyped text
                    return Atom(name, tuple(args))
                return Atom(name, tuple(args))
            raise ParseError(f"unknown relation {name!r}", self.pos())
        # variable-led sugar: x=y, x<y, x<=y, x+y=z
        if is_set_var(name):
            raise ParseError(f"unexpected set variable {name!r}", self.pos())
        nxt = self.peek()
        if nxt == "=":
            self.next()
            return Eq(name, self.fo_var())
        if nxt == "<":
            self.next()
            return BuiltinAtom("lt", (name, self.fo_var()))
        if nxt == "<=":
            self.next()
            return BuiltinAtom("le", (name, self.fo_var()))
        if nxt == "+":
            self.next()
            second = self.fo_var()
            self.expect("=")
            return BuiltinAtom("plus", (name, second, self.fo_var()))
        raise ParseError(f"unexpected token after {name!r}: {nxt!r}", self.pos())


def parse(text: str, vocab: Optional[dict] = None,
          quants: Optional[dict] = None) -> Formula:
    p = Parser(text, vocab, quants)
    out = p.formula()
    if p.peek() != "<eof>":
        raise ParseError(f"trailing input {p.peek()!r}", p.pos())
    return out


# ---------------------------------------------------------------------------
# printer

_LEVEL_IFF, _LEVEL_IMP, _LEVEL_OR, _LEVEL_AND, _LEVEL_NEG = range(5)


def pretty(phi: Formula) -> str:
    """Canonical text; parse(pretty(phi)) is structurally phi."""
    return _pp(phi, _LEVEL_IFF)


def _paren(text: str, need: bool) -> str:
    return f"({text})" if need else text


def _pp(phi: Formula, level: int) -> str:
    if isinstance(phi, Atom):
        return f"{phi.name}({', '.join(phi.args)})"
    if isinstance(phi, BuiltinAtom):
        return f"@{phi.name}({', '.join(phi.args)})"
    if isinstance(phi, Eq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, SetAtom):
        return f"{phi.setvar}({phi.arg})"
    if isinstance(phi, Iff):
        return _paren(f"{_pp(phi.left, _LEVEL_IFF)} <-> {_pp(phi.right, _LEVEL_IMP)}",
                      level > _LEVEL_IFF)
    if isinstance(phi, Imp):
        return _paren(f"{_pp(phi.left, _LEVEL_IMP)} -> {_pp(phi.right, _LEVEL_OR)}",
                      level > _LEVEL_IMP)
    if isinstance(phi, Or):
        return _paren(f"{_pp(phi.left, _LEVEL_OR)} | {_pp(phi.right, _LEVEL_AND)}",
                      level > _LEVEL_OR)
    if isinstance(phi, And):
        return _paren(f"{_pp(phi.left, _LEVEL_AND)} & {_pp(phi.right, _LEVEL_NEG)}",
                      level > _LEVEL_AND)
    if isinstance(phi, Not):
        return f"!{_pp(phi.sub, _LEVEL_NEG)}"
    if isinstance(phi, Exists):
        return f"E {phi.var}. {_pp(phi.sub, _LEVEL_NEG)}"
    if isinstance(phi, Forall):
        return f"A {phi.var}. {_pp(phi.sub, _LEVEL_NEG)}"
    if isinstance(phi, Count):
        return f"# {phi.var} = {phi.target}. {_pp(phi.sub, _LEVEL_NEG)}"
    if isinstance(phi, SetExists):
        return f"EX {phi.setvar}. {_pp(phi.sub, _LEVEL_NEG)}"
    if isinstance(phi, SetForall):
        return f"AX {phi.setvar}. {_pp(phi.sub, _LEVEL_NEG)}"
    if isinstance(phi, QApp):
        slots = "; ".join(f"{', '.join(vs)}: {_pp(sub, _LEVEL_IFF)}"
                          for vs, sub in phi.slots)
        return f"{phi.qname}({slots})"
    raise TypeError(f"not a formula: {phi!r}")
