"""Syntactic transformations: capture-avoiding substitution, guard
relativization, and the translation from first-order logic over a
powerset-membership structure into monadic second-order logic on words."""

from __future__ import annotations

import itertools
from typing import Optional

from .syntax import (And, Atom, BuiltinAtom, Count, Eq, Exists, Forall,
                     Formula, Iff, Imp, Not, Or, QApp, SetAtom, SetExists,
                     SetForall, conj, disj, free_variables, is_set_var)


class _Names:
    """Deterministic fresh-name supply."""

    def __init__(self, prefix: str = "v"):
        self.prefix = prefix
        self.k = 0

    def fresh(self) -> str:
        self.k += 1
        return f"{self.prefix}{self.k}'"


def rename_free(phi: Formula, mapping: dict) -> Formula:
    """Rename free first-order variables; bound occurrences shadow."""
    def go(phi, mp):
        if isinstance(phi, Atom):
            return Atom(phi.name, tuple(mp.get(v, v) for v in phi.args))
        if isinstance(phi, BuiltinAtom):
            return BuiltinAtom(phi.name, tuple(mp.get(v, v) for v in phi.args))
        if isinstance(phi, Eq):
            return Eq(mp.get(phi.left, phi.left), mp.get(phi.right, phi.right))
        if isinstance(phi, SetAtom):
            return SetAtom(phi.setvar, mp.get(phi.arg, phi.arg))
        if isinstance(phi, Not):
            return Not(go(phi.sub, mp))
        if isinstance(phi, (And, Or, Imp, Iff)):
            return type(phi)(go(phi.left, mp), go(phi.right, mp))
        if isinstance(phi, (Exists, Forall)):
            inner = {k: v for k, v in mp.items() if k != phi.var}
            return type(phi)(phi.var, go(phi.sub, inner))
        if isinstance(phi, Count):
            inner = {k: v for k, v in mp.items() if k != phi.var}
            return Count(phi.var, mp.get(phi.target, phi.target),
                         go(phi.sub, inner))
        if isinstance(phi, QApp):
            slots = []
            for vs, sub in phi.slots:
                inner = {k: v for k, v in mp.items() if k not in vs}
                slots.append((vs, go(sub, inner)))
            return QApp(phi.qname, tuple(slots))
        if isinstance(phi, (SetExists, SetForall)):
            return type(phi)(phi.setvar, go(phi.sub, mp))
        raise TypeError(f"not a formula: {phi!r}")
    return go(phi, dict(mapping))


def rename_bound_apart(phi: Formula, avoid: set, names: _Names) -> Formula:
    """Give every binder that clashes with `avoid` a fresh variable."""
    def go(phi, mp):
        if isinstance(phi, (Atom, BuiltinAtom, Eq, SetAtom)):
            return rename_free(phi, mp)
        if isinstance(phi, Not):
            return Not(go(phi.sub, mp))
        if isinstance(phi, (And, Or, Imp, Iff)):
            return type(phi)(go(phi.left, mp), go(phi.right, mp))
        if isinstance(phi, (Exists, Forall, Count)):
            v = phi.var
            mp2 = dict(mp)
            if v in avoid:
                v2 = names.fresh()
                mp2[v] = v2
                v = v2
            else:
                mp2.pop(phi.var, None)
            if isinstance(phi, Count):
                return Count(v, mp.get(phi.target, phi.target),
                             go(phi.sub, mp2))
            return type(phi)(v, go(phi.sub, mp2))
        if isinstance(phi, QApp):
            slots = []
            for vs, sub in phi.slots:
                mp2 = dict(mp)
                new_vs = []
                for v in vs:
                    if v in avoid:
                        v2 = names.fresh()
                        mp2[v] = v2
                        new_vs.append(v2)
                    else:
                        mp2.pop(v, None)
                        new_vs.append(v)
                slots.append((tuple(new_vs), go(sub, mp2)))
            return QApp(phi.qname, tuple(slots))
        if isinstance(phi, (SetExists, SetForall)):
            return type(phi)(phi.setvar, go(phi.sub, mp))
        raise TypeError(f"not a formula: {phi!r}")
    return go(phi, {})


def substitute(phi: Formula, defs: dict) -> Formula:
    """Replace relation atoms by defining formulas.

    `defs` maps relation names to (parameter tuple, body); each occurrence
    R(t1,...,tk) becomes body[parameters := arguments] with the body's
    binders renamed apart first.  Built-in atoms are never substituted.
    """
    names = _Names("s")

    def go(phi):
        if isinstance(phi, Atom) and phi.name in defs:
            params, body = defs[phi.name]
            if len(params) != len(phi.args):
                raise ValueError(
                    f"{phi.name}: definition takes {len(params)} arguments, "
                    f"atom has {len(phi.args)}")
            safe = rename_bound_apart(body, set(phi.args), names)
            return rename_free(safe, dict(zip(params, phi.args)))
        if isinstance(phi, (Atom, BuiltinAtom, Eq, SetAtom)):
            return phi
        if isinstance(phi, Not):
            return Not(go(phi.sub))
        if isinstance(phi, (And, Or, Imp, Iff)):
            return type(phi)(go(phi.left), go(phi.right))
        if isinstance(phi, (Exists, Forall)):
            return type(phi)(phi.var, go(phi.sub))
        if isinstance(phi, Count):
            return Count(phi.var, phi.target, go(phi.sub))
        if isinstance(phi, QApp):
            return QApp(phi.qname, tuple((vs, go(sub)) for vs, sub in phi.slots))
        if isinstance(phi, (SetExists, SetForall)):
            return type(phi)(phi.setvar, go(phi.sub))
        raise TypeError(f"not a formula: {phi!r}")

    return go(phi)


ORDER_BUILTINS = {"le", "lt"}


def relativize_formula(phi: Formula, guard: Formula, var: str,
                       registry: Optional[dict] = None) -> Formula:
    """The guarded version of phi: quantifiers range over the elements
    satisfying `guard` (a formula with the single free variable `var`),
    order atoms pass through unchanged.

    Sound for vocabularies whose only built-ins are order atoms and whose
    generalized quantifiers are universe independent; a registry with
    flags turns violations into errors.
    """
    if free_variables(guard) - {var}:
        raise ValueError("guard may use only the designated variable")
    names = _Names("r")

    def guard_at(t: str) -> Formula:
        safe = rename_bound_apart(guard, {t}, names)
        return rename_free(safe, {var: t})

    def go(phi):
        if isinstance(phi, (Atom, Eq, SetAtom)):
            return phi
        if isinstance(phi, BuiltinAtom):
            if phi.name not in ORDER_BUILTINS:
                raise ValueError(
                    f"built-in {phi.name!r} does not survive relativization")
            return phi
        if isinstance(phi, Not):
            return Not(go(phi.sub))
        if isinstance(phi, (And, Or, Imp, Iff)):
            return type(phi)(go(phi.left), go(phi.right))
        if isinstance(phi, Exists):
            return Exists(phi.var, And(guard_at(phi.var), go(phi.sub)))
        if isinstance(phi, Forall):
            return Forall(phi.var, Imp(guard_at(phi.var), go(phi.sub)))
        if isinstance(phi, QApp):
            if registry is not None:
                q = registry[phi.qname]
                if not q.universe_independent:
                    raise ValueError(
                        f"quantifier {phi.qname!r} is not universe "
                        f"independent; relativization is unsound")
            slots = []
            for vs, sub in phi.slots:
                guarded = conj([guard_at(v) for v in vs] + [go(sub)])
                slots.append((vs, guarded))
            return QApp(phi.qname, tuple(slots))
        raise TypeError(f"cannot relativize {type(phi).__name__}")

    return go(phi)


# ---------------------------------------------------------------------------
# first-order logic on the membership structure -> MSO on words


def _falsum() -> Formula:
    return Exists("z0'", Not(Eq("z0'", "z0'")))


def _verum() -> Formula:
    return Forall("z0'", Eq("z0'", "z0'"))


def _setvar(v: str) -> str:
    return "X_" + v


def _agree_below(x_set: str, y_set: str, z: str, w: str) -> Formula:
    return Forall(w, Imp(BuiltinAtom("lt", (w, z)),
                         Iff(SetAtom(x_set, w), SetAtom(y_set, w))))


def _lex_le(x_set: str, y_set: str, names: _Names) -> Formula:
    """Subset order: equal, or at the first (f-least) difference the left
    side lacks the point.  Matches the generated membership structures,
    where earlier-absent sorts first."""
    z, w = names.fresh(), names.fresh()
    equal = Forall(z, Iff(SetAtom(x_set, z), SetAtom(y_set, z)))
    first_diff = Exists(z, conj([Not(SetAtom(x_set, z)), SetAtom(y_set, z),
                                 _agree_below(x_set, y_set, z, w)]))
    return Or(equal, first_diff)


def mso_translate(phi: Formula, subset_vars: frozenset = frozenset(),
                  membership_rel: str = "E") -> Formula:
    """Translate a first-order formula over the membership vocabulary into
    monadic second-order logic over the bare word.

    Variables in `subset_vars` denote subset-sort elements and become the
    corresponding set variables; set quantification ranges over nonempty
    sets only, mirroring the subset sort.
    """
    names = _Names("m")

    def nonempty(x_set: str) -> Formula:
        z = names.fresh()
        return Exists(z, SetAtom(x_set, z))

    def go(phi, s):
        if isinstance(phi, Eq):
            x, y = phi.left, phi.right
            if x not in s and y not in s:
                return phi
            if x in s and y in s:
                z = names.fresh()
                return Forall(z, Iff(SetAtom(_setvar(x), z),
                                     SetAtom(_setvar(y), z)))
            return _falsum()
        if isinstance(phi, BuiltinAtom):
            if phi.name == "lt":
                x, y = phi.args
                return Not(go(BuiltinAtom("le", (y, x)), s))
            if phi.name != "le":
                raise ValueError(f"cannot translate built-in {phi.name!r}")
            x, y = phi.args
            if x not in s and y not in s:
                return phi
            if x not in s:
                return _verum()
            if y not in s:
                return _falsum()
            return _lex_le(_setvar(x), _setvar(y), names)
        if isinstance(phi, Atom):
            if phi.name != membership_rel:
                raise ValueError(f"unexpected relation {phi.name!r}")
            x, y = phi.args
            if x not in s and y in s:
                return SetAtom(_setvar(y), x)
            return _falsum()
        if isinstance(phi, Not):
            return Not(go(phi.sub, s))
        if isinstance(phi, (And, Or, Imp, Iff)):
            return type(phi)(go(phi.left, s), go(phi.right, s))
        if isinstance(phi, Exists):
            x = phi.var
            point = Exists(x, go(phi.sub, s - {x}))
            as_set = SetExists(_setvar(x),
                               And(nonempty(_setvar(x)), go(phi.sub, s | {x})))
            return Or(point, as_set)
        if isinstance(phi, Forall):
            x = phi.var
            point = Forall(x, go(phi.sub, s - {x}))
            as_set = SetForall(_setvar(x),
                               Imp(nonempty(_setvar(x)), go(phi.sub, s | {x})))
            return And(point, as_set)
        raise TypeError(f"cannot translate {type(phi).__name__}")

    return go(phi, frozenset(subset_vars))
