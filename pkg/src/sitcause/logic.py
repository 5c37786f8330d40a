"""Terms, situation-suppressed state formulas and finite-model semantics.

Formulas never mention situations: a fluent atom is read at whatever state
it is evaluated in, so every formula here is uniform by construction.
Quantifiers range over the object sorts of a finite, closed-world model.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Union

from .errors import SortMismatch, UnboundVariable, UnknownSymbol

ACTION = "action"


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Action:
    """An action function application; ground when every argument is a Const."""

    name: str
    args: tuple = ()

    @property
    def sort(self) -> str:
        return ACTION

    @property
    def is_ground(self) -> bool:
        return all(isinstance(a, Const) for a in self.args)

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


Term = Union[Var, Const, Action]
GroundAction = Action


def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t])
    if isinstance(t, Action):
        out: frozenset = frozenset()
        for a in t.args:
            out |= term_vars(a)
        return out
    return frozenset()


def substitute_term(t: Term, b: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        if t.name not in b:
            return t
        new = b[t.name]
        if new.sort != t.sort:
            raise SortMismatch(f"cannot bind {t.name}:{t.sort} to {new} of sort {new.sort}")
        return new
    if isinstance(t, Action):
        return Action(t.name, tuple(substitute_term(a, b) for a in t.args))
    return t


# ---------------------------------------------------------------------------
# formulas


class Formula:
    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "TRUE"


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self) -> str:
        return "FALSE"


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class Atom(Formula):
    """Fluent atom when ``fluent`` is set, static (rigid) atom otherwise."""

    name: str
    args: tuple = ()
    fluent: bool = True

    @property
    def is_ground(self) -> bool:
        return all(not term_vars(a) for a in self.args)


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: Var
    body: Formula


Quantifier = (Forall, Exists)


def conj(*fs: Formula) -> Formula:
    if not fs:
        return TRUE
    return fs[0] if len(fs) == 1 else And(tuple(fs))


def disj(*fs: Formula) -> Formula:
    if not fs:
        return FALSE
    return fs[0] if len(fs) == 1 else Or(tuple(fs))


def neq(left: Term, right: Term) -> Formula:
    return Not(Eq(left, right))


def free_vars(phi: Formula) -> frozenset:
    """Free variables of ``phi`` as a set of :class:`Var`."""
    if isinstance(phi, Atom):
        out: frozenset = frozenset()
        for a in phi.args:
            out |= term_vars(a)
        return out
    if isinstance(phi, Eq):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Not):
        return free_vars(phi.arg)
    if isinstance(phi, (And, Or)):
        out = frozenset()
        for a in phi.args:
            out |= free_vars(a)
        return out
    if isinstance(phi, (Implies, Iff)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Quantifier):
        return frozenset(v for v in free_vars(phi.body) if v.name != phi.var.name)
    return frozenset()


def _names(vs: Iterable[Var]) -> set:
    return {v.name for v in vs}


def _fresh(base: str, avoid: set) -> str:
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def substitute(phi: Formula, b: Mapping[str, Term]) -> Formula:
    """Capture-avoiding replacement of free variables by the terms in ``b``."""
    if not b:
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.name, tuple(substitute_term(a, b) for a in phi.args), phi.fluent)
    if isinstance(phi, Eq):
        return Eq(substitute_term(phi.left, b), substitute_term(phi.right, b))
    if isinstance(phi, Not):
        return Not(substitute(phi.arg, b))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(substitute(a, b) for a in phi.args))
    if isinstance(phi, (Implies, Iff)):
        return type(phi)(substitute(phi.left, b), substitute(phi.right, b))
    if isinstance(phi, Quantifier):
        v, body = phi.var, phi.body
        body_free = _names(free_vars(body))
        inner = {k: t for k, t in b.items() if k != v.name and k in body_free}
        if not inner:
            return phi
        incoming = set()
        for t in inner.values():
            incoming |= _names(term_vars(t))
        if v.name in incoming:
            new = Var(_fresh(v.name, incoming | body_free | set(inner)), v.sort)
            body = substitute(body, {v.name: new})
            v = new
        return type(phi)(v, substitute(body, inner))
    return phi


# ---------------------------------------------------------------------------
# finite models


@dataclass(frozen=True)
class StateModel:
    """Complete closed-world interpretation: listed tuples are true, all else false.

    ``domain`` maps each object sort to its constants; ``fluents`` and
    ``statics`` map every declared symbol to its extension.
    """

    domain: Mapping[str, tuple]
    fluents: Mapping[str, frozenset]
    statics: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self) -> None:
        members = {c for cs in self.domain.values() for c in cs}
        for rel in (self.fluents, self.statics):
            for sym, ext in rel.items():
                for tup in ext:
                    for c in tup:
                        if c not in members:
                            raise UnknownSymbol(f"{sym}{tup}: {c} is not in the object domain")

    def objects(self, sort: str) -> tuple:
        try:
            return self.domain[sort]
        except KeyError:
            raise SortMismatch(f"no object domain for sort {sort!r}") from None

    def with_fluents(self, fluents: Mapping[str, frozenset]) -> "StateModel":
        return replace(self, fluents=fluents)

    def true_atoms(self) -> list:
        """Sorted (symbol, args) pairs of every true fluent and static tuple."""
        out = []
        for rel in (self.statics, self.fluents):
            for sym, ext in rel.items():
                out.extend((sym, tup) for tup in ext)
        return sorted(out)

    def __hash__(self) -> int:
        return hash((tuple(sorted(self.fluents.items())), tuple(sorted(self.statics.items()))))


def _value(t: Term, env: Mapping[str, Term]):
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Var):
        if t.name not in env:
            raise UnboundVariable(f"variable {t.name!r} is unbound")
        bound = env[t.name]
        if bound.sort != t.sort:
            raise SortMismatch(f"{t.name}:{t.sort} bound to {bound} of sort {bound.sort}")
        if isinstance(bound, Var):
            raise UnboundVariable(f"variable {t.name!r} bound to non-ground {bound}")
        return _value(bound, {})
    return (t.name, tuple(_value(a, env) for a in t.args))


def evaluate(phi: Formula, m: StateModel, env: Mapping[str, Term] | None = None) -> bool:
    """Truth value of ``phi`` in ``m`` under ``env`` (variable name -> ground term)."""
    env = {} if env is None else env
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, Atom):
        rel = m.fluents if phi.fluent else m.statics
        if phi.name not in rel:
            kind = "fluent" if phi.fluent else "static"
            raise UnknownSymbol(f"undeclared {kind} {phi.name!r}")
        return tuple(_value(a, env) for a in phi.args) in rel[phi.name]
    if isinstance(phi, Eq):
        return _value(phi.left, env) == _value(phi.right, env)
    if isinstance(phi, Not):
        return not evaluate(phi.arg, m, env)
    if isinstance(phi, And):
        return all(evaluate(a, m, env) for a in phi.args)
    if isinstance(phi, Or):
        return any(evaluate(a, m, env) for a in phi.args)
    if isinstance(phi, Implies):
        return (not evaluate(phi.left, m, env)) or evaluate(phi.right, m, env)
    if isinstance(phi, Iff):
        return evaluate(phi.left, m, env) == evaluate(phi.right, m, env)
    if isinstance(phi, Quantifier):
        v = phi.var
        if v.sort == ACTION:
            raise SortMismatch("quantification over actions is not supported")
        results = (
            evaluate(phi.body, m, {**env, v.name: Const(c, v.sort)}) for c in m.objects(v.sort)
        )
        return all(results) if isinstance(phi, Forall) else any(results)
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# simplification under unique names


def _simplify_eq(left: Term, right: Term) -> Formula:
    if left == right:
        return TRUE
    if isinstance(left, Var) or isinstance(right, Var):
        return Eq(left, right)
    if isinstance(left, Action) and isinstance(right, Action):
        if left.name != right.name or len(left.args) != len(right.args):
            return FALSE
        return _and([_simplify_eq(x, y) for x, y in zip(left.args, right.args)])
    # distinct constants, or a constant against an action term
    return FALSE


def _negate(f: Formula) -> Formula:
    if f is TRUE or isinstance(f, Top):
        return FALSE
    if isinstance(f, Bottom):
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def _and(items: Iterable[Formula]) -> Formula:
    out: list = []
    for s in items:
        if isinstance(s, Bottom):
            return FALSE
        if isinstance(s, Top):
            continue
        for x in s.args if isinstance(s, And) else (s,):
            if x not in out:
                out.append(x)
    for x in out:
        if isinstance(x, Not) and x.arg in out:
            return FALSE
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def _or(items: Iterable[Formula]) -> Formula:
    out: list = []
    for s in items:
        if isinstance(s, Top):
            return TRUE
        if isinstance(s, Bottom):
            continue
        for x in s.args if isinstance(s, Or) else (s,):
            if x not in out:
                out.append(x)
    for x in out:
        if isinstance(x, Not) and x.arg in out:
            return TRUE
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else Or(tuple(out))


def _binding_for(v: Var, f: Formula):
    """The term t when ``f`` is ``v = t`` or ``t = v`` with v not occurring in t."""
    if not isinstance(f, Eq):
        return None
    for a, b in ((f.left, f.right), (f.right, f.left)):
        if a == v and v not in term_vars(b):
            return b
    return None


def _simplify_exists(v: Var, body: Formula, rigid) -> Formula:
    if v not in free_vars(body):
        return body
    if _binding_for(v, body) is not None:
        return TRUE
    if isinstance(body, And):
        for i, c in enumerate(body.args):
            t = _binding_for(v, c)
            if t is not None:
                rest = conj(*(body.args[:i] + body.args[i + 1:]))
                return simplify(substitute(rest, {v.name: t}), rigid)
    return Exists(v, body)


def _simplify_forall(v: Var, body: Formula, rigid) -> Formula:
    if v not in free_vars(body):
        return body
    if isinstance(body, Not) and _binding_for(v, body.arg) is not None:
        return FALSE
    if isinstance(body, Implies):
        t = _binding_for(v, body.left)
        if t is not None:
            return simplify(substitute(body.right, {v.name: t}), rigid)
    if isinstance(body, Or):
        for i, c in enumerate(body.args):
            t = _binding_for(v, c.arg) if isinstance(c, Not) else None
            if t is not None:
                rest = disj(*(body.args[:i] + body.args[i + 1:]))
                return simplify(substitute(rest, {v.name: t}), rigid)
    return Forall(v, body)


def simplify(phi: Formula, rigid: Mapping[str, frozenset] | None = None) -> Formula:
    """Equality resolution under unique names plus boolean and quantifier cleanup.

    Ground equalities are decided syntactically: distinct constants and
    action terms with distinct symbols are unequal, and equal symbols reduce
    to argument-wise equalities. ``rigid`` optionally gives extensions of
    static relations that are fixed by the theory; ground atoms over those
    symbols are then replaced by their truth value.

    Object domains are assumed non-empty, which licenses dropping vacuous
    quantifiers and the one-point rule ``exists x (x = t & p) == p[t/x]``.
    """
    if isinstance(phi, (Top, Bottom)):
        return phi
    if isinstance(phi, Atom):
        if not phi.fluent and rigid and phi.name in rigid and phi.is_ground:
            key = tuple(a.name for a in phi.args)
            return TRUE if key in rigid[phi.name] else FALSE
        return phi
    if isinstance(phi, Eq):
        return _simplify_eq(phi.left, phi.right)
    if isinstance(phi, Not):
        return _negate(simplify(phi.arg, rigid))
    if isinstance(phi, And):
        return _and(simplify(a, rigid) for a in phi.args)
    if isinstance(phi, Or):
        return _or(simplify(a, rigid) for a in phi.args)
    if isinstance(phi, Implies):
        left, right = simplify(phi.left, rigid), simplify(phi.right, rigid)
        if isinstance(left, Bottom) or isinstance(right, Top) or left == right:
            return TRUE
        if isinstance(left, Top):
            return right
        if isinstance(right, Bottom):
            return _negate(left)
        return Implies(left, right)
    if isinstance(phi, Iff):
        left, right = simplify(phi.left, rigid), simplify(phi.right, rigid)
        if left == right:
            return TRUE
        for a, b in ((left, right), (right, left)):
            if isinstance(a, Top):
                return b
            if isinstance(a, Bottom):
                return _negate(b)
        return Iff(left, right)
    if isinstance(phi, Exists):
        return _simplify_exists(phi.var, simplify(phi.body, rigid), rigid)
    if isinstance(phi, Forall):
        return _simplify_forall(phi.var, simplify(phi.body, rigid), rigid)
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# surface syntax

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}


def _prec(phi: Formula) -> int:
    if isinstance(phi, Not) and isinstance(phi.arg, Eq):
        return 6
    return _PREC.get(type(phi), 6)


def _wrap(phi: Formula, limit: int) -> str:
    text = to_text(phi)
    return f"({text})" if _prec(phi) <= limit else text


def to_text(phi: Formula) -> str:
    """Render in the DSL's ASCII syntax; quantified variables carry their sort."""
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, Atom):
        if not phi.args:
            return phi.name
        return f"{phi.name}({','.join(str(a) for a in phi.args)})"
    if isinstance(phi, Eq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, Not):
        if isinstance(phi.arg, Eq):
            return f"{phi.arg.left} != {phi.arg.right}"
        return "!" + _wrap(phi.arg, 4)
    if isinstance(phi, And):
        return " & ".join(_wrap(a, 4) for a in phi.args)
    if isinstance(phi, Or):
        return " | ".join(_wrap(a, 3) for a in phi.args)
    if isinstance(phi, Implies):
        return f"{_wrap(phi.left, 2)} -> {_wrap(phi.right, 2)}"
    if isinstance(phi, Iff):
        return f"{_wrap(phi.left, 1)} <-> {_wrap(phi.right, 1)}"
    if isinstance(phi, Quantifier):
        kind = type(phi)
        names = []
        body = phi
        while type(body) is kind:
            names.append(f"{body.var.name}:{body.var.sort}")
            body = body.body
        word = "forall" if kind is Forall else "exists"
        return f"{word} {', '.join(names)} ({to_text(body)})"
    raise TypeError(f"not a formula: {phi!r}")


def canonical(phi: Formula) -> Formula:
    """Flatten nested conjunctions/disjunctions and order their arguments by text."""
    if isinstance(phi, Not):
        return Not(canonical(phi.arg))
    if isinstance(phi, (And, Or)):
        kind = type(phi)
        flat: list = []
        for a in phi.args:
            c = canonical(a)
            flat.extend(c.args if isinstance(c, kind) else (c,))
        unique = {to_text(a): a for a in flat}
        if len(unique) == 1:
            return next(iter(unique.values()))
        return kind(tuple(unique[k] for k in sorted(unique)))
    if isinstance(phi, (Implies, Iff)):
        return type(phi)(canonical(phi.left), canonical(phi.right))
    if isinstance(phi, Quantifier):
        return type(phi)(phi.var, canonical(phi.body))
    return phi
