"""Basic action theories: signatures, action schemas, successor-state axioms.

``progress`` is the model-level reading of the successor-state axioms and
serves as the semantic reference that regression is checked against.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Mapping, Optional

from .errors import ArityError, NotExecutable, SortMismatch, UnknownAction, UnknownFluent
from .logic import (
    ACTION,
    Action,
    And,
    Atom,
    Const,
    Eq,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Quantifier,
    StateModel,
    evaluate,
    free_vars,
    simplify,
    substitute,
)

ACTION_VAR = "a"


@dataclass(frozen=True)
class SourceLocation:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    category: str
    message: str
    location: Optional[SourceLocation] = None

    def __str__(self) -> str:
        where = f"{self.location}: " if self.location else ""
        return f"{where}{self.category}: {self.message}"


@dataclass(frozen=True)
class Signature:
    """Declared sorts, object constants and symbol argument sorts."""

    sorts: tuple = ()
    constants: Mapping[str, str] = field(default_factory=dict)
    statics: Mapping[str, tuple] = field(default_factory=dict)
    fluents: Mapping[str, tuple] = field(default_factory=dict)
    actions: Mapping[str, tuple] = field(default_factory=dict)

    def objects(self, sort: str) -> tuple:
        return tuple(c for c, s in self.constants.items() if s == sort)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple  # of Var
    precondition: Formula
    location: Optional[SourceLocation] = field(default=None, compare=False)


@dataclass(frozen=True)
class SuccessorStateAxiom:
    fluent: str
    params: tuple  # of Var
    rhs: Formula
    action_var: str = ACTION_VAR
    location: Optional[SourceLocation] = field(default=None, compare=False)


@dataclass(frozen=True)
class SensingAxiom:
    """``guard -> (SF(action(params)) <-> condition)`` for a binary sensing action."""

    action: str
    params: tuple  # of Var
    guard: Formula
    condition: Formula
    location: Optional[SourceLocation] = field(default=None, compare=False)


@dataclass(frozen=True)
class BasicActionTheory:
    signature: Signature
    schemas: tuple = ()
    ssas: tuple = ()
    sensing: tuple = ()
    # static extensions fixed by the theory itself (identical in every world)
    rigid: Mapping[str, frozenset] = field(default_factory=dict)

    @cached_property
    def _schema_index(self) -> dict:
        return {s.name: s for s in self.schemas}

    @cached_property
    def _ssa_index(self) -> dict:
        return {s.fluent: s for s in self.ssas}

    @cached_property
    def _sensing_index(self) -> dict:
        out: dict = {}
        for ax in self.sensing:
            out.setdefault(ax.action, []).append(ax)
        return out

    @cached_property
    def _cache(self) -> tuple:
        return ({}, threading.Lock())

    def schema(self, name: str) -> ActionSchema:
        try:
            return self._schema_index[name]
        except KeyError:
            raise UnknownAction(f"no action schema named {name!r}") from None

    def ssa(self, fluent: str) -> SuccessorStateAxiom:
        try:
            return self._ssa_index[fluent]
        except KeyError:
            raise UnknownFluent(f"no successor-state axiom for {fluent!r}") from None

    def sensing_axioms(self, action: str) -> list:
        return self._sensing_index.get(action, [])

    def is_sensing(self, action: str) -> bool:
        return action in self._sensing_index

    def empty_model(self, domain: Mapping[str, tuple]) -> StateModel:
        return StateModel(
            domain,
            {f: frozenset() for f in self.signature.fluents},
            {s: frozenset() for s in self.signature.statics},
        )


def _bind(schema_params: tuple, args: tuple, what: str) -> dict:
    if len(schema_params) != len(args):
        raise ArityError(f"{what} expects {len(schema_params)} arguments, got {len(args)}")
    for p, a in zip(schema_params, args):
        if a.sort != p.sort:
            raise SortMismatch(f"{what}: argument {a} has sort {a.sort}, expected {p.sort}")
    return {p.name: a for p, a in zip(schema_params, args)}


def check_ground_action(bat: BasicActionTheory, alpha: Action) -> ActionSchema:
    schema = bat.schema(alpha.name)
    if not alpha.is_ground:
        raise SortMismatch(f"action {alpha} is not ground")
    _bind(schema.params, alpha.args, alpha.name)
    return schema


def precondition(bat: BasicActionTheory, alpha: Action) -> Formula:
    """Instantiated and simplified right-hand side of ``alpha``'s precondition axiom."""
    schema = bat.schema(alpha.name)
    return simplify(substitute(schema.precondition, _bind(schema.params, alpha.args, alpha.name)))


def progress(bat: BasicActionTheory, m: StateModel, alpha: Action, check: bool = True) -> StateModel:
    """Successor model of ``m`` after ``alpha``.

    With ``check`` unset the precondition is not tested; the K relation needs
    the fluent values of situations that are not themselves executable.
    """
    if check and not evaluate(precondition(bat, alpha), m):
        raise NotExecutable(f"{alpha} is not possible")
    fluents = {}
    for name, sorts in bat.signature.fluents.items():
        ssa = bat.ssa(name)
        ext = set()
        for combo in product(*(m.objects(s) for s in sorts)):
            env = {p.name: Const(c, p.sort) for p, c in zip(ssa.params, combo)}
            env[ssa.action_var] = alpha
            if evaluate(ssa.rhs, m, env):
                ext.add(combo)
        fluents[name] = frozenset(ext)
    return m.with_fluents(fluents)


# ---------------------------------------------------------------------------
# validation


def _walk_symbols(phi: Formula):
    """Yield every atom and action term occurring in ``phi``."""
    stack: list = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            yield f
            stack.extend(a for a in f.args if isinstance(a, Action))
        elif isinstance(f, Action):
            yield f
        elif isinstance(f, Eq):
            stack.extend(t for t in (f.left, f.right) if isinstance(t, Action))
        elif isinstance(f, (And, Or)):
            stack.extend(f.args)
        elif isinstance(f, Not):
            stack.append(f.arg)
        elif isinstance(f, (Implies, Iff)):
            stack.extend((f.left, f.right))
        elif isinstance(f, Quantifier):
            stack.append(f.body)


def _check_formula(sig: Signature, phi: Formula, allowed: set, where: str, loc) -> list:
    diags = []
    for node in _walk_symbols(phi):
        if isinstance(node, Atom):
            table = sig.fluents if node.fluent else sig.statics
        else:
            table = sig.actions
        if node.name not in table:
            diags.append(Diagnostic("UnknownSymbol", f"{where}: undeclared symbol {node.name!r}", loc))
        elif len(table[node.name]) != len(node.args):
            diags.append(
                Diagnostic(
                    "ArityError",
                    f"{where}: {node.name} takes {len(table[node.name])} arguments, got {len(node.args)}",
                    loc,
                )
            )
        else:
            for arg, sort in zip(node.args, table[node.name]):
                if arg.sort != sort:
                    diags.append(Diagnostic("SortMismatch", f"{where}: {arg} is not of sort {sort}", loc))
    extra = {v.name for v in free_vars(phi)} - allowed
    if extra:
        diags.append(Diagnostic("FreeVariable", f"{where}: free variables {sorted(extra)}", loc))
    return diags


def validate(bat: BasicActionTheory) -> list:
    """Diagnostics for every violated well-formedness condition (empty when valid)."""
    sig = bat.signature
    diags = []
    seen: dict = {}
    for s in bat.schemas:
        if s.name in seen:
            diags.append(Diagnostic("DuplicateAction", f"action {s.name!r} declared twice", s.location))
            continue
        seen[s.name] = s
        declared = sig.actions.get(s.name)
        if declared is None:
            diags.append(Diagnostic("UnknownSymbol", f"action {s.name!r} missing from signature", s.location))
        elif tuple(p.sort for p in s.params) != tuple(declared):
            diags.append(Diagnostic("ArityError", f"action {s.name!r} parameters disagree with signature", s.location))
        diags += _check_formula(sig, s.precondition, {p.name for p in s.params}, f"poss {s.name}", s.location)
    for name in sig.actions:
        if name not in seen:
            diags.append(Diagnostic("MissingSchema", f"action {name!r} has no precondition axiom"))

    ssa_seen: set = set()
    for ax in bat.ssas:
        if ax.fluent not in sig.fluents:
            diags.append(Diagnostic("UnknownSymbol", f"SSA for undeclared fluent {ax.fluent!r}", ax.location))
            continue
        if ax.fluent in ssa_seen:
            diags.append(Diagnostic("DuplicateSSA", f"fluent {ax.fluent!r} has more than one SSA", ax.location))
            continue
        ssa_seen.add(ax.fluent)
        if tuple(p.sort for p in ax.params) != tuple(sig.fluents[ax.fluent]):
            diags.append(Diagnostic("ArityError", f"SSA head for {ax.fluent!r} disagrees with its signature", ax.location))
        allowed = {p.name for p in ax.params} | {ax.action_var}
        diags += _check_formula(sig, ax.rhs, allowed, f"ssa {ax.fluent}", ax.location)
        for v in free_vars(ax.rhs):
            if v.name == ax.action_var and v.sort != ACTION:
                diags.append(Diagnostic("SortMismatch", f"ssa {ax.fluent}: {v.name} must be an action", ax.location))
    for name in sig.fluents:
        if name not in ssa_seen:
            diags.append(Diagnostic("MissingSSA", f"fluent {name!r} has no successor-state axiom"))

    for ax in bat.sensing:
        schema = seen.get(ax.action)
        if schema is None:
            diags.append(Diagnostic("UnknownSymbol", f"sensing axiom for undeclared action {ax.action!r}", ax.location))
            continue
        if tuple(p.sort for p in ax.params) != tuple(p.sort for p in schema.params):
            diags.append(Diagnostic("ArityError", f"sensing axiom parameters disagree with {ax.action!r}", ax.location))
        allowed = {p.name for p in ax.params}
        diags += _check_formula(sig, ax.guard, allowed, f"sense {ax.action} guard", ax.location)
        diags += _check_formula(sig, ax.condition, allowed, f"sense {ax.action}", ax.location)
    return diags


def frame_preserved(bat: BasicActionTheory, m: StateModel, alpha: Action) -> list:
    """Ground fluent atoms whose SSA instance simplifies to the atom itself but changed value.

    Used by tests of the frame property; an empty list means the property holds.
    """
    out = []
    after = progress(bat, m, alpha, check=False)
    for name, sorts in bat.signature.fluents.items():
        ssa = bat.ssa(name)
        for combo in product(*(m.objects(s) for s in sorts)):
            args = tuple(Const(c, s) for c, s in zip(combo, sorts))
            b = {p.name: a for p, a in zip(ssa.params, args)}
            b[ssa.action_var] = alpha
            inst = simplify(substitute(ssa.rhs, b))
            if inst == Atom(name, args) and (combo in m.fluents[name]) != (combo in after.fluents[name]):
                out.append((name, combo))
    return out
