"""Scenario file (``.sct``) and surface-formula parsing.

A scenario is a sequence of line-oriented statements; ``#`` starts a
comment and an indented line continues the previous statement::

    sorts: car loc
    objects: C : car; I J K : loc
    statics: connected(loc,loc)
    fluents: at(car,loc); corrupted(car); damaged(car)
    action turn(c:car,i:loc) poss: at(c,i)
    ssa damaged(c): (corrupted(c) & exists i (a = turn(c,i))) | damaged(c)
    sense senseCorrupted(c:car) guard: at(c,Garage) tells: corrupted(c)
    world S0 actual: at(C,I); connected(I,J)
    agent Agt
    k Agt: S0 ~ S0star
    narrative sigma1: drive(C,I,J); turn(C,J)

Worlds list the atoms that are true; everything else is false. ``a`` is
the action variable of successor-state axioms. ``k A: W1 ~ W2`` puts worlds
in one equivalence class (closure is generated); ``k A: W1 -> W2`` adds a
single edge, and an agent given any explicit edge gets no closure at all.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from .bat import (
    ACTION_VAR,
    ActionSchema,
    BasicActionTheory,
    Diagnostic,
    SensingAxiom,
    Signature,
    SourceLocation,
    SuccessorStateAxiom,
    validate,
)
from .epistemic import EpistemicFrame, relation_violations
from .errors import ParseError, SitCauseError
from .logic import (
    ACTION,
    FALSE,
    TRUE,
    Action,
    And,
    Atom,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    StateModel,
    Var,
    to_text,
)
from .narrative import InitialModel
from .scenario import Scenario

_UNICODE = {"¬": "!", "∧": "&", "∨": "|", "→": "->", "↔": "<->", "≠": "!=", "∀": "forall", "∃": "exists"}

_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      |(?P<op><->|->|!=|[()&|!=,:.;~]|[¬∧∨→↔≠∀∃])
      |(?P<id>[A-Za-z_][A-Za-z0-9_']*)""",
    re.X,
)

_KEYWORDS = {"forall", "exists", "true", "false"}


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "op" or "end"
    text: str
    pos: int


class DslError(Exception):
    def __init__(self, category: str, message: str, pos: int = 0):
        super().__init__(message)
        self.category = category
        self.message = message
        self.pos = pos


def tokenize(text: str) -> list:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise DslError("SyntaxError", f"unexpected character {text[i]!r}", i)
        if m.lastgroup != "ws":
            tok = m.group()
            tok = _UNICODE.get(tok, tok)
            out.append(Token(m.lastgroup, tok, i))
        i = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Tokens:
    def __init__(self, tokens: list):
        self.toks = tokens
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        return self.peek.kind != "end" and self.peek.text == text

    def next(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "end":
            self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            got = self.peek.text or "end of input"
            raise DslError("SyntaxError", f"expected {text!r}, got {got!r}", self.peek.pos)
        return self.next()

    def ident(self, what: str = "identifier") -> Token:
        tok = self.peek
        if tok.kind != "id":
            got = tok.text or "end of input"
            raise DslError("SyntaxError", f"expected {what}, got {got!r}", tok.pos)
        return self.next()

    def done(self) -> bool:
        return self.peek.kind == "end"

    def expect_end(self) -> None:
        if not self.done():
            raise DslError("SyntaxError", f"unexpected {self.peek.text!r}", self.peek.pos)


# ---------------------------------------------------------------------------
# raw syntax tree
#
# ("app", name, args | None, pos)        identifier, optionally applied
# ("eq", left, right, negated, pos)
# ("not", x, pos) ("and", xs, pos) ("or", xs, pos)
# ("imp", a, b, pos) ("iff", a, b, pos) ("const", bool, pos)
# ("q", "forall" | "exists", [(name, sort | None, pos)], body, pos)


def _parse_iff(ts: _Tokens):
    left = _parse_imp(ts)
    while ts.at("<->"):
        pos = ts.next().pos
        left = ("iff", left, _parse_imp(ts), pos)
    return left


def _parse_imp(ts: _Tokens):
    left = _parse_or(ts)
    if ts.at("->"):
        pos = ts.next().pos
        return ("imp", left, _parse_imp(ts), pos)
    return left


def _parse_or(ts: _Tokens):
    pos = ts.peek.pos
    items = [_parse_and(ts)]
    while ts.accept("|"):
        items.append(_parse_and(ts))
    return items[0] if len(items) == 1 else ("or", items, pos)


def _parse_and(ts: _Tokens):
    pos = ts.peek.pos
    items = [_parse_unary(ts)]
    while ts.accept("&"):
        items.append(_parse_unary(ts))
    return items[0] if len(items) == 1 else ("and", items, pos)


def _parse_unary(ts: _Tokens):
    if ts.at("!"):
        pos = ts.next().pos
        return ("not", _parse_unary(ts), pos)
    if ts.at("forall") or ts.at("exists"):
        tok = ts.next()
        names = []
        while True:
            v = ts.ident("variable")
            if v.text in _KEYWORDS:
                raise DslError("SyntaxError", f"{v.text!r} cannot be a variable", v.pos)
            sort = ts.ident("sort").text if ts.accept(":") else None
            names.append((v.text, sort, v.pos))
            if not ts.accept(","):
                break
        if ts.accept("."):
            body = _parse_iff(ts)
        else:
            ts.expect("(")
            body = _parse_iff(ts)
            ts.expect(")")
        return ("q", tok.text, names, body, tok.pos)
    return _parse_primary(ts)


def _parse_termish(ts: _Tokens):
    tok = ts.ident("term")
    if tok.text in _KEYWORDS:
        raise DslError("SyntaxError", f"unexpected keyword {tok.text!r}", tok.pos)
    if not ts.accept("("):
        return ("app", tok.text, None, tok.pos)
    args = []
    if not ts.accept(")"):
        args.append(_parse_termish(ts))
        while ts.accept(","):
            args.append(_parse_termish(ts))
        ts.expect(")")
    return ("app", tok.text, args, tok.pos)


def _parse_primary(ts: _Tokens):
    tok = ts.peek
    if ts.accept("true"):
        return ("const", True, tok.pos)
    if ts.accept("false"):
        return ("const", False, tok.pos)
    if ts.accept("("):
        inner = _parse_iff(ts)
        ts.expect(")")
        return inner
    if tok.kind != "id":
        got = tok.text or "end of input"
        raise DslError("SyntaxError", f"expected a formula, got {got!r}", tok.pos)
    left = _parse_termish(ts)
    if ts.at("=") or ts.at("!="):
        op = ts.next()
        return ("eq", left, _parse_termish(ts), op.text == "!=", op.pos)
    return left


# ---------------------------------------------------------------------------
# elaboration against a signature


class _Elaborator:
    def __init__(self, sig: Signature):
        self.sig = sig

    def _symbol_sorts(self, name: str):
        for table in (self.sig.fluents, self.sig.statics, self.sig.actions):
            if name in table:
                return table[name]
        return None

    def term_sort(self, node, scope: Mapping[str, str]) -> Optional[str]:
        _, name, args, _ = node
        if args is None:
            if name in scope:
                return scope[name]
            if name in self.sig.constants:
                return self.sig.constants[name]
        if name in self.sig.actions:
            return ACTION
        return None

    def _infer(self, name: str, node, scope: Mapping[str, str]) -> Optional[str]:
        kind = node[0]
        if kind == "app":
            sorts = self._symbol_sorts(node[1]) if node[2] is not None else None
            for i, arg in enumerate(node[2] or ()):
                if arg[2] is None and arg[1] == name and sorts is not None and i < len(sorts):
                    return sorts[i]
                found = self._infer(name, arg, scope)
                if found:
                    return found
            return None
        if kind == "eq":
            _, left, right, _, _ = node
            for a, b in ((left, right), (right, left)):
                if a[0] == "app" and a[2] is None and a[1] == name:
                    other = self.term_sort(b, scope)
                    if other:
                        return other
            return self._infer(name, left, scope) or self._infer(name, right, scope)
        if kind == "not":
            return self._infer(name, node[1], scope)
        if kind in ("and", "or"):
            for x in node[1]:
                found = self._infer(name, x, scope)
                if found:
                    return found
            return None
        if kind in ("imp", "iff"):
            return self._infer(name, node[1], scope) or self._infer(name, node[2], scope)
        if kind == "q":
            if any(v[0] == name for v in node[2]):
                return None  # shadowed
            inner = dict(scope)
            for v, s, _ in node[2]:
                if s:
                    inner[v] = s
            return self._infer(name, node[3], inner)
        return None

    def term(self, node, scope: Mapping[str, str]):
        if node[0] != "app":
            raise DslError("SyntaxError", "expected a term", node[-1])
        _, name, args, pos = node
        if args is None:
            if name in scope:
                return Var(name, scope[name])
            if name in self.sig.constants:
                return Const(name, self.sig.constants[name])
        if name in self.sig.actions:
            sorts = self.sig.actions[name]
            return Action(name, self._args(name, sorts, args or [], scope, pos))
        if name in self.sig.fluents or name in self.sig.statics:
            raise DslError("SyntaxError", f"{name!r} is a relation, not a term", pos)
        if args is None:
            raise DslError("UnknownSymbol", f"unknown symbol {name!r}", pos)
        raise DslError("UnknownSymbol", f"unknown function {name!r}", pos)

    def _args(self, name: str, sorts: tuple, args: list, scope, pos) -> tuple:
        if len(args) != len(sorts):
            raise DslError("ArityError", f"{name} takes {len(sorts)} arguments, got {len(args)}", pos)
        out = []
        for a, s in zip(args, sorts):
            t = self.term(a, scope)
            if t.sort != s:
                raise DslError("SortMismatch", f"argument {t} of {name} has sort {t.sort}, expected {s}", a[-1])
            out.append(t)
        return tuple(out)

    def formula(self, node, scope: Mapping[str, str]) -> Formula:
        kind = node[0]
        if kind == "const":
            return TRUE if node[1] else FALSE
        if kind == "app":
            _, name, args, pos = node
            for table, fluent in ((self.sig.fluents, True), (self.sig.statics, False)):
                if name in table:
                    return Atom(name, self._args(name, table[name], args or [], scope, pos), fluent)
            if name in self.sig.actions or name in self.sig.constants or name in scope:
                raise DslError("SyntaxError", f"{name!r} is a term, not a formula", pos)
            raise DslError("UnknownSymbol", f"unknown relation {name!r}", pos)
        if kind == "eq":
            _, l, r, negated, pos = node
            left, right = self.term(l, scope), self.term(r, scope)
            if left.sort != right.sort:
                raise DslError("SortMismatch", f"cannot compare {left}:{left.sort} with {right}:{right.sort}", pos)
            eq = Eq(left, right)
            return Not(eq) if negated else eq
        if kind == "not":
            return Not(self.formula(node[1], scope))
        if kind == "and":
            return And(tuple(self.formula(x, scope) for x in node[1]))
        if kind == "or":
            return Or(tuple(self.formula(x, scope) for x in node[1]))
        if kind == "imp":
            return Implies(self.formula(node[1], scope), self.formula(node[2], scope))
        if kind == "iff":
            return Iff(self.formula(node[1], scope), self.formula(node[2], scope))
        if kind == "q":
            _, word, names, body, pos = node
            inner = dict(scope)
            bound = []
            pending = [(n, s, p) for n, s, p in names]
            for n, s, p in pending:
                if s is not None and s not in self.sig.sorts:
                    raise DslError("UnknownSymbol", f"unknown sort {s!r}", p)
            # annotated first, then inferred, repeating so variables can type each other
            resolved = {n: s for n, s, _ in pending if s}
            changed = True
            while changed:
                changed = False
                for n, s, p in pending:
                    if n in resolved:
                        continue
                    found = self._infer(n, body, {**inner, **resolved})
                    if found:
                        resolved[n] = found
                        changed = True
            for n, s, p in pending:
                if n not in resolved:
                    raise DslError("SortMismatch", f"cannot infer the sort of {n!r}; annotate it as {n}:sort", p)
                if resolved[n] == ACTION:
                    raise DslError("SortMismatch", f"quantifying over actions ({n!r}) is not supported", p)
                inner[n] = resolved[n]
                bound.append(Var(n, resolved[n]))
            out = self.formula(body, inner)
            q = Forall if word == "forall" else Exists
            for v in reversed(bound):
                out = q(v, out)
            return out
        raise DslError("SyntaxError", "malformed formula", node[-1])


def _formula_from_tokens(tokens: list, sig: Signature, scope: Mapping[str, str]) -> Formula:
    ts = _Tokens(tokens)
    raw = _parse_iff(ts)
    ts.expect_end()
    return _Elaborator(sig).formula(raw, scope)


def _diag(err: DslError, file: str, locate) -> Diagnostic:
    line, col = locate(err.pos)
    return Diagnostic(err.category, err.message, SourceLocation(file, line, col))


def parse_formula(text: str, sig: Signature, scope: Mapping[str, str] | None = None) -> Formula:
    """Parse a surface formula; raises ParseError carrying one located diagnostic."""
    try:
        return _guarded("<formula>", lambda: _formula_from_tokens(tokenize(text), sig, scope or {}))
    except DslError as err:
        raise ParseError([_diag(err, "<formula>", lambda p: (1, p + 1))]) from None


def _actions_from_tokens(tokens: list, sig: Signature) -> tuple:
    ts = _Tokens(tokens)
    out = []
    elab = _Elaborator(sig)
    while not ts.done():
        node = _parse_termish(ts)
        t = elab.term(node, {})
        if not isinstance(t, Action):
            raise DslError("UnknownSymbol", f"{node[1]!r} is not an action", node[-1])
        out.append(t)
        if not ts.accept(";"):
            ts.expect_end()
    return tuple(out)


def parse_narrative(text: str, sig: Signature) -> tuple:
    """Parse ``act(...); act(...)`` into ground actions; empty text gives ()."""
    try:
        return _guarded("<narrative>", lambda: _actions_from_tokens(tokenize(text), sig))
    except DslError as err:
        raise ParseError([_diag(err, "<narrative>", lambda p: (1, p + 1))]) from None


def parse_action(text: str, sig: Signature) -> Action:
    actions = parse_narrative(text, sig)
    if len(actions) != 1:
        raise ParseError([Diagnostic("SyntaxError", f"expected exactly one action, got {len(actions)}")])
    return actions[0]


# ---------------------------------------------------------------------------
# scenario files


@dataclass
class _Statement:
    text: str
    segments: list  # (offset in text, line, column of that offset)

    def locate(self, pos: int) -> tuple:
        seg = self.segments[0]
        for s in self.segments:
            if s[0] <= pos:
                seg = s
        return seg[1], seg[2] + (pos - seg[0])


def _statements(text: str) -> list:
    out: list = []
    for lineno, raw in enumerate(text.replace("\r\n", "\n").replace("\r", "\n").split("\n"), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if line[0].isspace() and out:
            stmt = out[-1]
            start = len(line) - len(line.lstrip())
            stmt.segments.append((len(stmt.text) + 1, lineno, start + 1))
            stmt.text += " " + line[start:].rstrip()
        else:
            out.append(_Statement(line.rstrip(), [(0, lineno, 1)]))
    return out


_HEAD = re.compile(r"\s*(sorts|objects|statics|fluents|action|ssa|sense|world|agent|k|narrative)\b")

REQUIRED = ("sorts", "objects", "fluents", "action", "world")


class _ScenarioParser:
    def __init__(self, text: str, file: str):
        self.file = file
        self.stmts = _statements(text)
        self.diags: list = []
        self.sorts: list = []
        self.constants: dict = {}
        self.statics: dict = {}
        self.fluents: dict = {}
        self.actions: dict = {}
        self.seen: set = set()
        self.world_ids: set = set()

    # -- helpers -------------------------------------------------------
    def error(self, stmt: Optional[_Statement], category: str, message: str, pos: int = 0) -> None:
        if stmt is None:
            loc = SourceLocation(self.file, 1, 1)
        else:
            line, col = stmt.locate(pos)
            loc = SourceLocation(self.file, line, col)
        self.diags.append(Diagnostic(category, message, loc))

    def loc(self, stmt: _Statement, pos: int = 0) -> SourceLocation:
        line, col = stmt.locate(pos)
        return SourceLocation(self.file, line, col)

    @property
    def sig(self) -> Signature:
        return Signature(tuple(self.sorts), dict(self.constants), dict(self.statics), dict(self.fluents), dict(self.actions))

    # -- pass 1: declarations -------------------------------------------
    def declare(self, stmt: _Statement, head: str, ts: _Tokens) -> None:
        if head == "sorts":
            ts.expect(":")
            while not ts.done():
                tok = ts.ident("sort name")
                if tok.text in self.sorts or tok.text == ACTION:
                    self.error(stmt, "DuplicateDeclaration", f"sort {tok.text!r} declared twice", tok.pos)
                else:
                    self.sorts.append(tok.text)
                ts.accept(",")
        elif head == "objects":
            ts.expect(":")
            while not ts.done():
                names = [ts.ident("object name")]
                while not ts.at(":"):
                    ts.accept(",")
                    names.append(ts.ident("object name"))
                ts.expect(":")
                sort = ts.ident("sort")
                if sort.text not in self.sorts:
                    raise DslError("UnknownSymbol", f"unknown sort {sort.text!r}", sort.pos)
                for n in names:
                    if n.text in self.constants:
                        self.error(stmt, "DuplicateDeclaration", f"object {n.text!r} declared twice", n.pos)
                    else:
                        self.constants[n.text] = sort.text
                if not ts.accept(";"):
                    ts.expect_end()
        elif head in ("statics", "fluents"):
            ts.expect(":")
            table = self.statics if head == "statics" else self.fluents
            while not ts.done():
                name = ts.ident("relation name")
                sorts = []
                if ts.accept("("):
                    if not ts.accept(")"):
                        while True:
                            s = ts.ident("sort")
                            if s.text not in self.sorts:
                                raise DslError("UnknownSymbol", f"unknown sort {s.text!r}", s.pos)
                            sorts.append(s.text)
                            if ts.accept(")"):
                                break
                            ts.expect(",")
                if name.text in self.statics or name.text in self.fluents or name.text in self.actions:
                    self.error(stmt, "DuplicateDeclaration", f"relation {name.text!r} declared twice", name.pos)
                else:
                    table[name.text] = tuple(sorts)
                if not ts.accept(";"):
                    ts.expect_end()
        elif head == "action":
            name, params = self.header(ts, typed=True)
            if name.text in self.actions or name.text in self.fluents or name.text in self.statics:
                self.error(stmt, "DuplicateAction", f"action {name.text!r} declared twice", name.pos)
                return
            self.actions[name.text] = tuple(s for _, s, _ in params)

    def header(self, ts: _Tokens, typed: bool) -> tuple:
        name = ts.ident("symbol name")
        params = []
        if ts.accept("("):
            if not ts.accept(")"):
                while True:
                    v = ts.ident("parameter")
                    sort = None
                    if ts.accept(":"):
                        sort = ts.ident("sort").text
                        if sort not in self.sorts:
                            raise DslError("UnknownSymbol", f"unknown sort {sort!r}", v.pos)
                    elif typed:
                        raise DslError("SyntaxError", f"parameter {v.text!r} needs a sort (name:sort)", v.pos)
                    params.append((v.text, sort, v.pos))
                    if ts.accept(")"):
                        break
                    ts.expect(",")
        names = [p[0] for p in params]
        if len(set(names)) != len(names):
            raise DslError("DuplicateDeclaration", f"repeated parameter in {name.text}", name.pos)
        return name, params

    def rest(self, ts: _Tokens, stop: Optional[str] = None) -> list:
        """Tokens up to (not including) the keyword ``stop`` followed by ':'."""
        start = ts.i
        while not ts.done():
            if stop and ts.at(stop) and ts.toks[ts.i + 1].text == ":":
                break
            ts.next()
        toks = ts.toks[start:ts.i]
        return toks + [Token("end", "", ts.peek.pos)]

    def typed_params(self, params, declared: tuple, what: str, pos: int) -> tuple:
        if len(params) != len(declared):
            raise DslError("ArityError", f"{what} takes {len(declared)} parameters, got {len(params)}", pos)
        out = []
        for (n, s, p), d in zip(params, declared):
            if s is not None and s != d:
                raise DslError("SortMismatch", f"parameter {n} of {what} has sort {d}, not {s}", p)
            out.append(Var(n, d))
        return tuple(out)

    # -- main -----------------------------------------------------------
    def run(self) -> Scenario:
        parsed = []
        for stmt in self.stmts:
            m = _HEAD.match(stmt.text)
            if m is None:
                word = stmt.text.split()[0] if stmt.text.split() else stmt.text
                self.error(stmt, "SyntaxError", f"unknown statement {word!r}")
                continue
            head = m.group(1)
            self.seen.add(head)
            try:
                toks = tokenize(stmt.text)[1:]
                parsed.append((stmt, head, toks))
                if head in ("sorts", "objects", "statics", "fluents", "action"):
                    self.declare(stmt, head, _Tokens(toks))
            except DslError as err:
                self.error(stmt, err.category, err.message, err.pos)
        for section in REQUIRED:
            if section not in self.seen:
                self.error(None, "SyntaxError", f"missing required section {section!r}")
        if any(d.category == "SyntaxError" and "missing required" in d.message for d in self.diags):
            raise ParseError(self.diags)

        sig = self.sig
        elab = _Elaborator(sig)
        schemas, ssas, sensing, worlds, narratives = [], [], [], [], {}
        agents: list = []
        k_lines = []
        for stmt, head, toks in parsed:
            ts = _Tokens(toks)
            try:
                if head == "action":
                    name, params = self.header(ts, typed=True)
                    if any(sc.name == name.text for sc in schemas):
                        continue  # reported while collecting declarations
                    pvars = tuple(Var(n, s) for n, s, _ in params)
                    poss = TRUE
                    if ts.accept("poss"):
                        ts.expect(":")
                        poss = _formula_from_tokens(self.rest(ts), sig, {v.name: v.sort for v in pvars})
                    ts.expect_end()
                    schemas.append(ActionSchema(name.text, pvars, poss, self.loc(stmt, name.pos)))
                elif head == "ssa":
                    name, params = self.header(ts, typed=False)
                    if name.text not in sig.fluents:
                        raise DslError("UnknownSymbol", f"SSA for undeclared fluent {name.text!r}", name.pos)
                    pvars = self.typed_params(params, sig.fluents[name.text], name.text, name.pos)
                    if ACTION_VAR in {v.name for v in pvars}:
                        raise DslError("SyntaxError", f"{ACTION_VAR!r} is reserved for the action variable", name.pos)
                    ts.expect(":")
                    scope = {v.name: v.sort for v in pvars}
                    scope[ACTION_VAR] = ACTION
                    rhs = _formula_from_tokens(self.rest(ts), sig, scope)
                    ssas.append(SuccessorStateAxiom(name.text, pvars, rhs, ACTION_VAR, self.loc(stmt, name.pos)))
                elif head == "sense":
                    name, params = self.header(ts, typed=False)
                    if name.text not in sig.actions:
                        raise DslError("UnknownSymbol", f"sensing axiom for undeclared action {name.text!r}", name.pos)
                    pvars = self.typed_params(params, sig.actions[name.text], name.text, name.pos)
                    scope = {v.name: v.sort for v in pvars}
                    guard = TRUE
                    if ts.accept("guard"):
                        ts.expect(":")
                        guard = _formula_from_tokens(self.rest(ts, "tells"), sig, scope)
                    ts.expect("tells")
                    ts.expect(":")
                    cond = _formula_from_tokens(self.rest(ts), sig, scope)
                    sensing.append(SensingAxiom(name.text, pvars, guard, cond, self.loc(stmt, name.pos)))
                elif head == "world":
                    worlds.append(self.world(stmt, ts, sig, elab))
                elif head == "agent":
                    while not ts.done():
                        tok = ts.ident("agent name")
                        if tok.text in agents:
                            self.error(stmt, "DuplicateDeclaration", f"agent {tok.text!r} declared twice", tok.pos)
                        else:
                            agents.append(tok.text)
                        ts.accept(",")
                elif head == "k":
                    k_lines.append((stmt, ts))
                elif head == "narrative":
                    name = ts.ident("narrative name")
                    ts.expect(":")
                    if name.text in narratives:
                        raise DslError("DuplicateDeclaration", f"narrative {name.text!r} declared twice", name.pos)
                    narratives[name.text] = _actions_from_tokens(self.rest(ts), sig)
            except DslError as err:
                self.error(stmt, err.category, err.message, err.pos)

        ids = [w.id for w in worlds]
        actual = [w for w in worlds if w.actual]
        if len(actual) > 1:
            self.error(None, "MultipleActualWorlds", "more than one world is marked actual: " + ", ".join(w.id for w in actual))
        elif not actual and worlds:
            self.error(None, "MultipleActualWorlds", "no world is marked actual")
        for sort in self.sorts:
            if not sig.objects(sort):
                self.error(None, "EmptySort", f"sort {sort!r} has no objects")

        edges = self.frame(k_lines, agents, ids)
        rigid = {}
        for s in sig.statics:
            exts = {w.model.statics[s] for w in worlds}
            if len(exts) == 1:
                rigid[s] = exts.pop()
        bat = BasicActionTheory(sig, tuple(schemas), tuple(ssas), tuple(sensing), rigid)
        fluent_stmt = next((st for st, head, _ in parsed if head == "fluents"), None)
        for d in validate(bat):
            if d.location is None:
                where = fluent_stmt if d.category == "MissingSSA" else None
                loc = self.loc(where) if where else SourceLocation(self.file, 1, 1)
                d = Diagnostic(d.category, d.message, loc)
            self.diags.append(d)
        frame = EpistemicFrame(tuple(worlds), edges)
        k_stmt = {}
        for stmt, ts in k_lines:
            if ts.toks:
                k_stmt.setdefault(ts.toks[0].text, stmt)
        for agt in sorted(edges):
            for msg in relation_violations(ids, edges[agt]):
                self.error(k_stmt.get(agt), "FrameViolation", f"agent {agt}: {msg}")
        if self.diags:
            raise ParseError(self.diags)
        return Scenario(bat, frame, tuple(agents), narratives)

    def world(self, stmt: _Statement, ts: _Tokens, sig: Signature, elab: _Elaborator) -> InitialModel:
        name = ts.ident("world name")
        actual = ts.accept("actual")
        ts.expect(":")
        fluents: dict = {f: set() for f in sig.fluents}
        statics: dict = {s: set() for s in sig.statics}
        while not ts.done():
            node = _parse_termish(ts)
            atom = elab.formula(node, {})
            if not isinstance(atom, Atom):
                raise DslError("SyntaxError", "worlds list ground atoms", node[-1])
            (fluents if atom.fluent else statics)[atom.name].add(tuple(a.name for a in atom.args))
            if not ts.accept(";"):
                ts.expect_end()
        domain = {s: sig.objects(s) for s in sig.sorts}
        model = StateModel(
            domain,
            {k: frozenset(v) for k, v in fluents.items()},
            {k: frozenset(v) for k, v in statics.items()},
        )
        if name.text in self.world_ids:
            raise DslError("DuplicateDeclaration", f"world {name.text!r} declared twice", name.pos)
        self.world_ids.add(name.text)
        return InitialModel(name.text, model, actual)

    def frame(self, k_lines: list, agents: list, ids: list) -> dict:
        classes: dict = {a: {} for a in agents}  # union-find parent maps
        explicit: dict = {a: set() for a in agents}

        def find(parent, x):
            while parent.setdefault(x, x) != x:
                x = parent[x]
            return x

        for stmt, ts in k_lines:
            try:
                agt = ts.ident("agent name")
                if agt.text not in classes:
                    raise DslError("UnknownSymbol", f"unknown agent {agt.text!r}", agt.pos)
                ts.expect(":")
                while not ts.done():
                    group = [ts.ident("world name")]
                    op = None
                    while ts.at("~") or ts.at("->"):
                        this = ts.next().text
                        if op and this != op:
                            raise DslError("SyntaxError", "mix of '~' and '->' in one group", ts.peek.pos)
                        op = this
                        group.append(ts.ident("world name"))
                    for w in group:
                        if w.text not in ids:
                            raise DslError("UnknownSymbol", f"unknown world {w.text!r}", w.pos)
                    if op == "->":
                        if len(group) != 2:
                            raise DslError("SyntaxError", "an edge has exactly two worlds", group[0].pos)
                        explicit[agt.text].add((group[0].text, group[1].text))
                    else:
                        parent = classes[agt.text]
                        for w in group[1:]:
                            parent[find(parent, w.text)] = find(parent, group[0].text)
                        find(parent, group[0].text)
                    if not ts.accept(";"):
                        ts.expect_end()
            except DslError as err:
                self.error(stmt, err.category, err.message, err.pos)
        edges = {}
        for agt in agents:
            parent = classes[agt]
            rel = set(explicit[agt])
            members = list(parent)
            for x in members:
                for y in members:
                    if find(parent, x) == find(parent, y):
                        rel.add((x, y))
            if not explicit[agt]:
                rel |= {(w, w) for w in ids}
            edges[agt] = frozenset(rel)
        return edges


def _guarded(file: str, build):
    """Run ``build`` and report deep nesting or semantic failures as diagnostics."""
    try:
        return build()
    except RecursionError:
        raise ParseError([Diagnostic("SyntaxError", "expression nested too deeply", SourceLocation(file, 1, 1))]) from None
    except ParseError:
        raise
    except SitCauseError as err:
        raise ParseError([Diagnostic(err.category, str(err), SourceLocation(file, 1, 1))]) from None


def parse_scenario(text: str, file: str = "<string>") -> Scenario:
    """Parse and validate a scenario; raises ParseError with every diagnostic found."""
    return _guarded(file, lambda: _ScenarioParser(text, file).run())


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), str(path))


# ---------------------------------------------------------------------------
# printing


def _params(params: tuple) -> str:
    return "(" + ",".join(f"{v.name}:{v.sort}" for v in params) + ")" if params else ""


def _sig_entry(name: str, sorts: tuple) -> str:
    return f"{name}({','.join(sorts)})" if sorts else name


def scenario_to_text(sc: Scenario) -> str:
    """Render a scenario in the file syntax; parsing the result gives back an equal value."""
    bat = sc.theory
    sig = bat.signature
    lines = [f"sorts: {' '.join(sig.sorts)}"]
    groups = [f"{' '.join(sig.objects(s))} : {s}" for s in sig.sorts if sig.objects(s)]
    lines.append(f"objects: {'; '.join(groups)}")
    if sig.statics:
        lines.append("statics: " + "; ".join(_sig_entry(n, s) for n, s in sig.statics.items()))
    lines.append("fluents: " + "; ".join(_sig_entry(n, s) for n, s in sig.fluents.items()))
    for s in bat.schemas:
        lines.append(f"action {s.name}{_params(s.params)} poss: {to_text(s.precondition)}")
    for ax in bat.ssas:
        lines.append(f"ssa {ax.fluent}{_params(ax.params)}: {to_text(ax.rhs)}")
    for ax in bat.sensing:
        lines.append(f"sense {ax.action}{_params(ax.params)} guard: {to_text(ax.guard)} tells: {to_text(ax.condition)}")
    for w in sc.worlds:
        atoms = [_sig_entry(sym, args) for sym, args in w.model.true_atoms()]
        flag = " actual" if w.actual else ""
        lines.append(f"world {w.id}{flag}: {'; '.join(atoms)}".rstrip())
    if sc.agents:
        lines.append("agent " + " ".join(sc.agents))
    for agt in sc.agents:
        edges = sorted(sc.frame.edges.get(agt, ()))
        if edges:
            lines.append(f"k {agt}: " + "; ".join(f"{x} -> {y}" for x, y in edges))
    for name, actions in sc.narratives.items():
        lines.append(f"narrative {name}: {'; '.join(str(a) for a in actions)}".rstrip())
    return "\n".join(lines) + "\n"
