"""Brute-force reference implementations and random scenario generation.

The reference chain search decides truth at every prefix through regression
to the initial world, whereas the main implementation progresses models.
Random scenarios are produced as scenario text and go through the parser,
so the generator also exercises the DSL.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product

from .bat import ACTION_VAR, precondition
from .causation import CausalChain, CausalSetting, CauseEntry, HELD_INITIALLY, OK, causal_chain
from .dsl import parse_scenario
from .epistemic import k_accessible, know, knows_causal_chain, survival
from .errors import SitCauseError
from .logic import (
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
    Var,
    evaluate,
    to_text,
)
from .narrative import Situation, executable, holds, trajectory
from .regression import regress_all, rho

SORT = "obj"


@dataclass(frozen=True)
class Bounds:
    objects: int = 4
    fluents: int = 3
    actions: int = 3
    narrative: int = 6
    worlds: int = 3
    depth: int = 3

    def __post_init__(self) -> None:
        limits = {"objects": 4, "fluents": 3, "actions": 3, "narrative": 6, "worlds": 3}
        for name, cap in limits.items():
            value = getattr(self, name)
            if not 1 <= value <= cap and not (name == "narrative" and value == 0):
                raise ValueError(f"{name} must be in 1..{cap}, got {value}")
        if self.depth < 0:
            raise ValueError("depth must be non-negative")


@dataclass(frozen=True)
class RandomTheorySpec:
    seed: int
    bounds: Bounds = field(default_factory=Bounds)


@dataclass(frozen=True)
class Instance:
    spec: RandomTheorySpec
    text: str
    scenario: object
    actions: tuple
    effect: Formula
    probes: tuple  # extra closed formulas for differential checks


# ---------------------------------------------------------------------------
# reference algorithms


def holds_by_regression(bat, phi: Formula, sigma: Situation) -> bool:
    return evaluate(regress_all(bat, phi, sigma.actions), sigma.world.model)


def naive_causal_chain(setting: CausalSetting) -> CausalChain:
    """Chain search that tests the achievement condition at every candidate position."""
    bat = setting.theory
    world, actions = setting.narrative.world, setting.narrative.actions
    phi, end = setting.effect, len(actions)
    entries = []
    while True:
        found = []
        for p in range(end):
            if holds_by_regression(bat, phi, Situation(world, actions[:p])):
                continue
            if all(holds_by_regression(bat, phi, Situation(world, actions[:q])) for q in range(p + 1, end + 1)):
                found.append(p)
        if not found:
            break
        if len(found) > 1:
            raise AssertionError(f"achievement condition met at several positions {found}")
        p = found[0]
        alpha = actions[p]
        entries.append(CauseEntry(alpha, p))
        phi = And((rho(bat, phi, alpha), precondition(bat, alpha)))
        end = p
    return CausalChain(tuple(entries), OK if entries else HELD_INITIALLY)


def regression_differential(bat, world, actions, formulas) -> list:
    """Counterexamples to regression agreeing with progression, whole-narrative and per step."""
    out = []
    models = trajectory(bat, Situation(world, tuple(actions)), check=False)
    for phi in formulas:
        for n in range(len(actions) + 1):
            direct = evaluate(phi, models[n])
            if evaluate(regress_all(bat, phi, actions[:n]), world.model) != direct:
                out.append(f"{world.id}: regress_all({to_text(phi)}) over {n} actions disagrees")
            if n and evaluate(rho(bat, phi, actions[n - 1]), models[n - 1]) != direct:
                out.append(f"{world.id}: rho({to_text(phi)}, {actions[n - 1]}) disagrees at step {n}")
    return out


def frame_property_check(scenario, agent: str, actions) -> list:
    """Reflexivity, transitivity and Euclideanness of derived accessibility at every prefix.

    Reflexivity is demanded only of worlds where the prefix is executable.
    """
    bat = scenario.theory
    worlds = sorted(scenario.worlds, key=lambda w: w.id)
    out = []
    for n in range(len(actions) + 1):
        prefix = tuple(actions[:n])
        rel = {(x.id, y.id) for x, y in product(worlds, repeat=2) if survival(scenario, agent, prefix, x, y) >= n}
        live = [w.id for w in worlds if executable(bat, Situation(w, prefix))]
        ids = [w.id for w in worlds]
        for w in live:
            if (w, w) not in rel:
                out.append(f"prefix {n}: not reflexive at {w}")
        for x, y, z in product(ids, repeat=3):
            if (x, y) in rel and (y, z) in rel and (x, z) not in rel:
                out.append(f"prefix {n}: not transitive {x}->{y}->{z}")
            if (x, y) in rel and (x, z) in rel and (y, z) not in rel:
                out.append(f"prefix {n}: not Euclidean {x}->{y}, {x}->{z}")
    return out


def knowledge_invariants(scenario, agent: str, actions, formulas) -> list:
    """Factivity and monotone filtering along an executable narrative."""
    bat = scenario.theory
    out = []
    previous = None
    for n in range(len(actions) + 1):
        sigma = scenario.situation(actions[:n])
        acc = {s.world.id for s in k_accessible(scenario, agent, sigma)}
        if sigma.world.id not in acc:
            out.append(f"prefix {n}: actual world not self-accessible")
        if previous is not None and not acc <= previous:
            out.append(f"prefix {n}: accessible set grew from {sorted(previous)} to {sorted(acc)}")
        previous = acc
        for phi in formulas:
            if know(scenario, agent, phi, sigma) and not holds(bat, phi, sigma):
                out.append(f"prefix {n}: {to_text(phi)} known but false")
    return out


# ---------------------------------------------------------------------------
# random generation


class _Gen:
    def __init__(self, spec: RandomTheorySpec):
        self.rng = random.Random(spec.seed)
        self.b = spec.bounds
        r = self.rng
        self.objects = [f"o{i}" for i in range(1, r.randint(1, self.b.objects) + 1)]
        self.fluents = {f"f{i}": r.randint(0, 2) for i in range(1, r.randint(1, self.b.fluents) + 1)}
        self.statics = {"rel": 2} if r.random() < 0.5 else {}
        self.actions = {f"act{i}": r.randint(0, 2) for i in range(1, r.randint(1, self.b.actions) + 1)}
        self._fresh = 0

    def var(self) -> Var:
        self._fresh += 1
        return Var(f"y{self._fresh}", SORT)

    def term(self, scope: list):
        r = self.rng
        if scope and r.random() < 0.7:
            return r.choice(scope)
        return Const(r.choice(self.objects), SORT)

    def atom(self, scope: list) -> Formula:
        r = self.rng
        roll = r.random()
        if roll < 0.15:
            return Eq(self.term(scope), self.term(scope))
        if roll < 0.3 and self.statics:
            return Atom("rel", (self.term(scope), self.term(scope)), fluent=False)
        name = r.choice(sorted(self.fluents))
        return Atom(name, tuple(self.term(scope) for _ in range(self.fluents[name])))

    def formula(self, depth: int, scope: list) -> Formula:
        r = self.rng
        if depth <= 0 or r.random() < 0.3:
            return self.atom(scope)
        kind = r.choice(["not", "and", "or", "imp", "iff", "ex", "all"])
        if kind == "not":
            return Not(self.formula(depth - 1, scope))
        if kind in ("ex", "all"):
            v = self.var()
            body = self.formula(depth - 1, scope + [v])
            return Exists(v, body) if kind == "ex" else Forall(v, body)
        a, b = self.formula(depth - 1, scope), self.formula(depth - 1, scope)
        return {"and": And((a, b)), "or": Or((a, b)), "imp": Implies(a, b), "iff": Iff(a, b)}[kind]

    def trigger(self, params: list) -> Formula:
        """``exists ys (a = act(..) & cond)`` for a random action symbol."""
        r = self.rng
        name = r.choice(sorted(self.actions))
        bound, args = [], []
        for _ in range(self.actions[name]):
            if params and r.random() < 0.6:
                args.append(r.choice(params))
            elif r.random() < 0.5:
                v = self.var()
                bound.append(v)
                args.append(v)
            else:
                args.append(Const(r.choice(self.objects), SORT))
        body: Formula = Eq(Var(ACTION_VAR, "action"), Action(name, tuple(args)))
        if r.random() < 0.25:
            body = And((body, self.atom(params + bound)))
        for v in reversed(bound):
            body = Exists(v, body)
        return body

    def ssa(self, name: str, arity: int) -> str:
        r = self.rng
        params = [Var(f"x{i}", SORT) for i in range(1, arity + 1)]
        pos = self.trigger(params)
        frame: Formula = Atom(name, tuple(params))
        if r.random() < 0.8:
            frame = And((frame, Not(self.trigger(params))))
        head = f"{name}({','.join(v.name for v in params)})" if params else name
        return f"ssa {head}: {to_text(Or((pos, frame)))}"

    def action(self, name: str, arity: int) -> str:
        params = [Var(f"x{i}", SORT) for i in range(1, arity + 1)]
        poss = TRUE if self.rng.random() < 0.4 else self.formula(min(self.b.depth, 1), params)
        head = f"{name}({','.join(f'{v.name}:{SORT}' for v in params)})" if params else name
        return f"action {head} poss: {to_text(poss)}"

    def ground_atoms(self, symbols: dict) -> list:
        out = []
        for name, arity in sorted(symbols.items()):
            for combo in product(self.objects, repeat=arity):
                out.append(f"{name}({','.join(combo)})" if arity else name)
        return out

    def scenario_text(self) -> str:
        r = self.rng
        lines = [f"sorts: {SORT}", f"objects: {' '.join(self.objects)} : {SORT}"]
        if self.statics:
            lines.append("statics: rel(obj,obj)")
        lines.append("fluents: " + "; ".join(f"{n}({','.join([SORT] * a)})" if a else n for n, a in self.fluents.items()))
        for name, arity in self.actions.items():
            lines.append(self.action(name, arity))
        for name, arity in self.fluents.items():
            lines.append(self.ssa(name, arity))
        unary = [n for n, a in self.actions.items() if a >= 1]
        if unary and r.random() < 0.6:
            name = r.choice(unary)
            params = [Var(f"x{i}", SORT) for i in range(1, self.actions[name] + 1)]
            guard = TRUE if r.random() < 0.3 else self.atom(params)
            lines.append(f"sense {name}({','.join(v.name for v in params)}) guard: {to_text(guard)} tells: {to_text(self.atom(params))}")
        flu_atoms, stat_atoms = self.ground_atoms(self.fluents), self.ground_atoms(self.statics)
        shared_statics = [a for a in stat_atoms if r.random() < 0.5]
        nworlds = r.randint(1, self.b.worlds)
        ids = [f"W{i}" for i in range(nworlds)]
        for i, wid in enumerate(ids):
            statics = shared_statics if r.random() < 0.7 else [a for a in stat_atoms if r.random() < 0.5]
            atoms = [a for a in flu_atoms if r.random() < 0.5] + statics
            lines.append(f"world {wid}{' actual' if i == 0 else ''}: {'; '.join(atoms)}")
        # the agent is named after an object so that sensing actions on it are its own
        agent = self.objects[0]
        lines.append(f"agent {agent}")
        shuffled = ids[:]
        r.shuffle(shuffled)
        cuts = sorted(r.sample(range(1, nworlds), r.randint(0, nworlds - 1))) if nworlds > 1 else []
        groups, start = [], 0
        for c in cuts + [nworlds]:
            groups.append(" ~ ".join(shuffled[start:c]))
            start = c
        lines.append(f"k {agent}: {'; '.join(groups)}")
        return "\n".join(lines) + "\n"

    def ground_action(self) -> Action:
        name = self.rng.choice(sorted(self.actions))
        return Action(name, tuple(Const(self.rng.choice(self.objects), SORT) for _ in range(self.actions[name])))

    def narrative(self, sc) -> tuple:
        """Random executable narrative; each step is resampled until possible (bounded)."""
        target = self.rng.randint(0, self.b.narrative)
        acts: tuple = ()
        while len(acts) < target:
            for _ in range(30):
                alpha = self.ground_action()
                if executable(sc.theory, sc.situation(acts + (alpha,))):
                    acts += (alpha,)
                    break
            else:
                break
        return acts

    def closed_formula(self) -> Formula:
        return self.formula(self.b.depth, [])

    def effect(self, sc, actions: tuple) -> Formula:
        """A closed formula true at the end, preferring ones that change value along the way."""
        start, end = sc.situation(), sc.situation(actions)
        phi = self.closed_formula()
        for _ in range(20):
            if holds(sc.theory, phi, start) != holds(sc.theory, phi, end):
                break
            phi = self.closed_formula() if self.rng.random() < 0.5 else self.atom([])
        return phi if holds(sc.theory, phi, end) else Not(phi)


def generate(spec: RandomTheorySpec) -> Instance:
    """Seed-deterministic random instance; the effect always holds at the end of the narrative."""
    g = _Gen(spec)
    text = g.scenario_text()
    sc = parse_scenario(text, f"<seed {spec.seed}>")
    actions = g.narrative(sc)
    effect = g.effect(sc, actions)
    probes = tuple(g.closed_formula() for _ in range(3))
    return Instance(spec, text, sc, actions, effect, probes)


# ---------------------------------------------------------------------------
# suites


def _instance_failures(sc, agent: str, actions: tuple, effect: Formula, probes: tuple) -> list:
    bat = sc.theory
    failures = []
    for w in sc.worlds:
        for msg in regression_differential(bat, w, actions, (effect,) + probes):
            failures.append(("regression", msg))
    for w in sorted(sc.worlds, key=lambda w: w.id):
        sigma = Situation(w, actions)
        if not executable(bat, sigma) or not holds(bat, effect, sigma):
            continue
        setting = CausalSetting(bat, sigma, effect)
        main, ref = causal_chain(setting), naive_causal_chain(setting)
        if main != ref:
            failures.append(("chain", f"{w.id}: {main.pairs()} != {ref.pairs()}"))
    for msg in frame_property_check(sc, agent, actions):
        failures.append(("frame", msg))
    for msg in knowledge_invariants(sc, agent, actions, (effect,) + probes):
        failures.append(("knowledge", msg))
    verdict = knows_causal_chain(sc, agent, CausalSetting(bat, sc.situation(actions), effect))
    if verdict.knows and causal_chain(CausalSetting(bat, sc.situation(actions), effect)) != verdict.actual:
        failures.append(("knowledge", "known chain is not reproducible"))
    return failures


def check_instance(inst: Instance) -> list:
    sc = inst.scenario
    return _instance_failures(sc, sc.agents[0], inst.actions, inst.effect, inst.probes)


def check_fixture(sc) -> list:
    """Oracle checks over every named narrative and every ground fluent atom of a scenario."""
    bat = sc.theory
    sig = bat.signature
    atoms = []
    for name, sorts in sig.fluents.items():
        for combo in product(*(sig.objects(s) for s in sorts)):
            atoms.append(Atom(name, tuple(Const(c, s) for c, s in zip(combo, sorts))))
    failures = []
    for nname in sorted(sc.narratives):
        actions = sc.narratives[nname]
        if not executable(bat, sc.situation(actions)):
            continue
        for phi in atoms:
            effect = phi if holds(bat, phi, sc.situation(actions)) else Not(phi)
            for agent in sc.agents or ():
                failures += [(kind, f"{nname}: {msg}") for kind, msg in _instance_failures(sc, agent, actions, effect, ())]
    return failures


def run_suite(seeds, bounds: Bounds | None = None, scenario=None) -> dict:
    """Run every check over the given seeds (and a fixture, if supplied)."""
    bounds = bounds or Bounds()
    failures = []
    count = 0
    for seed in seeds:
        count += 1
        try:
            inst = generate(RandomTheorySpec(seed, bounds))
            found = check_instance(inst)
        except (SitCauseError, AssertionError) as exc:
            found = [("error", f"{type(exc).__name__}: {exc}")]
        failures += [{"seed": seed, "check": kind, "detail": msg} for kind, msg in found]
    if scenario is not None:
        failures += [{"seed": None, "check": kind, "detail": msg} for kind, msg in check_fixture(scenario)]
    return {"passed": not failures, "instances": count, "failures": failures}
