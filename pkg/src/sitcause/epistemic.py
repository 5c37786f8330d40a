"""Possible-worlds knowledge over initial worlds and knowledge of causal chains.

Accessibility is stored only between initial worlds. Accessibility between
later situations is derived by replaying the narrative in both worlds: the
alternative must stay executable, and every sensing action performed by the
agent must return the same result in both.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Optional

from .bat import BasicActionTheory, precondition
from .causation import CausalChain, CausalSetting, causal_chain, chain_to_json
from .errors import ConflictingSensing, NarrativeMismatch, SitCauseError, UnknownWorld
from .logic import Action, Const, Formula, StateModel, evaluate
from .narrative import InitialModel, Situation, holds, trajectory


@dataclass(frozen=True)
class EpistemicFrame:
    """``edges[agent]`` holds (from_world, to_world): in from_world the agent considers to_world possible."""

    worlds: tuple  # of InitialModel
    edges: Mapping[str, frozenset] = field(default_factory=dict)

    def world(self, world_id: str) -> InitialModel:
        for w in self.worlds:
            if w.id == world_id:
                return w
        raise UnknownWorld(f"no world named {world_id!r}")

    def relation(self, agent: str) -> frozenset:
        if agent in self.edges:
            return self.edges[agent]
        raise SitCauseError(f"unknown agent {agent!r}")


def relation_violations(world_ids, rel) -> list:
    """Messages for each failure of reflexivity, transitivity or Euclideanness."""
    out = []
    ids = sorted(world_ids)
    for w in ids:
        if (w, w) not in rel:
            out.append(f"not reflexive at {w}")
    for (x, y), (y2, z) in product(sorted(rel), repeat=2):
        if y == y2 and (x, z) not in rel:
            out.append(f"not transitive: {x}->{y}->{z} without {x}->{z}")
    for (x, y), (x2, z) in product(sorted(rel), repeat=2):
        if x == x2 and (y, z) not in rel:
            out.append(f"not Euclidean: {x}->{y} and {x}->{z} without {y}->{z}")
    return out


def frame_violations(frame: EpistemicFrame) -> list:
    ids = [w.id for w in frame.worlds]
    return [f"agent {agt}: {msg}" for agt in sorted(frame.edges) for msg in relation_violations(ids, frame.edges[agt])]


def sf(bat: BasicActionTheory, alpha: Action, m: StateModel) -> bool:
    """Binary sensing result of ``alpha`` in ``m``; true when no guard applies."""
    result = None
    for ax in bat.sensing_axioms(alpha.name):
        env = {p.name: a for p, a in zip(ax.params, alpha.args)}
        if evaluate(ax.guard, m, env):
            value = evaluate(ax.condition, m, env)
            if result is not None and value != result:
                raise ConflictingSensing(f"sensing axioms for {alpha} disagree")
            result = value
    return True if result is None else result


def senses_for(bat: BasicActionTheory, alpha: Action, agent: str) -> bool:
    """Sensing actions belong to the agent named by their first argument."""
    return (
        bat.is_sensing(alpha.name)
        and bool(alpha.args)
        and isinstance(alpha.args[0], Const)
        and alpha.args[0].name == agent
    )


def survival(scenario, agent: str, actions: tuple, src: InitialModel, dst: InitialModel) -> int:
    """Largest k such that dst+k is accessible from src+k (-1 if not even initially)."""
    if (src.id, dst.id) not in scenario.frame.relation(agent):
        return -1
    bat = scenario.theory
    src_models = trajectory(bat, Situation(src, actions), check=False)
    dst_models = trajectory(bat, Situation(dst, actions), check=False)
    for i, alpha in enumerate(actions):
        if not evaluate(precondition(bat, alpha), dst_models[i]):
            return i
        if senses_for(bat, alpha, agent) and sf(bat, alpha, dst_models[i]) != sf(bat, alpha, src_models[i]):
            return i
    return len(actions)


def k_related(scenario, agent: str, to: Situation, frm: Situation) -> bool:
    """K(agent, to, frm): in ``frm`` the agent considers ``to`` possible."""
    if to.actions != frm.actions:
        return False
    return survival(scenario, agent, to.actions, frm.world, to.world) >= len(to.actions)


def k_accessible(scenario, agent: str, sigma: Situation) -> list:
    """Situations the agent considers possible at ``sigma``, ordered by world id."""
    trajectory(scenario.theory, sigma)  # raises NotExecutable
    return [
        Situation(w, sigma.actions)
        for w in sorted(scenario.frame.worlds, key=lambda w: w.id)
        if survival(scenario, agent, sigma.actions, sigma.world, w) >= len(sigma.actions)
    ]


def know(scenario, agent: str, phi: Formula, sigma: Situation) -> bool:
    return all(holds(scenario.theory, phi, s) for s in k_accessible(scenario, agent, sigma))


def chains_k_related(scenario, agent: str, first: tuple, second: tuple) -> bool:
    """Whether two chains over the same action sequence are K-related.

    ``first`` and ``second`` are (CausalChain, Situation) pairs. Entries must
    agree on actions and positions, and each situation of ``first`` must be
    accessible from the corresponding situation of ``second``. Two empty
    chains are related.
    """
    (k1, s1), (k2, s2) = first, second
    if s1.actions != s2.actions:
        raise NarrativeMismatch("chains come from narratives with different action sequences")
    if len(k1.entries) != len(k2.entries):
        return False
    for e1, e2 in zip(k1.entries, k2.entries):
        if e1.action != e2.action or e1.position != e2.position:
            return False
        if not k_related(scenario, agent, s1.prefix(e1.position), s2.prefix(e2.position)):
            return False
    return True


@dataclass(frozen=True)
class Alternative:
    world: str
    survives: bool
    chain: Optional[CausalChain]
    k_related: bool
    setting: Optional[CausalSetting] = field(default=None, compare=False)


@dataclass(frozen=True)
class KnowsChainVerdict:
    knows: bool
    knows_effect: bool
    actual: CausalChain
    setting: CausalSetting
    alternatives: tuple = ()


def knows_causal_chain(scenario, agent: str, setting: CausalSetting) -> KnowsChainVerdict:
    """Decide whether ``agent`` knows the causal chain of ``setting``.

    Every world initially related to the actual one is reported. Worlds that
    drop out along the narrative do not count. Surviving worlds where the
    effect fails have no chain and pass vacuously; ``knows_effect`` records
    whether the agent knows the effect itself.
    """
    sigma = setting.narrative
    if not sigma.world.actual:
        raise SitCauseError(f"narrative starts at {sigma.world.id}, not the actual world")
    bat = scenario.theory
    actual = causal_chain(setting)
    rel = scenario.frame.relation(agent)
    alts = []
    for w in sorted(scenario.frame.worlds, key=lambda w: w.id):
        if (sigma.world.id, w.id) not in rel:
            continue
        alt = Situation(w, sigma.actions)
        survives = survival(scenario, agent, sigma.actions, sigma.world, w) >= len(sigma.actions)
        if not survives:
            alts.append(Alternative(w.id, False, None, False))
        elif holds(bat, setting.effect, alt):
            alt_setting = CausalSetting(bat, alt, setting.effect)
            chain = causal_chain(alt_setting)
            related = chains_k_related(scenario, agent, (actual, sigma), (chain, alt))
            alts.append(Alternative(w.id, True, chain, related, alt_setting))
        else:
            alts.append(Alternative(w.id, True, None, True))
    knows = all(a.k_related for a in alts if a.survives)
    knows_effect = know(scenario, agent, setting.effect, sigma)
    return KnowsChainVerdict(knows, knows_effect, actual, setting, tuple(alts))


def verdict_to_json(verdict: KnowsChainVerdict) -> dict:
    alternatives = []
    for a in verdict.alternatives:
        chain = chain_to_json(a.chain, a.setting) if a.chain is not None else None
        alternatives.append({"world": a.world, "survives": a.survives, "chain": chain, "k_related": a.k_related})
    return {
        "knows": verdict.knows,
        "knows_effect": verdict.knows_effect,
        "actual": chain_to_json(verdict.actual, verdict.setting),
        "alternatives": alternatives,
    }
