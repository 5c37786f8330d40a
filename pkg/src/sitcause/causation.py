"""Actual achievement causes and causal chains over a ground narrative."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bat import BasicActionTheory, precondition
from .errors import EffectNotAchieved, NotExecutable, UnboundVariable
from .logic import Action, And, Formula, free_vars, simplify, to_text
from .narrative import Situation, holds_along, trajectory
from .regression import rho

OK = "ok"
HELD_INITIALLY = "held_initially"


@dataclass(frozen=True)
class CausalSetting:
    """Theory, executable narrative and a closed effect that holds at its end."""

    theory: BasicActionTheory
    narrative: Situation
    effect: Formula

    def __post_init__(self) -> None:
        fv = free_vars(self.effect)
        if fv:
            raise UnboundVariable(f"effect has free variables {sorted(v.name for v in fv)}")
        try:
            trajectory(self.theory, self.narrative)
        except NotExecutable as exc:
            raise NotExecutable(f"narrative {self.narrative.label} is not executable: {exc}", exc.position) from None
        if not holds_along(self.theory, self.effect, self.narrative)[-1]:
            raise EffectNotAchieved(f"effect not achieved: {to_text(self.effect)} is false at {self.narrative.label}")


@dataclass(frozen=True)
class CauseEntry:
    action: Action
    position: int  # length of the prefix the action was executed in

    def __str__(self) -> str:
        return f"({self.action}, {self.position})"


@dataclass(frozen=True)
class CausalChain:
    entries: tuple = ()
    status: str = OK

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def pairs(self) -> list:
        return [(str(e.action), e.position) for e in self.entries]


@dataclass(frozen=True)
class Step:
    """One recursion level: the setting examined and the cause found in it, if any."""

    setting: CausalSetting
    cause: Optional[CauseEntry]


def achievement_flip(setting: CausalSetting) -> Optional[tuple]:
    """``(action, p)`` where the effect is false at prefix p and true from p+1 on.

    None when the effect already holds at every prefix.
    """
    values = holds_along(setting.theory, setting.effect, setting.narrative)
    for p in range(len(values) - 2, -1, -1):
        if not values[p]:
            return setting.narrative.actions[p], p
    return None


def child_setting(setting: CausalSetting, alpha: Action, prefix_len: int) -> CausalSetting:
    """The setting whose achievement makes ``alpha`` at ``prefix_len`` bring the effect about.

    The new effect is the regression of the old one over ``alpha`` conjoined
    with ``alpha``'s precondition, kept situation-suppressed so it can be
    regressed again. Statics fixed by the theory are folded in.
    """
    bat = setting.theory
    effect = simplify(And((rho(bat, setting.effect, alpha), precondition(bat, alpha))), bat.rigid)
    return CausalSetting(bat, setting.narrative.prefix(prefix_len), effect)


def derivation(setting: CausalSetting) -> list:
    """Every recursion level of the chain construction, outermost first."""
    steps = []
    current = setting
    while True:
        flip = achievement_flip(current)
        if flip is None:
            steps.append(Step(current, None))
            return steps
        alpha, p = flip
        steps.append(Step(current, CauseEntry(alpha, p)))
        current = child_setting(current, alpha, p)


def causal_chain(setting: CausalSetting) -> CausalChain:
    entries = tuple(s.cause for s in derivation(setting) if s.cause is not None)
    return CausalChain(entries, OK if entries else HELD_INITIALLY)


def is_cause(setting: CausalSetting, action: Action, prefix_len: int) -> bool:
    return CauseEntry(action, prefix_len) in causal_chain(setting).entries


def chain_to_json(chain: CausalChain, setting: CausalSetting) -> dict:
    return {
        "effect": to_text(setting.effect),
        "world": setting.narrative.world.id,
        "chain": [{"action": str(e.action), "position": e.position} for e in chain.entries],
        "status": chain.status,
    }
