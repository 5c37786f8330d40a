"""A loaded scenario: theory, initial worlds, epistemic frame and named narratives."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .bat import BasicActionTheory
from .epistemic import EpistemicFrame
from .errors import UnknownSymbol
from .narrative import InitialModel, Situation


@dataclass(frozen=True)
class Scenario:
    theory: BasicActionTheory
    frame: EpistemicFrame
    agents: tuple = ()
    narratives: Mapping[str, tuple] = field(default_factory=dict)

    @property
    def worlds(self) -> tuple:
        return self.frame.worlds

    @property
    def actual(self) -> InitialModel:
        return next(w for w in self.frame.worlds if w.actual)

    def world(self, world_id: str) -> InitialModel:
        return self.frame.world(world_id)

    def situation(self, actions: Sequence = (), world: str | None = None) -> Situation:
        """Situation rooted at ``world`` (the actual world by default)."""
        w = self.actual if world is None else self.frame.world(world)
        return Situation(w, tuple(actions))

    def narrative(self, name: str, world: str | None = None) -> Situation:
        if name not in self.narratives:
            raise UnknownSymbol(f"no narrative named {name!r}")
        return self.situation(self.narratives[name], world)
