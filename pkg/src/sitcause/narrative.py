"""Ground situations: an initial world plus the actions performed from it."""

from __future__ import annotations

from dataclasses import dataclass

from .bat import BasicActionTheory, check_ground_action, precondition, progress
from .errors import NotExecutable, UnboundVariable
from .logic import Action, Formula, StateModel, evaluate, free_vars


@dataclass(frozen=True)
class InitialModel:
    id: str
    model: StateModel
    actual: bool = False


@dataclass(frozen=True)
class Situation:
    world: InitialModel
    actions: tuple = ()

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def label(self) -> str:
        return f"{self.world.id}+{len(self.actions)}"

    def prefix(self, n: int) -> "Situation":
        if not 0 <= n <= len(self.actions):
            raise IndexError(f"prefix length {n} outside 0..{len(self.actions)}")
        return Situation(self.world, self.actions[:n])

    def do(self, alpha: Action) -> "Situation":
        return Situation(self.world, self.actions + (alpha,))

    def is_prefix_of(self, other: "Situation") -> bool:
        return self.world == other.world and other.actions[: len(self.actions)] == self.actions

    def __str__(self) -> str:
        return self.label


def trajectory(bat: BasicActionTheory, sigma: Situation, check: bool = True) -> tuple:
    """Models at every prefix of ``sigma`` (index i = after i actions).

    Memoized per theory; ``check`` raises NotExecutable at the first
    impossible action, otherwise models are progressed regardless.
    """
    memo, lock = bat._cache
    key = (sigma.world.id, sigma.world.model, sigma.actions, check)
    with lock:
        hit = memo.get(key)
    if hit is not None:
        return hit
    models = [sigma.world.model]
    for i, alpha in enumerate(sigma.actions):
        check_ground_action(bat, alpha)
        if check and not evaluate(precondition(bat, alpha), models[-1]):
            raise NotExecutable(f"{alpha} is not possible at {sigma.world.id}+{i}", position=i)
        models.append(progress(bat, models[-1], alpha, check=False))
    out = tuple(models)
    with lock:
        memo[key] = out
    return out


def executable(bat: BasicActionTheory, sigma: Situation) -> bool:
    try:
        trajectory(bat, sigma)
    except NotExecutable:
        return False
    return True


def model_at(bat: BasicActionTheory, sigma: Situation) -> StateModel:
    return trajectory(bat, sigma)[-1]


def holds(bat: BasicActionTheory, phi: Formula, sigma: Situation) -> bool:
    """Whether the closed formula ``phi`` is true at the end of ``sigma``."""
    fv = free_vars(phi)
    if fv:
        raise UnboundVariable(f"formula has free variables {sorted(v.name for v in fv)}")
    return evaluate(phi, model_at(bat, sigma))


def holds_along(bat: BasicActionTheory, phi: Formula, sigma: Situation) -> list:
    """Truth value of ``phi`` at every prefix of ``sigma``, shortest first."""
    fv = free_vars(phi)
    if fv:
        raise UnboundVariable(f"formula has free variables {sorted(v.name for v in fv)}")
    return [evaluate(phi, m) for m in trajectory(bat, sigma)]
