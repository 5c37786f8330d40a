"""Single-step and repeated regression through successor-state axioms."""

from __future__ import annotations

from typing import Sequence

from .bat import BasicActionTheory, check_ground_action
from .logic import (
    Action,
    And,
    Atom,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Quantifier,
    simplify,
    substitute,
)


def _replace_fluents(bat: BasicActionTheory, phi: Formula, alpha: Action) -> Formula:
    if isinstance(phi, Atom):
        if not phi.fluent:
            return phi
        ssa = bat.ssa(phi.name)
        b = {p.name: arg for p, arg in zip(ssa.params, phi.args)}
        b[ssa.action_var] = alpha
        return substitute(ssa.rhs, b)
    if isinstance(phi, Not):
        return Not(_replace_fluents(bat, phi.arg, alpha))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(_replace_fluents(bat, a, alpha) for a in phi.args))
    if isinstance(phi, (Implies, Iff)):
        return type(phi)(_replace_fluents(bat, phi.left, alpha), _replace_fluents(bat, phi.right, alpha))
    if isinstance(phi, Quantifier):
        return type(phi)(phi.var, _replace_fluents(bat, phi.body, alpha))
    return phi


def rho(bat: BasicActionTheory, phi: Formula, alpha: Action) -> Formula:
    """Regress ``phi`` over the ground action ``alpha``.

    Each fluent atom becomes its successor-state axiom's right-hand side with
    the atom's arguments and ``alpha`` plugged in; the result is simplified.
    Quantified variables of ``phi`` that clash with bound variables of an
    axiom are handled by capture-avoiding substitution.
    """
    check_ground_action(bat, alpha)
    return simplify(_replace_fluents(bat, phi, alpha))


def regress_all(bat: BasicActionTheory, phi: Formula, actions: Sequence[Action]) -> Formula:
    """Regress over a whole action sequence, last action first."""
    for alpha in reversed(tuple(actions)):
        phi = rho(bat, phi, alpha)
    return phi
