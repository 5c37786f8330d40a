"""Action theory, narratives and regression on the car domain."""

import pytest
from hypothesis import given, settings, strategies as st

from sitcause.bat import (
    ActionSchema,
    BasicActionTheory,
    Signature,
    SuccessorStateAxiom,
    frame_preserved,
    precondition,
    progress,
    validate,
)
from sitcause.dsl import parse_action, parse_formula, parse_narrative
from sitcause.errors import ArityError, NotExecutable, SortMismatch, UnboundVariable, UnknownAction
from sitcause.logic import TRUE, Action, Atom, Const, Var, evaluate, to_text
from sitcause.narrative import Situation, executable, holds, holds_along, trajectory
from sitcause.regression import regress_all, rho

from conftest import car_formulas

SIGMA1 = "drive(C,I,J); turn(C,J); hack(C); drive(C,J,K); turn(C,K)"
GROUND = [
    "drive(C,I,J)", "drive(C,J,K)", "drive(C,K,J)", "drive(C,J,I)", "drive(C,I,K)",
    "turn(C,I)", "turn(C,J)", "turn(C,K)", "hack(C)",
]


def act(sc, text):
    return parse_action(text, sc.theory.signature)


def f(sc, text):
    return parse_formula(text, sc.theory.signature)


def test_car_theory_shape(car):
    bat = car.theory
    assert validate(bat) == []
    assert sorted(s.name for s in bat.schemas) == ["drive", "hack", "turn"]
    assert sorted(bat.signature.fluents) == ["at", "corrupted", "damaged"]
    assert len(car.worlds) == 2 and car.actual.id == "S0"


def test_precondition_instances(car):
    assert precondition(car.theory, act(car, "hack(C)")) == TRUE
    assert to_text(precondition(car.theory, act(car, "drive(C,I,J)"))) == "at(C,I) & connected(I,J)"
    # the I != I conjunct is decided by unique names
    assert to_text(precondition(car.theory, act(car, "drive(C,I,I)"))) == "false"


def test_ground_action_checks(car):
    bat = car.theory
    with pytest.raises(UnknownAction):
        precondition(bat, Action("fly", (Const("C", "car"),)))
    with pytest.raises(ArityError):
        precondition(bat, Action("hack", ()))
    with pytest.raises(SortMismatch):
        precondition(bat, Action("hack", (Const("I", "loc"),)))


def test_progression_matches_fluent_evolution(car):
    """Fluent values along sigma1 in both worlds."""
    for world, corrupted_from, damaged_from in (("S0", 3, 5), ("S0star", 0, 2)):
        sigma = car.situation(parse_narrative(SIGMA1, car.theory.signature), world)
        assert holds_along(car.theory, f(car, "corrupted(C)"), sigma) == [i >= corrupted_from for i in range(6)]
        assert holds_along(car.theory, f(car, "damaged(C)"), sigma) == [i >= damaged_from for i in range(6)]
        assert holds_along(car.theory, f(car, "at(C,K)"), sigma) == [i >= 4 for i in range(6)]


def test_not_executable_reports_position(car):
    sigma = car.situation(parse_narrative("hack(C); drive(C,J,K)", car.theory.signature))
    assert not executable(car.theory, sigma)
    with pytest.raises(NotExecutable) as info:
        trajectory(car.theory, sigma)
    assert info.value.position == 1


def test_holds_requires_closed_formula(car):
    with pytest.raises(UnboundVariable):
        holds(car.theory, Atom("damaged", (Var("c", "car"),)), car.situation())


def test_situation_helpers(car):
    actions = parse_narrative(SIGMA1, car.theory.signature)
    sigma = car.situation(actions)
    assert sigma.label == "S0+5"
    assert sigma.prefix(2).is_prefix_of(sigma)
    assert not sigma.is_prefix_of(sigma.prefix(2))
    assert sigma.prefix(4).do(actions[4]) == sigma
    with pytest.raises(IndexError):
        sigma.prefix(6)


def test_regression_examples(car):
    assert to_text(rho(car.theory, f(car, "damaged(C)"), act(car, "turn(C,K)"))) == "corrupted(C) | damaged(C)"
    assert rho(car.theory, f(car, "corrupted(C)"), act(car, "hack(C)")) == TRUE
    assert to_text(rho(car.theory, f(car, "at(C,K)"), act(car, "drive(C,J,K)"))) == "true"
    assert to_text(rho(car.theory, f(car, "at(C,J)"), act(car, "drive(C,J,K)"))) == "false"
    assert regress_all(car.theory, f(car, "damaged(C)"), ()) == f(car, "damaged(C)")


def test_regression_over_sigma1_is_initially_true(car):
    actions = parse_narrative(SIGMA1, car.theory.signature)
    phi = regress_all(car.theory, f(car, "damaged(C)"), actions)
    for w in car.worlds:
        assert evaluate(phi, w.model)


def test_rho_avoids_capture_of_ssa_variables(car):
    # the query binds j, which the at-SSA also uses as a bound variable
    phi = f(car, "exists j (at(C,j) & j != I)")
    alpha = act(car, "drive(C,I,J)")
    m = car.actual.model
    assert evaluate(rho(car.theory, phi, alpha), m) == evaluate(phi, progress(car.theory, m, alpha))


@settings(max_examples=100, deadline=None)
@given(car_formulas(), st.lists(st.sampled_from(GROUND), max_size=5), st.sampled_from(["S0", "S0star"]))
def test_regression_agrees_with_progression(car, phi, names, world):
    actions = tuple(act(car, n) for n in names)
    w = car.world(world)
    models = trajectory(car.theory, Situation(w, actions), check=False)
    assert evaluate(regress_all(car.theory, phi, actions), w.model) == evaluate(phi, models[-1])


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(GROUND), st.sampled_from(["S0", "S0star"]))
def test_frame_property(car, name, world):
    assert frame_preserved(car.theory, car.world(world).model, act(car, name)) == []


def test_validate_reports_problems():
    x = Var("x", "obj")
    sig = Signature(("obj",), {"o": "obj"}, {}, {"p": ("obj",), "q": ()}, {"go": ("obj",), "stop": ()})
    bat = BasicActionTheory(
        sig,
        schemas=(
            ActionSchema("go", (x,), Atom("p", (Var("y", "obj"),))),
            ActionSchema("go", (x,), TRUE),
        ),
        ssas=(SuccessorStateAxiom("p", (x,), Atom("r", (x,))),),
    )
    cats = sorted(d.category for d in validate(bat))
    assert cats == ["DuplicateAction", "FreeVariable", "MissingSSA", "MissingSchema", "UnknownSymbol"]
