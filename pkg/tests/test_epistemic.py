import pytest
from hypothesis import given, settings, strategies as st

from sitcause.causation import CausalSetting, causal_chain
from sitcause.dsl import parse_action, parse_formula, parse_narrative, parse_scenario, scenario_to_text
from sitcause.epistemic import (
    EpistemicFrame,
    chains_k_related,
    frame_violations,
    k_accessible,
    k_related,
    know,
    knows_causal_chain,
    relation_violations,
    sf,
    verdict_to_json,
)
from sitcause.errors import ConflictingSensing, NarrativeMismatch, NotExecutable, SitCauseError
from sitcause.narrative import Situation, holds, model_at, trajectory
from sitcause.oracle import frame_property_check

from conftest import SCENARIOS, car_formulas, scenario

GROUND = ["drive(C,I,J)", "drive(C,J,K)", "drive(C,K,J)", "turn(C,J)", "turn(C,K)", "hack(C)"]


def narrative(sc, text, world=None):
    return sc.situation(parse_narrative(text, sc.theory.signature), world)


def test_initial_accessibility(car):
    assert [s.label for s in k_accessible(car, "Agt", car.situation())] == ["S0+0", "S0star+0"]
    assert [s.label for s in k_accessible(car, "Agt", car.narrative("sigma1"))] == ["S0+5", "S0star+5"]


def test_know_initially(car):
    sig = car.theory.signature
    s0 = car.situation()
    assert know(car, "Agt", parse_formula("!damaged(C)", sig), s0)
    assert not know(car, "Agt", parse_formula("corrupted(C)", sig), s0)
    assert not know(car, "Agt", parse_formula("!corrupted(C)", sig), s0)
    assert know(car, "Agt", parse_formula("damaged(C)", sig), car.narrative("sigma1"))


def test_k_related_is_directional_on_the_frame():
    sc = scenario("car_singleton")
    s, t = sc.situation((), "S0"), sc.situation((), "S0star")
    assert k_related(sc, "Agt", s, s)
    assert not k_related(sc, "Agt", t, s)


def test_unknown_agent(car):
    with pytest.raises(SitCauseError):
        k_accessible(car, "Nobody", car.situation())


def test_k_accessible_requires_executable(car):
    with pytest.raises(NotExecutable):
        k_accessible(car, "Agt", narrative(car, "drive(C,J,K)"))


def test_sensing_results(garage):
    bat, sig = garage.theory, garage.theory.signature
    sense = parse_action("senseCorrupted(C)", sig)
    at_garage = Situation(garage.world("S0star"), parse_narrative("drive(C,I,Garage)", sig))
    models = {w: Situation(garage.world(w), at_garage.actions) for w in ("S0", "S0star")}
    assert sf(bat, sense, model_at(bat, models["S0star"])) is True
    assert sf(bat, sense, model_at(bat, models["S0"])) is False
    # guard false: no information, so both worlds give the default
    assert sf(bat, sense, garage.world("S0").model) is True
    assert sf(bat, sense, garage.world("S0star").model) is True
    assert sf(bat, parse_action("hack(C)", sig), garage.world("S0").model) is True


def test_sensing_filters_only_at_the_garage(garage):
    assert [s.world.id for s in k_accessible(garage, "C", garage.narrative("checked"))] == ["S0"]
    assert [s.world.id for s in k_accessible(garage, "C", garage.narrative("away"))] == ["S0", "S0star"]
    sig = garage.theory.signature
    assert know(garage, "C", parse_formula("!corrupted(C)", sig), narrative(garage, "drive(C,I,Garage); senseCorrupted(C)"))


def test_sensing_by_another_agent_does_not_filter(garage):
    text = scenario_to_text(garage).replace("agent C", "agent C, D").replace("k C: ", "k D: S0 ~ S0star\nk C: ")
    sc = parse_scenario(text)
    assert [s.world.id for s in k_accessible(sc, "D", sc.narrative("checked"))] == ["S0", "S0star"]


def test_conflicting_sensing_axioms(garage):
    text = scenario_to_text(garage) + "sense senseCorrupted(c) guard: true tells: damaged(c)\n"
    sc = parse_scenario(text)
    sig = sc.theory.signature
    m = sc.narrative("checked", "S0star")
    with pytest.raises(ConflictingSensing):
        sf(sc.theory, parse_action("senseCorrupted(C)", sig), trajectory(sc.theory, m)[1])


def test_chains_k_related(car):
    sig = car.theory.signature
    effect = parse_formula("damaged(C)", sig)
    s1 = car.narrative("sigma1")
    star = car.narrative("sigma1", "S0star")
    k1 = causal_chain(CausalSetting(car.theory, s1, effect))
    kstar = causal_chain(CausalSetting(car.theory, star, effect))
    assert chains_k_related(car, "Agt", (k1, s1), (k1, s1))
    assert not chains_k_related(car, "Agt", (k1, s1), (kstar, star))
    with pytest.raises(NarrativeMismatch):
        chains_k_related(car, "Agt", (k1, s1), (kstar, star.prefix(3)))


def test_identical_worlds_have_related_chains(car):
    text = (SCENARIOS / "car.sct").read_text()
    text = text.replace("world S0star: at(C,I); corrupted(C);", "world S0copy: at(C,I);").replace("S0star", "S0copy")
    sc = parse_scenario(text)
    s = CausalSetting(sc.theory, sc.narrative("sigma1"), parse_formula("damaged(C)", sc.theory.signature))
    v = knows_causal_chain(sc, "Agt", s)
    copy = {a.world: a for a in v.alternatives}["S0copy"]
    assert copy.chain == v.actual and copy.k_related and v.knows


def test_car_verdict(car):
    sig = car.theory.signature
    s = CausalSetting(car.theory, car.narrative("sigma1"), parse_formula("damaged(C)", sig))
    v = knows_causal_chain(car, "Agt", s)
    assert v.knows is False and v.knows_effect is True
    out = verdict_to_json(v)
    assert [a["world"] for a in out["alternatives"]] == ["S0", "S0star"]
    star = out["alternatives"][1]
    assert star["survives"] and not star["k_related"]
    assert star["chain"]["chain"] == [{"action": "turn(C,J)", "position": 1}, {"action": "drive(C,I,J)", "position": 0}]


@pytest.mark.parametrize("name, agent, narr, knows", [
    ("car_singleton", "Agt", "sigma1", True),
    ("car_both_corrupted", "Agt", "sigma1", True),
    ("garage", "C", "checked", True),
    ("garage", "C", "unchecked", False),
    ("garage", "C", "away", False),
])
def test_fixture_verdicts(name, agent, narr, knows):
    sc = scenario(name)
    s = CausalSetting(sc.theory, sc.narrative(narr), parse_formula("damaged(C)", sc.theory.signature))
    v = knows_causal_chain(sc, agent, s)
    assert v.knows is knows
    if knows:
        assert causal_chain(s) == v.actual


def test_both_corrupted_chains_coincide():
    sc = scenario("car_both_corrupted")
    s = CausalSetting(sc.theory, sc.narrative("sigma1"), parse_formula("damaged(C)", sc.theory.signature))
    v = knows_causal_chain(sc, "Agt", s)
    assert [a.chain.pairs() for a in v.alternatives] == [[("turn(C,J)", 1), ("drive(C,I,J)", 0)]] * 2


def test_alternative_without_effect_passes_vacuously(car):
    sig = car.theory.signature
    s = CausalSetting(car.theory, narrative(car, "drive(C,I,J)"), parse_formula("!corrupted(C)", sig))
    v = knows_causal_chain(car, "Agt", s)
    star = {a.world: a for a in v.alternatives}["S0star"]
    assert star.survives and star.chain is None and star.k_related
    assert v.actual.status == "held_initially"
    assert v.knows is True and v.knows_effect is False


def test_different_chain_lengths_are_not_related(car):
    sig = car.theory.signature
    effect = parse_formula("corrupted(C) & !at(C,I)", sig)
    v = knows_causal_chain(car, "Agt", CausalSetting(car.theory, car.narrative("sigma1"), effect))
    assert v.actual.pairs() == [("hack(C)", 2), ("drive(C,I,J)", 0)]
    star = {a.world: a for a in v.alternatives}["S0star"]
    assert star.chain.pairs() == [("drive(C,I,J)", 0)]
    assert v.knows is False


def test_frame_validation():
    assert relation_violations(["A", "B"], {("A", "A"), ("B", "B"), ("A", "B"), ("B", "A")}) == []
    msgs = relation_violations(["A", "B"], {("A", "A"), ("A", "B"), ("B", "A")})
    assert any("reflexive" in m for m in msgs) and any("Euclidean" in m for m in msgs)
    assert frame_violations(EpistemicFrame((), {})) == []


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(GROUND), max_size=6), car_formulas(max_leaves=4))
def test_knowledge_invariants_along_car_narratives(car, names, phi):
    sig = car.theory.signature
    actions = tuple(parse_action(n, sig) for n in names)
    sigma = car.situation(actions)
    try:
        accessible = k_accessible(car, "Agt", sigma)
    except NotExecutable:
        return
    assert sigma in accessible
    if know(car, "Agt", phi, sigma):
        assert holds(car.theory, phi, sigma)
    if actions:
        before = {s.world.id for s in k_accessible(car, "Agt", sigma.prefix(len(actions) - 1))}
        assert {s.world.id for s in accessible} <= before
    assert frame_property_check(car, "Agt", actions) == []
