import pytest
from hypothesis import given, settings, strategies as st

from sitcause.dsl import parse_action, parse_formula, parse_narrative, parse_scenario, scenario_to_text
from sitcause.errors import ParseError
from sitcause.logic import And, Atom, Const, Eq, Exists, Not, Var, evaluate, to_text

from conftest import SCENARIOS, car_formulas

CAR_TEXT = (SCENARIOS / "car.sct").read_text()


def categories(fn, *args):
    with pytest.raises(ParseError) as info:
        fn(*args)
    return [d.category for d in info.value.diagnostics]


def test_car_fixture_shape(car):
    assert len(car.worlds) == 2
    assert len(car.theory.schemas) == 3 and len(car.theory.signature.fluents) == 3
    assert car.agents == ("Agt",)
    assert sorted(car.frame.relation("Agt")) == [("S0", "S0"), ("S0", "S0star"), ("S0star", "S0"), ("S0star", "S0star")]
    assert car.narratives["sigma1"] == parse_narrative(
        "drive(C,I,J); turn(C,J); hack(C); drive(C,J,K); turn(C,K)", car.theory.signature)
    assert len(car.narratives["sigma2"]) == 8


def test_formula_parsing(car):
    sig = car.theory.signature
    C = Const("C", "car")
    assert parse_formula("damaged(C)", sig) == Atom("damaged", (C,))
    phi = parse_formula("exists c, c2 (c != c2 & damaged(c) & damaged(c2))", sig)
    c, c2 = Var("c", "car"), Var("c2", "car")
    assert phi == Exists(c, Exists(c2, And((Not(Eq(c, c2)), Atom("damaged", (c,)), Atom("damaged", (c2,))))))
    assert parse_formula("∃c,c2 (c ≠ c2 ∧ damaged(c) ∧ damaged(c2))", sig) == phi
    assert parse_formula("exists c:car. damaged(c)", sig) == parse_formula("exists c (damaged(c))", sig)


def test_precedence(car):
    sig = car.theory.signature
    assert to_text(parse_formula("!damaged(C) & corrupted(C) | at(C,I)", sig)) == "!damaged(C) & corrupted(C) | at(C,I)"
    phi = parse_formula("damaged(C) -> corrupted(C) -> at(C,I) <-> at(C,J)", sig)
    # -> is right associative and binds tighter than <->
    assert to_text(phi) == "damaged(C) -> (corrupted(C) -> at(C,I)) <-> at(C,J)"
    # the dot form extends as far right as possible
    dotted = parse_formula("exists j. at(C,j) & connected(j,I)", sig)
    assert isinstance(dotted, Exists) and isinstance(dotted.body, And)


def test_formula_errors(car):
    sig = car.theory.signature
    assert categories(parse_formula, "at(C)", sig) == ["ArityError"]
    assert categories(parse_formula, "fly(C)", sig) == ["UnknownSymbol"]
    assert categories(parse_formula, "damaged(I)", sig) == ["SortMismatch"]
    assert categories(parse_formula, "damaged(c)", sig) == ["UnknownSymbol"]
    assert categories(parse_formula, "damaged(C) &", sig) == ["SyntaxError"]
    with pytest.raises(ParseError) as info:
        parse_formula("damaged(C) & & at(C,I)", sig)
    assert info.value.diagnostics[0].location.column == 14


def test_narrative_parsing(car):
    sig = car.theory.signature
    assert len(parse_narrative("drive(C,I,J); turn(C,J); hack(C); drive(C,J,K); turn(C,K)", sig)) == 5
    assert parse_narrative("", sig) == ()
    assert categories(parse_narrative, "fly(C)", sig) == ["UnknownSymbol"]
    assert categories(parse_narrative, "damaged(C)", sig) == ["SyntaxError"]
    assert categories(parse_action, "hack(C); hack(C)", sig) == ["SyntaxError"]


def test_empty_and_partial_scenarios():
    assert set(categories(parse_scenario, "")) == {"SyntaxError"}
    with pytest.raises(ParseError) as info:
        parse_scenario("sorts: car\n")
    assert any("objects" in d.message for d in info.value.diagnostics)


def test_frame_violation_is_located():
    with pytest.raises(ParseError) as info:
        parse_scenario((SCENARIOS / "car_bad_frame.sct").read_text(), "bad.sct")
    diags = info.value.diagnostics
    assert {d.category for d in diags} == {"FrameViolation"}
    assert all(d.location.line == 22 for d in diags)


@pytest.mark.parametrize("edit, category", [
    (("world S0star:", "world S0star actual:"), "MultipleActualWorlds"),
    (("world S0 actual:", "world S0:"), "MultipleActualWorlds"),
    (("ssa damaged(c)", "ssa broken(c)"), "UnknownSymbol"),
    (("ssa corrupted(c): a = hack(c) | corrupted(c)", ""), "MissingSSA"),
    (("turn(C,K)\n", "turn(C)\n"), "ArityError"),
    (("agent Agt", "agent Agt\nagent Agt"), "DuplicateDeclaration"),
    (("k Agt: S0 ~ S0star", "k Agt: S0 ~ S1"), "UnknownSymbol"),
    (("hack(c:car) poss: true", "hack(c:car) poss: at(c,j)"), "UnknownSymbol"),
    (("narrative sigma1:", "narrative sigma2:"), "DuplicateDeclaration"),
    (("world S0star", "world S0"), "DuplicateDeclaration"),
    (("sorts: car loc", "sorts: car loc spare"), "EmptySort"),
    (("agent Agt", "bogus Agt"), "SyntaxError"),
])
def test_scenario_errors(edit, category):
    old, new = edit
    assert old in CAR_TEXT
    assert category in categories(parse_scenario, CAR_TEXT.replace(old, new, 1))


def test_errors_are_collected_not_first_only():
    text = CAR_TEXT.replace("ssa damaged(c)", "ssa broken(c)").replace("turn(C,K)\n", "turn(C)\n")
    cats = categories(parse_scenario, text)
    assert "UnknownSymbol" in cats and "ArityError" in cats


def test_crlf_and_comments():
    sc = parse_scenario(CAR_TEXT.replace("\n", "\r\n"))
    assert sc == parse_scenario(CAR_TEXT)


def test_scenario_round_trip(car, garage, twocars):
    for sc in (car, garage, twocars):
        text = scenario_to_text(sc)
        assert parse_scenario(text) == sc
        assert scenario_to_text(parse_scenario(text)) == text


@settings(max_examples=150, deadline=None)
@given(car_formulas())
def test_formula_round_trip(car, phi):
    sig = car.theory.signature
    parsed = parse_formula(to_text(phi), sig)
    assert parse_formula(to_text(parsed), sig) == parsed
    for w in car.worlds:
        assert evaluate(parsed, w.model) == evaluate(phi, w.model)


ALPHABET = ["(", ")", "&", "|", "!", "->", "<->", "=", "!=", ",", ".", ":", ";", "~", " ", "exists", "forall",
            "true", "false", "at", "damaged", "C", "I", "j", "car", "loc", "hack", "∃", "¬", "\n", "#", "@", "é"]


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(ALPHABET), max_size=25).map("".join))
def test_formula_parser_is_total(car, text):
    try:
        parse_formula(text, car.theory.signature)
    except ParseError as err:
        assert err.diagnostics and all(d.location is not None for d in err.diagnostics)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_scenario_parser_is_total(data):
    text = CAR_TEXT
    for _ in range(data.draw(st.integers(1, 4))):
        i = data.draw(st.integers(0, len(text)))
        j = data.draw(st.integers(i, min(len(text), i + 20)))
        text = text[:i] + data.draw(st.sampled_from(["", "(", ")", ";", ":", "~", "->", "\n", " x", "!"])) + text[j:]
    try:
        parse_scenario(text)
    except ParseError as err:
        assert err.diagnostics and all(d.location is not None for d in err.diagnostics)


def test_deep_nesting_is_a_diagnostic(car):
    assert categories(parse_formula, "(" * 3000 + "true" + ")" * 3000, car.theory.signature) == ["SyntaxError"]
