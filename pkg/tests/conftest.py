from pathlib import Path

import pytest
from hypothesis import strategies as st

from sitcause.dsl import load_scenario
from sitcause.logic import And, Atom, Const, Eq, Exists, Forall, Iff, Implies, Not, Or, Var, free_vars

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"


@pytest.fixture(scope="session")
def car():
    return load_scenario(SCENARIOS / "car.sct")


@pytest.fixture(scope="session")
def twocars():
    return load_scenario(SCENARIOS / "twocars.sct")


@pytest.fixture(scope="session")
def garage():
    return load_scenario(SCENARIOS / "garage.sct")


def scenario(name):
    return load_scenario(SCENARIOS / f"{name}.sct")


# formulas over the car signature; quantifiers reuse a small pool of
# variable names so shadowing shows up often

CARS = [Const("C", "car")]
LOCS = [Const(n, "loc") for n in "IJK"]
POOL = [Var("u", "car"), Var("v", "loc"), Var("w", "loc")]


def _atoms(extra=()):
    cars = CARS + [v for v in POOL + list(extra) if v.sort == "car"]
    locs = LOCS + [v for v in POOL + list(extra) if v.sort == "loc"]
    return st.one_of(
        st.builds(lambda c, l: Atom("at", (c, l)), st.sampled_from(cars), st.sampled_from(locs)),
        st.builds(lambda c: Atom("corrupted", (c,)), st.sampled_from(cars)),
        st.builds(lambda c: Atom("damaged", (c,)), st.sampled_from(cars)),
        st.builds(lambda x, y: Atom("connected", (x, y), fluent=False), st.sampled_from(locs), st.sampled_from(locs)),
        st.builds(Eq, st.sampled_from(locs), st.sampled_from(locs)),
    )


def _close(phi, keep):
    for v in sorted(free_vars(phi) - set(keep), key=lambda v: v.name):
        phi = Exists(v, phi)
    return phi


def car_formulas(max_leaves=6, scope=()):
    """Formulas whose only free variables are those in ``scope``."""
    tree = st.recursive(
        _atoms(scope),
        lambda sub: st.one_of(
            st.builds(Not, sub),
            st.builds(lambda a, b: And((a, b)), sub, sub),
            st.builds(lambda a, b: Or((a, b)), sub, sub),
            st.builds(Implies, sub, sub),
            st.builds(Iff, sub, sub),
            st.builds(Exists, st.sampled_from(POOL), sub),
            st.builds(Forall, st.sampled_from(POOL), sub),
        ),
        max_leaves=max_leaves,
    )
    return tree.map(lambda phi: _close(phi, scope))


# one pass/fail line per acceptance criterion

_criteria = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.failed or report.skipped:
        number = int(name.split("_")[2])
        ok = report.passed and report.when == "call"
        _criteria[number] = (_criteria.get(number, (True, name))[0] and ok, name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        ok, name = _criteria[number]
        label = name.split("_", 3)[3].replace("_", " ")
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({label})")
