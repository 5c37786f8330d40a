"""Recompute the worked examples on the shipped fixtures and print the results.

    python3 scripts/reproduce_examples.py
"""

import argparse
from pathlib import Path

from sitcause.causation import CausalSetting, causal_chain, derivation
from sitcause.dsl import load_scenario, parse_action, parse_formula
from sitcause.epistemic import k_accessible, know, knows_causal_chain
from sitcause.logic import to_text
from sitcause.regression import rho

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def show_chain(title, setting):
    chain = causal_chain(setting)
    print(f"{title}: " + ", ".join(f"({a}, {p})" for a, p in chain.pairs()) + f"  [{chain.status}]")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenarios", type=Path, default=SCENARIOS)
    args = ap.parse_args()

    car = load_scenario(args.scenarios / "car.sct")
    sig = car.theory.signature
    damaged = parse_formula("damaged(C)", sig)

    print("regression of damaged(C) over turn(C,K):",
          to_text(rho(car.theory, damaged, parse_action("turn(C,K)", sig))))

    s1 = CausalSetting(car.theory, car.narrative("sigma1"), damaged)
    print("\nrecursion over sigma1:")
    for step in derivation(s1):
        cause = f"-> {step.cause}" if step.cause else "-> no further cause"
        print(f"  <{to_text(step.setting.effect)}, {step.setting.narrative.label}> {cause}")
    show_chain("sigma1 chain", s1)
    show_chain("sigma2 chain", CausalSetting(car.theory, car.narrative("sigma2"), damaged))

    two = load_scenario(args.scenarios / "twocars.sct")
    phi = parse_formula("exists c, c2 (c != c2 & damaged(c) & damaged(c2))", two.theory.signature)
    show_chain("sigma3 chain", CausalSetting(two.theory, two.narrative("sigma3"), phi))

    print("\ninitial knowledge of Agt:")
    for text in ("!damaged(C)", "at(C,I)", "corrupted(C)", "!corrupted(C)"):
        print(f"  Know({text}) = {know(car, 'Agt', parse_formula(text, sig), car.situation())}")
    print("  worlds accessible after sigma1:",
          [s.label for s in k_accessible(car, "Agt", car.narrative("sigma1"))])

    verdict = knows_causal_chain(car, "Agt", s1)
    print(f"\nAgt knows the sigma1 chain: {verdict.knows} (knows the effect: {verdict.knows_effect})")
    for alt in verdict.alternatives:
        pairs = alt.chain.pairs() if alt.chain else None
        print(f"  {alt.world}: chain {pairs}, K-related {alt.k_related}")


if __name__ == "__main__":
    main()
