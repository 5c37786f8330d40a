"""Command-line entry point: ``sitcause <command> scenario.sct [options]``.

Exit codes: 0 success (or the agent knows), 1 the agent does not know,
2 usage or parse errors, 3 semantic errors such as a non-executable
narrative or an effect that was never achieved.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .causation import CausalSetting, causal_chain, chain_to_json, derivation
from .dsl import load_scenario, parse_action, parse_formula, parse_narrative
from .epistemic import k_accessible, knows_causal_chain, verdict_to_json
from .errors import ParseError, SitCauseError
from .logic import to_text
from .narrative import holds
from .regression import regress_all, rho

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_SEMANTIC = 0, 1, 2, 3


class _Style:
    def __init__(self, stream) -> None:
        self.on = os.environ.get("SITCAUSE_COLOR", "1") != "0" and hasattr(stream, "isatty") and stream.isatty()

    def __call__(self, text: str, code: str) -> str:
        return f"\033[{code}m{text}\033[0m" if self.on else text


def _situation(sc, text: str | None, world: str | None = None):
    if text is None:
        text = ""
    if text in sc.narratives:
        return sc.narrative(text, world)
    return sc.situation(parse_narrative(text, sc.theory.signature), world)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


def _require(args, *names) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise _Usage(f"{args.command} needs {', '.join(missing)}")


class _Usage(Exception):
    pass


def cmd_validate(args, sc) -> int:
    if args.format == "json":
        _emit({"valid": True, "worlds": [w.id for w in sc.worlds], "agents": list(sc.agents)})
    else:
        print(f"ok: {len(sc.worlds)} worlds, {len(sc.theory.schemas)} actions, {len(sc.theory.signature.fluents)} fluents")
    return EXIT_OK


def cmd_eval(args, sc) -> int:
    _require(args, "effect")
    sigma = _situation(sc, args.narrative, args.world)
    phi = parse_formula(args.effect, sc.theory.signature)
    value = holds(sc.theory, phi, sigma)
    if args.format == "json":
        _emit({"effect": to_text(phi), "situation": sigma.label, "value": value})
    else:
        print("true" if value else "false")
    return EXIT_OK


def cmd_regress(args, sc) -> int:
    _require(args, "effect")
    sig = sc.theory.signature
    phi = parse_formula(args.effect, sig)
    if args.action is not None:
        actions = (parse_action(args.action, sig),)
        out = rho(sc.theory, phi, actions[0])
    else:
        actions = _situation(sc, args.narrative).actions
        out = regress_all(sc.theory, phi, actions)
    if args.format == "json":
        _emit({"effect": to_text(phi), "actions": [str(a) for a in actions], "regressed": to_text(out)})
    else:
        print(to_text(out))
    return EXIT_OK


def cmd_causes(args, sc) -> int:
    _require(args, "effect")
    sigma = _situation(sc, args.narrative, args.world)
    setting = CausalSetting(sc.theory, sigma, parse_formula(args.effect, sc.theory.signature))
    steps = derivation(setting)
    chain = causal_chain(setting)
    if args.format == "json":
        out = chain_to_json(chain, setting)
        if args.explain:
            out["steps"] = [
                {
                    "situation": s.setting.narrative.label,
                    "effect": to_text(s.setting.effect),
                    "cause": None if s.cause is None else {"action": str(s.cause.action), "position": s.cause.position},
                }
                for s in steps
            ]
        _emit(out)
        return EXIT_OK
    style = _Style(sys.stdout)
    print(f"effect: {to_text(setting.effect)}")
    print(f"narrative: {sigma.label}")
    print(f"status: {chain.status}")
    if args.explain:
        for s in steps:
            print(f"setting <{to_text(s.setting.effect)}, {s.setting.narrative.label}>")
            if s.cause is not None:
                print(f"  achieved by {style(str(s.cause.action), '1')} at {sigma.world.id}+{s.cause.position}")
            else:
                print("  no achievement condition; analysis stops")
    for e in chain.entries:
        print(f"{style(str(e.action), '1')} @ {sigma.world.id}+{e.position}")
    return EXIT_OK


def cmd_knows_causes(args, sc) -> int:
    _require(args, "effect", "agent")
    sigma = _situation(sc, args.narrative)
    setting = CausalSetting(sc.theory, sigma, parse_formula(args.effect, sc.theory.signature))
    verdict = knows_causal_chain(sc, args.agent, setting)
    if args.format == "json":
        _emit(verdict_to_json(verdict))
    else:
        style = _Style(sys.stdout)
        word = style("knows", "32") if verdict.knows else style("does not know", "31")
        print(f"agent {args.agent} {word} the causal chain of {to_text(setting.effect)} at {sigma.label}")
        print(f"knows effect: {'yes' if verdict.knows_effect else 'no'}")
        print("actual: " + ", ".join(f"({a}, {p})" for a, p in verdict.actual.pairs()))
        for alt in verdict.alternatives:
            if not alt.survives:
                print(f"  {alt.world}: eliminated")
            elif alt.chain is None:
                print(f"  {alt.world}: effect fails")
            else:
                rel = "K-related" if alt.k_related else "not K-related"
                print(f"  {alt.world}: " + ", ".join(f"({a}, {p})" for a, p in alt.chain.pairs()) + f" [{rel}]")
    return EXIT_OK if verdict.knows else EXIT_NO


def cmd_kworlds(args, sc) -> int:
    _require(args, "agent")
    sigma = _situation(sc, args.narrative, args.world)
    worlds = [s.world.id for s in k_accessible(sc, args.agent, sigma)]
    if args.format == "json":
        _emit({"agent": args.agent, "situation": sigma.label, "worlds": worlds})
    else:
        for w in worlds:
            print(w)
    return EXIT_OK


def cmd_oracle(args, sc) -> int:
    from .oracle import run_suite

    report = run_suite(range(args.seed_from, args.seed_to + 1), scenario=sc)
    _emit(report)
    return EXIT_OK if report["passed"] else EXIT_SEMANTIC


COMMANDS = {
    "validate": cmd_validate,
    "eval": cmd_eval,
    "regress": cmd_regress,
    "causes": cmd_causes,
    "knows-causes": cmd_knows_causes,
    "kworlds": cmd_kworlds,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sitcause", description="Achievement causes and knowledge of causes over action traces.")
    p.add_argument("command", choices=sorted(COMMANDS), metavar="command",
                   help="validate | eval | regress | causes | knows-causes | kworlds")
    p.add_argument("scenario", help="path to a .sct scenario file")
    p.add_argument("--narrative", help="narrative name from the scenario, or inline 'act(..); act(..)'")
    p.add_argument("--effect", help="formula, e.g. 'damaged(C)'")
    p.add_argument("--action", help="single ground action for regress")
    p.add_argument("--agent")
    p.add_argument("--world", help="initial world (default: the actual one)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--explain", action="store_true", help="show every recursion step of causes")
    p.add_argument("--seed-from", type=int, default=1, help=argparse.SUPPRESS)
    p.add_argument("--seed-to", type=int, default=100, help=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        sc = load_scenario(args.scenario)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        for d in exc.diagnostics:
            print(str(d), file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, sc)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        for d in exc.diagnostics:
            print(str(d), file=sys.stderr)
        return EXIT_USAGE
    except SitCauseError as exc:
        print(f"{exc.category}: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
