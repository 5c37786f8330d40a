"""Run the randomized differential checks and write a JSON report.

    python3 scripts/run_oracle.py --seeds 1 1000 --out oracle_report.json
"""

import argparse
import json
import time
from pathlib import Path

from sitcause.dsl import load_scenario
from sitcause.oracle import Bounds, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", nargs=2, type=int, default=[1, 1000], metavar=("FIRST", "LAST"))
    ap.add_argument("--objects", type=int, default=4)
    ap.add_argument("--fluents", type=int, default=3)
    ap.add_argument("--actions", type=int, default=3)
    ap.add_argument("--narrative", type=int, default=6)
    ap.add_argument("--worlds", type=int, default=3)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--fixture", type=Path, help="also check every narrative of this scenario")
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    bounds = Bounds(args.objects, args.fluents, args.actions, args.narrative, args.worlds, args.depth)
    fixture = load_scenario(args.fixture) if args.fixture else None
    start = time.perf_counter()
    report = run_suite(range(args.seeds[0], args.seeds[1] + 1), bounds, fixture)
    report["seconds"] = round(time.perf_counter() - start, 2)
    text = json.dumps(report, indent=2)
    if args.out:
        args.out.write_text(text + "\n")
    print(f"{report['instances']} instances, {len(report['failures'])} failures, {report['seconds']}s")
    for f in report["failures"][:20]:
        print(f"  seed {f['seed']}: [{f['check']}] {f['detail']}")
    raise SystemExit(0 if report["passed"] else 1)


if __name__ == "__main__":
    main()
