"""Run the acceptance checks and write a JSON summary.

Usage: python scripts/run_acceptance.py [--only 1,4,8] [--out runs/acceptance.json]
"""

import argparse
import sys
from pathlib import Path

from brmeans import io as bio
from brmeans.acceptance import run_all


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", help="comma-separated criterion numbers")
    ap.add_argument("--out", default="runs/acceptance.json")
    args = ap.parse_args(argv)
    numbers = [int(v) for v in args.only.split(",")] if args.only else None
    results = run_all(numbers)
    for r in results:
        print(r.line())
    bio.write_json(Path(args.out), {"results": [r.as_dict() for r in results]})
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} criteria passed; summary in {args.out}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
