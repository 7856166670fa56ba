"""Equivalence of means error, family error, realization and modulus.

Prints the per-n table for a lacunary test function and the measured
bracket of every pairwise ratio.

Usage: python scripts/equivalence_sweep.py [--decay 1.5] [--p inf]
"""

import argparse
import math

from brmeans.acceptance import weierstrass
from brmeans.smoothness import COLUMNS, equivalence_report


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--J", type=int, default=7)
    ap.add_argument("--decay", type=float, default=1.5)
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--delta", type=float, default=1.0)
    ap.add_argument("--p", default="inf")
    ap.add_argument("--n", default="4,8,16,32,64,128")
    args = ap.parse_args(argv)
    p = math.inf if args.p == "inf" else float(args.p)
    f = weierstrass(args.J, args.decay)
    rep = equivalence_report(f, args.beta, args.delta, p, [int(v) for v in args.n.split(",")])
    print(f"{'n':>5} " + " ".join(f"{c:>14}" for c in COLUMNS))
    for row in rep.rows:
        print(f"{row['n']:>5} " + " ".join(f"{row[c]:>14.6e}" for c in COLUMNS))
    print(f"\nslope of means error: {rep.slope:.3f} (expected {-args.decay:.3f} when decay < beta)")
    for key, b in rep.brackets.items():
        flag = "  DRIFT" if rep.drift[key] else ""
        print(f"{key:>28}: [{b['min']:.3f}, {b['max']:.3f}] spread {b['spread']:.2f}{flag}")


if __name__ == "__main__":
    main()
