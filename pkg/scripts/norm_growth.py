"""Operator and family norm growth across the (1/p, delta) plane.

For each (p, delta) the norms over n are fitted in log-log coordinates and
the probe verdict is printed next to the region verdict.

Usage: python scripts/norm_growth.py [--d 2] [--beta 2] [--n 4,8,16,32]
"""

import argparse
import math
from fractions import Fraction

from brmeans.kernels import RieszSymbol
from brmeans.operators import convergence_probe, norm_sweep
from brmeans.regions import RegionPoint, verdict


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--n", default="4,8,16,32")
    ap.add_argument("--p", default="0.5,1,inf")
    ap.add_argument("--delta", default="0,0.5,1,2,3")
    args = ap.parse_args(argv)
    ns = [int(v) for v in args.n.split(",")]
    ps = [math.inf if v == "inf" else float(v) for v in args.p.split(",")]
    deltas = [float(v) for v in args.delta.split(",")]
    s_beta = args.beta
    print(f"{'p':>5} {'delta':>6} {'kind':>7} {'region':>7} {'expected':>9} {'probe':>13} {'slope':>7}")
    for p in ps:
        kind = "means" if p >= 1 else "family"
        for dl in deltas:
            est = norm_sweep(kind, ns, RieszSymbol(s_beta, dl), args.d, p, trials=4)
            probe = convergence_probe(ns, [e.value for e in est])
            v = verdict(RegionPoint.from_p(p if math.isinf(p) else Fraction(p), Fraction(dl), args.d), s_beta)
            exp = v.means_converge if kind == "means" else v.family_converge
            print(f"{p:>5g} {dl:>6g} {kind:>7} {v.region:>7} {exp:>9} {probe.verdict:>13} {probe.slope:>7.3f}")


if __name__ == "__main__":
    main()
