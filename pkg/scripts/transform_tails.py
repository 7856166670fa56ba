"""Tail exponents of the radial Fourier transform of phi_{beta,delta}.

Compares the fitted envelope exponent with min(d + beta, (d+1)/2 + delta)
(beta not an even integer) or (d+1)/2 + delta (beta even), and prints the
integrability verdicts for the chosen p.

Usage: python scripts/transform_tails.py [--d 1] [--p 0.5]
"""

import argparse

from brmeans.kernels import RieszSymbol
from brmeans.radial import symbol_transform_tail


def predicted(beta, delta, d):
    boundary = (d + 1) / 2 + delta
    if float(beta).is_integer() and int(beta) % 2 == 0:
        return -boundary
    return -min(d + beta, boundary)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--p", type=float, default=0.5)
    ap.add_argument("--beta", default="1,1.5,2,3,4")
    ap.add_argument("--delta", default="1,2,3")
    args = ap.parse_args(argv)
    print(f"{'beta':>5} {'delta':>5} {'fitted':>8} {'expected':>8} {'predicted':>10} {'numeric':>8}")
    for b in (float(v) for v in args.beta.split(",")):
        for dl in (float(v) for v in args.delta.split(",")):
            rep = symbol_transform_tail(RieszSymbol(b, dl), args.d, args.p)
            print(f"{b:>5g} {dl:>5g} {rep.fit.exponent:>8.3f} {predicted(b, dl, args.d):>8.3f} "
                  f"{str(rep.predicted_integrable):>10} {str(rep.numeric_integrable):>8}")


if __name__ == "__main__":
    main()
