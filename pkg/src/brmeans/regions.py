"""Parameter regions of the (1/p, delta) plane and the convergence verdict table.

Predicates are evaluated in exact rational arithmetic: every input is
converted with ``fractions.Fraction`` (exact for ints, Fractions and floats).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

SIGMA, GAMMA, OMEGA = "Sigma", "Gamma", "Omega"
YES, NO, UNKNOWN, NOT_APPLICABLE = "yes", "no", "unknown", "n/a"


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError("region predicates need finite inputs (encode p = inf as inv_p = 0)")
    return Fraction(x)


@dataclass(frozen=True)
class RegionPoint:
    inv_p: Fraction
    delta: Fraction
    d: int

    def __init__(self, inv_p, delta, d: int):
        inv_p, delta = _q(inv_p), _q(delta)
        if inv_p < 0 or delta < 0 or d < 1:
            raise ValueError("need inv_p >= 0, delta >= 0, d >= 1")
        object.__setattr__(self, "inv_p", inv_p)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "d", int(d))

    @classmethod
    def from_p(cls, p, delta, d: int) -> "RegionPoint":
        if isinstance(p, (int, float)) and math.isinf(p):
            return cls(0, delta, d)
        return cls(1 / _q(p), delta, d)


_HALF = Fraction(1, 2)


def in_sigma(pt: RegionPoint) -> bool:
    d = pt.d
    return pt.delta > max(Fraction(d - 1, 2), d * (pt.inv_p - _HALF) - _HALF)


def in_gamma(pt: RegionPoint) -> bool:
    return 0 <= pt.delta <= pt.d * abs(pt.inv_p - _HALF) - _HALF


def in_omega(pt: RegionPoint) -> bool:
    return 0 <= pt.delta <= Fraction(pt.d - 1, 2) and pt.delta > pt.d * abs(pt.inv_p - _HALF) - _HALF


def classify(pt: RegionPoint) -> str:
    labels = [name for name, test in ((SIGMA, in_sigma), (GAMMA, in_gamma), (OMEGA, in_omega)) if test(pt)]
    assert len(labels) == 1, f"regions do not partition at {pt}: {labels}"
    return labels[0]


def in_b_region(inv_p, beta, d: int) -> bool:
    """beta a positive even integer with beta > d (1/p - 1)_+."""
    inv_p, beta = _q(inv_p), _q(beta)
    if beta <= 0 or beta.denominator != 1 or beta.numerator % 2:
        return False
    return beta > d * max(inv_p - 1, Fraction(0))


@dataclass(frozen=True)
class Verdict:
    region: str
    means_converge: str
    family_converge: str
    note: str = ""


def verdict(pt: RegionPoint, beta) -> Verdict:
    """Convergence of the means and of the sampling family at (1/p, delta), given beta."""
    region = classify(pt)
    if pt.inv_p <= 1:
        table = {SIGMA: YES, GAMMA: NO, OMEGA: UNKNOWN}
        note = "p >= 1: beta does not affect convergence"
        if region == OMEGA:
            note = "open region: convergence not settled"
        return Verdict(region, table[region], table[region], note)
    b = in_b_region(pt.inv_p, beta, pt.d)
    fam = YES if region == SIGMA and b else NO
    note = f"0 < p < 1: family needs Sigma and B; in B: {b}"
    return Verdict(region, NOT_APPLICABLE, fam, note)


def region_raster(d: int, inv_p_values, delta_values):
    """Rows (inv_p, delta, label) over a lattice."""
    return [(float(ip), float(de), classify(RegionPoint(ip, de, d))) for ip in inv_p_values for de in delta_values]
