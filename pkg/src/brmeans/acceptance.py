"""The eleven acceptance experiments as plain functions returning CheckResult.

Each check measures its own wall time and fails when the runtime budget is
exceeded, so the same code backs the test suite, the CLI and the scripts.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .kernels import RieszSymbol, expansion_coefficients
from .operators import (
    FamilySpec,
    MeansSpec,
    apply_family,
    apply_means,
    family_error,
    fit_loglog_slope,
    needle_ratio,
    operator_norm,
)
from .radial import (
    annulus_transform_check,
    calibrate_convention,
    compare_ball_transform,
    symbol_transform_tail,
)
from .regions import RegionPoint, classify, in_gamma, in_omega, in_sigma
from .smoothness import equivalence_report
from .spectral import (
    SpectralPolynomial,
    analyze,
    fractional_laplacian,
    lp_norm,
    oversampled_resolution,
    random_polynomial,
    synthesize,
)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    runtime: float
    budget: float
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        keys = ", ".join(f"{k}={_short(v)}" for k, v in self.metrics.items() if not isinstance(v, (list, dict)))
        return f"[{status}] criterion {self.number:2d} {self.name} ({self.runtime:.1f}s / {self.budget:.0f}s) {keys}"

    def as_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed, "runtime": self.runtime,
                "budget": self.budget, "metrics": self.metrics}


def _short(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _timed(number: int, name: str, budget: float):
    def wrap(fn):
        def run(**kw) -> CheckResult:
            t0 = time.perf_counter()
            ok, metrics = fn(**kw)
            dt = time.perf_counter() - t0
            metrics["within_budget"] = dt < budget
            return CheckResult(number, name, bool(ok and dt < budget), dt, budget, metrics)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def weierstrass(J: int = 7, decay: float = 1.5) -> SpectralPolynomial:
    """sum_{j=1..J} 2^{-decay j} cos(2^j x)."""
    coeffs = {}
    for j in range(1, J + 1):
        coeffs[(2**j,)] = coeffs[(-(2**j),)] = 0.5 * 2.0 ** (-decay * j)
    return SpectralPolynomial.from_dict(coeffs, 1, 2**J)


@_timed(1, "polynomial reproduction", 30.0)
def check_reproduction(seed: int = 0):
    """family(T) = means(T) for T in T_n, any shift."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in (1, 2):
        for n in (2, 4, 8):
            for beta in (1.0, 2.0, 3.5):
                for delta in (0.6, 1.0, 2.0):
                    s = RieszSymbol(beta, delta)
                    ms = MeansSpec(n, s, d)
                    N = oversampled_resolution(n, minimum=16)
                    for _ in range(20):
                        T = random_polynomial(rng, d, n)
                        ref = synthesize(apply_means(T, ms), N).values
                        tinf = lp_norm(synthesize(T, N), math.inf)
                        for lam in rng.uniform(0, 2 * math.pi, size=(5, d)):
                            out = synthesize(apply_family(T, FamilySpec(n, s, d, lam)), N).values
                            worst = max(worst, float(np.max(np.abs(out - ref))) / tinf)
    return worst < 1e-9, {"max_relative_deviation": worst}


@_timed(2, "ball-transform oracle", 60.0)
def check_ball_transform():
    cal = calibrate_convention()
    ys = np.linspace(0.5, 20.0, 40)
    worst, rows = 0.0, []
    for d in (1, 2, 3):
        for delta in (0.5, 1.0, 2.0):
            c = compare_ball_transform(delta, d, ys, cal)
            worst = max(worst, c.max_envelope_error)
            rows.append({"d": d, "delta": delta, "error": c.max_envelope_error, "suppressed": c.points_suppressed})
    ok = worst < 1e-6 and cal.plain_oracle_error < 1e-10
    return ok, {"scale": cal.scale, "oracle_error": cal.plain_oracle_error, "max_envelope_error": worst,
                "cases": rows}


@_timed(3, "Jackson-Bernstein bracket", 120.0)
def check_jackson_bernstein(seed: int = 0):
    rng = np.random.default_rng(seed)
    ratios = []
    for beta in (1.0, 2.0):
        s = RieszSymbol(beta, 1.0)
        for p in (1.0, 2.0, math.inf):
            for n in (8, 16, 32, 64):
                N = oversampled_resolution(n)
                for _ in range(50):
                    T = random_polynomial(rng, 1, n, decay=rng.uniform(0.0, 3.0))
                    err = lp_norm(synthesize(T - apply_means(T, MeansSpec(n, s, 1)), N), p)
                    dT = lp_norm(synthesize(fractional_laplacian(T, beta), N), p)
                    ratios.append(n**beta * err / dT)
    lo, hi = min(ratios), max(ratios)
    return hi / lo < 50, {"c": lo, "C": hi, "C_over_c": hi / lo}


@_timed(4, "equivalence chain", 180.0)
def check_equivalence():
    f = weierstrass()
    n_list = [4, 8, 16, 32, 64, 128]
    worst_spread, slopes, reports = 0.0, {}, {}
    for p in (1.0, 2.0, math.inf):
        rep = equivalence_report(f, 2.0, 1.0, p, n_list)
        worst_spread = max(worst_spread, max(b["spread"] for b in rep.brackets.values()))
        slopes[str(p)] = rep.slope
        reports[str(p)] = rep.brackets
    slope_ok = all(abs(s + 1.5) <= 0.2 for s in slopes.values())
    return worst_spread <= 20 and slope_ok, {"max_ratio_spread": worst_spread,
                                             "worst_slope_deviation": max(abs(s + 1.5) for s in slopes.values()),
                                             "slopes": slopes, "brackets": reports}


@_timed(5, "Bernstein inequality p=1/2", 60.0)
def check_bernstein(seed: int = 0):
    rng = np.random.default_rng(seed)
    maxima = []
    for n in (4, 8, 16, 32, 64):
        N = oversampled_resolution(n, minimum=64, factor=8)
        vals = []
        for _ in range(50):
            T = random_polynomial(rng, 1, n)
            vals.append(lp_norm(synthesize(fractional_laplacian(T, 2.0), N), 0.5)
                        / (n**2 * lp_norm(synthesize(T, N), 0.5)))
        maxima.append(max(vals))
    spread = max(maxima) / min(maxima)
    return spread <= 2.0, {"per_n_max": maxima, "spread": spread}


@_timed(6, "divergence in Gamma", 120.0)
def check_gamma_divergence():
    s = RieszSymbol(2.0, 0.0)
    ns = [8, 16, 32]
    vals = [operator_norm(MeansSpec(n, s, 2), 1.0).value for n in ns]
    slope, _ = fit_loglog_slope(ns, vals)
    inc = all(b > a for a, b in zip(vals, vals[1:]))
    growth = vals[-1] / vals[0]
    in_g = in_gamma(RegionPoint(1, 0, 2))
    return inc and growth > 1.5 and slope > 0.2 and in_g, {"norms": vals, "growth": growth, "slope": slope}


@_timed(7, "family divergence p<1, odd beta", 120.0)
def check_family_divergence():
    ns = [4, 8, 16, 32]
    out = {}
    for beta in (1.0, 2.0):
        vals = [needle_ratio(n, RieszSymbol(beta, 3.0), 1, 0.5) for n in ns]
        out[beta] = (vals, fit_loglog_slope(ns, vals)[0])
    ok = out[1.0][1] > 0.15 and out[2.0][1] < 0.05
    return ok, {"slope_beta1": out[1.0][1], "slope_beta2": out[2.0][1],
                "norms_beta1": out[1.0][0], "norms_beta2": out[2.0][0]}


@_timed(8, "transform tail exponents", 120.0)
def check_tail_exponents():
    e21 = symbol_transform_tail(RieszSymbol(2.0, 1.0), 1, 0.5).fit.exponent
    e12 = symbol_transform_tail(RieszSymbol(1.0, 2.0), 1, 0.5).fit.exponent
    resid = {}
    for delta in (1.0, 2.0):
        rep = annulus_transform_check(delta, 1)
        resid[delta] = (rep.residual.exponent, -(1 + 3) / 2 - delta + 0.3)
    ok = abs(e21 + 2) <= 0.3 and abs(e12 + 2) <= 0.3 and all(r <= b for r, b in resid.values())
    return ok, {"exp_phi21": e21, "exp_phi12": e12, "resid_delta1": resid[1.0][0],
                "resid_delta2": resid[2.0][0]}


@_timed(9, "expansion coefficients", 10.0)
def check_expansion():
    e = expansion_coefficients(RieszSymbol(4.0, 1.0), 40)
    a0_err = abs(e.a[0] - 2.0)
    sup = e.sup_error()
    ident = expansion_coefficients(RieszSymbol(2.0, 1.7), 40)
    ident_err = float(np.max(np.abs(ident.a - np.eye(1, 41)[0])))
    ok = a0_err < 1e-12 and sup < 1e-6 and ident_err < 1e-14
    return ok, {"a0_error": a0_err, "sup_error": sup, "identity_error": ident_err}


@_timed(10, "family dominates means", 60.0)
def check_family_inequality(seed: int = 0):
    rng = np.random.default_rng(seed)
    worst = -math.inf
    s = RieszSymbol(2.0, 1.0)
    for d in (1, 2):
        m, n = (12, 5) if d == 1 else (6, 3)
        N = oversampled_resolution(m + n, minimum=32 if d == 1 else 16)
        for p in (1.0, 2.0, math.inf):
            for _ in range(10):
                T = random_polynomial(rng, d, m, decay=1.0)
                lhs = lp_norm(synthesize(T, N) - synthesize(apply_means(T, MeansSpec(n, s, d)), N), p)
                rhs = family_error(T, n, s, d, p, N)
                worst = max(worst, lhs - rhs)
    return worst <= 1e-8, {"max_violation": worst}


@_timed(11, "invariant suites", 60.0)
def check_invariants(seed: int = 0):
    """Round trip, Parseval, realness, homogeneity, region partition, determinism."""
    rng = np.random.default_rng(seed)
    m = {}
    T = random_polynomial(rng, 2, 6)
    g = synthesize(T, 16)
    m["roundtrip"] = float(np.max(np.abs(analyze(g, 6).coeffs - T.coeffs)))
    l2 = lp_norm(g, 2.0) ** 2
    m["parseval"] = abs(l2 - (2 * math.pi) ** 2 * float(np.sum(np.abs(T.coeffs) ** 2))) / l2
    m["realness"] = float(np.max(np.abs(np.fft.ifftn(np.fft.fftn(g.values)).imag)))
    m["homogeneity"] = abs(lp_norm(g * -3.5, 0.7) - 3.5 * lp_norm(g, 0.7)) / lp_norm(g, 0.7)
    bad = 0
    r2 = np.random.default_rng(seed + 1)
    for _ in range(10_000):
        ip = Fraction(int(r2.integers(0, 400)), 100)
        dl = Fraction(int(r2.integers(0, 400)), 100)
        pt = RegionPoint(ip, dl, int(r2.integers(1, 5)))
        bad += (in_sigma(pt) + in_gamma(pt) + in_omega(pt)) != 1
        classify(pt)
    m["partition_failures"] = bad
    a = random_polynomial(np.random.default_rng(7), 1, 5).coeffs
    b = random_polynomial(np.random.default_rng(7), 1, 5).coeffs
    m["deterministic"] = bool(np.array_equal(a, b))
    ok = (m["roundtrip"] < 1e-12 and m["parseval"] < 1e-12 and m["realness"] < 1e-12
          and m["homogeneity"] < 1e-12 and bad == 0 and m["deterministic"])
    return ok, m


ALL_CHECKS = (
    check_reproduction, check_ball_transform, check_jackson_bernstein, check_equivalence,
    check_bernstein, check_gamma_divergence, check_family_divergence, check_tail_exponents,
    check_expansion, check_family_inequality, check_invariants,
)


def run_all(numbers=None) -> list[CheckResult]:
    out = []
    for i, fn in enumerate(ALL_CHECKS, start=1):
        if numbers is None or i in numbers:
            out.append(fn())
    return out

