"""Command-line driver: ``brmeans <command> [--config cfg.json] [--out DIR] ...``.

Every command writes CSV/JSON files plus ``manifest.json`` into the output
directory. Exit codes: 0 all checks pass, 1 some check failed, 2 bad config.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import io as bio
from .errors import BRError, ConfigError, InsufficientPoints
from .kernels import RieszSymbol, kernel_coefficients
from .operators import (
    FamilySpec,
    MeansSpec,
    apply_family,
    apply_means,
    convergence_probe,
    family_error,
    kernel_grid,
    norm_sweep,
)
from .radial import (
    annulus_transform_check,
    ball_profile,
    calibrate_convention,
    compare_ball_transform,
    radial_transform,
    symbol_profile,
    symbol_transform_tail,
)
from .regions import NOT_APPLICABLE, NO, YES, RegionPoint, classify, region_raster, verdict
from .smoothness import ModulusSpec, equivalence_report, k_functional_upper, realization, special_modulus
from .spectral import (
    Exponent,
    SpectralPolynomial,
    grid_nodes,
    lp_norm,
    oversampled_resolution,
    random_polynomial,
    synthesize,
)

COMMANDS = ("kernel", "means", "family", "norms", "kfun", "modulus", "equivalence", "regions", "ft")


@dataclass
class ExperimentConfig:
    """One experiment: a parameter lattice plus provenance.

    ``function`` selects the input for means/family/kfun/modulus/equivalence:
    {"kind": "weierstrass", "J": 7, "decay": 1.5}, {"kind": "random", "degree": 8},
    {"kind": "cos"} or {"kind": "constant", "value": c}.
    """

    name: str = "kernel"
    d: int = 1
    beta: list = field(default_factory=lambda: [2.0])
    delta: list = field(default_factory=lambda: [1.0])
    p: list = field(default_factory=lambda: [2.0])
    n: list = field(default_factory=lambda: [4, 8, 16, 32])
    resolution: int | None = None
    seed: int = 0
    out: str = "runs"
    tol: dict = field(default_factory=dict)
    function: dict = field(default_factory=lambda: {"kind": "random", "degree": 8})
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.name not in COMMANDS:
            raise ConfigError(f"unknown experiment {self.name!r}; choose from {', '.join(COMMANDS)}")
        if not isinstance(self.d, int) or self.d < 1 or self.d > 3:
            raise ConfigError("d must be 1, 2 or 3")
        if not self.beta or any(not float(b) > 0 for b in self.beta):
            raise ConfigError("every beta must be positive")
        if not self.delta or any(not float(v) >= 0 for v in self.delta):
            raise ConfigError("every delta must be nonnegative")
        try:
            self.p = [Exponent.of(v).value for v in self.p]
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None
        if not self.n or any(int(v) < 1 for v in self.n):
            raise ConfigError("n must be a nonempty list of positive integers")
        self.n = sorted({int(v) for v in self.n})
        if self.resolution is not None and int(self.resolution) < 2:
            raise ConfigError("resolution must be at least 2")
        return self

    def snapshot(self) -> dict:
        return bio._jsonable(asdict(self))

    def tolerance(self, key: str, default: float) -> float:
        return float(self.tol.get(key, default))


@dataclass
class RunManifest:
    config: dict
    code_version: str
    wall_time: float
    files: list
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


class _Writer:
    """Collects emitted files; every file carries the config hash and seed."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.root = Path(cfg.out)
        # the output location is not part of the experiment
        self.hash = bio.config_hash({k: v for k, v in cfg.snapshot().items() if k != "out"})
        self.files: list[str] = []

    def csv(self, name, cols, rows, extra=None):
        bio.write_csv(self.root / name, cols, rows, self.hash, self.cfg.seed, extra)
        self.files.append(name)

    def json(self, name, obj):
        bio.write_json(self.root / name, obj, self.hash, self.cfg.seed)
        self.files.append(name)


def _tag(*vals) -> str:
    return "_".join(bio.fmt(v).replace(".", "p").replace("-", "m") for v in vals)


def _pname(p: float) -> str:
    return "inf" if math.isinf(p) else bio.fmt(p)


def build_function(cfg: ExperimentConfig) -> SpectralPolynomial:
    spec = dict(cfg.function)
    kind = spec.get("kind", "random")
    d = cfg.d
    if kind == "random":
        m = int(spec.get("degree", 8))
        return random_polynomial(np.random.default_rng(cfg.seed), d, m, decay=float(spec.get("decay", 1.0)))
    if kind == "constant":
        return SpectralPolynomial.from_dict({(0,) * d: float(spec.get("value", 1.0))}, d, 1)
    if kind == "cos":
        e = (1,) + (0,) * (d - 1)
        return SpectralPolynomial.from_dict({e: 0.5, tuple(-v for v in e): 0.5}, d, 1)
    if kind == "weierstrass":
        if d != 1:
            raise ConfigError("the weierstrass input is one-dimensional")
        J, dec = int(spec.get("J", 7)), float(spec.get("decay", 1.5))
        coeffs = {}
        for j in range(1, J + 1):
            coeffs[(2**j,)] = coeffs[(-(2**j),)] = 0.5 * 2.0 ** (-dec * j)
        return SpectralPolynomial.from_dict(coeffs, 1, 2**J)
    raise ConfigError(f"unknown function kind {kind!r}")


def _lattice(cfg):
    return [(b, dl) for b in cfg.beta for dl in cfg.delta]


def _map(fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks))


# ---------------------------------------------------------------------------
# commands

def cmd_kernel(cfg: ExperimentConfig, w: _Writer, jobs: int = 1) -> dict:
    if any(float(v) <= 0 for v in cfg.delta):
        raise ConfigError("kernel tables need delta > 0")
    checks = {}
    for b, dl in _lattice(cfg):
        s = RieszSymbol(b, dl)
        for n in cfg.n:
            K = kernel_coefficients(n, s, cfg.d)
            rows = [list(k) + [c.real] for k, c in K.items()]
            cols = [f"k{i + 1}" for i in range(cfg.d)] + ["coefficient"]
            w.csv(f"kernel_coeffs_{_tag(b, dl, n)}.csv", cols, rows)
            N = cfg.resolution or oversampled_resolution(n)
            G = kernel_grid(n, s, cfg.d, N)
            x = grid_nodes(cfg.d, N).reshape(-1, cfg.d)
            gcols = [f"x{i + 1}" for i in range(cfg.d)] + ["value"]
            w.csv(f"kernel_grid_{_tag(b, dl, n)}.csv", gcols,
                  [list(xx) + [v] for xx, v in zip(x, G.values.ravel())])
            # the kernel integrates to (2 pi)^d c_0 = (2 pi)^d
            mean = float(np.mean(G.values))
            checks[f"kernel_mean_{_tag(b, dl, n)}"] = abs(mean - 1.0) < 1e-10
    return checks


def cmd_means(cfg, w, jobs=1):
    f = build_function(cfg)
    bio.save_polynomial(w.root / "input.csv", f, w.hash, cfg.seed)
    w.files.append("input.csv")
    checks, rows = {}, []
    for b, dl in _lattice(cfg):
        s = RieszSymbol(b, dl)
        for n in cfg.n:
            T = apply_means(f, MeansSpec(n, s, cfg.d))
            bio.save_polynomial(w.root / f"means_{_tag(b, dl, n)}.csv", T, w.hash, cfg.seed)
            w.files.append(f"means_{_tag(b, dl, n)}.csv")
            N = cfg.resolution or oversampled_resolution(f.degree + n)
            # independent route: convolution with the kernel on the grid
            fg, K = synthesize(f, N), kernel_grid(n, s, cfg.d, N)
            conv = np.fft.ifftn(np.fft.fftn(fg.values) * np.fft.fftn(K.values)).real / N**cfg.d
            dev = float(np.max(np.abs(conv - synthesize(T, N).values)))
            checks[f"convolution_{_tag(b, dl, n)}"] = dev < cfg.tolerance("convolution", 1e-9)
            for p in cfg.p:
                rows.append([b, dl, n, _pname(p), lp_norm(fg - synthesize(T, N), p), dev])
    w.csv("means_errors.csv", ["beta", "delta", "n", "p", "error", "convolution_deviation"], rows)
    return checks


def cmd_family(cfg, w, jobs=1):
    rng = np.random.default_rng(cfg.seed)
    f = build_function(cfg)
    checks, rows = {}, []
    tol = cfg.tolerance("reproduction", 1e-9)
    for b, dl in _lattice(cfg):
        s = RieszSymbol(b, dl)
        for n in cfg.n:
            N = cfg.resolution or oversampled_resolution(f.degree + n)
            worst = 0.0
            T = random_polynomial(rng, cfg.d, n)
            ref = synthesize(apply_means(T, MeansSpec(n, s, cfg.d)), N).values
            scale = lp_norm(synthesize(T, N), math.inf)
            for lam in rng.uniform(0, 2 * math.pi, size=(5, cfg.d)):
                out = synthesize(apply_family(T, FamilySpec(n, s, cfg.d, lam)), N).values
                worst = max(worst, float(np.max(np.abs(out - ref))) / scale)
            checks[f"reproduction_{_tag(b, dl, n)}"] = worst < tol
            fg = synthesize(f, N)
            for p in cfg.p:
                me = lp_norm(fg - synthesize(apply_means(f, MeansSpec(n, s, cfg.d)), N), p)
                fe = family_error(f, n, s, cfg.d, p, N)
                checks[f"dominance_{_tag(b, dl, n)}_p{_pname(p)}"] = (p < 1) or me <= fe + 1e-8
                rows.append([b, dl, n, _pname(p), me, fe, worst])
    w.csv("family_errors.csv", ["beta", "delta", "n", "p", "means_error", "family_error", "reproduction"], rows)
    return checks


def _norm_task(args):
    kind, b, dl, d, p, ns, seed = args
    est = norm_sweep(kind, ns, RieszSymbol(b, dl), d, p, seed=seed)
    return [(e.value, e.method, e.samples) for e in est]


def cmd_norms(cfg, w, jobs=1):
    if len(cfg.n) < 4 or max(cfg.n) < 4 * min(cfg.n):
        raise InsufficientPoints("norm sweeps need at least 4 values of n spanning a factor 4")
    kind = cfg.extra.get("kind")
    tasks = []
    for b, dl in _lattice(cfg):
        for p in cfg.p:
            k = kind or ("means" if p >= 1 else "family")
            tasks.append((k, b, dl, cfg.d, p, cfg.n, cfg.seed))
    results = _map(_norm_task, tasks, jobs)
    checks, record = {}, []
    for (k, b, dl, d, p, ns, seed), est in zip(tasks, results):
        w.csv(f"norms_{k}_{_tag(b, dl)}_p{_pname(p)}.csv", ["n", "estimate", "method", "seed"],
              [[n, v, m, seed] for n, (v, m, _) in zip(ns, est)])
        probe = convergence_probe(ns, [v for v, _, _ in est])
        ip = 0 if math.isinf(p) else 1 / p
        v = verdict(RegionPoint.from_p(p, dl, d), b)
        expected = v.family_converge if (k == "family" or v.means_converge == NOT_APPLICABLE) else v.means_converge
        contradicts = (expected == YES and probe.verdict == "growing") or (expected == NO and probe.verdict == "bounded")
        checks[f"consistent_{k}_{_tag(b, dl)}_p{_pname(p)}"] = not contradicts
        record.append({"kind": k, "beta": b, "delta": dl, "p": _pname(p), "inv_p": ip, "region": v.region,
                       "expected": expected, "probe": probe.as_dict()})
    w.json("norms_verdicts.json", {"sweeps": record})
    return checks


def cmd_kfun(cfg, w, jobs=1):
    f = build_function(cfg)
    checks, rows = {}, []
    for b in cfg.beta:
        for p in cfg.p:
            for n in cfg.n:
                fg = synthesize(f, cfg.resolution or oversampled_resolution(max(f.degree, n)))
                r = realization(fg, 1.0 / n, b, p)
                K = k_functional_upper(fg, 1.0 / n, b, p) if p >= 1 else float("nan")
                if p >= 1:
                    checks[f"k_le_realization_{_tag(b, n)}_p{_pname(p)}"] = K <= r.value + 1e-12
                rows.append([b, _pname(p), n, r.value, r.approximation, r.smoothness, r.candidate, K])
    w.csv("kfunctional.csv", ["beta", "p", "n", "realization", "approximation", "smoothness", "candidate",
                              "k_upper"], rows)
    return checks


def cmd_modulus(cfg, w, jobs=1):
    f = build_function(cfg)
    checks, rows = {}, []
    tol = cfg.tolerance("modulus_tail", 1e-5)
    for b in cfg.beta:
        spec = ModulusSpec(b, cfg.d, tol=tol)
        for p in cfg.p:
            for n in cfg.n:
                fg = synthesize(f, cfg.resolution or oversampled_resolution(f.degree))
                m = special_modulus(fg, 1.0 / n, spec, p)
                m2 = special_modulus(fg * 2.0, 1.0 / n, spec, p)
                checks[f"homogeneous_{_tag(b, n)}_p{_pname(p)}"] = abs(m2.value - 2 * m.value) <= 1e-10 * max(
                    m.value, 1e-300) + 1e-14
                rows.append([b, _pname(p), n, m.h, m.value, m.error_bar, m.r, m.U])
    w.csv("modulus.csv", ["beta", "p", "n", "h", "value", "error_bar", "r", "U"], rows)
    return checks


def cmd_equivalence(cfg, w, jobs=1):
    f = build_function(cfg)
    checks, summary = {}, []
    max_spread = cfg.tolerance("bracket_spread", 20.0)
    for b, dl in _lattice(cfg):
        for p in cfg.p:
            rep = equivalence_report(f, b, dl, p, cfg.n, N=cfg.resolution)
            cols = ["n", "means_error", "family_error", "realization", "modulus", "modulus_error_bar"]
            ratio_cols = list(rep.ratios)
            w.csv(f"equivalence_{_tag(b, dl)}_p{_pname(p)}.csv", cols + ratio_cols,
                  [[r[c] for c in cols + ratio_cols] for r in rep.rows])
            summary.append(rep.as_dict())
            region = classify(RegionPoint.from_p(p, dl, cfg.d))
            key = f"{_tag(b, dl)}_p{_pname(p)}"
            zero = all(r["means_error"] == 0 or r["means_error"] < 1e-13 for r in rep.rows)
            if region == "Sigma" and not zero:
                checks[f"no_drift_{key}"] = not rep.drift_flag
                checks[f"bracket_{key}"] = all(v["spread"] <= max_spread for v in rep.brackets.values())
    w.json("equivalence_summary.json", {"reports": summary})
    return checks


def cmd_regions(cfg, w, jobs=1):
    ex = cfg.extra
    inv_p = np.round(np.arange(0, float(ex.get("inv_p_max", 3.0)) + 1e-12, float(ex.get("inv_p_step", 0.05))), 10)
    dl = np.round(np.arange(0, float(ex.get("delta_max", 3.0)) + 1e-12, float(ex.get("delta_step", 0.05))), 10)
    ipq = [Fraction(str(v)) for v in inv_p]
    dq = [Fraction(str(v)) for v in dl]
    rows = region_raster(cfg.d, ipq, dq)
    w.csv(f"regions_d{cfg.d}.csv", ["inv_p", "delta", "label"], rows)
    points = []
    for pt in ex.get("points", []):
        rp = RegionPoint(Fraction(str(pt["inv_p"])), Fraction(str(pt["delta"])), cfg.d)
        v = verdict(rp, pt.get("beta", cfg.beta[0]))
        points.append({"inv_p": str(rp.inv_p), "delta": str(rp.delta), **asdict(v)})
    if points:
        w.json("verdicts.json", {"points": points})
    counts = {lab: sum(1 for r in rows if r[2] == lab) for lab in ("Sigma", "Gamma", "Omega")}
    return {"partition": sum(counts.values()) == len(rows)}


def cmd_ft(cfg, w, jobs=1):
    ex = cfg.extra
    y_lo, y_hi = float(ex.get("y_min", 0.5)), float(ex.get("y_max", 20.0))
    if not 0 < y_lo < y_hi:
        raise ConfigError(f"bad y range [{y_lo}, {y_hi}]: need 0 < y_min < y_max")
    n_pts = int(ex.get("points", 80))
    checks, report = {}, {}
    cal = calibrate_convention()
    report["calibration"] = {"scale": cal.scale, "oracle_error": cal.plain_oracle_error,
                             "mismatch": {bio.fmt(k): v for k, v in cal.mismatch.items()}}
    checks["calibration"] = cal.plain_oracle_error < 1e-10 and abs(cal.scale - 2 * math.pi) < 1e-12
    ys = np.linspace(y_lo, y_hi, n_pts)
    tol = cfg.tolerance("ball_envelope", 1e-6)
    report["ball"] = []
    for dl in cfg.delta:
        if float(dl) <= 0:
            continue
        c = compare_ball_transform(dl, cfg.d, ys, cal)
        report["ball"].append(asdict(c))
        checks[f"ball_{_tag(dl)}"] = c.max_envelope_error < tol
        vals = radial_transform(ball_profile(dl, cfg.d), cal.scale * ys)
        w.csv(f"ball_transform_{_tag(dl)}.csv", ["y", "value"], zip(ys, vals))
    report["tails"] = []
    for b, dl in _lattice(cfg):
        s = RieszSymbol(b, dl)
        for p in cfg.p:
            if p > 1:
                continue
            t = symbol_transform_tail(s, cfg.d, p)
            report["tails"].append(t.as_dict())
            if t.predicted_integrable is not None:
                checks[f"tail_{_tag(b, dl)}_p{_pname(p)}"] = t.predicted_integrable == t.numeric_integrable
        yy = np.linspace(y_lo, y_hi, n_pts)
        w.csv(f"symbol_transform_{_tag(b, dl)}.csv", ["y", "value"],
              zip(yy, radial_transform(symbol_profile(s, cfg.d), yy, rtol=1e-9)))
    if ex.get("annulus", False):
        report["annulus"] = []
        for dl in cfg.delta:
            if float(dl) > 0:
                a = annulus_transform_check(dl, cfg.d)
                report["annulus"].append(a.as_dict())
                checks[f"annulus_{_tag(dl)}"] = a.residual.exponent <= a.predicted_residual + 0.3
    w.json("ft_report.json", report)
    return checks


HANDLERS = {
    "kernel": cmd_kernel, "means": cmd_means, "family": cmd_family, "norms": cmd_norms, "kfun": cmd_kfun,
    "modulus": cmd_modulus, "equivalence": cmd_equivalence, "regions": cmd_regions, "ft": cmd_ft,
}


# ---------------------------------------------------------------------------
# entry point

def _parse_list(text: str, cast=float):
    return [cast(v) if v.strip().lower() not in ("inf", "infinity") else math.inf
            for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="brmeans", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON experiment config")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for independent tasks")
    ap.add_argument("--tol", type=float, help="override the primary tolerance of the command")
    ap.add_argument("--d", type=int)
    ap.add_argument("--beta", help="comma-separated list")
    ap.add_argument("--delta", help="comma-separated list")
    ap.add_argument("--p", help="comma-separated list; 'inf' allowed")
    ap.add_argument("--n", help="comma-separated list of degrees")
    return ap


_PRIMARY_TOL = {"family": "reproduction", "means": "convolution", "modulus": "modulus_tail",
                "equivalence": "bracket_spread", "ft": "ball_envelope"}


def load_config(args) -> ExperimentConfig:
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    raw["name"] = args.command
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        cfg = ExperimentConfig(**raw)
        if args.out:
            cfg.out = args.out
        elif "out" not in raw:
            cfg.out = str(Path("runs") / args.command)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.d is not None:
            cfg.d = args.d
        for key in ("beta", "delta", "p"):
            if getattr(args, key):
                setattr(cfg, key, _parse_list(getattr(args, key)))
        if args.n:
            cfg.n = _parse_list(args.n, int)
        if args.tol is not None and args.command in _PRIMARY_TOL:
            cfg.tol = {**cfg.tol, _PRIMARY_TOL[args.command]: args.tol}
        cfg.n = list(cfg.n)
        return cfg.validate()
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def run(cfg: ExperimentConfig, jobs: int = 1) -> RunManifest:
    t0 = time.perf_counter()
    w = _Writer(cfg)
    w.root.mkdir(parents=True, exist_ok=True)
    checks = HANDLERS[cfg.name](cfg, w, jobs)
    man = RunManifest(cfg.snapshot(), __version__, time.perf_counter() - t0, list(w.files),
                      {k: bool(v) for k, v in checks.items()})
    bio.write_json(w.root / "manifest.json", {**asdict(man), "passed": man.passed}, w.hash, cfg.seed)
    return man


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        man = run(cfg, max(1, args.jobs))
    except InsufficientPoints as exc:
        print(f"error: insufficient-points: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: bad-config: {exc}", file=sys.stderr)
        return 2
    except BRError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    failed = [k for k, v in man.checks.items() if not v]
    print(f"{cfg.name}: {len(man.files)} files in {cfg.out}, {len(man.checks) - len(failed)}/{len(man.checks)} "
          f"checks passed ({man.wall_time:.1f}s)")
    for k in failed:
        print(f"  FAILED {k}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
