"""Realizations of the K-functional, the special modulus of smoothness and equivalence reports.

All candidate polynomials are radial Fourier multipliers applied to the FFT
spectrum of f, so every objective is evaluated on one common grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence, Union

import numpy as np
from scipy import optimize, special

from .errors import EmptyCandidates, TailToleranceUnreachable
from .kernels import RieszSymbol
from .operators import MeansSpec, apply_means, family_error, fit_loglog_slope
from .radial import sphere_area, spherical_mean_cos
from .spectral import (
    TWO_PI,
    Exponent,
    GridFunction,
    PLike,
    SpectralPolynomial,
    _lp,
    fft_interpolate,
    frequency_grid,
    lp_norm,
    oversampled_resolution,
    synthesize,
)

FunctionInput = Union[GridFunction, SpectralPolynomial]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


# ---------------------------------------------------------------------------
# candidates

@dataclass(frozen=True)
class Candidate:
    """A radial multiplier w(|k|) defining T = sum w(|k|) c_k(f) e^{i(k,x)}.

    Families: ``partial`` (indicator of |k| <= m), ``means`` (params (beta', delta')),
    ``vallee-poussin`` (1 on |k| <= m/2, linear to 0 at m), ``shrinkage``
    (1 / (1 + mu |k|^(2 beta)) on |k| <= m, mu optimized) and ``identity`` (T = f).
    """

    family: str
    degree: int
    params: tuple = ()

    def weights(self, knorm: np.ndarray) -> np.ndarray:
        m = self.degree
        if self.family == "identity":
            return np.ones_like(knorm)
        if self.family == "partial":
            return (knorm <= m + 1e-9).astype(float)
        if self.family == "means":
            b, dl = self.params
            return RieszSymbol(b, dl).radial(knorm / m)
        if self.family == "vallee-poussin":
            return np.clip(2.0 * (1.0 - knorm / m), 0.0, 1.0)
        if self.family == "shrinkage":
            beta, mu = self.params
            return np.where(knorm <= m + 1e-9, 1.0 / (1.0 + mu * knorm ** (2 * beta)), 0.0)
        raise ValueError(f"unknown candidate family {self.family!r}")

    def label(self) -> str:
        if not self.params:
            return f"{self.family}(m={self.degree})"
        return f"{self.family}(m={self.degree}, " + ", ".join(f"{v:.6g}" for v in self.params) + ")"


def _degrees(m_max: int) -> list[int]:
    if m_max <= 64:
        return list(range(m_max + 1))
    geo = np.unique(np.round(m_max * 2.0 ** (-np.arange(0, 40) / 8.0)).astype(int))
    return sorted(set(range(65)) | {int(v) for v in geo if v <= m_max} | {m_max})


def _dyadic(m_max: int) -> list[int]:
    out = {m_max}
    m = 1
    while m <= m_max:
        out.add(m)
        m *= 2
    return sorted(v for v in out if v >= 1)


def default_candidates(m_max: int, beta: float, p: PLike) -> list[Candidate]:
    """Partial sums, a means lattice, de la Vallee Poussin sums and (p = 2) shrinkage."""
    p = Exponent.of(p)
    cands = [Candidate("partial", m) for m in _degrees(m_max)]
    cands += [Candidate("vallee-poussin", m) for m in _degrees(m_max) if m >= 1]
    for m in _dyadic(m_max):
        for b in (beta / 2, beta, 2 * beta):
            for dl in (0.5, 1.0, 2.0, 4.0):
                cands.append(Candidate("means", m, (b, dl)))
    if p.value == 2 and m_max >= 1:
        cands.append(Candidate("shrinkage", m_max, (beta, float("nan"))))
    return cands


# ---------------------------------------------------------------------------
# realization

@dataclass(frozen=True)
class RealizationResult:
    """min over candidates of ||f - T||_p + t^beta ||Delta^{beta/2} T||_p."""

    value: float
    candidate: str
    approximation: float
    smoothness: float
    t: float
    beta: float
    p: float
    evaluated: int

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


class _SpectralWork:
    """FFT spectrum of f on a working grid plus helpers to evaluate candidate objectives."""

    def __init__(self, f: FunctionInput, degree_hint: int, beta: float, p: Exponent):
        if isinstance(f, SpectralPolynomial):
            N = oversampled_resolution(max(f.degree, degree_hint))
            g = synthesize(f, N)
        else:
            g = f
            N = max(f.resolution, oversampled_resolution(degree_hint))
            if N > f.resolution:
                g = fft_interpolate(f, N)
        self.d, self.N, self.p, self.beta = g.dims, N, p, beta
        self.fvals = g.values
        self.F = np.fft.fftn(g.values)
        self.knorm = np.linalg.norm(frequency_grid(self.d, N), axis=-1)
        self.kpow = self.knorm**beta
        self.axes = tuple(range(self.d))

    def _real(self, S: np.ndarray) -> np.ndarray:
        return np.fft.ifftn(S).real

    def terms(self, w: np.ndarray) -> tuple[float, float]:
        T = self._real(w * self.F)
        D = self._real(self.kpow * w * self.F)
        approx = float(_lp(self.fvals - T, self.p, self.axes, self.N))
        smooth = float(_lp(D, self.p, self.axes, self.N))
        return approx, smooth

    def parseval_terms(self, w: np.ndarray) -> tuple[float, float]:
        """L_2 addends by Parseval (exact for the grid Riemann sums)."""
        scale = TWO_PI ** (self.d / 2) / self.N**self.d
        a = scale * math.sqrt(float(np.sum(np.abs((1 - w) * self.F) ** 2)))
        s = scale * math.sqrt(float(np.sum(np.abs(self.kpow * w * self.F) ** 2)))
        return a, s


def _optimize_shrinkage(work: _SpectralWork, m: int, beta: float, tb: float) -> float:
    """mu minimizing the p = 2 objective over the one-parameter shrinkage path.

    Stationarity of ||f - T||_2 + t^b ||Delta^{b/2} T||_2 in each coefficient
    gives w_k = 1 / (1 + mu |k|^{2b}) with mu = t^b ||f - T|| / ||Delta T||.
    """
    def obj(logmu):
        a, s = work.parseval_terms(Candidate("shrinkage", m, (beta, 10.0**logmu)).weights(work.knorm))
        return a + tb * s

    lo = -2 * beta * math.log10(m + 1) - 8.0
    hi = 8.0
    grid = np.linspace(lo, hi, 49)
    vals = [obj(v) for v in grid]
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(obj, bounds=(a, b), method="bounded", options={"xatol": 1e-6})
    best = res.x if res.fun <= vals[i] else grid[i]
    return float(10.0**best)


def _run_candidates(work: _SpectralWork, cands: Sequence[Candidate], t: float) -> RealizationResult:
    if not cands:
        raise EmptyCandidates("realization needs at least one candidate")
    tb = t**work.beta
    best = None
    for c in cands:
        if c.family == "shrinkage" and not np.isfinite(c.params[1]):
            c = Candidate("shrinkage", c.degree, (c.params[0], _optimize_shrinkage(work, c.degree, c.params[0], tb)))
        a, s = work.terms(c.weights(work.knorm))
        val = a + tb * s
        if best is None or val < best[0]:
            best = (val, c, a, tb * s)
    val, c, a, s = best
    return RealizationResult(a + s, c.label(), a, s, t, work.beta, work.p.value, len(cands))


def realization(f: FunctionInput, t: float, beta: float, p: PLike,
                candidates: Sequence[Candidate] | None = None) -> RealizationResult:
    """Realization of the K-functional over polynomials of degree <= 1/t.

    Parameters
    ----------
    f : GridFunction or SpectralPolynomial
        Grid samples are treated as their trigonometric interpolant.
    t : float
        Scale; the admissible degree is floor(1/t).
    candidates : sequence of Candidate, optional
        Defaults to ``default_candidates(floor(1/t), beta, p)``.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    p = Exponent.of(p)
    m_max = int(math.floor(1.0 / t + 1e-12))
    cands = default_candidates(m_max, beta, p) if candidates is None else list(candidates)
    if not cands:
        raise EmptyCandidates("realization needs at least one candidate")
    work = _SpectralWork(f, max(c.degree for c in cands), beta, p)
    return _run_candidates(work, cands, t)


def k_functional_upper(f: FunctionInput, t: float, beta: float, p: PLike) -> float:
    """Upper bound for the K-functional (p >= 1) over realization candidates and beyond.

    The candidate set contains every realization candidate, so the bound
    never exceeds the realization.
    """
    p = Exponent.of(p)
    if p.value < 1:
        raise ValueError("the K-functional vanishes identically for p < 1; use realization")
    m_max = int(math.floor(1.0 / t + 1e-12))
    cands = default_candidates(m_max, beta, p)
    work = _SpectralWork(f, m_max, beta, p)
    top = (work.N - 1) // 2
    m = max(2 * m_max, 1)
    while m <= top:
        cands.append(Candidate("partial", m))
        cands += [Candidate("means", m, (beta, dl)) for dl in (1.0, 2.0)]
        m *= 2
    cands.append(Candidate("identity", top))
    return _run_candidates(work, cands, t).value


# ---------------------------------------------------------------------------
# special modulus

@dataclass(frozen=True)
class ModulusSpec:
    """Parameters of the special modulus.

    ``r`` defaults to the minimal integer with r > d - 1 + beta; ``U`` (the
    truncation radius of the u-integral) defaults to the smallest radius whose
    tail bound 4^r |S^{d-1}| U^{-beta} / beta is below ``tol`` (relative to ||f||_p).
    """

    beta: float
    d: int = 1
    r: int | None = None
    U: float | None = None
    tol: float = 1e-5
    max_U: float = 1e6
    small_v: float = 4.0
    angular_nodes: int = 64

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        r_min = int(math.floor(self.d - 1 + self.beta)) + 1
        r = r_min if self.r is None else int(self.r)
        if not r > self.d - 1 + self.beta:
            raise ValueError(f"need r > d - 1 + beta = {self.d - 1 + self.beta}, got {r}")
        object.__setattr__(self, "r", r)
        U = self.U
        if U is None:
            if not self.tol > 0:
                raise ValueError("tol must be positive")
            U = max(2.0, (4.0**r * sphere_area(self.d) / (self.beta * self.tol)) ** (1.0 / self.beta))
        if U > self.max_U:
            raise TailToleranceUnreachable(
                f"truncation radius {U:.3e} exceeds the cap {self.max_U:.1e}; raise tol or beta")
        if not U > 1:
            raise ValueError("U must exceed 1")
        object.__setattr__(self, "U", float(U))

    @property
    def tail_factor(self) -> float:
        """Bound on the truncated tail per unit ||f||_p."""
        return 4.0**self.r * sphere_area(self.d) * self.U ** (-self.beta) / self.beta


@dataclass(frozen=True)
class ModulusResult:
    value: float
    error_bar: float
    h: float
    p: float
    r: int
    U: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _difference_profile(v: np.ndarray, r: int, d: int, small_v: float, nodes: int) -> np.ndarray:
    """P(v) = 4^r * mean over the sphere of sin^{2r}(v w_1 / 2).

    Small v uses angular quadrature of sin^{2r} directly (the Bessel form
    cancels catastrophically there); large v uses the cosine expansion of
    sin^{2r} with exact spherical means.
    """
    v = np.asarray(v, dtype=float)
    if d == 1:
        return 4.0**r * np.sin(v / 2) ** (2 * r)
    out = np.empty_like(v)
    lo = v <= small_v
    if np.any(lo):
        a = (d - 3) / 2.0
        x, w = special.roots_jacobi(nodes, a, a)
        w = w / w.sum()
        out[lo] = 4.0**r * (np.sin(np.outer(v[lo], x) / 2) ** (2 * r)) @ w
    hi = ~lo
    if np.any(hi):
        acc = np.full(int(hi.sum()), float(special.comb(2 * r, r, exact=True)))
        for j in range(1, r + 1):
            acc += 2.0 * (-1) ** j * special.comb(2 * r, r - j, exact=True) * spherical_mean_cos(d, j * v[hi])
        out[hi] = acc
    return out


class _CumulativeIntegral:
    """H(z) = int_0^z v^{-1-beta} P(v) dv, tabulated on panels up to z_max."""

    def __init__(self, spec: ModulusSpec, z_max: float):
        r = spec.r
        self.spec = spec
        small = 2.0 ** -np.arange(60, 0, -1)
        width = min(0.5, math.pi / (2 * r))
        n_uni = max(1, int(math.ceil((max(z_max, 1.0) - 1.0) / width)))
        edges = np.concatenate([small, np.linspace(1.0, 1.0 + n_uni * width, n_uni + 1)])
        self.edges = edges
        vals = np.concatenate([[0.0], np.cumsum(self._panels(edges[:-1], edges[1:]))])
        self.cum = vals

    def _integrand(self, v):
        s = self.spec
        return v ** (-1.0 - s.beta) * _difference_profile(v, s.r, s.d, s.small_v, s.angular_nodes)

    def _panels(self, a, b):
        a, b = np.asarray(a, float), np.asarray(b, float)
        mid, half = (a + b) / 2, (b - a) / 2
        v = mid[:, None] + half[:, None] * _GL_X[None]
        return half * (self._integrand(v.ravel()).reshape(v.shape) @ _GL_W)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if np.any(z > self.edges[-1] * (1 + 1e-12)):
            raise ValueError("query beyond tabulated range")
        i = np.clip(np.searchsorted(self.edges, z, side="right") - 1, 0, len(self.edges) - 2)
        base = np.where(z < self.edges[0], 0.0, self.cum[i])
        a = np.where(z < self.edges[0], 0.0, self.edges[i])
        return base + self._panels(a, np.maximum(z, a))


@lru_cache(maxsize=16)
def _cumulative(spec: ModulusSpec, z_max_bucket: float) -> _CumulativeIntegral:
    return _CumulativeIntegral(spec, z_max_bucket)


def modulus_multiplier(s: np.ndarray, spec: ModulusSpec) -> np.ndarray:
    """Symbol of the modulus operator at s = |k| h.

    (-1)^r |S^{d-1}| s^beta int_s^{sU} v^{-1-beta} P(v) dv, from substituting
    v = s rho in the radial form of the u-integral over 1 <= |u| <= U.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    if not np.any(pos):
        return out
    z_max = float(np.max(s[pos])) * spec.U
    bucket = 2.0 ** math.ceil(math.log2(z_max))
    H = _cumulative(spec, bucket)
    sp = s[pos]
    out[pos] = (-1) ** spec.r * sphere_area(spec.d) * sp**spec.beta * (H(sp * spec.U) - H(sp))
    return out


def special_modulus(f: FunctionInput, h: float, spec: ModulusSpec, p: PLike) -> ModulusResult:
    """Special modulus of smoothness of f at step h in L_p.

    The 2r-th symmetric difference acts on e^{i(k,x)} as (-1)^r 4^r sin^{2r}((k,u)h/2),
    so the u-integral is a radial Fourier multiplier; it is applied to the
    spectrum of f and the result measured with ``lp_norm``. The reported error
    bar is the tail bound beyond U.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    p = Exponent.of(p)
    if isinstance(f, SpectralPolynomial):
        if f.dims != spec.d:
            raise ValueError("dimension mismatch between f and spec")
        f = synthesize(f, oversampled_resolution(f.degree))
    elif f.dims != spec.d:
        raise ValueError("dimension mismatch between f and spec")
    N, d = f.resolution, f.dims
    F = np.fft.fftn(f.values)
    knorm = np.linalg.norm(frequency_grid(d, N), axis=-1)
    live = np.abs(F) > 1e-14 * max(float(np.max(np.abs(F))), 1e-300)
    mult = np.zeros(F.shape)
    if np.any(live & (knorm > 0)):
        ks, inv = np.unique(np.round(knorm[live], 12), return_inverse=True)
        mult[live] = modulus_multiplier(ks * h, spec)[inv]
    g = GridFunction(np.fft.ifftn(mult * F).real)
    err = spec.tail_factor * lp_norm(f, p)
    return ModulusResult(lp_norm(g, p), err, h, p.value, spec.r, spec.U)


# ---------------------------------------------------------------------------
# equivalence report

COLUMNS = ("means_error", "family_error", "realization", "modulus")


@dataclass
class EquivalenceReport:
    beta: float
    delta: float
    p: float
    d: int
    n_list: list
    rows: list = field(default_factory=list)
    ratios: dict = field(default_factory=dict)
    brackets: dict = field(default_factory=dict)
    drift: dict = field(default_factory=dict)
    slope: float = float("nan")
    slope_residual: float = float("nan")

    @property
    def drift_flag(self) -> bool:
        return any(self.drift.values())

    def as_dict(self) -> dict:
        return {"beta": self.beta, "delta": self.delta, "p": self.p, "d": self.d, "n": list(self.n_list),
                "rows": self.rows, "brackets": self.brackets, "drift": self.drift,
                "drift_flag": self.drift_flag, "slope": self.slope, "slope_residual": self.slope_residual}


def _drifts(seq: Sequence[float], factor: float = 4.0) -> bool:
    s = np.asarray(seq, dtype=float)
    if len(s) < 2 or not np.all(np.isfinite(s)) or np.any(s <= 0):
        return False
    diff = np.diff(s)
    monotone = np.all(diff >= 0) or np.all(diff <= 0)
    return bool(monotone and s.max() / s.min() > factor)


def equivalence_report(f: SpectralPolynomial, beta: float, delta: float, p: PLike, n_list: Sequence[int],
                       N: int | None = None, modulus_spec: ModulusSpec | None = None,
                       with_family: bool = True) -> EquivalenceReport:
    """Means error, family error, realization and modulus of f over a list of degrees.

    Parameters
    ----------
    f : SpectralPolynomial
        Band-limited input; exact point evaluation is used for the family.
    N : int, optional
        Grid resolution per axis; defaults to 4 (deg f + max n), at least 32.
    """
    p = Exponent.of(p)
    d = f.dims
    n_list = [int(n) for n in n_list]
    N = N or oversampled_resolution(f.degree + max(n_list))
    spec = modulus_spec or ModulusSpec(beta, d)
    symbol = RieszSymbol(beta, delta)
    fg = synthesize(f, N)
    rep = EquivalenceReport(beta, delta, p.value, d, n_list)
    for n in n_list:
        me = lp_norm(fg - synthesize(apply_means(f, MeansSpec(n, symbol, d)).with_degree(n), N), p)
        fe = family_error(f, n, symbol, d, p, N) if with_family else float("nan")
        re = realization(fg, 1.0 / n, beta, p).value
        mo = special_modulus(fg, 1.0 / n, spec, p)
        rep.rows.append({"n": n, "means_error": me, "family_error": fe, "realization": re,
                         "modulus": mo.value, "modulus_error_bar": mo.error_bar})
    cols = [c for c in COLUMNS if with_family or c != "family_error"]
    for i, a in enumerate(cols):
        for b in cols[i + 1:]:
            num = np.array([r[a] for r in rep.rows])
            den = np.array([r[b] for r in rep.rows])
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(den > 0, num / den, np.nan)
            key = f"{a}/{b}"
            rep.ratios[key] = [float(v) for v in ratio]
            for row, v in zip(rep.rows, ratio):
                row[key] = float(v)
            fin = ratio[np.isfinite(ratio) & (ratio > 0)]
            rep.brackets[key] = {"min": float(fin.min()) if fin.size else float("nan"),
                                 "max": float(fin.max()) if fin.size else float("nan"),
                                 "spread": float(fin.max() / fin.min()) if fin.size else float("nan")}
            rep.drift[key] = _drifts(ratio)
    errs = np.array([r["means_error"] for r in rep.rows])
    if len(n_list) >= 2 and np.all(errs > 0):
        rep.slope, rep.slope_residual = fit_loglog_slope(n_list, errs)
    return rep
