"""Bochner-Riesz means, shifted sampling families and their norms.

The means act on Fourier coefficients: phi(k/n) c_k(f). The family samples f
at the (2n+1)^d shifted nodes t_n^k + lambda, takes the size-(2n+1)^d DFT,
applies the phase e^{-i(k, lambda)} and the symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import InsufficientPoints, SamplingMismatch
from .kernels import kernel_coefficients
from .spectral import (
    TWO_PI,
    Exponent,
    GridFunction,
    PLike,
    SpectralPolynomial,
    Symbol,
    _lp,
    analyze,
    analyze_full,
    apply_multiplier,
    evaluate,
    grid_nodes,
    index_cube,
    lp_norm,
    nyquist_energy,
    oversampled_resolution,
    random_polynomial,
    synthesize,
)

Sampler = Callable[[np.ndarray], np.ndarray]
FunctionLike = Union[GridFunction, SpectralPolynomial, Sampler]


@dataclass(frozen=True)
class MeansSpec:
    n: int
    symbol: Symbol
    d: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        _check_symbol(self.symbol, self.d)


@dataclass(frozen=True)
class FamilySpec:
    n: int
    symbol: Symbol
    d: int = 1
    lam: tuple = field(default=None)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        lam = (0.0,) * self.d if self.lam is None else tuple(float(v) for v in np.atleast_1d(self.lam))
        if len(lam) != self.d:
            raise ValueError(f"shift must have {self.d} components")
        object.__setattr__(self, "lam", lam)
        _check_symbol(self.symbol, self.d)

    def means(self) -> MeansSpec:
        return MeansSpec(self.n, self.symbol, self.d)


def _check_symbol(g: Symbol, d: int):
    zero = np.asarray(g(np.zeros((1, d))), dtype=float)
    if abs(zero[0] - 1.0) > 1e-12:
        raise ValueError("symbol must equal 1 at the origin")


@dataclass(frozen=True)
class NormEstimate:
    value: float
    method: str
    samples: int = 1
    seed: int | None = None


def apply_means(f: Union[GridFunction, SpectralPolynomial], spec: MeansSpec) -> SpectralPolynomial:
    """Generalized Bochner-Riesz means of f, as an element of T_n."""
    T = f.with_degree(spec.n) if isinstance(f, SpectralPolynomial) else analyze(f, spec.n)
    return apply_multiplier(T, spec.symbol, spec.n)


def as_sampler(f: FunctionLike) -> Sampler:
    """Pointwise evaluator for f; grids qualify only when alias-free band-limited."""
    if isinstance(f, SpectralPolynomial):
        return lambda x: evaluate(f, x)
    if isinstance(f, GridFunction):
        if nyquist_energy(f) > 1e-10:
            raise SamplingMismatch(
                "grid function carries Nyquist-band content; pass an exact sampler instead")
        T = analyze_full(f, (f.resolution - 1) // 2)
        return lambda x: evaluate(T, x)
    if callable(f):
        return f
    raise TypeError(f"cannot sample {type(f).__name__}")


def family_nodes(n: int, d: int) -> np.ndarray:
    """t_n^k = 2 pi k / (2n+1), k in {0..2n}^d, shape (2n+1,)*d + (d,)."""
    return grid_nodes(d, 2 * n + 1)


def _family_coefficients(samples: np.ndarray, n: int, symbol: Symbol, d: int, lams: np.ndarray) -> np.ndarray:
    """Batch of coefficient cubes, shape (L,) + (2n+1,)*d, from samples of shape (L,) + (2n+1,)*d."""
    M = 2 * n + 1
    axes = tuple(range(1, d + 1))
    C = np.fft.fftn(samples, axes=axes) / M**d
    idx = np.arange(-n, n + 1) % M
    C = C[(slice(None),) + np.ix_(*([idx] * d))]
    k = index_cube(d, n)
    weight = np.asarray(symbol(k / n), dtype=float)
    weight[np.linalg.norm(k, axis=-1) > n + 1e-12] = 0.0
    phase = np.exp(-1j * np.tensordot(lams, k, axes=([1], [d])))
    C = C * phase * weight
    flip = (slice(None),) + (slice(None, None, -1),) * d
    return 0.5 * (C + np.conj(C[flip]))


def apply_family(f: FunctionLike, spec: FamilySpec) -> SpectralPolynomial:
    """One member of the shifted sampling family applied to f."""
    sampler = as_sampler(f)
    lam = np.asarray(spec.lam, dtype=float)
    pts = family_nodes(spec.n, spec.d) + lam
    s = np.asarray(sampler(pts), dtype=float)
    C = _family_coefficients(s[None], spec.n, spec.symbol, spec.d, lam[None])
    return SpectralPolynomial(C[0])


def family_outputs(f: FunctionLike, n: int, symbol: Symbol, d: int, lams: np.ndarray, N: int) -> np.ndarray:
    """Family outputs on the N^d x-grid for a batch of shifts; shape (L,) + (N,)*d."""
    sampler = as_sampler(f)
    lams = np.asarray(lams, dtype=float).reshape(-1, d)
    nodes = family_nodes(n, d)
    pts = nodes[None] + lams.reshape((-1,) + (1,) * d + (d,))
    s = np.asarray(sampler(pts), dtype=float)
    C = _family_coefficients(s, n, symbol, d, lams)
    S = np.zeros((len(lams),) + (N,) * d, dtype=complex)
    idx = np.arange(-n, n + 1) % N
    S[(slice(None),) + np.ix_(*([idx] * d))] = C
    return np.fft.ifftn(S, axes=tuple(range(1, d + 1))).real * N**d


def family_double_norm(f: FunctionLike, n: int, symbol: Symbol, d: int, p: PLike, N: int,
                       subtract: GridFunction | None = None, chunk: int = 256) -> float:
    """||g - family_lambda(f)||_{p-bar} with lambda on the same N^d grid as x.

    ``subtract`` is g (usually f itself on the x-grid); None means g = 0.
    """
    p = Exponent.of(p)
    lams = grid_nodes(d, N).reshape(-1, d)
    inner = np.empty(len(lams))
    xaxes = tuple(range(1, d + 1))
    for s in range(0, len(lams), chunk):
        out = family_outputs(f, n, symbol, d, lams[s:s + chunk], N)
        if subtract is not None:
            out = subtract.values[None] - out
        inner[s:s + chunk] = _lp(out, p, xaxes, N)
    return float(_lp(inner.reshape((N,) * d), p, tuple(range(d)), N))


def family_error(f: FunctionLike, n: int, symbol: Symbol, d: int, p: PLike, N: int) -> float:
    """(2 pi)^{-d/p} ||f - family(f)||_{p-bar}; f is also sampled on the x-grid."""
    p = Exponent.of(p)
    fx = GridFunction(np.asarray(as_sampler(f)(grid_nodes(d, N)), dtype=float))
    return (TWO_PI ** (-d * p.inv)) * family_double_norm(f, n, symbol, d, p, N, subtract=fx)


def kernel_grid(n: int, symbol: Symbol, d: int, N: int) -> GridFunction:
    return synthesize(kernel_coefficients(n, symbol, d), N)


def operator_norm(spec: MeansSpec, p: PLike, N: int | None = None, trials: int = 32,
                  seed: int = 0) -> NormEstimate:
    """Norm of the means on L_p, p >= 1.

    p in {1, inf}: (2 pi)^{-d} ||K_n||_1 (exact up to quadrature).
    p = 2: max |phi(k/n)|. Otherwise a seeded random-polynomial lower bound.
    """
    p = Exponent.of(p)
    if p.value < 1:
        raise ValueError("means norms are defined for p >= 1; use family_norm for p < 1")
    n, d, g = spec.n, spec.d, spec.symbol
    if p.value == 1 or p.is_inf:
        N = N or oversampled_resolution(n, minimum=64, factor=8)
        K = kernel_grid(n, g, d, N)
        return NormEstimate(TWO_PI ** (-d) * lp_norm(K, 1), "kernel-l1")
    if p.value == 2:
        k = index_cube(d, n)
        ball = np.linalg.norm(k, axis=-1) <= n + 1e-12
        return NormEstimate(float(np.max(np.abs(np.asarray(g(k / n))[ball]))), "multiplier-sup")
    rng = np.random.default_rng(seed)
    N = N or oversampled_resolution(2 * n)
    best = 1.0
    candidates = [kernel_coefficients(n, g, d)]
    candidates += [random_polynomial(rng, d, m, decay=dec) for m in (n, 2 * n) for dec in (0.0, 1.0)
                   for _ in range(max(1, trials // 4))]
    for T in candidates:
        num = lp_norm(synthesize(apply_multiplier(T.with_degree(n), g, n), N), p)
        den = lp_norm(synthesize(T, N), p)
        if den > 0:
            best = max(best, num / den)
    return NormEstimate(best, "rayleigh-search", len(candidates), seed)


def needle_ratio(n: int, symbol: Symbol, d: int, p: PLike, N: int | None = None) -> float:
    """Family ratio of a needle supported on one sampling node, in the zero-width limit.

    Only shifts placing a node inside the needle contribute, each yielding
    (2n+1)^{-d} K_n(x - node); this gives
    (2 pi)^{-d/p} (2n+1)^{d(1/p - 1)} ||K_n||_p.
    """
    p = Exponent.of(p)
    N = N or oversampled_resolution(n, minimum=64, factor=16 if d == 1 else 8)
    K = kernel_grid(n, symbol, d, N)
    return TWO_PI ** (-d * p.inv) * (2 * n + 1) ** (d * (p.inv - 1.0)) * lp_norm(K, p)


def family_norm(n: int, symbol: Symbol, d: int, p: PLike, trials: int = 8, seed: int = 0,
                N: int | None = None, max_work: int = 2**24) -> NormEstimate:
    """Lower bound for (2 pi)^{-d/p} sup ||family(f)||_{p-bar} / ||f||_p.

    Needle extremals first, then seeded random trigonometric polynomials
    (whose lambda-integral is taken on the x-grid). A random trial costs
    about N^(2d) point evaluations; trials above ``max_work`` are skipped.
    """
    p = Exponent.of(p)
    best, method = 1.0, "constant"
    nd = needle_ratio(n, symbol, d, p)
    if nd > best:
        best, method = nd, "needle"
    rng = np.random.default_rng(seed)
    count = 2
    for m in (n, 2 * n):
        res = N or oversampled_resolution(n + m, minimum=16 if d > 1 else 32)
        if res ** (2 * d) > max_work:
            continue
        for _ in range(trials // 2):
            T = random_polynomial(rng, d, m, decay=rng.uniform(0.0, 2.0))
            den = lp_norm(synthesize(T, res), p)
            num = TWO_PI ** (-d * p.inv) * family_double_norm(T, n, symbol, d, p, res)
            count += 1
            if den > 0 and num / den > best:
                best, method = num / den, "rayleigh-search"
    return NormEstimate(best, method, count, seed)


def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope of log y against log x and the RMS residual."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    slope, icpt = np.polyfit(lx, ly, 1)
    return float(slope), float(np.sqrt(np.mean((ly - slope * lx - icpt) ** 2)))


@dataclass(frozen=True)
class ProbeResult:
    verdict: str
    slope: float
    residual: float
    n_list: tuple
    values: tuple

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "slope": self.slope, "residual": self.residual,
                "n": list(self.n_list), "values": list(self.values)}


def convergence_probe(n_list: Sequence[int], values: Sequence[float]) -> ProbeResult:
    """Classify a norm sequence as bounded, growing or inconclusive by its log-log slope."""
    n_list, values = tuple(int(n) for n in n_list), tuple(float(v) for v in values)
    if len(n_list) < 4 or max(n_list) < 4 * min(n_list):
        raise InsufficientPoints("need >= 4 values of n spanning a factor >= 4")
    slope, resid = fit_loglog_slope(n_list, values)
    if slope > 0.15 and resid < slope / 2:
        verdict = "growing"
    elif slope < 0.05:
        verdict = "bounded"
    else:
        verdict = "inconclusive"
    return ProbeResult(verdict, slope, resid, n_list, values)


def norm_sweep(kind: str, n_list: Sequence[int], symbol: Symbol, d: int, p: PLike, seed: int = 0,
               trials: int = 8) -> list[NormEstimate]:
    """Operator ("means") or family norms over a list of degrees."""
    if kind == "means":
        return [operator_norm(MeansSpec(n, symbol, d), p, seed=seed, trials=trials) for n in n_list]
    if kind == "family":
        return [family_norm(n, symbol, d, p, trials=trials, seed=seed) for n in n_list]
    raise ValueError(f"unknown norm kind {kind!r}")

