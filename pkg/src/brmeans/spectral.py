"""Periodic grids, real trigonometric polynomials and L_p (quasi-)norms on the torus.

Grid nodes are x_j = 2*pi*j/N, j in {0..N-1}^d, identical on each axis.
Polynomials store coefficients densely on the cube [-n, n]^d; entries with
Euclidean |k| > n are kept at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ResolutionTooSmall, SymmetryViolation

TWO_PI = 2.0 * math.pi
SYMMETRY_RTOL = 1e-10

Symbol = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Exponent:
    """Lebesgue exponent p in (0, inf]; ``math.inf`` encodes the sup-norm."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not v > 0 or math.isnan(v):
            raise ValueError(f"exponent must be in (0, inf], got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def pstar(self) -> float:
        return min(self.value, 1.0)

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.value)

    @property
    def inv(self) -> float:
        return 0.0 if self.is_inf else 1.0 / self.value

    @classmethod
    def of(cls, p) -> "Exponent":
        if isinstance(p, Exponent):
            return p
        if isinstance(p, str):
            p = math.inf if p.strip().lower() in ("inf", "infinity", "oo") else float(p)
        return cls(float(p))

    def __str__(self):
        return "inf" if self.is_inf else f"{self.value:g}"


PLike = Union[Exponent, float, int, str]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples of a 2*pi-periodic function on the uniform N^d grid."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim < 1 or v.size == 0:
            raise ValueError("grid values must have at least one axis")
        if len(set(v.shape)) != 1:
            raise ValueError(f"all axes must share one resolution, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def dims(self) -> int:
        return self.values.ndim

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_callable(cls, func: Callable[[np.ndarray], np.ndarray], d: int, N: int) -> "GridFunction":
        """Sample ``func`` (points of shape (..., d) -> values) at the grid nodes."""
        return cls(np.asarray(func(grid_nodes(d, N)), dtype=float))

    def __add__(self, other):
        return GridFunction(self.values + other.values)

    def __sub__(self, other):
        return GridFunction(self.values - other.values)

    def __mul__(self, c):
        return GridFunction(float(c) * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class BiGridFunction:
    """Samples on (x-grid) x (lambda-grid); axes 0..d-1 are x, d..2d-1 are lambda."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim % 2 or v.ndim == 0 or len(set(v.shape)) != 1:
            raise ValueError(f"expected shape (N,)*2d, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def dims(self) -> int:
        return self.values.ndim // 2

    @property
    def resolution(self) -> int:
        return self.values.shape[0]


def grid_nodes(d: int, N: int) -> np.ndarray:
    """Left-closed nodes of [0, 2*pi)^d, shape (N,)*d + (d,)."""
    x = TWO_PI * np.arange(N) / N
    return np.stack(np.meshgrid(*([x] * d), indexing="ij"), axis=-1)


def index_cube(d: int, n: int) -> np.ndarray:
    """Integer multi-indices of [-n, n]^d, shape (2n+1,)*d + (d,)."""
    k = np.arange(-n, n + 1)
    return np.stack(np.meshgrid(*([k] * d), indexing="ij"), axis=-1)


def frequency_grid(d: int, N: int) -> np.ndarray:
    """Integer frequencies in FFT order for an N^d grid, shape (N,)*d + (d,)."""
    k = np.fft.fftfreq(N, 1.0 / N)
    return np.stack(np.meshgrid(*([k] * d), indexing="ij"), axis=-1)


def _flip(a: np.ndarray) -> np.ndarray:
    return a[(slice(None, None, -1),) * a.ndim]


@dataclass(frozen=True, eq=False)
class SpectralPolynomial:
    """Real trigonometric polynomial sum_{|k| <= n} c_k e^{i(k, x)}.

    ``coeffs[i_1, ..., i_d]`` holds c_k for k = i - n.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim < 1 or len(set(c.shape)) != 1 or c.shape[0] % 2 == 0:
            raise ValueError(f"coefficient cube must have shape (2n+1,)*d, got {c.shape}")
        n = c.shape[0] // 2
        outside = np.linalg.norm(index_cube(c.ndim, n), axis=-1) > n + 1e-12
        scale = float(np.max(np.abs(c))) if c.size else 0.0
        if np.any(np.abs(c[outside]) > SYMMETRY_RTOL * max(scale, 1e-300)):
            raise ValueError("coefficients present outside the ball |k| <= n")
        c = np.where(outside, 0.0, c)
        if np.max(np.abs(c - np.conj(_flip(c))), initial=0.0) > SYMMETRY_RTOL * max(scale, 1e-300):
            raise SymmetryViolation("coefficients violate c_{-k} = conj(c_k)")
        object.__setattr__(self, "coeffs", _readonly(c))

    @property
    def dims(self) -> int:
        return self.coeffs.ndim

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] // 2

    def indices(self) -> np.ndarray:
        return index_cube(self.dims, self.degree)

    def items(self):
        """Yield (k, c_k) over the stored ball, k as a tuple."""
        ks = self.indices().reshape(-1, self.dims)
        cs = self.coeffs.reshape(-1)
        n = self.degree
        for k, c in zip(ks, cs):
            if np.dot(k, k) <= n * n:
                yield tuple(int(v) for v in k), complex(c)

    def coefficient(self, k) -> complex:
        k = np.atleast_1d(np.asarray(k, dtype=int))
        if np.any(np.abs(k) > self.degree):
            return 0j
        return complex(self.coeffs[tuple(k + self.degree)])

    @classmethod
    def from_dict(cls, coeffs: dict, d: int, n: int | None = None) -> "SpectralPolynomial":
        if n is None:
            n = max((int(math.ceil(np.linalg.norm(k) - 1e-12)) for k in coeffs), default=0)
        c = np.zeros((2 * n + 1,) * d, dtype=complex)
        for k, v in coeffs.items():
            k = np.atleast_1d(np.asarray(k, dtype=int))
            if len(k) != d:
                raise ValueError(f"index {tuple(k)} does not have {d} components")
            c[tuple(k + n)] = v
        return cls(c)

    @classmethod
    def zeros(cls, d: int, n: int) -> "SpectralPolynomial":
        return cls(np.zeros((2 * n + 1,) * d, dtype=complex))

    def with_degree(self, n: int) -> "SpectralPolynomial":
        """Embed into (or truncate to) the cube of degree ``n``."""
        m = self.degree
        c = np.zeros((2 * n + 1,) * self.dims, dtype=complex)
        lo = min(m, n)
        src = tuple(slice(m - lo, m + lo + 1) for _ in range(self.dims))
        dst = tuple(slice(n - lo, n + lo + 1) for _ in range(self.dims))
        c[dst] = self.coeffs[src]
        outside = np.linalg.norm(index_cube(self.dims, n), axis=-1) > n + 1e-12
        return SpectralPolynomial(np.where(outside, 0.0, c))

    def __add__(self, other):
        n = max(self.degree, other.degree)
        return SpectralPolynomial(self.with_degree(n).coeffs + other.with_degree(n).coeffs)

    def __sub__(self, other):
        n = max(self.degree, other.degree)
        return SpectralPolynomial(self.with_degree(n).coeffs - other.with_degree(n).coeffs)

    def __mul__(self, c):
        return SpectralPolynomial(float(c) * self.coeffs)

    __rmul__ = __mul__

    def __call__(self, x) -> np.ndarray:
        return evaluate(self, x)


def _check_resolution(N: int, n: int):
    if N < 2 * n + 2:
        raise ResolutionTooSmall(f"resolution {N} < 2n+2 = {2 * n + 2}")


def analyze(f: GridFunction, n: int) -> SpectralPolynomial:
    """Fourier coefficients c_k(f), |k| <= n, by the grid Riemann sum."""
    N, d = f.resolution, f.dims
    _check_resolution(N, n)
    C = np.fft.fftn(f.values) / N**d
    idx = np.arange(-n, n + 1) % N
    C = C[np.ix_(*([idx] * d))]
    outside = np.linalg.norm(index_cube(d, n), axis=-1) > n + 1e-12
    C = np.where(outside, 0.0, C)
    # the FFT of real data is Hermitian only up to rounding
    return SpectralPolynomial(0.5 * (C + np.conj(_flip(C))))


def spectrum(T: SpectralPolynomial, N: int) -> np.ndarray:
    """Place the coefficients of T on an N^d FFT-ordered array."""
    n, d = T.degree, T.dims
    _check_resolution(N, n)
    S = np.zeros((N,) * d, dtype=complex)
    idx = np.arange(-n, n + 1) % N
    S[np.ix_(*([idx] * d))] = T.coeffs
    return S


def synthesize(T: SpectralPolynomial, N: int) -> GridFunction:
    """Samples of T on the N^d grid."""
    v = np.fft.ifftn(spectrum(T, N)) * N**T.dims
    scale = float(np.max(np.abs(T.coeffs), initial=0.0))
    if np.max(np.abs(v.imag), initial=0.0) > SYMMETRY_RTOL * max(scale, 1e-300) * max(1, T.coeffs.size):
        raise SymmetryViolation("synthesis produced a non-real function")
    return GridFunction(v.real)


def evaluate(T: SpectralPolynomial, x, chunk: int = 1 << 16) -> np.ndarray:
    """Exact evaluation of T at arbitrary points ``x`` of shape (..., d)."""
    x = np.asarray(x, dtype=float)
    d = T.dims
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    ks = T.indices().reshape(-1, d)
    cs = T.coeffs.reshape(-1)
    keep = cs != 0
    ks, cs = ks[keep].astype(float), cs[keep]
    pts = x.reshape(-1, d)
    out = np.empty(len(pts))
    for s in range(0, len(pts), chunk):
        ph = pts[s:s + chunk] @ ks.T
        out[s:s + chunk] = (np.exp(1j * ph) @ cs).real
    return out.reshape(x.shape[:-1])


def fft_interpolate(f: GridFunction, N: int) -> GridFunction:
    """Resample the trigonometric interpolant of ``f`` onto an N^d grid (N >= resolution)."""
    M = f.resolution
    if N == M:
        return f
    if N < M:
        raise ValueError("fft_interpolate only refines")
    n = (M - 1) // 2
    return synthesize(analyze_full(f, n), N)


def analyze_full(f: GridFunction, n: int) -> SpectralPolynomial:
    """Cube-truncated coefficients; like ``analyze`` but keeps the whole cube |k_i| <= n.

    The result is padded to the ball of radius n*sqrt(d) so it stays a valid
    SpectralPolynomial.
    """
    N, d = f.resolution, f.dims
    C = np.fft.fftn(f.values) / N**d
    idx = np.arange(-n, n + 1) % N
    C = C[np.ix_(*([idx] * d))]
    C = 0.5 * (C + np.conj(_flip(C)))
    m = int(math.ceil(n * math.sqrt(d) - 1e-12))
    out = np.zeros((2 * m + 1,) * d, dtype=complex)
    out[tuple(slice(m - n, m + n + 1) for _ in range(d))] = C
    return SpectralPolynomial(out)


def nyquist_energy(f: GridFunction) -> float:
    """Relative size of the highest representable frequency band of ``f``.

    Zero (to rounding) when the grid holds an alias-free band-limited function.
    """
    N, d = f.resolution, f.dims
    C = np.fft.fftn(f.values) / N**d
    k = np.abs(frequency_grid(d, N))
    top = np.any(k >= N // 2, axis=-1)
    scale = float(np.max(np.abs(C), initial=0.0))
    return float(np.max(np.abs(C[top]), initial=0.0)) / max(scale, 1e-300)


def _lp(values: np.ndarray, p: Exponent, axes: tuple, N: int) -> np.ndarray:
    a = np.abs(values)
    if p.is_inf:
        return np.max(a, axis=axes)
    w = (TWO_PI / N) ** len(axes)
    # rescale so tiny or huge magnitudes do not under/overflow in a**p
    s = np.max(a, axis=axes, keepdims=True)
    s = np.where(s > 0, s, 1.0)
    body = (w * np.sum((a / s) ** p.value, axis=axes)) ** (1.0 / p.value)
    return body * np.squeeze(s, axis=axes)


def lp_norm(f: GridFunction, p: PLike) -> float:
    """Riemann-sum L_p (quasi-)norm over [0, 2*pi)^d; max |f| for p = inf."""
    p = Exponent.of(p)
    return float(_lp(f.values, p, tuple(range(f.dims)), f.resolution))


def double_norm(F: BiGridFunction, p: PLike) -> float:
    """Norm over x first, then over lambda."""
    p = Exponent.of(p)
    d, N = F.dims, F.resolution
    inner = _lp(F.values, p, tuple(range(d)), N)
    return float(_lp(inner, p, tuple(range(d)), N))


def apply_multiplier(T: SpectralPolynomial, g: Symbol, n: float) -> SpectralPolynomial:
    """A_n(g)T = sum g(k/n) c_k e^{i(k,x)} for a real centrally symmetric symbol g."""
    pts = T.indices() / float(n)
    gv = np.asarray(g(pts))
    if np.iscomplexobj(gv):
        if np.max(np.abs(gv.imag), initial=0.0) > 1e-12:
            raise SymmetryViolation("multiplier symbol must be real-valued")
        gv = gv.real
    gv = gv.astype(float)
    ball = np.linalg.norm(T.indices(), axis=-1) <= T.degree + 1e-12
    if np.max(np.abs(gv - _flip(gv))[ball], initial=0.0) > 1e-12:
        raise SymmetryViolation("multiplier symbol is not centrally symmetric")
    return SpectralPolynomial(np.where(ball, gv, 0.0) * T.coeffs)


def fractional_laplacian(T: SpectralPolynomial, beta: float) -> SpectralPolynomial:
    """Coefficient-wise |k|^beta c_k; annihilates constants."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    return SpectralPolynomial(np.linalg.norm(T.indices(), axis=-1) ** beta * T.coeffs)


def radial(func: Callable[[np.ndarray], np.ndarray]) -> Symbol:
    """Lift a profile of |x| to a symbol on points of shape (..., d)."""

    def g(x):
        return func(np.linalg.norm(np.asarray(x, dtype=float), axis=-1))

    return g


def random_polynomial(rng: np.random.Generator, d: int, n: int, decay: float = 0.0) -> SpectralPolynomial:
    """Random real T in T_n with Gaussian coefficients damped by (1+|k|)^-decay."""
    k = index_cube(d, n)
    c = rng.standard_normal(k.shape[:-1]) + 1j * rng.standard_normal(k.shape[:-1])
    c = 0.5 * (c + np.conj(_flip(c)))
    c = c * (1.0 + np.linalg.norm(k, axis=-1)) ** (-decay)
    c[np.linalg.norm(k, axis=-1) > n + 1e-12] = 0
    return SpectralPolynomial(c)


def oversampled_resolution(n: int, minimum: int = 32, factor: int = 4) -> int:
    """Grid size used for L_p norms of degree-n expressions: max(factor*n, minimum)."""
    return max(factor * n, minimum, 2 * n + 2)
