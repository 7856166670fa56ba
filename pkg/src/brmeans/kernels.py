"""Generalized Bochner-Riesz symbols, kernels, binomial coefficients and cutoffs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import series
from .errors import SeriesDivergence
from .spectral import SpectralPolynomial, index_cube


@dataclass(frozen=True)
class RieszSymbol:
    """phi(x) = (1 - |x|^beta)_+^delta.

    ``delta = 0`` is accepted and means the indicator of the open unit ball,
    the symbol of the spherical partial sums.
    """

    beta: float
    delta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.delta >= 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")

    def radial(self, r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        inside = r < 1.0
        base = np.where(inside, 1.0 - np.where(inside, r, 0.0) ** self.beta, 0.0)
        if self.delta == 0:
            return inside.astype(float)
        return np.where(inside, base**self.delta, 0.0)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.radial(np.linalg.norm(x, axis=-1))


def symbol_eval(s: RieszSymbol, x) -> float:
    """Value at a single point x (scalar or d-vector)."""
    return float(s.radial(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float)))))


def fractional_binomial(beta: float, k: int) -> float:
    """beta (beta-1) ... (beta-k+1) / k!, equal to 1 at k = 0."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return float(fractional_binomials(beta, k)[k])


def fractional_binomials(beta: float, kmax: int) -> np.ndarray:
    """All binomial coefficients of order beta for k = 0..kmax."""
    j = np.arange(kmax)
    return np.concatenate([[1.0], np.cumprod((beta - j) / (j + 1.0))])


def kernel_coefficients(n: int, s, d: int) -> SpectralPolynomial:
    """Coefficients phi(k/n) of the generalized Bochner-Riesz kernel."""
    if n < 1:
        raise ValueError("n must be at least 1")
    k = index_cube(d, n)
    return SpectralPolynomial(np.asarray(s(k / n), dtype=float).astype(complex))


@dataclass(frozen=True)
class ExpansionCoefficients:
    """(1-r^beta)_+^delta = sum_nu a_nu (1-r^2)_+^(delta+nu) on 0 <= r <= 1."""

    beta: float
    delta: float
    a: np.ndarray

    def partial_sum(self, r, L: int | None = None) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        a = self.a if L is None else self.a[: L + 1]
        u = np.clip(1.0 - r**2, 0.0, None)
        # Horner in u, then the common factor u^delta
        acc = np.zeros_like(u)
        for c in a[::-1]:
            acc = acc * u + c
        return np.where(r <= 1.0, u**self.delta * acc, 0.0)

    def sup_error(self, L: int | None = None, samples: int = 4001) -> float:
        r = np.linspace(0.0, 1.0, samples)
        exact = RieszSymbol(self.beta, self.delta).radial(r)
        return float(np.max(np.abs(exact - self.partial_sum(r, L))))


def expansion_coefficients(s: RieszSymbol, L: int, check: bool = True) -> ExpansionCoefficients:
    """Taylor coefficients in u = 1 - r^2 of ((1 - (1-u)^(beta/2)) / u)^delta."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    # (1-u)^(beta/2) as (1+x)^(beta/2) composed with x = -u
    root = series.compose(series.binomial_series(s.beta / 2, L + 1), [0.0, -1.0], L + 1)
    g = -root[1:]
    a = series.power(g, s.delta, L)
    out = ExpansionCoefficients(s.beta, s.delta, a)
    if check and L >= 4:
        err_now = out.sup_error(L)
        err_before = out.sup_error(L - L // 4)
        if err_now > 1e-12 and not err_now < err_before:
            raise SeriesDivergence(
                f"sup-error {err_now:.3e} did not decrease from {err_before:.3e} over the last {L // 4} terms"
            )
    return out


def _smooth_step(t) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    tc = np.clip(t, 1e-300, 1 - 1e-16)
    a = np.where(t > 0, np.exp(-1.0 / tc), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / (1.0 - tc)), 0.0)
    return np.where(t >= 1, 1.0, np.where(t <= 0, 0.0, a / (a + b)))


def h0(r) -> np.ndarray:
    """1 on |x| <= 4/3, 0 on |x| >= 2."""
    return _smooth_step((2.0 - np.abs(r)) / (2.0 - 4.0 / 3.0))


def h1(r) -> np.ndarray:
    """1 on |x| <= 1/2, 0 on |x| >= 3/4."""
    return _smooth_step((0.75 - np.abs(r)) / 0.25)


def h2(r) -> np.ndarray:
    return h0(r) - h1(r)


_CUTOFFS = {"h0": h0, "h1": h1, "h2": h2}


def cutoff_eval(which: str, x) -> np.ndarray:
    """Evaluate h0, h1 or h2 at points of shape (..., d)."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1) if x.ndim else np.abs(x)
    return _CUTOFFS[which](r)


def binomial_decay_constant(beta: float, k_lo: int, k_hi: int) -> float:
    """max over k in [k_lo, k_hi] of |binom(beta, k)| k^(beta+1)."""
    b = fractional_binomials(beta, k_hi)
    k = np.arange(k_lo, k_hi + 1)
    return float(np.max(np.abs(b[k_lo:]) * k ** (beta + 1.0)))


def ball_symbol(delta: float) -> RieszSymbol:
    return RieszSymbol(2.0, delta)

