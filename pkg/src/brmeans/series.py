"""Truncated power series arithmetic on coefficient arrays a[0..L]."""

import numpy as np


def truncate(a, L: int) -> np.ndarray:
    out = np.zeros(L + 1)
    a = np.asarray(a, dtype=float)[: L + 1]
    out[: len(a)] = a
    return out


def multiply(a, b, L: int) -> np.ndarray:
    return truncate(np.convolve(truncate(a, L), truncate(b, L)), L)


def binomial_series(alpha: float, L: int) -> np.ndarray:
    """Coefficients of (1 + x)^alpha."""
    j = np.arange(L)
    return np.concatenate([[1.0], np.cumprod((alpha - j) / (j + 1.0))])


def compose(outer, inner, L: int) -> np.ndarray:
    """outer(inner(x)) truncated at degree L; requires inner[0] == 0."""
    inner = truncate(inner, L)
    if inner[0] != 0:
        raise ValueError("composition needs an inner series without constant term")
    outer = truncate(outer, L)
    out = np.zeros(L + 1)
    for c in outer[::-1]:
        out = multiply(out, inner, L)
        out[0] += c
    return out


def power(a, alpha: float, L: int) -> np.ndarray:
    """a(x)^alpha for a[0] > 0, by the J.C.P. Miller recurrence."""
    a = truncate(a, L)
    if not a[0] > 0:
        raise ValueError("real power needs a positive constant term")
    b = np.zeros(L + 1)
    b[0] = a[0] ** alpha
    for m in range(1, L + 1):
        k = np.arange(1, m + 1)
        b[m] = np.sum((alpha * k - (m - k)) * a[k] * b[m - k]) / (m * a[0])
    return b
