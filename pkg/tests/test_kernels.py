import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brmeans import series
from brmeans.errors import SeriesDivergence
from brmeans.kernels import (
    RieszSymbol,
    binomial_decay_constant,
    cutoff_eval,
    expansion_coefficients,
    fractional_binomial,
    fractional_binomials,
    h0,
    h1,
    h2,
    kernel_coefficients,
    symbol_eval,
)

betas = st.floats(0.2, 6.0)
deltas = st.floats(0.05, 5.0)


# -- series arithmetic [DERIVED: closed forms of elementary series] ---------

def test_series_binomial_and_power():
    L = 12
    # (1+x)^2 = 1 + 2x + x^2
    assert np.allclose(series.binomial_series(2, L)[:4], [1, 2, 1, 0])
    # power reproduces binomial_series for a = 1 + x
    assert np.allclose(series.power([1.0, 1.0], 0.37, L), series.binomial_series(0.37, L))
    # ((1+x)^a)^b = (1+x)^(ab)
    a = series.binomial_series(1.3, L)
    assert np.allclose(series.power(a, 0.7, L), series.binomial_series(0.91, L), atol=1e-13)


def test_series_compose_geometric():
    L = 10
    geo = np.ones(L + 1)  # 1/(1-x)
    # 1/(1-2x) = geo(2x)
    assert np.allclose(series.compose(geo, [0, 2], L), 2.0 ** np.arange(L + 1))
    with pytest.raises(ValueError):
        series.compose(geo, [1, 1], L)
    with pytest.raises(ValueError):
        series.power([0, 1], 0.5, L)


def test_series_multiply_truncates():
    out = series.multiply([1, 1], [1, 1], 1)
    assert out.tolist() == [1, 2]


# -- symbol ---------------------------------------------------------------------

def test_symbol_examples():
    s = RieszSymbol(2, 1)
    assert symbol_eval(s, 0.0) == 1.0  # [TRIVIAL]
    assert symbol_eval(s, [0.6, 0.8]) == 0.0  # [TRIVIAL] |x| = 1
    assert symbol_eval(s, 0.5) == pytest.approx(0.75, abs=1e-15)  # [DERIVED]
    assert symbol_eval(RieszSymbol(1.5, 2.5), [3.0, 0.0]) == 0.0


def test_symbol_validation():
    with pytest.raises(ValueError):
        RieszSymbol(0, 1)
    with pytest.raises(ValueError):
        RieszSymbol(1, -0.5)
    ind = RieszSymbol(2, 0)  # indicator of the open ball
    assert ind.radial(0.999) == 1.0 and ind.radial(1.0) == 0.0


@given(betas, deltas, st.floats(0, 1.5), st.floats(0, 2 * math.pi))
def test_symbol_radial_under_rotation(beta, delta, r, theta):
    s = RieszSymbol(beta, delta)
    x = np.array([r, 0.0])
    R = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    assert s(R @ x) == pytest.approx(float(s(x)), abs=1e-12)
    assert 0.0 <= float(s(x)) <= 1.0


# -- binomials --------------------------------------------------------------------

def test_fractional_binomial_examples():
    for beta in (0.3, 1, 2.7):
        assert fractional_binomial(beta, 0) == 1.0  # [PAPER]
    assert fractional_binomial(0.5, 2) == pytest.approx(-1 / 8, abs=1e-16)  # [DERIVED]
    assert fractional_binomial(2, 3) == 0.0  # [TRIVIAL]
    with pytest.raises(ValueError):
        fractional_binomial(1.0, -1)


@given(st.floats(0.1, 8.0), st.integers(0, 30))
def test_fractional_binomial_matches_gamma(beta, k):
    # [DERIVED] binom(beta, k) = Gamma(beta+1) / (Gamma(k+1) Gamma(beta-k+1)), via the product form
    ref = math.prod((beta - j) / (j + 1) for j in range(k))
    assert fractional_binomial(beta, k) == pytest.approx(ref, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("beta", [0.1, 0.5, 1.5, 2.5, 3.3, 5.7])
def test_binomial_decay(beta):
    # constant fitted on k = 1..1e4, then asserted on k = 1e4..1e5
    C = binomial_decay_constant(beta, 1, 10**4)
    b = np.abs(fractional_binomials(beta, 10**5)[10**4:])
    k = np.arange(10**4, 10**5 + 1, dtype=float)
    assert np.all(b <= C / k ** (beta + 1))


# -- kernel coefficients ----------------------------------------------------------

def test_kernel_examples():
    s = RieszSymbol(2, 1)
    K1 = kernel_coefficients(1, s, 1)
    assert K1.coefficient(0) == 1 and K1.coefficient(1) == 0 and K1.coefficient(-1) == 0  # [TRIVIAL]
    K2 = kernel_coefficients(2, s, 1)
    assert [K2.coefficient(k).real for k in (-2, -1, 0, 1, 2)] == pytest.approx([0, 0.75, 1, 0.75, 0])  # [DERIVED]
    K = kernel_coefficients(2, RieszSymbol(1, 2), 2)
    assert K.coefficient((1, 1)).real == pytest.approx((1 - math.sqrt(2) / 2) ** 2, rel=1e-14)  # [DERIVED]
    with pytest.raises(ValueError):
        kernel_coefficients(0, s, 1)


@given(st.integers(1, 2), st.integers(1, 12), betas, deltas)
def test_kernel_coefficient_range_and_ray_monotone(d, n, beta, delta):
    c = kernel_coefficients(n, RieszSymbol(beta, delta), d)
    assert c.coefficient((0,) * d) == 1
    assert np.all(c.coeffs.real >= 0) and np.all(c.coeffs.real <= 1) and np.all(c.coeffs.imag == 0)
    # along the positive first axis
    ray = [c.coefficient((j,) + (0,) * (d - 1)).real for j in range(n + 1)]
    assert np.all(np.diff(ray) <= 0)


# -- expansion -----------------------------------------------------------------------

@pytest.mark.parametrize("delta", [0.5, 1, 2.5])
def test_expansion_beta_two_is_identity(delta):
    e = expansion_coefficients(RieszSymbol(2, delta), 20)
    assert e.a[0] == pytest.approx(1, rel=1e-12)  # [TRIVIAL]
    assert np.max(np.abs(e.a[1:])) < 1e-12


@given(st.floats(0.5, 6.0), st.floats(0.3, 4.0))
def test_expansion_leading_coefficient(beta, delta):
    e = expansion_coefficients(RieszSymbol(beta, delta), 8, check=False)
    assert e.a[0] == pytest.approx((beta / 2) ** delta, rel=1e-12)


def test_expansion_examples():
    e = expansion_coefficients(RieszSymbol(4, 1), 40)
    assert e.a[0] == pytest.approx(2, rel=1e-12)  # [PAPER]
    assert e.sup_error() < 1e-6  # [DERIVED] dense sampling of both sides
    for L in (4, 8, 16, 32, 40):
        assert e.sup_error(L) <= e.sup_error(L // 2)


def test_expansion_divergence_flag():
    # [DERIVED] for beta > 12, (1 - (1-u)^(beta/2)) / u has complex zeros inside |u| < 1,
    # so a fractional power of it has branch points there and the series at u = 1 diverges
    with pytest.raises(SeriesDivergence):
        expansion_coefficients(RieszSymbol(14, 0.5), 40)
    with pytest.raises(ValueError):
        expansion_coefficients(RieszSymbol(4, 1), -1)


# -- cutoffs -----------------------------------------------------------------------------

def test_cutoff_examples():
    assert cutoff_eval("h0", np.array([1.0, 0.0])) == 1.0  # [PAPER]
    assert cutoff_eval("h1", np.array([0.9])) == 0.0  # [PAPER]
    assert cutoff_eval("h2", np.array([0.6, 0.8])) == 1.0  # [DERIVED]


def test_cutoff_plateaus_and_supports():
    r = np.linspace(0, 3, 30001)
    assert np.all(h0(r[r <= 4 / 3]) == 1) and np.all(h0(r[r >= 2]) == 0)
    assert np.all(h1(r[r <= 0.5]) == 1) and np.all(h1(r[r >= 0.75]) == 0)
    assert np.array_equal(h2(r), h0(r) - h1(r))
    for h in (h0, h1):
        v = h(r)
        assert np.all((v >= 0) & (v <= 1)) and np.all(np.diff(v) <= 0)
