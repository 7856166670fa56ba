import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from brmeans.acceptance import weierstrass
from brmeans.errors import EmptyCandidates, TailToleranceUnreachable
from brmeans.kernels import RieszSymbol
from brmeans.operators import MeansSpec, apply_means
from brmeans.smoothness import (
    Candidate,
    ModulusSpec,
    default_candidates,
    equivalence_report,
    k_functional_upper,
    modulus_multiplier,
    realization,
    special_modulus,
)
from brmeans.spectral import (
    GridFunction,
    SpectralPolynomial,
    fractional_laplacian,
    lp_norm,
    random_polynomial,
    synthesize,
)

SQRT_PI = math.sqrt(math.pi)


def cos_poly(freq=1, amp=1.0):
    return SpectralPolynomial.from_dict({(freq,): amp / 2, (-freq,): amp / 2}, 1)


def const_grid(c=1.7, d=1, N=32):
    return GridFunction(np.full((N,) * d, c))


# -- candidates ------------------------------------------------------------------------

def test_candidate_weights():
    k = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    assert Candidate("partial", 2).weights(k).tolist() == [1, 1, 1, 0, 0]
    assert Candidate("vallee-poussin", 4).weights(k).tolist() == [1, 1, 1, 0.5, 0]
    assert np.allclose(Candidate("means", 2, (2.0, 1.0)).weights(k), [1, 0.75, 0, 0, 0])
    assert np.allclose(Candidate("shrinkage", 3, (1.0, 0.5)).weights(k), [1, 1 / 1.5, 1 / 3, 1 / 5.5, 0])
    assert Candidate("identity", 0).weights(k).tolist() == [1] * 5
    with pytest.raises(ValueError):
        Candidate("other", 1).weights(k)
    assert Candidate("means", 2, (2.0, 1.0)).label() == "means(m=2, 2, 1)"


def test_default_candidates_nest_along_dyadic_degrees():
    for m in (1, 2, 4, 8, 16, 32, 64):
        small = {c for c in default_candidates(m, 2.0, 1)}
        big = {c for c in default_candidates(2 * m, 2.0, 1)}
        assert small <= big
    assert any(c.family == "shrinkage" for c in default_candidates(4, 2.0, 2))
    assert not any(c.family == "shrinkage" for c in default_candidates(4, 2.0, 1))


# -- realization ----------------------------------------------------------------------------

@pytest.mark.parametrize("p", [1, 2, math.inf, 0.5])
def test_realization_polynomial_bound(p):
    # [TRIVIAL] T = f is admissible when f is in T_n and t = 1/n
    n, beta = 6, 1.5
    T = random_polynomial(np.random.default_rng(3), 1, n)
    N = 64
    bound = n ** (-beta) * lp_norm(synthesize(fractional_laplacian(T, beta), N), p)
    res = realization(synthesize(T, N), 1.0 / n, beta, p)
    assert res.value <= bound * (1 + 1e-10)
    assert res.value == pytest.approx(res.approximation + res.smoothness, rel=1e-12)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 3.5])
def test_realization_cos_p2(beta):
    # [DERIVED] min over c of |1-c| sqrt(pi) + |c| sqrt(pi) = sqrt(pi)
    res = realization(cos_poly(), 1.0, beta, 2)
    assert res.value == pytest.approx(SQRT_PI, rel=1e-9)
    assert k_functional_upper(cos_poly(), 1.0, beta, 2) <= SQRT_PI * (1 + 1e-9)


@pytest.mark.parametrize("p", [0.5, 1, 2, math.inf])
def test_realization_constant(p):
    assert realization(const_grid(), 0.25, 2.0, p).value == pytest.approx(0.0, abs=1e-12)  # [TRIVIAL]
    if p >= 1:
        assert k_functional_upper(const_grid(), 0.25, 2.0, p) == pytest.approx(0.0, abs=1e-12)


def test_realization_errors():
    with pytest.raises(EmptyCandidates):
        realization(cos_poly(), 0.5, 2.0, 1, candidates=[])
    with pytest.raises(ValueError):
        realization(cos_poly(), 0.0, 2.0, 1)
    with pytest.raises(ValueError):
        k_functional_upper(cos_poly(), 0.5, 2.0, 0.5)


@pytest.mark.parametrize("p", [1, 2, math.inf])
def test_k_functional_below_realization(p):
    f = synthesize(weierstrass(5), 128)
    for n in (2, 4, 8):
        assert k_functional_upper(f, 1.0 / n, 2.0, p) <= realization(f, 1.0 / n, 2.0, p).value + 1e-12


@pytest.mark.parametrize("p", [1, 2, math.inf])
def test_realization_nonincreasing_along_dyadic_n(p):
    f = synthesize(weierstrass(6), 256)
    vals = [realization(f, 1.0 / n, 2.0, p).value for n in (1, 2, 4, 8, 16, 32)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


@settings(max_examples=10)
@given(st.integers(0, 2**31 - 1), st.sampled_from([1.0, 2.0, math.inf]))
def test_realization_candidate_minimum(seed, p):
    f = synthesize(random_polynomial(np.random.default_rng(seed), 1, 12, decay=1.0), 64)
    cands = default_candidates(4, 1.0, p)
    res = realization(f, 0.25, 1.0, p, candidates=cands)
    for c in cands[::7]:
        assert res.value <= realization(f, 0.25, 1.0, p, candidates=[c]).value + 1e-12


# -- modulus ----------------------------------------------------------------------------------

def test_modulus_spec_defaults():
    s = ModulusSpec(2.0)
    assert s.r == 3  # minimal r > d - 1 + beta
    assert ModulusSpec(1.5, d=2).r == 3
    assert ModulusSpec(2.0, d=2).r == 4
    assert s.tail_factor <= s.tol * (1 + 1e-12)
    with pytest.raises(ValueError):
        ModulusSpec(2.0, r=2)
    with pytest.raises(ValueError):
        ModulusSpec(0.0)
    with pytest.raises(TailToleranceUnreachable):
        ModulusSpec(0.2, tol=1e-8)
    assert ModulusSpec(2.0, U=50.0).U == 50.0


@pytest.mark.parametrize("d", [1, 2])
def test_modulus_constant(d):
    res = special_modulus(const_grid(3.0, d, 16), 0.1, ModulusSpec(2.0, d), 1)
    assert res.value == pytest.approx(0.0, abs=1e-12)  # [TRIVIAL]


@settings(max_examples=10)
@given(st.floats(-50, 50), st.sampled_from([0.5, 1.0, 2.0, math.inf]))
def test_modulus_homogeneity(c, p):
    T = random_polynomial(np.random.default_rng(5), 1, 6)
    spec = ModulusSpec(1.5)
    a = special_modulus(T * c, 0.2, spec, p).value
    b = special_modulus(T, 0.2, spec, p).value
    assert a == pytest.approx(abs(c) * b, rel=1e-10, abs=1e-300)


def test_modulus_vs_realization_bracket():
    # [DERIVED] measured bracket, d = 1, beta = 2, cos x, p = inf, h = 1/8
    f = synthesize(cos_poly(), 32)
    mo = special_modulus(f, 1 / 8, ModulusSpec(2.0), math.inf).value
    re = realization(f, 1 / 8, 2.0, math.inf).value
    assert 1 / 20 <= mo / re <= 20


def brute_modulus_cos(k, h, beta, r, U, x):
    """Direct u-integral of the 2r-th symmetric difference of cos(k .) at points x, d = 1."""
    nu = np.arange(2 * r + 1)
    w = special.comb(2 * r, nu) * (-1.0) ** nu

    def diff(u, xx):
        return float(np.dot(w, np.cos(k * (xx + (nu - r) * u * h)))) / u ** (1 + beta)

    # even in u, so 2 * int_1^U; split at oscillation scale for quad
    brk = np.unique(np.concatenate([[1.0], np.arange(1.0, U, 2 * math.pi / (k * h)), [U]]))
    out = []
    for xx in x:
        out.append(2 * sum(integrate.quad(diff, a, b, args=(xx,), epsabs=1e-14, epsrel=1e-12)[0]
                           for a, b in zip(brk[:-1], brk[1:])))
    return np.array(out)


@pytest.mark.parametrize("beta,k,h", [(1.0, 1, 0.5), (2.0, 3, 0.25), (0.7, 2, 1.0)])
def test_modulus_matches_direct_difference_quadrature(beta, k, h):
    spec = ModulusSpec(beta, U=60.0)
    x = np.array([0.0, 0.4, 1.3])
    ref = brute_modulus_cos(k, h, beta, spec.r, spec.U, x)
    # the multiplier at s = k h times cos(k x)
    m = float(modulus_multiplier(np.array([k * h]), spec)[0])
    assert np.allclose(m * np.cos(k * x), ref, rtol=1e-8, atol=1e-12)
    N = 32
    res = special_modulus(synthesize(cos_poly(k), N), h, spec, math.inf)
    assert res.value == pytest.approx(abs(ref[0]), rel=1e-8)


def test_modulus_multiplier_d2_matches_sphere_average():
    # d = 2: P(v) is the circle mean of 4^r sin^{2r}(v cos(theta)/2); check m(s) by 2D quadrature
    spec = ModulusSpec(0.8, d=2, U=20.0)
    r, beta = spec.r, spec.beta
    s = 1.3
    th = np.linspace(0, 2 * math.pi, 2048, endpoint=False)

    def radial(rho):
        return np.mean(4.0**r * np.sin(s * rho * np.cos(th) / 2) ** (2 * r)) * rho ** (-1 - beta)

    val = (-1) ** r * 2 * math.pi * integrate.quad(radial, 1.0, spec.U, limit=400, epsabs=1e-13)[0]
    assert float(modulus_multiplier(np.array([s]), spec)[0]) == pytest.approx(val, rel=1e-8)


def test_modulus_dimension_mismatch():
    with pytest.raises(ValueError):
        special_modulus(const_grid(1.0, 2, 8), 0.1, ModulusSpec(1.0, d=1), 1)
    with pytest.raises(ValueError):
        special_modulus(const_grid(1.0, 1, 8), 0.0, ModulusSpec(1.0), 1)


# -- equivalence report --------------------------------------------------------------------------

def test_equivalence_polynomial_case():
    # [DERIVED] f in T_4, n >= 4: errors at most n^{-beta} ||Delta^{beta/2} f||
    T = random_polynomial(np.random.default_rng(11), 1, 4)
    beta = 2.0
    rep = equivalence_report(T, beta, 1.0, 2, [4, 8, 16, 32])
    lap = lp_norm(synthesize(fractional_laplacian(T, beta), 64), 2)
    for row in rep.rows:
        n = row["n"]
        assert row["means_error"] <= n ** (-beta) * lap * (1 + 1e-9)
        assert row["realization"] <= n ** (-beta) * lap * (1 + 1e-9)
    assert all(b["spread"] <= 20 for b in rep.brackets.values())


def test_equivalence_weierstrass_slope():
    # [DERIVED] error ~ n^{-1.5}
    rep = equivalence_report(weierstrass(), 2.0, 1.0, math.inf, [4, 8, 16, 32, 64, 128])
    assert rep.slope == pytest.approx(-1.5, abs=0.2)
    assert not rep.drift_flag


def test_equivalence_constant_columns():
    c = SpectralPolynomial.from_dict({(0,): 2.0}, 1, 0)
    rep = equivalence_report(c, 2.0, 1.0, 1, [4, 8, 16, 32])
    for row in rep.rows:
        for col in ("means_error", "family_error", "realization", "modulus"):
            assert row[col] == pytest.approx(0.0, abs=1e-12)  # [TRIVIAL]
    assert not rep.drift_flag


@pytest.mark.parametrize("p", [1, 2, math.inf])
def test_bracket_constants_c2_c4(p):
    # realization <= C4 ||f - means f|| and ||f - means f|| <= C2 realization with C2, C4 <= 10
    f = weierstrass()
    rep = equivalence_report(f, 2.0, 1.0, p, [4, 8, 16, 32, 64], with_family=False)
    for row in rep.rows:
        assert row["realization"] <= 10 * row["means_error"]
        assert row["means_error"] <= 10 * row["realization"]


def test_means_error_matches_direct_computation():
    T = random_polynomial(np.random.default_rng(2), 1, 10, decay=1.0)
    # beta = 1 needs a looser tail tolerance to keep U under the cap
    rep = equivalence_report(T, 1.0, 2.0, 1, [2, 4, 8, 16], with_family=False,
                             modulus_spec=ModulusSpec(1.0, tol=1e-4))
    N = 4 * (10 + 16)
    for row in rep.rows:
        S = apply_means(T, MeansSpec(row["n"], RieszSymbol(1.0, 2.0)))
        ref = lp_norm(synthesize(T, N) - synthesize(S, N), 1)
        assert row["means_error"] == pytest.approx(ref, rel=1e-9)
