import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pytest import approx, raises

from sc_exponents.divergences import relative_entropy
from sc_exponents.entropies import mutual_information_closed
from sc_exponents.exponents import (
    classical_dmax_sup,
    dual_dec,
    dual_dmax,
    dual_pa,
    exponent_dec,
    exponent_dmax,
    exponent_pa,
    flat_dec,
    flat_dmax,
    flat_pa,
    sup_over_alpha,
)
from sc_exponents.linalg import ValidationError
from sc_exponents.states import CQState, random_cq, random_density

from .conftest import diag

RHO = random_density(2, seed=1).entries
SIGMA = random_density(2, seed=2).entries
CQ = random_cq(2, 2, seed=4)
RA = random_density([2, 2], seed=5).entries
P, Q = np.array([0.7, 0.3]), np.array([0.5, 0.5])


def uniform_bit_product():
    e = random_density(2, seed=6).entries
    return CQState(np.array([0.5, 0.5]), (e, e))


def classical_correlated(noise=0.1):
    p_xy = np.array([[0.5 - noise / 2, noise / 2], [noise / 2, 0.5 - noise / 2]])
    return np.diag(p_xy.ravel()).astype(complex)


# ------------------------------------------------------------ sup_over_alpha

def test_sup_over_alpha_concave_payoff():
    # (1−α)/α (2 − 1) peaks at α = 1/2
    c = sup_over_alpha(lambda a: 2.0, 1.0, 1.0, grid=9)
    assert c.supremum == approx(1.0) and c.argmax_alpha == approx(0.5)
    assert np.all(c.values <= c.supremum + 1e-15)
    assert len(c.rows()) == 9


def test_sup_over_alpha_interior_max_is_refined():
    # (1−α)/α · 8α² = 8α(1−α), max 2 at α = 1/2 on [1/2, 1]
    c = sup_over_alpha(lambda a: 8 * a * a, 1.0, 0.0, grid=5)
    assert c.supremum == approx(2.0)
    c = sup_over_alpha(lambda a: 8 * a ** 3, 1.0, 0.0, grid=5)
    # 8α²(1−α) peaks at α = 2/3
    assert c.argmax_alpha == approx(2 / 3, abs=1e-7)
    assert c.supremum == approx(32 / 27, abs=1e-12)


def test_sup_over_alpha_reports_local_maxima():
    c = sup_over_alpha(lambda a: math.cos(40 * a) / (1 - a + 1e-3), 1.0, 0.0, grid=64, refine=False)
    assert len(c.local_maxima) > 1
    assert c.warnings


def test_sup_over_alpha_infinite_payoff():
    c = sup_over_alpha(lambda a: math.inf, 1.0, 0.0, grid=4)
    assert c.supremum == math.inf


def test_sup_over_alpha_grid_too_small():
    with raises(ValidationError, match="grid"):
        sup_over_alpha(lambda a: 0.0, 1.0, 0.0, grid=1)


# ------------------------------------------------------------------- dmax

def test_frozen_dmax():
    assert exponent_dmax(RHO, SIGMA, 0.2).supremum == approx(0.1048738935477568, abs=1e-9)
    assert flat_dmax(RHO, SIGMA, 0.2, grid=64).supremum == approx(0.12233406260666702, abs=1e-9)
    assert dual_dmax(RHO, SIGMA, 0.2).value == approx(0.12233406258609003, abs=1e-7)


def test_pure_vs_mixed():
    c = exponent_dmax(diag(1, 0), np.eye(2) / 2, 0.0)
    assert c.supremum == approx(1.0, abs=1e-9)
    assert c.argmax_alpha == approx(0.5)


@pytest.mark.parametrize("extra", [0.0, 0.1, 1.0])
def test_rate_above_relative_entropy_gives_zero(extra):
    r = relative_entropy(np.diag(P), np.diag(Q)) + extra
    assert exponent_dmax(np.diag(P), np.diag(Q), r).supremum == approx(0.0, abs=1e-12)


def test_orthogonal_supports_infinite():
    assert exponent_dmax(diag(1, 0), diag(0, 1), 5.0).supremum == math.inf
    assert dual_dmax(diag(1, 0), diag(0, 1), 5.0).value == math.inf


@pytest.mark.parametrize("r, expect", [(0.0, 1.0), (0.5, 1.0)])
def test_overlapping_support_projection(r, expect):
    # Π_σ ρ Π_σ = |0⟩⟨0|/2: D*_α of the projected pair is 0, shift −log₂(1/2) = 1
    assert exponent_dmax(np.eye(2) / 2, diag(1, 0), r).supremum == approx(expect, abs=1e-9)


def test_commuting_three_ways():
    classical = classical_dmax_sup(P, Q, 0.05)
    assert classical == approx(0.01579213569340857, abs=1e-10)
    assert exponent_dmax(np.diag(P), np.diag(Q), 0.05).supremum == approx(classical, abs=1e-10)
    assert dual_dmax(np.diag(P), np.diag(Q), 0.05).value == approx(classical, abs=2e-4)


def test_dual_dmax_large_rate():
    d = dual_dmax(RHO, SIGMA, 50.0)
    assert d.value == approx(0.0, abs=1e-9)
    assert d.branch == "unpenalized"
    assert np.allclose(d.tau, RHO, atol=1e-4)


def test_dual_dmax_equal_states():
    d = dual_dmax(RHO, RHO, 0.0)
    assert d.value == approx(0.0, abs=1e-9)
    assert np.allclose(d.tau, RHO, atol=1e-4)


def test_dmax_non_increasing_in_rate():
    vals = [exponent_dmax(RHO, SIGMA, r, grid=64).supremum for r in np.linspace(0, 1.5, 7)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


# --------------------------------------------------------------------- PA

def test_pa_uniform_bit():
    cq = uniform_bit_product()
    assert exponent_pa(cq, 1.0, grid=16).supremum == approx(0.0, abs=1e-6)
    c = exponent_pa(cq, 2.0, grid=16)
    assert c.supremum == approx(1.0, abs=1e-6)
    assert c.argmax_alpha == approx(0.5)


def test_pa_rate_below_entropy_gives_zero():
    assert exponent_pa(CQ, 0.0, grid=16).supremum == approx(0.0, abs=1e-9)


def test_frozen_pa_and_duality():
    pa = exponent_pa(CQ, 1.2, grid=32).supremum
    assert pa == approx(0.7396863558430085, abs=1e-6)
    g_sup = flat_pa(CQ, 1.2, grid=32).supremum
    g_inf = dual_pa(CQ, 1.2)
    assert g_inf.value == approx(0.7756695505817637, abs=1e-6)
    assert abs(g_sup - g_inf.value) <= 2e-4
    assert g_inf.value >= pa - 1e-6
    assert set(g_inf.branch_values) == {"G1", "G2"}


def test_dual_pa_zero_rate():
    d = dual_pa(CQ, 0.0)
    assert d.value == approx(0.0, abs=1e-9)
    assert np.allclose(d.tau, CQ.matrix(), atol=1e-4)


def test_pa_negative_rate():
    with raises(ValidationError, match="rate"):
        dual_pa(CQ, -0.1)


# --------------------------------------------------------------- decoupling

def test_dec_product_state_zero():
    rho = np.kron(random_density(2, seed=1).entries, random_density(2, seed=2).entries)
    assert exponent_dec(rho, 0.1, dims=[2, 2], grid=8).supremum == approx(0.0, abs=1e-6)
    assert dual_dec(rho, 0.0, dims=[2, 2]).value == approx(0.0, abs=1e-7)


def test_dec_classical_rate_above_half_mi():
    rho = classical_correlated()
    r = mutual_information_closed(rho, [2, 2]) / 2
    assert exponent_dec(rho, r, dims=[2, 2], grid=16).supremum == approx(0.0, abs=1e-6)


@pytest.mark.parametrize("delta", [-0.05, 0.05])
def test_dec_positivity_threshold_classical(delta):
    rho = classical_correlated()
    r = mutual_information_closed(rho, [2, 2]) / 2 + delta
    positive = exponent_dec(rho, r, dims=[2, 2], grid=16).supremum > 1e-6
    assert positive == (delta < 0)


def test_frozen_dec_and_duality():
    dec = exponent_dec(RA, 0.05, dims=[2, 2], grid=32).supremum
    assert dec == approx(0.12649469899700552, abs=1e-6)
    l_sup = flat_dec(RA, 0.05, dims=[2, 2], grid=32).supremum
    l_inf = dual_dec(RA, 0.05, dims=[2, 2])
    assert l_inf.value == approx(0.22546604345427976, abs=1e-6)
    assert abs(l_sup - l_inf.value) <= 2e-4
    assert l_inf.value >= dec - 1e-6
    assert set(l_inf.branch_values) == {"L1", "L2"}


def test_dec_block_two_subadditive():
    rho = classical_correlated(0.2)
    one = exponent_dec(rho, 0.1, block=1, dims=[2, 2], grid=8)
    two = exponent_dec(rho, 0.1, block=2, dims=[2, 2], grid=8)
    assert two.supremum <= one.supremum + 1e-6
    assert "upper bound" in two.label


@pytest.mark.parametrize(
    "call, message",
    [
        (lambda: exponent_dec(RA, 0.1, block=3, dims=[2, 2]), "block"),
        (lambda: exponent_dec(RA, -0.1, dims=[2, 2]), "rate"),
        (lambda: dual_dec(RA, -0.1, dims=[2, 2]), "rate"),
        (lambda: exponent_dec(np.eye(9) / 9, 0.1, block=2, dims=[3, 3]), "64"),
    ],
)
def test_dec_errors(call, message):
    with raises(ValidationError, match=message):
        call()


# ------------------------------------------------------------- properties

@settings(max_examples=8)
@given(st.integers(0, 10 ** 6), st.floats(0.0, 1.0))
def test_dmax_duality_and_ordering(seed, r):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(2, seed=rng).entries, random_density(2, seed=rng).entries
    star = exponent_dmax(rho, sigma, r, grid=32).supremum
    flat = flat_dmax(rho, sigma, r, grid=32).supremum
    assert star <= flat + 1e-9
    assert abs(flat - dual_dmax(rho, sigma, r).value) <= 2e-4


@settings(max_examples=8)
@given(st.integers(0, 10 ** 6), st.floats(0.0, 0.5))
def test_commuting_dual_matches_classical(seed, r):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet([1, 1, 1]), rng.dirichlet([1, 1, 1])
    assert dual_dmax(np.diag(p), np.diag(q), r).value == approx(classical_dmax_sup(p, q, r, grid=128), abs=2e-4)
