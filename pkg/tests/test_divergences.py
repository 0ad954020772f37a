import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from pytest import approx, raises

from sc_exponents import divergences as dv
from sc_exponents.divergences import DivergenceSpec, SupportCase, divergence
from sc_exponents.linalg import ValidationError, fidelity
from sc_exponents.states import random_cptp, random_density

from .conftest import diag, ket, proj

RHO = random_density(2, seed=1).entries
SIGMA = random_density(2, seed=2).entries

# Oracle values from scipy.linalg fractional_matrix_power / logm / expm on the
# full-rank pair above, frozen.
FROZEN = {
    ("sandwiched", 0.5): 0.28964590534917106,
    ("sandwiched", 0.7): 0.42374317544590906,
    ("sandwiched", 2.0): 1.01592734376722,
    ("petz", 0.5): 0.31051820497160115,
    ("petz", 0.7): 0.4324179082473881,
    ("petz", 2.0): 1.107280344545869,
    ("log-euclidean", 0.5): 0.31809350841014994,
    ("log-euclidean", 0.7): 0.4411644898938345,
    ("log-euclidean", 2.0): 0.9791752476298207,
}


@pytest.mark.parametrize("kind, alpha", sorted(FROZEN))
def test_frozen_values(kind, alpha):
    assert divergence(DivergenceSpec(kind, alpha), RHO, SIGMA).value == approx(FROZEN[kind, alpha], abs=1e-12)


def test_small_alpha_graded_path():
    # 50-digit mpmath reference; the sandwich has eigenvalues down to 7e-25
    r, s = random_density(3, seed=0).entries, random_density(3, seed=1).entries
    assert dv.sandwiched(r, s, 0.0625) == approx(0.043544509135177020949, abs=1e-10)


def test_graded_singular_values_relative_accuracy():
    b = np.diag([1.0, 1e-12, 1e-20]) @ np.array([[1, 0.5, 0], [0.5, 1, 0.5], [0, 0.5, 1]], dtype=complex)
    sv = dv.graded_singular_values(b)
    ref = np.sort(np.linalg.svd(b, compute_uv=False))
    assert sv[-1] == approx(ref[-1], rel=1e-12)
    assert sv[0] == approx(1e-20 * np.sqrt(1 - 0.25 / (1 - 0.25)), rel=1e-8)


def test_frozen_umegaki_and_dmax():
    assert dv.relative_entropy(RHO, SIGMA) == approx(0.609208281541033, abs=1e-12)
    assert dv.d_max(RHO, SIGMA) == approx(1.4627466253072423, abs=1e-12)


# ------------------------------------------------------------------ q_star

def test_q_star_identical():
    assert dv.q_star(RHO, RHO, 0.7) == approx(1.0)


def test_q_star_pure_vs_mixed():
    assert dv.q_star(proj(ket(2, 0)), np.eye(2) / 2, 0.5) == approx(2 ** -0.5, abs=1e-12)


def test_q_star_commuting_scalar():
    p, q = np.array([0.5, 0.5]), np.array([0.9, 0.1])
    expect = float(np.sum(p ** 0.7 * q ** 0.3))
    assert dv.q_star(np.diag(p), np.diag(q), 0.7) == approx(expect, abs=1e-12)


# -------------------------------------------------------------- divergence

@pytest.mark.parametrize("kind", ["umegaki", "sandwiched", "petz", "log-euclidean", "max"])
def test_self_divergence_zero(kind):
    spec = DivergenceSpec(kind, None if kind in ("umegaki", "max") else 0.8)
    assert divergence(spec, RHO, RHO).value == approx(0.0, abs=1e-10)


@pytest.mark.parametrize("alpha", [0.5, 0.8, 1.5, 3.0])
def test_pure_vs_maximally_mixed(alpha):
    assert dv.sandwiched(proj(ket(2, 0)), np.eye(2) / 2, alpha) == approx(1.0, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.3, 0.7, 2.0])
def test_commuting_kinds_agree(alpha):
    p, q = np.array([0.2, 0.3, 0.5]), np.array([0.6, 0.1, 0.3])
    expect = dv.renyi_classical(p, q, alpha)
    for fn in (dv.sandwiched, dv.petz, dv.log_euclidean):
        assert fn(np.diag(p), np.diag(q), alpha) == approx(expect, abs=1e-10)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9, 1.5])
def test_petz_uniform_vs_identity(alpha):
    assert dv.petz(diag(0.5, 0.5), np.eye(2), alpha) == approx(-1.0, abs=1e-12)


def test_support_cases():
    contained = divergence(DivergenceSpec("sandwiched", 2.0), diag(1, 0), np.eye(2) / 2)
    assert contained.support_case is SupportCase.CONTAINED and contained.finite
    over = divergence(DivergenceSpec("sandwiched", 2.0), np.eye(2) / 2, diag(1, 0))
    assert over.support_case is SupportCase.OVERLAPPING
    assert over.value == math.inf and not over.finite
    # α < 1 only needs non-orthogonal supports: Q* = (1/2)^α
    assert divergence(DivergenceSpec("sandwiched", 0.7), np.eye(2) / 2, diag(1, 0)).value == approx(7 / 3)
    orth = divergence(DivergenceSpec("petz", 0.7), diag(1, 0), diag(0, 1))
    assert orth.support_case is SupportCase.ORTHOGONAL and orth.value == math.inf
    assert divergence(DivergenceSpec("umegaki"), np.eye(2) / 2, diag(1, 0)).value == math.inf
    assert divergence(DivergenceSpec("max"), np.eye(2) / 2, diag(1, 0)).value == math.inf


def test_log_euclidean_empty_intersection():
    assert dv.log_euclidean(diag(1, 0), diag(0, 1), 0.5) == math.inf


def test_dmax_closed_form():
    # ρ ≤ 2^λ σ for ρ = |0><0|, σ = I/2 needs 2^λ = 2
    assert dv.d_max(proj(ket(2, 0)), np.eye(2) / 2) == approx(1.0)


@pytest.mark.parametrize(
    "kwargs, message",
    [
        ({"kind": "renyi", "alpha": 0.5}, "unknown divergence kind"),
        ({"kind": "sandwiched", "alpha": 1.0}, "alpha"),
        ({"kind": "petz", "alpha": -0.5}, "alpha"),
        ({"kind": "log-euclidean"}, "alpha"),
        ({"kind": "max", "smoothing_eps": 1.5}, "smoothing_eps"),
    ],
)
def test_spec_validation(kwargs, message):
    with raises(ValidationError, match=message):
        DivergenceSpec(**kwargs)


def test_dimension_mismatch():
    with raises(ValidationError, match="dimension"):
        divergence(DivergenceSpec("umegaki"), np.eye(2) / 2, np.eye(3) / 3)


def test_smoothed_max_divergence_below_dmax():
    unsmoothed = divergence(DivergenceSpec("max"), RHO, SIGMA).value
    smoothed = divergence(DivergenceSpec("max", smoothing_eps=0.1), RHO, SIGMA).value
    assert smoothed < unsmoothed


# ------------------------------------------------------- log-Euclidean limit

def test_log_euclidean_q_identity():
    assert dv.log_euclidean_q(RHO, RHO, 0.4) == approx(1.0)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
@pytest.mark.parametrize("seed", range(4))
def test_log_euclidean_limit(alpha, seed):
    rng = np.random.default_rng(seed)
    v = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
    # both rank 2 on a common support that is not an eigenbasis of either
    w = v[:, :2] @ np.linalg.qr(rng.normal(size=(2, 2)))[0]
    rho = v[:, :2] @ np.diag(rng.dirichlet([1, 1])) @ v[:, :2].conj().T
    sigma = w @ np.diag(rng.dirichlet([1, 1])) @ w.conj().T
    exact, extrapolated = dv.log_euclidean_limit_check(rho, sigma, alpha)
    assert abs(exact - extrapolated) <= 1e-5 * max(1.0, abs(exact))


def test_log_euclidean_limit_rank_deficient_both():
    rho = np.diag([0.6, 0.4, 0.0]).astype(complex)
    sigma = np.diag([0.0, 0.3, 0.7]).astype(complex)
    exact, extrapolated = dv.log_euclidean_limit_check(rho, sigma, 0.5)
    # the intersection is the second basis vector only
    assert exact == approx(0.4 ** 0.5 * 0.3 ** 0.5, abs=1e-12)
    assert abs(exact - extrapolated) <= 1e-5


# ------------------------------------------------------------- properties

seeds = st.integers(0, 10 ** 6)


@given(seeds, st.floats(0.5, 3.0), st.floats(0.5, 3.0))
def test_sandwiched_monotone_in_alpha(seed, a, b):
    a, b = sorted((a, b))
    if abs(a - 1) < 1e-3 or abs(b - 1) < 1e-3:
        return
    r, s = random_density(3, seed=seed).entries, random_density(3, seed=seed + 1).entries
    assert dv.sandwiched(r, s, a) <= dv.sandwiched(r, s, b) + 1e-9


@given(seeds, st.floats(0.05, 0.99))
def test_flat_above_star(seed, a):
    r, s = random_density(3, seed=seed).entries, random_density(3, seed=seed + 1).entries
    assert dv.log_euclidean(r, s, a) >= dv.sandwiched(r, s, a) - 1e-9


@given(seeds, st.floats(0.5, 3.0))
def test_sandwiched_data_processing(seed, a):
    if abs(a - 1) < 1e-3:
        return
    rng = np.random.default_rng(seed)
    r, s = random_density(3, seed=rng).entries, random_density(3, seed=rng).entries
    ch = random_cptp(3, 2, 2, seed=rng)
    assert dv.sandwiched(ch(r), ch(s), a) <= dv.sandwiched(r, s, a) + 1e-8


@given(seeds)
def test_half_order_is_fidelity(seed):
    r, s = random_density(3, seed=seed).entries, random_density(3, seed=seed + 1).entries
    assert dv.sandwiched(r, s, 0.5) == approx(-2 * math.log2(fidelity(r, s)), abs=1e-9)


@given(seeds, st.floats(0.51, 0.99))
def test_lwdg_inequality(seed, a):
    rng = np.random.default_rng(seed)
    r, s, t = (random_density(3, seed=rng).entries for _ in range(3))
    b = a / (2 * a - 1)
    lhs = 2 * a / (1 - a) * math.log2(fidelity(r, s))
    assert lhs <= dv.sandwiched(r, t, b) - dv.sandwiched(s, t, a) + 1e-8


@given(seeds)
def test_fidelity_measured_by_relative_entropies(seed):
    rng = np.random.default_rng(seed)
    r, s, t = (random_density(3, seed=rng).entries for _ in range(3))
    assert -math.log2(fidelity(r, s) ** 2) <= dv.relative_entropy(t, r) + dv.relative_entropy(t, s) + 1e-8


# ------------------------------------------------------ pinched blocks


def test_pinched_block_commuting_is_exact():
    rho, sigma = diag(0.7, 0.3), diag(0.4, 0.6)
    for m in (1, 2, 3):
        assert dv.pinched_block_sandwiched(rho, sigma, 0.7, m) == approx(dv.sandwiched(rho, sigma, 0.7), abs=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_pinched_block_below_and_approaching(seed):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(2, seed=rng).entries, random_density(2, seed=rng).entries
    exact = dv.sandwiched(rho, sigma, 0.7)
    vals = [dv.pinched_block_sandwiched(rho, sigma, 0.7, m) for m in (1, 2, 3)]
    assert all(v <= exact + 1e-9 for v in vals)
    assert exact - vals[2] < exact - vals[0]


def test_pinched_block_limits():
    with raises(ValidationError, match="positive"):
        dv.pinched_block_sandwiched(np.eye(2) / 2, np.eye(2) / 2, 0.7, 0)
    with raises(ValidationError, match="64"):
        dv.pinched_block_sandwiched(np.eye(3) / 3, np.eye(3) / 3, 0.7, 4)
