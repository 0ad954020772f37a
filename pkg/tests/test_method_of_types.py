import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pytest import approx, raises

from sc_exponents.exponents import classical_dmax_sup, exponent_dmax
from sc_exponents.linalg import ValidationError
from sc_exponents.method_of_types import (
    build_type_table,
    compositions,
    convergence_report,
    finite_n_optimum,
    hinge_values,
    log2_b_values,
    log2_optimum,
    report_csv,
    simplex_inf_form,
)
from sc_exponents.smoothing import smooth_classical

P, Q = [0.7, 0.3], [0.5, 0.5]

# −(1/n) log₂(1 − ε_n) for (P, Q, r = 0.05), frozen from the exact water-filling
FROZEN_VALUES = {50: 0.04401424627089809, 100: 0.03366068541167012, 200: 0.026844549404846717}


def brute_force_optimum(p, q, r, n):
    """A_n by water-filling over all |X|^n sequences (small n only)."""
    k = len(p)
    seqs = np.array(np.meshgrid(*[range(k)] * n, indexing="ij")).reshape(n, -1).T
    pn = np.prod(np.asarray(p)[seqs], axis=1)
    qn = np.prod(np.asarray(q)[seqs], axis=1)
    return smooth_classical(pn / pn.sum(), qn, n * r).fidelity_achieved


# -------------------------------------------------------------- type table

def test_compositions_order_and_count():
    assert list(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert len(list(compositions(5, 3))) == math.comb(7, 2)


def test_binary_n2_table():
    tab = build_type_table([0.5, 0.5], [0.5, 0.5], 2)
    assert tab.num_types == 3 <= (2 + 1) ** 2
    # type (1,1)/2: |T| = 2, bracketed by (n+1)^{-2} 2^{nH} = 4/9 and 2^{nH} = 4
    size = 2 ** tab.log2_class_size[1]
    assert size == approx(2.0)
    assert 4 / 9 <= size <= 2 ** (2 * tab.entropy[1])


@pytest.mark.parametrize("k, n", [(2, 400), (3, 30), (4, 12)])
def test_table_normalization_and_count(k, n):
    rng = np.random.default_rng(k)
    p, q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
    tab = build_type_table(p, q, n)
    assert tab.P.sum() == approx(1.0, abs=1e-9)
    assert tab.Q.sum() == approx(1.0, abs=1e-9)
    assert tab.num_types <= (n + 1) ** k


@pytest.mark.parametrize("n", [5, 20, 100])
def test_type_probability_bounds(n):
    # (n+1)^{-|X|} 2^{-nD(t‖p)} ≤ P_n(t) ≤ 2^{-nD(t‖p)}
    tab = build_type_table(P, Q, n)
    lower = -2 * math.log2(n + 1) - n * tab.d_p
    upper = -n * tab.d_p
    assert np.all(tab.log2_p >= lower - 1e-9)
    assert np.all(tab.log2_p <= upper + 1e-9)


def test_class_size_exact():
    tab = build_type_table([0.2, 0.3, 0.5], [0.2, 0.3, 0.5], 6)
    for t, ls in zip(tab.types, tab.log2_class_size):
        exact = math.factorial(6) // math.prod(math.factorial(c) for c in t)
        assert 2 ** ls == approx(exact, rel=1e-12)


@pytest.mark.parametrize(
    "p, q, n, message",
    [
        ([0.5, 0.5], [0.5, 0.5], 401, "limit"),
        ([0.2] * 5, [0.2] * 5, 2, "alphabet"),
        ([0.5, 0.5], [0.5, 0.5], 0, "positive"),
        ([0.5, 0.6], [0.5, 0.5], 2, "p"),
    ],
)
def test_table_errors(p, q, n, message):
    with raises(ValidationError, match=message):
        build_type_table(p, q, n)


# -------------------------------------------------------------- A_n

def test_rate_above_dmax_gives_exact_one():
    res = finite_n_optimum(P, Q, 1.0, 7)
    assert res.A_n == 1.0 and res.epsilon == 0.0
    assert res.minus_log_one_minus_eps_over_n == 0.0


def test_n1_equal_distributions():
    assert finite_n_optimum([0.5, 0.5], [0.5, 0.5], -1.0, 1).A_n == approx(2 ** -0.5, abs=1e-12)


@given(st.integers(0, 10 ** 6), st.floats(-1.0, 1.0), st.integers(2, 4))
def test_n1_matches_smooth_classical(seed, r, k):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
    assert finite_n_optimum(p, q, r, 1).A_n == approx(smooth_classical(p, q, r).fidelity_achieved, abs=1e-12)


@pytest.mark.parametrize("n", [2, 4, 7])
@pytest.mark.parametrize("r", [-0.3, 0.05, 0.3])
def test_types_match_sequence_level_water_filling(n, r):
    assert finite_n_optimum(P, Q, r, n).A_n == approx(brute_force_optimum(P, Q, r, n), abs=1e-12)


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6), st.floats(-0.5, 0.5), st.integers(1, 60))
def test_bracket_max_b(seed, r, n):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
    tab = build_type_table(p, q, n)
    lb = float(np.max(log2_b_values(tab, r)))
    la = log2_optimum(tab, r)
    assert lb <= la + 1e-9
    assert la <= 3 * math.log2(n + 1) + lb + 1e-9


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6), st.floats(-0.5, 0.5), st.integers(1, 100))
def test_value_within_type_sandwich(seed, r, n):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(2)), rng.dirichlet(np.ones(2))
    res = finite_n_optimum(p, q, r, n)
    lo, hi = res.value_bounds
    assert lo - 1e-9 <= res.minus_log_one_minus_eps_over_n <= hi + 1e-9


def test_orthogonal_distributions():
    res = finite_n_optimum([1.0, 0.0], [0.0, 1.0], 0.5, 5)
    assert res.A_n == 0.0 and res.epsilon == 1.0
    assert res.minus_log_one_minus_eps_over_n == math.inf
    assert res.asymptote == math.inf


# ---------------------------------------------------------- asymptotics

def test_simplex_inf_form_matches_sup_form():
    inf_form = simplex_inf_form(P, Q, 0.05)
    assert inf_form == approx(classical_dmax_sup(np.array(P), np.array(Q), 0.05), abs=1e-8)
    assert inf_form == approx(exponent_dmax(np.diag(P), np.diag(Q), 0.05).supremum, abs=1e-8)


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6), st.floats(-0.5, 1.0), st.integers(2, 4))
def test_classical_variational_identity(seed, r, k):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
    assert simplex_inf_form(p, q, r) == approx(classical_dmax_sup(p, q, r), abs=1e-8)


def test_hinge_minimum_approaches_asymptote():
    asym = simplex_inf_form(P, Q, 0.05)
    mins = [float(np.min(hinge_values(build_type_table(P, Q, n), 0.05))) for n in (10, 100, 400)]
    assert all(m >= asym - 1e-9 for m in mins)
    assert mins[-1] - asym <= 1e-3


def test_convergence_report_frozen():
    rows = convergence_report(P, Q, 0.05, [50, 100, 200])
    asym = exponent_dmax(np.diag(P), np.diag(Q), 0.05).supremum
    gaps = [row.gap for row in rows]
    for row in rows:
        assert row.minus_log_one_minus_eps_over_n == approx(FROZEN_VALUES[row.n], abs=1e-12)
        assert row.asymptote == approx(asym, abs=1e-8)
        assert row.gap <= 2 * 2 * math.log2(row.n + 1) / row.n
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] <= 0.08


def test_report_rows_above_dmax_are_zero():
    rows = convergence_report(P, Q, 1.0, [5, 10, 20])
    assert [row.minus_log_one_minus_eps_over_n for row in rows] == [0.0, 0.0, 0.0]
    assert all(row.asymptote == 0.0 for row in rows)


def test_orthogonal_report_grows():
    rows = convergence_report([1.0, 0.0], [0.0, 1.0], 0.0, [1, 2, 3])
    assert all(row.minus_log_one_minus_eps_over_n == math.inf for row in rows)


def test_report_csv_rows():
    rows = convergence_report(P, Q, 0.05, [10, 20])
    table = list(csv.reader(io.StringIO(report_csv(rows))))
    assert table[0] == ["n", "A_n", "minus_log_one_minus_eps_over_n", "asymptote", "gap"]
    assert [r[0] for r in table[1:]] == ["10", "20"]
