import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from pytest import approx, raises

from sc_exponents.linalg import ValidationError
from sc_exponents.states import (
    CQState,
    DensityMatrix,
    cq_from_json,
    cq_to_json,
    load_cq,
    load_state,
    random_cptp,
    random_cq,
    random_density,
    random_unitary,
    state_from_json,
    state_to_json,
)


@pytest.mark.parametrize("d", [1, 2, 5, 8])
def test_random_unitary_residual(d):
    u = random_unitary(d, 3)
    assert np.max(np.abs(u.conj().T @ u - np.eye(d))) <= 1e-10


def test_random_unitary_deterministic():
    assert np.array_equal(random_unitary(3, 11), random_unitary(3, 11))
    assert not np.array_equal(random_unitary(3, 11), random_unitary(3, 12))


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_random_density_valid(seed, rank):
    rho = random_density(4, rank=rank, seed=seed)
    w = np.linalg.eigvalsh(rho.entries)
    assert w.min() >= -1e-12
    assert np.sum(w > 1e-9) == rank
    assert np.trace(rho.entries).real == approx(1.0)


def test_random_density_dims():
    assert random_density([2, 3], seed=0).dims == (2, 3)
    with raises(ValidationError):
        random_density([2, 0], seed=0)


@given(st.integers(0, 10 ** 6))
def test_random_cptp_preserves_trace(seed):
    ch = random_cptp(3, 2, 2, seed=seed)
    out = ch(np.eye(3) / 3)
    assert np.trace(out).real == approx(1.0, abs=1e-10)
    assert np.min(np.linalg.eigvalsh(out)) >= -1e-12
    kraus_sum = sum(k.conj().T @ k for k in ch.kraus())
    assert np.allclose(kraus_sum, np.eye(3))


def test_random_cptp_invalid_dims():
    with raises(ValidationError):
        random_cptp(4, 1, 2)


def test_density_invariants():
    with raises(ValidationError, match="Hermitian"):
        DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]), (2,))
    with raises(ValidationError, match="eigenvalue"):
        DensityMatrix(np.diag([1.5, -0.5]), (2,))
    with raises(ValidationError, match="trace"):
        DensityMatrix(np.diag([0.3, 0.3]), (2,))
    sub = DensityMatrix(np.diag([0.3, 0.3]), (2,), normalized=False)
    assert not sub.normalized
    with raises(ValidationError, match="dims"):
        DensityMatrix(np.eye(4) / 4, (2, 3))


def test_reduce():
    rho = DensityMatrix(np.kron(np.diag([0.25, 0.75]), np.eye(2) / 2), (2, 2))
    assert np.allclose(rho.reduce([0]).entries, np.diag([0.25, 0.75]))


def test_cq_state_matrix_and_power():
    cq = CQState(np.array([0.5, 0.5]), (np.diag([1.0, 0.0]), np.eye(2) / 2))
    m = cq.matrix()
    assert m.shape == (4, 4)
    assert np.trace(m).real == approx(1.0)
    two = cq.tensor_power(2)
    assert two.alphabet_size == 4 and two.dim_e == 4
    assert np.allclose(two.cond_states[1], np.kron(np.diag([1.0, 0.0]), np.eye(2) / 2))
    assert np.allclose(cq.rho_e(), np.diag([0.75, 0.25]))


def test_cq_validation():
    with raises(ValidationError, match="probs"):
        CQState(np.array([0.5, 0.6]), (np.eye(2) / 2, np.eye(2) / 2))
    with raises(ValidationError, match="cond_states"):
        CQState(np.array([1.0]), (np.eye(2) / 2, np.eye(2) / 2))
    with raises(ValidationError, match=r"cond_states\[1\]"):
        CQState(np.array([0.5, 0.5]), (np.eye(2) / 2, np.eye(3) / 3))


def test_random_cq_valid():
    cq = random_cq(3, 2, seed=1, rank=1)
    assert cq.probs.sum() == approx(1.0)
    assert all(np.linalg.matrix_rank(c, tol=1e-9) == 1 for c in cq.cond_states)


# --------------------------------------------------------------------- JSON

def test_json_roundtrip(tmp_path):
    rho = random_density([2, 2], seed=5)
    path = tmp_path / "s.json"
    path.write_text(json.dumps(state_to_json(rho)))
    back = load_state(path)
    assert back.dims == (2, 2)
    assert np.allclose(back.entries, rho.entries)


def test_cq_json_roundtrip(tmp_path):
    cq = random_cq(2, 2, seed=5)
    path = tmp_path / "cq.json"
    path.write_text(json.dumps(cq_to_json(cq)))
    back = load_cq(path)
    assert np.allclose(back.matrix(), cq.matrix())


@pytest.mark.parametrize(
    "obj, message",
    [
        ([1, 2], "expected a JSON object"),
        ({"im": [[0]]}, r"state\.re: missing"),
        ({"re": [[1, 0], [0]]}, r"state\.re: not a numeric matrix"),
        ({"re": [[1, 0, 0], [0, 0, 0]]}, "square"),
        ({"re": [[1, 0], [0, 0]], "im": [[0]]}, r"state\.im: shape"),
        ({"re": [[1, 0], [0, 0]], "dims": ["a"]}, r"state\.dims"),
        ({"re": [[1, 0], [0, 0]], "normalized": "yes"}, r"state\.normalized"),
        ({"re": [[0.5, 0], [0, 0.6]]}, "trace"),
        ({"re": [[1.0, 0], [0, float("nan")]]}, r"state\.re\[1\]"),
    ],
)
def test_state_loader_diagnostics(obj, message):
    with raises(ValidationError, match=message):
        state_from_json(obj)


def test_cq_loader_diagnostics():
    with raises(ValidationError, match="probs"):
        cq_from_json({"cond_states": []})
    bad = {"probs": [0.5, 0.5], "cond_states": [{"re": [[1, 0], [0, 0]]}, {"re": [[1, 1], [0, 0]]}]}
    with raises(ValidationError, match=r"cond_states\[1\]"):
        cq_from_json(bad)


def test_load_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "re": [[1, 0],\n  [0, 0]\n')
    with raises(ValidationError, match="line"):
        load_state(path)


def test_load_missing_file(tmp_path):
    with raises(ValidationError, match="nope.json"):
        load_state(tmp_path / "nope.json")
