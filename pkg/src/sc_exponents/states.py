"""State containers, seeded random generators and the JSON state format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .linalg import (
    HERMITIAN_TOL,
    ValidationError,
    hermitian_defect,
    kron_all,
    partial_trace,
)

STATE_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """A (sub)normalized density operator with declared subsystem dimensions."""

    entries: np.ndarray
    dims: tuple[int, ...]
    normalized: bool = True

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if any(d <= 0 for d in dims):
            raise ValidationError(f"dims must be positive, got {dims}")
        total = int(np.prod(dims))
        if m.shape != (total, total):
            raise ValidationError(f"entries shape {m.shape} does not match dims {dims}")
        scale = max(1.0, float(np.max(np.abs(m))))
        if hermitian_defect(m) > HERMITIAN_TOL * scale:
            raise ValidationError("entries: not Hermitian within 1e-10")
        m = 0.5 * (m + m.conj().T)
        lo = float(np.min(np.linalg.eigvalsh(m)))
        if lo < -STATE_TOL:
            raise ValidationError(f"entries: eigenvalue {lo:.3e} below -1e-10")
        tr = float(np.real(np.trace(m)))
        if self.normalized and abs(tr - 1.0) > STATE_TOL:
            raise ValidationError(f"normalized: trace {tr!r} differs from 1")
        if not self.normalized and not (0.0 < tr <= 1.0 + STATE_TOL):
            raise ValidationError(f"normalized=false: trace {tr!r} outside (0, 1]")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def reduce(self, keep: Sequence[int]) -> "DensityMatrix":
        dims = tuple(self.dims[k] for k in sorted(set(keep)))
        return DensityMatrix(partial_trace(self.entries, self.dims, keep), dims, self.normalized)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class CQState:
    """Classical-quantum state ``Σ_x p_x |x><x| ⊗ ρ_x``."""

    probs: np.ndarray
    cond_states: tuple[np.ndarray, ...]

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or len(p) == 0:
            raise ValidationError("probs: expected a nonempty vector")
        if np.any(p < -STATE_TOL) or abs(p.sum() - 1.0) > 1e-9:
            raise ValidationError(f"probs: not a probability vector (sum {p.sum()!r})")
        if len(self.cond_states) != len(p):
            raise ValidationError(
                f"cond_states: expected {len(p)} matrices, got {len(self.cond_states)}"
            )
        mats = []
        d = None
        for i, s in enumerate(self.cond_states):
            try:
                dm = DensityMatrix(np.asarray(s, dtype=complex), (np.asarray(s).shape[0],))
            except ValidationError as exc:
                raise ValidationError(f"cond_states[{i}]: {exc}") from None
            if d is not None and dm.dim != d:
                raise ValidationError(f"cond_states[{i}]: dimension {dm.dim} != {d}")
            d = dm.dim
            mats.append(dm.entries)
        p = np.clip(p, 0.0, None)
        object.__setattr__(self, "probs", p / p.sum())
        object.__setattr__(self, "cond_states", tuple(mats))

    @property
    def alphabet_size(self) -> int:
        return len(self.probs)

    @property
    def dim_e(self) -> int:
        return self.cond_states[0].shape[0]

    def matrix(self) -> np.ndarray:
        """Block-diagonal matrix on X⊗E."""
        nx, de = self.alphabet_size, self.dim_e
        out = np.zeros((nx * de, nx * de), dtype=complex)
        for x, (px, rx) in enumerate(zip(self.probs, self.cond_states)):
            out[x * de:(x + 1) * de, x * de:(x + 1) * de] = px * rx
        return out

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.matrix(), (self.alphabet_size, self.dim_e))

    def rho_e(self) -> np.ndarray:
        return sum(p * r for p, r in zip(self.probs, self.cond_states))

    def tensor_power(self, n: int) -> "CQState":
        """``ρ_XE^{⊗n}`` as a CQ state on X^n (lexicographic) and E^n."""
        probs = np.ones(1)
        mats = [np.ones((1, 1), dtype=complex)]
        for _ in range(n):
            probs = np.kron(probs, self.probs)
            mats = [np.kron(a, b) for a in mats for b in self.cond_states]
        return CQState(probs, tuple(mats))


# ---------------------------------------------------------------- random

def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with phase fix."""
    if d <= 0:
        raise ValidationError(f"invalid dimension {d}")
    rng = _rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_isometry(d_in: int, d_out: int, seed=None) -> np.ndarray:
    if d_out < d_in:
        raise ValidationError("isometry needs d_out >= d_in")
    return random_unitary(d_out, seed)[:, :d_in]


def random_density(dims: Sequence[int] | int, rank: int | None = None, seed=None) -> DensityMatrix:
    """Random state of the given rank (Hilbert-Schmidt measure when full rank)."""
    dims = (dims,) if isinstance(dims, (int, np.integer)) else tuple(dims)
    if any(d <= 0 for d in dims):
        raise ValidationError(f"invalid dims {dims}")
    d = int(np.prod(dims))
    k = d if rank is None else int(rank)
    if not 1 <= k <= d:
        raise ValidationError(f"rank {k} outside [1, {d}]")
    rng = _rng(seed)
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    m /= np.real(np.trace(m))
    return DensityMatrix(m, dims)


def random_pure(d: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_psd(d: int, seed=None, scale: float = 1.0) -> np.ndarray:
    """Random full-rank PSD operator (not normalized)."""
    rng = _rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T / d
    return scale * (m + 1e-3 * np.eye(d))


def random_hermitian(d: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)


@dataclass(frozen=True)
class Channel:
    """CPTP map given by a Stinespring isometry ``V: in -> out ⊗ env``."""

    isometry: np.ndarray
    d_in: int
    d_out: int
    d_env: int

    def __call__(self, x) -> np.ndarray:
        y = self.isometry @ np.asarray(x, dtype=complex) @ self.isometry.conj().T
        return partial_trace(y, [self.d_out, self.d_env], [0])

    def kraus(self) -> list[np.ndarray]:
        v = self.isometry.reshape(self.d_out, self.d_env, self.d_in)
        return [v[:, e, :] for e in range(self.d_env)]


def random_cptp(d_in: int, d_out: int, env_dim: int = 2, seed=None) -> Channel:
    if min(d_in, d_out, env_dim) <= 0 or d_out * env_dim < d_in:
        raise ValidationError("invalid channel dimensions")
    v = random_isometry(d_in, d_out * env_dim, seed)
    return Channel(v, d_in, d_out, env_dim)


def random_cq(alphabet_size: int, d_e: int, seed=None, rank: int | None = None) -> CQState:
    rng = _rng(seed)
    p = rng.dirichlet(np.ones(alphabet_size))
    conds = tuple(random_density(d_e, rank=rank, seed=rng).entries for _ in range(alphabet_size))
    return CQState(p, conds)


def maximally_entangled(d: int) -> np.ndarray:
    v = np.eye(d).reshape(-1) / np.sqrt(d)
    return np.outer(v, v.conj())


def classical_state(joint: np.ndarray) -> np.ndarray:
    """Diagonal state for a joint distribution over (x, y) in row-major order."""
    j = np.asarray(joint, dtype=float)
    return np.diag(j.reshape(-1) / j.sum()).astype(complex)


def product(*mats) -> np.ndarray:
    return kron_all([np.asarray(m, dtype=complex) for m in mats])


# ---------------------------------------------------------------- JSON

def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def state_to_json(state: DensityMatrix) -> dict:
    out = {"dims": list(state.dims)}
    out.update(matrix_to_json(state.entries))
    out["normalized"] = bool(state.normalized)
    return out


def _matrix_from_json(obj, where: str) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected an object with 're' and 'im'")
    if "re" not in obj:
        raise ValidationError(f"{where}.re: missing")
    try:
        re = np.array(obj["re"], dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"{where}.re: not a numeric matrix") from None
    try:
        im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"{where}.im: not a numeric matrix") from None
    if re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise ValidationError(f"{where}.re: expected a square matrix, got shape {re.shape}")
    if im.shape != re.shape:
        raise ValidationError(f"{where}.im: shape {im.shape} differs from re {re.shape}")
    for i, row in enumerate(re):
        if not np.all(np.isfinite(row)):
            raise ValidationError(f"{where}.re[{i}]: non-finite entry")
    return re + 1j * im


def state_from_json(obj, where: str = "state") -> DensityMatrix:
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected a JSON object")
    m = _matrix_from_json(obj, where)
    dims = obj.get("dims", [m.shape[0]])
    if not isinstance(dims, list) or not all(isinstance(d, int) for d in dims):
        raise ValidationError(f"{where}.dims: expected a list of integers")
    normalized = obj.get("normalized", True)
    if not isinstance(normalized, bool):
        raise ValidationError(f"{where}.normalized: expected true/false")
    try:
        return DensityMatrix(m, tuple(dims), normalized)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def cq_to_json(cq: CQState) -> dict:
    return {"probs": cq.probs.tolist(), "cond_states": [matrix_to_json(m) for m in cq.cond_states]}


def cq_from_json(obj, where: str = "cq") -> CQState:
    if not isinstance(obj, dict) or "probs" not in obj or "cond_states" not in obj:
        raise ValidationError(f"{where}: expected keys 'probs' and 'cond_states'")
    if not isinstance(obj["cond_states"], list):
        raise ValidationError(f"{where}.cond_states: expected a list")
    mats = tuple(
        _matrix_from_json(m, f"{where}.cond_states[{i}]") for i, m in enumerate(obj["cond_states"])
    )
    try:
        return CQState(np.asarray(obj["probs"], dtype=float), mats)
    except ValidationError as exc:
        raise ValidationError(f"{where}.{exc}") from None
    except (TypeError, ValueError):
        raise ValidationError(f"{where}.probs: not a numeric vector") from None


def load_json(path) -> object:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ValidationError(f"{p}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{p}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_state(path) -> DensityMatrix:
    return state_from_json(load_json(path), where=str(path))


def load_cq(path) -> CQState:
    return cq_from_json(load_json(path), where=str(path))
