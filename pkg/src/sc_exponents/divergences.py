"""Quantum Rényi divergences with explicit support conventions (bits)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import lapack

from .linalg import (
    ValidationError,
    _eig,
    default_cutoff,
    intersection_basis,
    kron_all,
    matrix_log_on_support,
    matrix_power_on_support,
    pinch,
    support_basis,
    support_contained,
    supports_orthogonal,
)

KINDS = ("umegaki", "sandwiched", "petz", "log-euclidean", "max")


class SupportCase(str, Enum):
    CONTAINED = "contained"
    OVERLAPPING = "overlapping"
    ORTHOGONAL = "orthogonal"


@dataclass(frozen=True)
class DivergenceSpec:
    kind: str
    alpha: float | None = None
    smoothing_eps: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown divergence kind {self.kind!r}")
        if self.kind in ("sandwiched", "petz", "log-euclidean"):
            if self.alpha is None or not self.alpha > 0 or self.alpha == 1:
                raise ValidationError(f"{self.kind} needs alpha > 0, alpha != 1; got {self.alpha}")
        if self.kind == "max" and not 0.0 <= self.smoothing_eps <= 1.0:
            raise ValidationError("smoothing_eps must lie in [0, 1]")


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    finite: bool
    support_case: SupportCase

    def __float__(self):
        return self.value

    def as_dict(self) -> dict:
        return {"value": self.value, "finite": self.finite, "support_case": self.support_case.value}


def support_case(rho, sigma) -> SupportCase:
    if support_contained(rho, sigma):
        return SupportCase.CONTAINED
    if supports_orthogonal(rho, sigma):
        return SupportCase.ORTHOGONAL
    return SupportCase.OVERLAPPING


def _psd_eigvals(m) -> np.ndarray:
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return np.clip(w, 0.0, None)


def relative_entropy(rho, sigma) -> float:
    """Umegaki relative entropy; ``inf`` unless supp ρ ⊆ supp σ."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if not support_contained(rho, sigma):
        return math.inf
    w, v, on = _eig(rho)
    wr = w[on]
    neg = float(np.sum(wr * np.log2(wr)))
    cross = float(np.real(np.trace(rho @ matrix_log_on_support(sigma))))
    return neg - cross


GRADED_RANGE = 1e-8


def graded_singular_values(b: np.ndarray) -> np.ndarray:
    """Singular values with high relative accuracy (LAPACK one-sided Jacobi).

    Complex input goes through the real embedding, which doubles every
    singular value; one copy of each is returned, ascending.
    """
    b = np.asarray(b, dtype=complex)
    big = np.block([[b.real, -b.imag], [b.imag, b.real]])
    if big.shape[0] < big.shape[1]:
        big = big.T
    sva, _, _, work, _, info = lapack.dgejsv(np.asfortranarray(big), joba=1, jobu=3, jobv=3, jobr=1,
                                              jobt=0, jobp=1)
    if info != 0:
        raise np.linalg.LinAlgError(f"dgejsv failed with info={info}")
    return np.sort(sva * (work[0] / work[1]))[::2]


def _sandwich_eigvals_graded(rho, sigma, power: float) -> np.ndarray:
    # σ^p ρ σ^p = (F D)†(F D) with D = diag of σ^p and F a square root of ρ
    ws, vs = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
    on = ws > max(default_cutoff(ws), 0.0)
    d = ws[on] ** power
    r = vs[:, on].conj().T @ rho @ vs[:, on]
    wr, u = np.linalg.eigh(0.5 * (r + r.conj().T))
    keep = wr > max(default_cutoff(wr), 0.0)
    if not np.any(keep):
        return np.zeros(0)
    f = (np.sqrt(wr[keep])[:, None] * u[:, keep].conj().T) * d[None, :]
    return graded_singular_values(f) ** 2


def q_star(rho, sigma, alpha: float) -> float:
    """``tr (σ^{(1-α)/2α} ρ σ^{(1-α)/2α})^α`` with σ-powers on supp σ.

    When the spectrum of the sandwich reaches the float64 noise floor (small α,
    ill-conditioned σ) the eigenvalues are recomputed from a graded factor with
    a Jacobi SVD, since ``w**α`` amplifies absolute errors in small ``w``.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    power = (1 - alpha) / (2 * alpha)
    s = matrix_power_on_support(sigma, power)
    w = _psd_eigvals(s @ rho @ s)
    top = float(np.max(w)) if w.size else 0.0
    if top > 0 and float(np.min(w)) < GRADED_RANGE * top:
        w = _sandwich_eigvals_graded(rho, sigma, power)
    w = w[w > 0]
    return float(np.sum(w ** alpha))


def q_petz(rho, sigma, alpha: float) -> float:
    rho = np.asarray(rho, dtype=complex)
    a = matrix_power_on_support(rho, alpha)
    b = matrix_power_on_support(np.asarray(sigma, dtype=complex), 1 - alpha)
    return float(np.real(np.trace(a @ b)))


def log_euclidean_q(rho, sigma, alpha: float) -> float:
    """``tr 2^{α log ρ + (1-α) log σ}`` as the limit on supp ρ ∩ supp σ.

    Returns 0 when the intersection is trivial.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    v = intersection_basis(rho, sigma)
    if v.shape[1] == 0:
        return 0.0
    k = v.conj().T @ (alpha * matrix_log_on_support(rho) + (1 - alpha) * matrix_log_on_support(sigma)) @ v
    w = np.linalg.eigvalsh(0.5 * (k + k.conj().T))
    return float(np.sum(np.exp2(w)))


def _log2_regularized(m, eps: float | None, log2_eps: float | None) -> np.ndarray:
    w, v, on = _eig(np.asarray(m, dtype=complex))
    if log2_eps is None:
        out = np.log2(np.clip(w, 0.0, None) + eps)
    else:
        # kernel eigenvalues replaced by ε itself, given through its logarithm
        out = np.where(on, np.log2(np.where(on, w, 1.0)), log2_eps)
    return (v * out) @ v.conj().T


def log_euclidean_q_regularized(rho, sigma, alpha: float, eps: float | None = None,
                                log2_eps: float | None = None) -> float:
    """``tr 2^{α log(ρ+ε) + (1-α) log(σ+ε)}``.

    Pass ``log2_eps`` to regularize far below double precision: support
    eigenvalues are then kept exact and kernel eigenvalues set to ``2^log2_eps``.
    """
    if (eps is None) == (log2_eps is None):
        raise ValueError("give exactly one of eps, log2_eps")
    k = alpha * _log2_regularized(rho, eps, log2_eps) + (1 - alpha) * _log2_regularized(
        sigma, eps, log2_eps
    )
    w = np.linalg.eigvalsh(0.5 * (k + k.conj().T))
    return float(np.sum(np.exp2(w)))


def log_euclidean_limit_check(rho, sigma, alpha: float, log2_eps=(-1e4, -1e5)) -> tuple[float, float]:
    """Projected value and its Richardson extrapolation from the regularized form.

    The regularized trace approaches its limit like ``1/log ε``, so two
    evaluations are combined linearly in that variable.
    """
    l1, l2 = log2_eps
    f1 = log_euclidean_q_regularized(rho, sigma, alpha, log2_eps=l1)
    f2 = log_euclidean_q_regularized(rho, sigma, alpha, log2_eps=l2)
    return log_euclidean_q(rho, sigma, alpha), (f2 * l2 - f1 * l1) / (l2 - l1)


def d_max(rho, sigma) -> float:
    """log₂ of the least λ with ρ ≤ λσ; ``inf`` if supp ρ ⊄ supp σ."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if not support_contained(rho, sigma):
        return math.inf
    s = matrix_power_on_support(sigma, -0.5)
    lam = float(np.max(np.linalg.eigvalsh(0.5 * (s @ rho @ s + (s @ rho @ s).conj().T))))
    return math.log2(lam) if lam > 0 else -math.inf


def _renyi_from_q(q: float, alpha: float) -> float:
    if q <= 0:
        return math.inf
    return math.log2(q) / (alpha - 1)


def sandwiched(rho, sigma, alpha: float) -> float:
    if alpha > 1 and not support_contained(rho, sigma):
        return math.inf
    if alpha < 1 and supports_orthogonal(rho, sigma):
        return math.inf
    return _renyi_from_q(q_star(rho, sigma, alpha), alpha)


def petz(rho, sigma, alpha: float) -> float:
    if alpha > 1 and not support_contained(rho, sigma):
        return math.inf
    if alpha < 1 and supports_orthogonal(rho, sigma):
        return math.inf
    return _renyi_from_q(q_petz(rho, sigma, alpha), alpha)


def log_euclidean(rho, sigma, alpha: float) -> float:
    if alpha > 1 and not support_contained(rho, sigma):
        return math.inf
    return _renyi_from_q(log_euclidean_q(rho, sigma, alpha), alpha)


def pinched_block_sandwiched(rho, sigma, alpha: float, m: int) -> float:
    """``(1/m) D*_α(ℰ_{σ^{⊗m}}(ρ^{⊗m}) ‖ σ^{⊗m})``, pinching in the eigenspaces of σ^{⊗m}.

    Tends to ``D*_α(ρ‖σ)`` as m grows; the pinched pair commutes, so only the
    classical formula is needed after the pinching.
    """
    if m < 1:
        raise ValidationError("block length m must be positive")
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape[0] ** m > 64:
        raise ValidationError(f"block {m} of dimension {rho.shape[0]} exceeds 64")
    big_s = kron_all([sigma] * m)
    pinched, _ = pinch(big_s, kron_all([rho] * m))
    return sandwiched(pinched, big_s, alpha) / m


def divergence(spec: DivergenceSpec, rho, sigma) -> DivergenceValue:
    """Evaluate the divergence selected by ``spec``; ``+inf`` is a value, not an error."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    case = support_case(rho, sigma)
    a = spec.alpha
    if spec.kind == "umegaki":
        val = relative_entropy(rho, sigma)
    elif spec.kind == "sandwiched":
        val = sandwiched(rho, sigma, a)
    elif spec.kind == "petz":
        val = petz(rho, sigma, a)
    elif spec.kind == "log-euclidean":
        val = log_euclidean(rho, sigma, a)
    elif spec.smoothing_eps == 0.0:
        val = d_max(rho, sigma)
    else:
        from .smoothing import smooth_max_divergence

        val = smooth_max_divergence(rho, sigma, spec.smoothing_eps)
    return DivergenceValue(float(val), bool(np.isfinite(val)), case)


def renyi_classical(p, q, alpha: float) -> float:
    """Classical Rényi divergence ``log Σ p^α q^{1-α} / (α-1)`` in bits."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if alpha == 1:
        return kl_classical(p, q)
    m = p > 0
    if alpha > 1 and np.any(q[m] <= 0):
        return math.inf
    mm = m & (q > 0)
    s = float(np.sum(p[mm] ** alpha * q[mm] ** (1 - alpha)))
    return _renyi_from_q(s, alpha)


def kl_classical(t, p) -> float:
    t = np.asarray(t, dtype=float)
    p = np.asarray(p, dtype=float)
    m = t > 0
    if np.any(p[m] <= 0):
        return math.inf
    return float(np.sum(t[m] * np.log2(t[m] / p[m])))


def project_to_support(rho, sigma) -> tuple[np.ndarray, float]:
    """Normalized ``Π_σ ρ Π_σ`` and its weight ``tr Π_σ ρ Π_σ``."""
    v = support_basis(sigma)
    p = v @ v.conj().T
    m = p @ np.asarray(rho, dtype=complex) @ p
    w = float(np.real(np.trace(m)))
    return (m / w if w > 0 else m), w
