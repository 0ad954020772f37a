"""Conditional Rényi entropies and Rényi mutual informations.

Each quantity is a minimization of a divergence ``D(ρ ‖ X_1 ⊗ ... ⊗ X_k)`` over
some of the tensor factors ``X_i`` (the others are fixed operators such as the
identity or a marginal of ρ). :class:`ProductReference` evaluates that family
of divergences quickly and :func:`minimize_product` drives the optimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import (
    ValidationError,
    _eig,
    entropy,
    intersection_basis,
    kron_all,
    partial_trace,
    permute_subsystems,
    support_contained,
    supports_orthogonal,
)
from .optimize import OptimizerConfig, PDState, minimize_states
from .states import DensityMatrix

RENYI_KINDS = ("umegaki", "sandwiched", "petz", "log-euclidean")


@dataclass
class EntropicValue:
    value: float
    optimizer_states: list[DensityMatrix]
    gap_certificate: float
    converged: bool = True
    multistart_values: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    coords: np.ndarray | None = None

    def __float__(self):
        return self.value

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "converged": self.converged,
            "gap_certificate": self.gap_certificate,
            "multistart_values": list(self.multistart_values),
            "warnings": list(self.warnings),
        }


def _normalize_kind(kind: str, alpha: float | None) -> tuple[str, float | None]:
    if kind not in RENYI_KINDS:
        raise ValidationError(f"unknown kind {kind!r} (expected one of {RENYI_KINDS})")
    if kind == "umegaki" or alpha == 1:
        return "umegaki", None
    if alpha is None or not alpha > 0:
        raise ValidationError(f"{kind} needs alpha > 0, got {alpha}")
    return kind, float(alpha)


def is_convex_in_reference(kind: str, alpha: float | None) -> bool:
    """Whether σ ↦ D(ρ‖σ) is convex for this kind and order."""
    if kind == "umegaki":
        return True
    if kind == "sandwiched":
        return alpha >= 0.5
    if kind == "petz":
        return 0 < alpha <= 2
    return 0 < alpha < 1  # log-euclidean


class _Factor:
    """Eigen-data of one tensor factor of the reference operator."""

    __slots__ = ("w", "v", "on", "log2w")

    def __init__(self, w, v, on):
        self.w, self.v, self.on = w, v, on
        self.log2w = np.where(on, np.log2(np.where(on, w, 1.0)), 0.0)

    @classmethod
    def fixed(cls, m):
        w, v, on = _eig(np.asarray(m, dtype=complex))
        return cls(w, v, on)

    @classmethod
    def from_state(cls, s: PDState):
        f = cls.__new__(cls)
        f.v = s.v
        f.log2w = s.w
        f.w = np.exp2(s.w)
        f.on = np.ones(len(s.w), dtype=bool)
        return f

    def power(self, p: float) -> np.ndarray:
        out = np.where(self.on, np.exp2(p * self.log2w), 0.0)
        return (self.v * out) @ self.v.conj().T

    def log2(self) -> np.ndarray:
        return (self.v * self.log2w) @ self.v.conj().T


class ProductReference:
    """Evaluate ``D_kind,α(ρ ‖ X_1 ⊗ ... ⊗ X_k)`` with some factors variable.

    ``factors`` lists a fixed PSD matrix or ``None`` for each tensor factor;
    ``None`` slots are filled in order from the states passed to
    :meth:`value`. Variable factors are assumed positive definite.
    """

    def __init__(self, kind: str, alpha: float | None, rho, dims: Sequence[int], factors):
        self.kind, self.alpha = _normalize_kind(kind, alpha)
        self.rho = np.asarray(rho, dtype=complex)
        self.dims = [int(d) for d in dims]
        if len(factors) != len(self.dims):
            raise ValidationError("one factor per subsystem is required")
        self.fixed = [None if f is None else _Factor.fixed(f) for f in factors]
        self.var_dims = [d for d, f in zip(self.dims, factors) if f is None]
        # support of the reference depends only on the fixed factors
        support_ref = kron_all(
            [np.eye(d) if f is None else np.asarray(f, dtype=complex) for d, f in zip(self.dims, factors)]
        )
        self.contained = support_contained(self.rho, support_ref)
        self.orthogonal = supports_orthogonal(self.rho, support_ref)
        w, v, on = _eig(self.rho)
        self._rho_w, self._rho_v, self._rho_on = w, v, on
        if self.kind == "umegaki":
            self._neg_h = -entropy(self.rho)
            self._marg = [partial_trace(self.rho, self.dims, [i]) for i in range(len(self.dims))]
        elif self.kind == "petz":
            a = np.where(on, np.clip(w, 0, None) ** self.alpha, 0.0)
            self._rho_pow = (v * a) @ v.conj().T
        elif self.kind == "log-euclidean":
            self._inter = intersection_basis(self.rho, support_ref)
            lr = np.where(on, np.log2(np.where(on, w, 1.0)), 0.0)
            log_rho = (v * lr) @ v.conj().T
            self._alog_rho = self._inter.conj().T @ (self.alpha * log_rho) @ self._inter

    def _factors(self, states: Sequence[PDState]) -> list[_Factor]:
        it = iter(states)
        return [f if f is not None else _Factor.from_state(next(it)) for f in self.fixed]

    def _kron_log(self, fs: list[_Factor]) -> np.ndarray:
        if len(fs) == 2:
            d0, d1 = self.dims
            return np.kron(fs[0].log2(), np.eye(d1)) + np.kron(np.eye(d0), fs[1].log2())
        total = None
        for i, f in enumerate(fs):
            ops = [np.eye(d) for d in self.dims]
            ops[i] = f.log2()
            term = kron_all(ops)
            total = term if total is None else total + term
        return total

    def _kron_power(self, fs: list[_Factor], p: float) -> np.ndarray:
        if len(fs) == 2:
            return np.kron(fs[0].power(p), fs[1].power(p))
        return kron_all([f.power(p) for f in fs])

    def value(self, states: Sequence[PDState] = ()) -> float:
        k, a = self.kind, self.alpha
        if k == "umegaki" or (a is not None and a > 1):
            if not self.contained:
                return math.inf
        elif self.orthogonal:
            return math.inf
        fs = self._factors(states)
        if k == "umegaki":
            cross = 0.0
            for f, m in zip(fs, self._marg):
                cross += float(np.real(np.trace(m @ f.log2())))
            return self._neg_h - cross
        if k == "sandwiched":
            g = (1 - a) / (2 * a)
            s = self._kron_power(fs, g)
            w = np.linalg.eigvalsh(s @ self.rho @ s)
            w = w[w > 0]
            q = float(np.sum(w ** a))
        elif k == "petz":
            s = self._kron_power(fs, 1 - a)
            q = float(np.real(np.trace(self._rho_pow @ s)))
        else:
            v = self._inter
            if v.shape[1] == 0:
                return math.inf
            m = self._alog_rho + (1 - a) * (v.conj().T @ self._kron_log(fs) @ v)
            q = float(np.sum(np.exp2(np.linalg.eigvalsh(m))))
        if q <= 0:
            return math.inf
        return math.log2(q) / (a - 1)


def minimize_product(
    ref: ProductReference,
    config: OptimizerConfig | None = None,
    x0=None,
    convex: bool | None = None,
) -> EntropicValue:
    """Minimize ``ref.value`` over the variable factors (normalized states)."""
    if convex is None:
        convex = len(ref.var_dims) == 1 and is_convex_in_reference(ref.kind, ref.alpha)
    res = minimize_states(ref.value, ref.var_dims, config, x0=x0, convex=convex)
    states = [DensityMatrix(s, [d]) for s, d in zip(res.states, ref.var_dims)]
    return EntropicValue(
        res.value, states, res.last_decrease, res.converged, res.start_values, res.warnings, res.coords
    )


def _as_matrix_and_dims(rho, dims):
    if isinstance(rho, DensityMatrix):
        return rho.entries, (list(rho.dims) if dims is None else list(dims))
    if dims is None:
        raise ValidationError("dims are required for a raw matrix")
    return np.asarray(rho, dtype=complex), list(dims)


def min_over_sigma(kind, alpha, rho_ab, dims=None, x_a=None, config=None, x0=None) -> EntropicValue:
    """``min_σ D(ρ_AB ‖ X_A ⊗ σ_B)``; ``X_A`` defaults to the identity."""
    rho, dims = _as_matrix_and_dims(rho_ab, dims)
    if len(dims) != 2:
        raise ValidationError(f"expected a bipartite state, got dims {dims}")
    x_a = np.eye(dims[0]) if x_a is None else x_a
    return minimize_product(ProductReference(kind, alpha, rho, dims, [x_a, None]), config, x0)


def conditional_entropy(kind, alpha, rho_ab, dims=None, config=None, x0=None) -> EntropicValue:
    """``H(A|B) = −min_σ D(ρ_AB ‖ 1_A ⊗ σ_B)`` for the chosen kind.

    ``alpha = 1`` (or ``kind="umegaki"``) gives the von Neumann conditional entropy.

    Examples
    --------
    >>> from sc_exponents.states import maximally_entangled
    >>> round(conditional_entropy("sandwiched", 0.5, maximally_entangled(2), [2, 2]).value, 6)
    -1.0
    """
    res = min_over_sigma(kind, alpha, rho_ab, dims, None, config, x0)
    res.value = -res.value
    return res


def mutual_information(kind, alpha, rho_ab, dims=None, variant="double-min", config=None, x0=None) -> EntropicValue:
    """Rényi mutual information.

    ``double-min`` minimizes over σ_A ⊗ σ_B; ``fixed-marginal`` pins σ_A = ρ_A.
    The double minimization is not jointly convex, so it always runs with
    multistart (the first start is the pair of marginals).
    """
    rho, dims = _as_matrix_and_dims(rho_ab, dims)
    if len(dims) != 2:
        raise ValidationError(f"expected a bipartite state, got dims {dims}")
    if variant == "fixed-marginal":
        rho_a = partial_trace(rho, dims, [0])
        return min_over_sigma(kind, alpha, rho, dims, rho_a, config, x0)
    if variant != "double-min":
        raise ValidationError(f"unknown variant {variant!r}")
    ref = ProductReference(kind, alpha, rho, dims, [None, None])
    if x0 is None:
        x0 = [partial_trace(rho, dims, [0]), partial_trace(rho, dims, [1])]
    return minimize_product(ref, config, x0, convex=ref.kind == "umegaki")


def block_state(rho_ab, dims, n: int) -> tuple[np.ndarray, list[int]]:
    """``ρ^{⊗n}`` reordered as ``A^n B^n``."""
    dims = list(dims)
    total = int(np.prod(dims)) ** n
    if total > 64:
        raise ValidationError(f"block {n} of dims {dims} has dimension {total} > 64")
    big = kron_all([np.asarray(rho_ab, dtype=complex)] * n)
    k = len(dims)
    perm = [j * k + i for i in range(k) for j in range(n)]
    big = permute_subsystems(big, dims * n, perm)
    return big, [d ** n for d in dims]


def regularized_mutual_information_estimate(rho_ra, alpha, max_block=2, dims=None, config=None,
                                            kind="sandwiched") -> list[float]:
    """``(1/n) I_α(R^n : A^n)`` for ``n = 1..max_block``.

    Subadditivity makes the sequence non-increasing; its last entry is the
    tightest computable upper bound on the regularized quantity.
    """
    rho, dims = _as_matrix_and_dims(rho_ra, dims)
    if max_block not in (1, 2):
        raise ValidationError("max_block must be 1 or 2")
    for n in range(1, max_block + 1):
        if int(np.prod(dims)) ** n > 64:
            raise ValidationError(f"block {n} exceeds total dimension 64")
    out = []
    for n in range(1, max_block + 1):
        big, bd = block_state(rho, dims, n)
        out.append(mutual_information(kind, alpha, big, bd, "double-min", config).value / n)
    return out


def conditional_entropy_closed(rho_ab, dims) -> float:
    """``H(AB) − H(B)``."""
    rho = np.asarray(rho_ab, dtype=complex)
    return entropy(rho) - entropy(partial_trace(rho, dims, [1]))


def mutual_information_closed(rho_ab, dims) -> float:
    """``H(A) + H(B) − H(AB)``."""
    rho = np.asarray(rho_ab, dtype=complex)
    return entropy(partial_trace(rho, dims, [0])) + entropy(partial_trace(rho, dims, [1])) - entropy(rho)
