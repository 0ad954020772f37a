"""Dense Hermitian linear algebra on small complex matrices.

Every matrix function here works in the eigenbasis of its argument and acts on
the support only (eigenvalues above a relative cutoff). Logarithms are base 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
SUPPORT_REL_CUTOFF = 1e-9
INTERSECTION_CUTOFF = 1e-8
CLUSTER_TOL = 1e-8


class ValidationError(ValueError):
    """Raised when an input violates a structural invariant."""


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns, same order
    support_rank: int

    @property
    def support(self) -> np.ndarray:
        """Isometry onto the support (columns of eigenvectors kept)."""
        return self.eigenvectors[:, : self.support_rank]

    def projector(self) -> np.ndarray:
        v = self.support
        return v @ v.conj().T


def hermitian_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    defect = hermitian_defect(m)
    if defect > tol * scale:
        raise ValidationError(f"matrix is not Hermitian (max |M - M^dag| = {defect:.3e})")
    return 0.5 * (m + m.conj().T)


def default_cutoff(eigenvalues: np.ndarray) -> float:
    if eigenvalues.size == 0:
        return 0.0
    return SUPPORT_REL_CUTOFF * float(np.max(np.abs(eigenvalues)))


def spectral(m, support_cutoff: float | None = None) -> SpectralDecomposition:
    """Eigendecomposition with eigenvalues sorted in descending order.

    ``support_rank`` counts eigenvalues strictly above ``support_cutoff``; the
    default cutoff is ``1e-9`` times the largest eigenvalue magnitude.
    """
    h = check_hermitian(m)
    w, v = np.linalg.eigh(h)
    w, v = w[::-1], v[:, ::-1]
    cut = default_cutoff(w) if support_cutoff is None else support_cutoff
    rank = int(np.sum(w > cut))
    if not np.any(w > 0):
        rank = 0
    return SpectralDecomposition(w, v, rank)


def _eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # unchecked fast path for internal callers that already hold Hermitian data
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    cut = default_cutoff(w)
    return w, v, w > max(cut, 0.0)


def apply_on_support(m: np.ndarray, fn) -> np.ndarray:
    w, v, on = _eig(m)
    out = np.zeros_like(w)
    out[on] = fn(w[on])
    return (v * out) @ v.conj().T


def matrix_power_on_support(m, p: float) -> np.ndarray:
    """``M**p`` on the support of a PSD matrix; zero on the kernel."""
    m = np.asarray(m, dtype=complex)
    if p == 0:
        return support_projector(m)
    return apply_on_support(m, lambda x: x ** p)


def matrix_log_on_support(m) -> np.ndarray:
    """Base-2 logarithm on the support, zero block on the kernel."""
    m = np.asarray(m, dtype=complex)
    w, v, on = _eig(m)
    if not np.any(on):
        raise ValidationError("logarithm of the zero matrix")
    out = np.zeros_like(w)
    out[on] = np.log2(w[on])
    return (v * out) @ v.conj().T


def matrix_exp2(h) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (h + np.conj(np.transpose(h))))
    return (v * np.exp2(w)) @ v.conj().T


def sqrtm_psd(m) -> np.ndarray:
    return apply_on_support(np.asarray(m, dtype=complex), np.sqrt)


def support_projector(m) -> np.ndarray:
    w, v, on = _eig(np.asarray(m, dtype=complex))
    vs = v[:, on]
    return vs @ vs.conj().T


def support_basis(m) -> np.ndarray:
    w, v, on = _eig(np.asarray(m, dtype=complex))
    return v[:, on][:, ::-1]


def intersection_basis(a, b, cutoff: float = INTERSECTION_CUTOFF) -> np.ndarray:
    """Orthonormal basis of supp(a) ∩ supp(b) as columns."""
    d = np.asarray(a).shape[0]
    eye = np.eye(d)
    k = (eye - support_projector(a)) + (eye - support_projector(b))
    w, v = np.linalg.eigh(k)
    return v[:, w < cutoff]


def support_contained(a, b, tol: float = INTERSECTION_CUTOFF) -> bool:
    """True when supp(a) ⊆ supp(b)."""
    pa = support_projector(a)
    pb = support_projector(b)
    leak = pa @ (np.eye(pa.shape[0]) - pb) @ pa
    return float(np.max(np.linalg.eigvalsh(0.5 * (leak + leak.conj().T)), initial=0.0)) <= tol


def supports_orthogonal(a, b, tol: float = INTERSECTION_CUTOFF) -> bool:
    pa = support_projector(a)
    pb = support_projector(b)
    return float(np.linalg.norm(pa @ pb, 2)) <= tol


def is_psd(m, tol: float = 1e-10) -> bool:
    return float(np.min(np.linalg.eigvalsh(check_hermitian(m)))) >= -tol


def min_eig(m) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))))


def trace_norm(m) -> float:
    return float(np.sum(np.linalg.svd(np.asarray(m), compute_uv=False)))


def entropy(m) -> float:
    """von Neumann entropy in bits (PSD input, not necessarily normalized)."""
    w = np.linalg.eigvalsh(0.5 * (m + np.conj(np.transpose(m))))
    w = w[w > default_cutoff(w)]
    return float(-np.sum(w * np.log2(w)))


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep`` (order of ``keep`` ignored)."""
    dims = [int(x) for x in dims]
    m = np.asarray(m)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValidationError("keep must name at least one subsystem")
    if any(k < 0 or k >= n for k in keep):
        raise ValidationError(f"subsystem index out of range for dims {dims}: {keep}")
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise ValidationError(f"matrix shape {m.shape} does not match dims {dims}")
    t = m.reshape(dims + dims)
    drop = [i for i in range(n) if i not in keep]
    # trace the highest axes first so earlier indices stay valid
    cur = n
    for i in sorted(drop, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + cur)
        cur -= 1
    dk = int(np.prod([dims[k] for k in keep]))
    return t.reshape(dk, dk)


def permute_subsystems(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: new factor j is old factor ``perm[j]``."""
    dims = list(dims)
    n = len(dims)
    t = np.asarray(m).reshape(dims + dims)
    axes = list(perm) + [p + n for p in perm]
    d = int(np.prod(dims))
    return t.transpose(axes).reshape(d, d)


def root_fidelity(rho, sigma) -> float:
    """‖√ρ√σ‖₁ without the subnormalization term."""
    return trace_norm(sqrtm_psd(rho) @ sqrtm_psd(sigma))


def fidelity(rho, sigma) -> float:
    """Generalized fidelity for (sub)normalized states.

    ``F = ‖√ρ√σ‖₁ + √((1 - tr ρ)(1 - tr σ))``.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    tr_r = float(np.real(np.trace(rho)))
    tr_s = float(np.real(np.trace(sigma)))
    slack = max(0.0, 1.0 - tr_r) * max(0.0, 1.0 - tr_s)
    return min(1.0, root_fidelity(rho, sigma) + np.sqrt(slack))


def purified_distance(rho, sigma) -> float:
    f = fidelity(rho, sigma)
    return float(np.sqrt(max(0.0, 1.0 - f * f)))


def eigen_clusters(h, tol: float = CLUSTER_TOL) -> list[np.ndarray]:
    """Spectral projectors of ``h`` with eigenvalues within ``tol`` merged."""
    h = check_hermitian(h)
    w, v = np.linalg.eigh(h)
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return [v[:, g] @ v[:, g].conj().T for g in groups]


def pinch(h, x, eig_cluster_tol: float = CLUSTER_TOL) -> tuple[np.ndarray, int]:
    """Pinching of ``x`` by the spectral projectors of ``h``.

    Returns the pinched matrix and the number of distinct eigenvalue clusters.
    """
    projs = eigen_clusters(h, eig_cluster_tol)
    x = np.asarray(x, dtype=complex)
    out = sum(p @ x @ p for p in projs)
    return out, len(projs)


def block_pinch(projectors: Sequence[np.ndarray], x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    return sum(p @ x @ p for p in projectors)


def gell_mann_basis(d: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of traceless Hermitian d×d matrices.

    Shape ``(d*d - 1, d, d)``.
    """
    out = []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1 / np.sqrt(2)
            out.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j / np.sqrt(2)
            a[k, j] = 1j / np.sqrt(2)
            out.append(a)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        out.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    if not out:
        return np.zeros((0, d, d), dtype=complex)
    return np.array(out)
