"""The smoothing quantity ε(ρ‖σ,λ): the least purified distance from ρ to a
subnormalized ρ̃ with ρ̃ ≤ 2^λ σ.

The classical problem is solved exactly by water-filling. The quantum problem
is solved by barrier ascent over ρ̃ = M M† and certified by a bracket: the
ascent gives a feasible point, and upper bounds on the fidelity come from a
closed-form dual, from pinching and from measurements (data processing).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .divergences import d_max
from .linalg import (
    ValidationError,
    block_pinch,
    eigen_clusters,
    fidelity,
    sqrtm_psd,
    support_basis,
)

log = logging.getLogger(__name__)

BRACKET_TOL = 5e-3


@dataclass
class SmoothingResult:
    epsilon: float
    fidelity_achieved: float
    rho_tilde: np.ndarray
    cap_residual: float
    trace_slack: float
    epsilon_lower: float | None = None
    epsilon_upper: float | None = None
    accepted: bool = True
    certificates: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.epsilon_lower is None:
            self.epsilon_lower = self.epsilon
        if self.epsilon_upper is None:
            self.epsilon_upper = self.epsilon

    @property
    def bracket(self) -> float:
        return self.epsilon_upper - self.epsilon_lower

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "fidelity_achieved": self.fidelity_achieved,
            "cap_residual": self.cap_residual,
            "trace_slack": self.trace_slack,
            "epsilon_lower": self.epsilon_lower,
            "epsilon_upper": self.epsilon_upper,
            "accepted": self.accepted,
            "certificates": dict(self.certificates),
        }


def _eps_from_f(f: float) -> float:
    f = min(max(f, 0.0), 1.0)
    return math.sqrt(max(0.0, 1.0 - f * f))


def water_fill_log(log_p: np.ndarray, log_caps: np.ndarray, iters: int = 200) -> np.ndarray:
    """Log-domain water-filling: natural-log entries of the maximizer of
    ``Σ √(p t)`` subject to ``t ≤ caps`` and ``Σ t ≤ 1``.

    KKT gives ``t = min(caps, p/ν²)`` with ν ∈ (0, 1]; the total mass binds
    unless the caps alone fit, and ``log ν`` is found by bisection.
    Entries with ``p = 0`` (``log_p = -inf``) get ``t = 0``.
    """
    lp = np.asarray(log_p, dtype=float)
    lc = np.asarray(log_caps, dtype=float)
    out = np.full(lp.shape, -np.inf)
    on = np.isfinite(lp)
    if not np.any(on):
        return out
    lp, lc = lp[on], lc[on]
    if logsumexp(lc) <= 0.0:
        out[on] = lc
        return out
    if np.all(lp <= lc):
        out[on] = lp
        return out

    def log_mass(lnu):
        return logsumexp(np.minimum(lc, lp - 2 * lnu))

    lo, hi = -1.0, 0.0
    while log_mass(lo) <= 0.0 and lo > -1e4:
        lo *= 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if log_mass(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    out[on] = np.minimum(lc, lp - 2 * hi)
    return out


def water_fill(p: np.ndarray, caps: np.ndarray, iters: int = 200) -> np.ndarray:
    """Maximizer of ``Σ √(p t)`` subject to ``t ≤ caps`` and ``Σ t ≤ 1``."""
    p = np.asarray(p, dtype=float)
    caps = np.asarray(caps, dtype=float)
    with np.errstate(divide="ignore"):
        lt = water_fill_log(np.where(p > 0, np.log(np.clip(p, 1e-300, None)), -np.inf),
                            np.log(caps), iters)
    return np.exp(lt)


def smooth_classical(p, q, lam: float) -> SmoothingResult:
    """Exact ε for commuting inputs given as probability vector ``p`` and
    nonnegative weights ``q``.

    Examples
    --------
    >>> r = smooth_classical([0.5, 0.5], [0.5, 0.5], -1.0)
    >>> round(r.fidelity_achieved, 5), round(r.epsilon, 5)
    (0.70711, 0.70711)
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValidationError("p and q must be vectors of equal length")
    if np.any(p < -1e-12) or abs(p.sum() - 1) > 1e-9:
        raise ValidationError("p must be a probability vector")
    if np.any(q < 0):
        raise ValidationError("q must be nonnegative")
    caps = np.exp2(lam) * q
    t = water_fill(p, caps)
    f = float(np.sum(np.sqrt(np.clip(p, 0, None) * t)))
    f = min(f, 1.0)
    return SmoothingResult(_eps_from_f(f), f, np.diag(t).astype(complex),
                           float(np.min(caps - t)), float(1.0 - t.sum()))


# --------------------------------------------------------------- quantum


def _is_diagonal_pair(rho, sigma) -> bool:
    off = lambda m: float(np.max(np.abs(m - np.diag(np.diag(m)))))
    return off(rho) <= 1e-12 and off(sigma) <= 1e-12


def _commute(a, b, tol: float = 1e-10) -> bool:
    return float(np.max(np.abs(a @ b - b @ a))) <= tol


def _classical_in_basis(rho, sigma, v, lam) -> SmoothingResult:
    # measure both in the orthonormal basis given by the columns of v
    p = np.clip(np.real(np.einsum("ij,jk,ki->i", v.conj().T, rho, v)), 0, None)
    q = np.clip(np.real(np.einsum("ij,jk,ki->i", v.conj().T, sigma, v)), 0, None)
    return smooth_classical(p / p.sum(), q, lam)


def fidelity_dual_bound(rho, cap, tr_bound: float = 1.0, seed: int = 0) -> tuple[float, np.ndarray, float]:
    """Certified upper bound on ``max {‖√ρ√ρ̃‖₁ : 0 ≤ ρ̃ ≤ cap, tr ρ̃ ≤ tr_bound}``.

    For any Z ⪰ 0 and μ ≥ 0 the value is at most
    ``½ [tr ρ (Z + μ)⁻¹ + tr cap·Z + μ·tr_bound]``; the bound is minimized
    over Z = N N† and μ = m².
    """
    rho = np.asarray(rho, dtype=complex)
    cap = np.asarray(cap, dtype=complex)
    d = rho.shape[0]
    eye = np.eye(d)

    def unpack(x):
        n = (x[:d * d] + 1j * x[d * d:2 * d * d]).reshape(d, d)
        return n, x[-1]

    def fun(x):
        n, m = unpack(x)
        z = n @ n.conj().T
        mu = m * m
        a = z + mu * eye
        try:
            w = np.linalg.inv(a)
        except np.linalg.LinAlgError:
            return 1e10, np.zeros_like(x)
        val = 0.5 * (np.real(np.trace(rho @ w)) + np.real(np.trace(cap @ z)) + mu * tr_bound)
        wrw = w @ rho @ w
        gz = 0.5 * (cap - wrw)  # gradient with respect to Z
        gn = 2 * gz @ n
        gm = 2 * m * 0.5 * (tr_bound - np.real(np.trace(wrw)))
        grad = np.concatenate([np.real(gn).ravel(), np.imag(gn).ravel(), [gm]])
        return float(val), grad

    rng = np.random.default_rng(seed)
    best = (math.inf, None, 0.0)
    x0s = [np.concatenate([np.eye(d).ravel(), np.zeros(d * d), [0.5]])]
    x0s.append(np.concatenate([rng.normal(size=2 * d * d) * 0.5, [0.7]]))
    for x0 in x0s:
        res = minimize(fun, x0, jac=True, method="L-BFGS-B",
                       options={"maxiter": 20000, "ftol": 1e-15, "gtol": 1e-12})
        # re-evaluate exactly: any Z, μ gives a valid bound
        val, _ = fun(res.x)
        if val < best[0]:
            n, m = unpack(res.x)
            best = (val, n @ n.conj().T, m * m)
    return best


def _barrier_ascent(a_mat, cap, m0, stages: int = 8, t0: float = 1e-3, shrink: float = 0.3):
    """Maximize ‖A M‖₁ with log-barriers on eig(cap − MM†) and 1 − tr MM†."""
    k = cap.shape[0]

    def split(x):
        return (x[:k * k] + 1j * x[k * k:]).reshape(k, k)

    def join(m):
        return np.concatenate([np.real(m).ravel(), np.imag(m).ravel()])

    def obj(x, t):
        m = split(x)
        mm = m @ m.conj().T
        slack_tr = 1.0 - float(np.real(np.trace(mm)))
        s = cap - mm
        try:
            c = np.linalg.cholesky(0.5 * (s + s.conj().T))
        except np.linalg.LinAlgError:
            return 1e10, np.zeros_like(x)
        if slack_tr <= 0:
            return 1e10, np.zeros_like(x)
        u, sv, vh = np.linalg.svd(a_mat @ m)
        f = float(np.sum(sv))
        gf = a_mat.conj().T @ (u[:, :len(sv)] @ vh[:len(sv)])
        logdet = 2 * float(np.sum(np.log(np.real(np.diag(c)))))
        sinv = np.linalg.inv(s)
        gb = -2 * sinv @ m - 2 * m / slack_tr
        val = -(f + t * (logdet + math.log(slack_tr)))
        g = -(gf + t * gb)
        return val, join(g)

    x = join(m0)
    for stage in range(stages):
        t = t0 * shrink ** stage
        res = minimize(obj, x, args=(t,), jac=True, method="L-BFGS-B",
                       options={"maxiter": 3000, "ftol": 1e-15, "gtol": 1e-12})
        if res.fun < 1e9:
            x = res.x
    return split(x)


def smooth_quantum(rho, sigma, lam: float, seed: int = 0, multistart: int = 3,
                   exact_commuting: bool = True, stages: int = 8, polish_tol: float = 1e-5) -> SmoothingResult:
    """ε(ρ‖σ,λ) for a normalized state ρ and PSD σ, with a certified bracket.

    The returned ``epsilon`` is the upper end (achieved by ``rho_tilde``);
    ``epsilon_lower`` is the best certified lower bound. ``accepted`` is set
    when the bracket is at most 5e-3. Commuting pairs are solved exactly by
    water-filling in the common eigenbasis unless ``exact_commuting=False``.
    """
    rho = np.asarray(rho.entries if hasattr(rho, "entries") else rho, dtype=complex)
    sigma = np.asarray(sigma.entries if hasattr(sigma, "entries") else sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    if abs(np.real(np.trace(rho)) - 1) > 1e-9:
        raise ValidationError("smooth_quantum needs a normalized rho")
    if not np.any(np.abs(sigma) > 0):
        raise ValidationError("sigma = 0 makes the problem infeasible")
    cap = np.exp2(lam) * sigma
    certs: dict[str, float] = {}

    if d_max(rho, sigma) <= lam + 1e-12:
        return SmoothingResult(0.0, 1.0, rho.copy(), float(np.min(np.linalg.eigvalsh(cap - rho))), 0.0,
                               certificates={"cap_inactive": 0.0})

    if exact_commuting and _commute(rho, sigma):
        w, v = np.linalg.eigh(rho + math.pi * sigma)
        res = _classical_in_basis(rho, sigma, v, lam)
        t = np.real(np.diag(res.rho_tilde))
        res.rho_tilde = (v * t) @ v.conj().T
        res.cap_residual = float(np.min(np.linalg.eigvalsh(cap - res.rho_tilde)))
        res.certificates = {"commuting_exact": res.epsilon}
        return res

    # lower bounds on ε (upper bounds on F)
    lower = []
    _, vs = np.linalg.eigh(sigma)
    in_sigma = _classical_in_basis(rho, sigma, vs, lam)
    lower.append(("pinch_sigma", in_sigma.epsilon))
    _, vr = np.linalg.eigh(rho)
    lower.append(("measure_rho_basis", _classical_in_basis(rho, sigma, vr, lam).epsilon))
    f_dual, z_opt, mu_opt = fidelity_dual_bound(rho, cap, seed=seed)
    lower.append(("dual", _eps_from_f(f_dual)))
    # upper bound on ε from the pinching sandwich
    projs = eigen_clusters(sigma)
    pinched = block_pinch(projs, rho)
    upper = [("pinch_shifted", smooth_block_commuting(pinched, sigma, lam - math.log2(len(projs))))]

    # feasible ascent on supp σ
    basis = support_basis(sigma)
    k = basis.shape[1]
    cap_c = basis.conj().T @ cap @ basis
    a_mat = sqrtm_psd(rho) @ basis
    rng = np.random.default_rng(seed)
    rho_c = basis.conj().T @ rho @ basis
    # AM-GM equality case of the dual: ρ̃ = W ρ W with W = (Z + μ)⁻¹
    w_opt = np.linalg.inv(z_opt + mu_opt * np.eye(rho.shape[0]))
    cand = basis.conj().T @ (w_opt @ rho @ w_opt) @ basis
    cand = 0.5 * (cand + cand.conj().T)
    ci = np.linalg.inv(sqrtm_psd(cap_c))
    scale = min(1.0, 1.0 / float(np.max(np.linalg.eigvalsh(ci @ cand @ ci))),
                1.0 / float(np.real(np.trace(cand))))
    cand = scale * cand
    starts = [math.sqrt(0.999) * sqrtm_psd(cand)]
    kappa = min(0.5, 0.5 / float(np.real(np.trace(cap_c))))
    starts.append(math.sqrt(kappa) * sqrtm_psd(cap_c))
    top = float(np.max(np.linalg.eigvalsh(ci @ rho_c @ ci)))
    beta = 0.9 * min(1.0 / top, 1.0 / max(float(np.real(np.trace(rho_c))), 1e-12))
    starts.append(math.sqrt(beta) * sqrtm_psd(rho_c))
    for _ in range(max(0, multistart - 2)):
        g = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
        g = g / np.linalg.norm(g, 2)
        starts.append(0.5 * math.sqrt(kappa) * sqrtm_psd(cap_c) @ g)
    rt0 = basis @ cand @ basis.conj().T
    best = (fidelity(rho, rt0), rt0)
    # water-filling in the eigenbasis of σ is always feasible, and optimal when ρ and σ commute
    rt1 = (vs * np.real(np.diag(in_sigma.rho_tilde))) @ vs.conj().T
    f1 = fidelity(rho, rt1)
    if f1 > best[0]:
        best = (f1, rt1)
    eps_lo = max(e for _, e in lower)
    if _eps_from_f(best[0]) - eps_lo <= polish_tol:
        starts = []  # the recovered primal already meets the certificate
    for m0 in starts[:max(1, multistart)]:
        m = _barrier_ascent(a_mat, cap_c, m0, stages=stages)
        rt = basis @ (m @ m.conj().T) @ basis.conj().T
        f = fidelity(rho, rt)
        if f > best[0]:
            best = (f, rt)
    f_lo, rt = best
    eps_hi = _eps_from_f(f_lo)
    for name, e in upper:
        certs[name] = e
    for name, e in lower:
        certs[name] = e
    accepted = eps_hi - eps_lo <= BRACKET_TOL
    if not accepted:
        log.warning("smoothing bracket not closed: [%.6f, %.6f]", eps_lo, eps_hi)
    return SmoothingResult(
        eps_hi,
        f_lo,
        rt,
        float(np.min(np.linalg.eigvalsh(cap - rt))),
        float(1.0 - np.real(np.trace(rt))),
        epsilon_lower=min(eps_lo, eps_hi),
        epsilon_upper=eps_hi,
        accepted=accepted,
        certificates=certs,
    )


def smooth_block_commuting(rho_pinched, sigma, lam: float) -> float:
    """ε for a pair that commutes (σ-pinched ρ against σ), by water-filling."""
    w, v = np.linalg.eigh(np.asarray(rho_pinched) + math.pi * np.asarray(sigma))
    return _classical_in_basis(np.asarray(rho_pinched, dtype=complex), np.asarray(sigma, dtype=complex),
                               v, lam).epsilon


def _check_blocks(projectors: Sequence[np.ndarray], sigma, tol: float = 1e-8):
    d = sigma.shape[0]
    total = sum(projectors)
    if float(np.max(np.abs(total - np.eye(d)))) > tol:
        raise ValidationError("block projectors do not sum to the identity")
    for i, a in enumerate(projectors):
        if float(np.max(np.abs(a @ a - a))) > tol:
            raise ValidationError(f"block {i} is not a projector")
        for b in projectors[i + 1:]:
            if float(np.max(np.abs(a @ b))) > tol:
                raise ValidationError("block projectors are not orthogonal")
    if float(np.max(np.abs(block_pinch(projectors, sigma) - sigma))) > tol:
        raise ValidationError("sigma is not block-diagonal in the given decomposition")


def pinching_sandwich(rho, sigma, lam: float, block_projectors=None, seed: int = 0):
    """``ε(ℰ(ρ)‖σ,λ)`` and ``ε(ℰ(ρ)‖σ,λ − log|𝓘|)`` for a block decomposition
    in which σ is block-diagonal (default: the eigenspaces of σ).

    Returns ``(lower, upper)`` as :class:`SmoothingResult` values.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    projs = eigen_clusters(sigma) if block_projectors is None else [np.asarray(p) for p in block_projectors]
    _check_blocks(projs, sigma)
    pinched = block_pinch(projs, rho)
    lo = smooth_quantum(pinched, sigma, lam, seed=seed)
    hi = smooth_quantum(pinched, sigma, lam - math.log2(len(projs)), seed=seed)
    return lo, hi


def sandwich_holds(rho, sigma, lam: float, block_projectors=None, seed: int = 0, tol: float = 1e-6) -> bool:
    """Check both sides of the pinching sandwich using certified brackets."""
    lo, hi = pinching_sandwich(rho, sigma, lam, block_projectors, seed)
    mid = smooth_quantum(np.asarray(rho, dtype=complex), sigma, lam, seed=seed)
    return lo.epsilon_lower <= mid.epsilon_upper + tol and mid.epsilon_lower <= hi.epsilon_upper + tol


def uhlmann_block_lift(rho, sigma, block_projectors, rho_tilde, tol: float = 1e-8) -> np.ndarray:
    """σ̃ with ``Σ Π_i σ̃ Π_i = σ`` and ``F(ρ,σ) = F(ρ̃,σ̃)``.

    Requires ``ρ = Σ Π_i ρ̃ Π_i`` and σ block-diagonal. Built as σ̃ = K K†
    with ``K = Σ_i √σ_i U_i``, where ``U_i`` is the polar unitary aligning
    the purification of σ_i with that of ρ̃ (Uhlmann).
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    rho_tilde = np.asarray(rho_tilde, dtype=complex)
    projs = [np.asarray(p, dtype=complex) for p in block_projectors]
    _check_blocks(projs, sigma)
    if float(np.max(np.abs(block_pinch(projs, rho_tilde) - rho))) > tol:
        raise ValidationError("rho is not the block pinching of rho_tilde")
    sr = sqrtm_psd(rho_tilde)
    k = np.zeros_like(sigma)
    for p in projs:
        s_i = sqrtm_psd(p @ sigma @ p)
        w, _, vh = np.linalg.svd(sr @ s_i)
        u_i = vh.conj().T @ w.conj().T
        k = k + s_i @ u_i
    return k @ k.conj().T


def smooth_max_divergence(rho, sigma, eps: float, tol: float = 1e-6) -> float:
    """``D^ε_max(ρ‖σ)``: the least λ with ε(ρ‖σ,λ) ≤ ε, by bisection on λ."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    hi = d_max(rho, sigma)
    if eps >= 1:
        return -math.inf
    if math.isinf(hi):
        # start from a finite cap: any λ with a feasible ρ̃ of small distance
        hi = 64.0
        if smooth_quantum(rho, sigma, hi).epsilon > eps:
            return math.inf
    lo = hi - 1.0
    while smooth_quantum(rho, sigma, lo).epsilon <= eps:
        hi, lo = lo, lo - 2 * (hi - lo)
        if lo < -200:
            return -math.inf
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if smooth_quantum(rho, sigma, mid).epsilon <= eps:
            hi = mid
        else:
            lo = mid
    return hi
