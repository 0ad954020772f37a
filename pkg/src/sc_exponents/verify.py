"""Randomized property suites over all modules.

Every check draws its instance from a seed derived from the suite seed and the
trial index, so any failure can be replayed with :func:`run_check`.
"""

from __future__ import annotations

import hashlib
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import divergences as dv
from .entropies import conditional_entropy, min_over_sigma, mutual_information
from .exponents import (
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
    flat_variational,
)
from .linalg import block_pinch, fidelity, partial_trace, pinch
from .method_of_types import build_type_table, finite_n_optimum, log2_b_values, log2_optimum, simplex_inf_form
from .protocols import (
    DecouplingScheme,
    HashFunction,
    classical_dec_floor,
    classical_joint_state,
    dec_performance,
    pa_half_entropy_check,
    pa_performance,
)
from .smoothing import BRACKET_TOL, smooth_classical, smooth_quantum, pinching_sandwich, uhlmann_block_lift
from .states import random_cptp, random_cq, random_density, random_pure, random_unitary

SUITES = ("divergence-props", "entropy-props", "duality", "variational", "smoothing", "types", "protocols")


@dataclass
class Observation:
    """``lhs ≤ rhs + tol`` is the property being checked."""

    name: str
    lhs: float
    rhs: float
    tol: float

    @property
    def ok(self) -> bool:
        if math.isnan(self.lhs) or math.isnan(self.rhs):
            return False
        if self.lhs == self.rhs:
            return True
        return self.lhs <= self.rhs + self.tol


@dataclass
class Failure:
    check: str
    seed: int
    inputs_digest: str
    observed: float
    bound: float
    tolerance: float


@dataclass
class SuiteReport:
    name: str
    instances: int = 0
    failures: list[Failure] = field(default_factory=list)
    wall_time: float = 0.0
    children: list["SuiteReport"] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "suite": self.name,
            "instances": self.instances,
            "failures": [f.__dict__ for f in self.failures],
            "wall_time": self.wall_time,
            "children": [c.as_dict() for c in self.children],
        }


def _digest(arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(np.asarray(a, dtype=complex)).tobytes())
    return h.hexdigest()[:12]


def _eq(name, a, b, tol) -> Observation:
    return Observation(name, abs(a - b), 0.0, tol)


def _pair(rng, d, rank_sigma=None):
    rho = random_density(d, seed=rng).entries
    sigma = random_density(d, rank=rank_sigma, seed=rng).entries
    return rho, sigma


def _alpha_pair(rng, lo, hi):
    a, b = sorted(rng.uniform(lo, hi, 2))
    if abs(a - 1) < 1e-3:
        a -= 2e-3
    if abs(b - 1) < 1e-3:
        b += 2e-3
    return a, b


# ------------------------------------------------------------ divergence-props


def chk_alpha_monotone(rng, s):
    rho, sigma = _pair(rng, 3)
    out = []
    a, b = _alpha_pair(rng, 0.5, 3.0)
    out.append(Observation("sandwiched", dv.sandwiched(rho, sigma, a), dv.sandwiched(rho, sigma, b), 1e-9 * s))
    a, b = _alpha_pair(rng, 0.05, 3.0)
    out.append(Observation("log-euclidean", dv.log_euclidean(rho, sigma, a), dv.log_euclidean(rho, sigma, b),
                           1e-9 * s))
    return out, [rho, sigma]


def chk_sigma_monotone(rng, s):
    rho, sigma = _pair(rng, 3)
    bigger = sigma + rng.uniform(0.01, 1.0) * random_density(3, seed=rng).entries
    a = rng.uniform(0.5, 3.0)
    b = rng.uniform(0.05, 0.999)
    return [
        Observation("sandwiched", dv.sandwiched(rho, bigger, a), dv.sandwiched(rho, sigma, a), 1e-9 * s),
        Observation("log-euclidean", dv.log_euclidean(rho, bigger, b), dv.log_euclidean(rho, sigma, b), 1e-9 * s),
    ], [rho, sigma, bigger]


def chk_dpi(rng, s):
    rho, sigma = _pair(rng, 3)
    ch = random_cptp(3, 2, 2, seed=rng)
    a = rng.uniform(0.5, 3.0)
    b = rng.uniform(0.05, 0.999)
    return [
        Observation("sandwiched", dv.sandwiched(ch(rho), ch(sigma), a), dv.sandwiched(rho, sigma, a), 1e-8 * s),
        Observation("log-euclidean", dv.log_euclidean(ch(rho), ch(sigma), b), dv.log_euclidean(rho, sigma, b),
                    1e-8 * s),
    ], [rho, sigma] + ch.kraus()


def chk_flat_above_star(rng, s):
    rho, sigma = _pair(rng, 3)
    a = rng.uniform(0.05, 0.999)
    return [Observation("flat>=star", dv.sandwiched(rho, sigma, a), dv.log_euclidean(rho, sigma, a), 1e-9 * s)], \
        [rho, sigma]


def chk_half_fidelity(rng, s):
    rho, sigma = _pair(rng, 3)
    return [_eq("half=fidelity", dv.sandwiched(rho, sigma, 0.5), -2 * math.log2(fidelity(rho, sigma)), 1e-9 * s)], \
        [rho, sigma]


# -------------------------------------------------------------- lemma checks


def chk_fidelity_dpi(rng, s):
    rho, sigma = _pair(rng, 3)
    ch = random_cptp(3, 2, 2, seed=rng)
    return [Observation("fidelity-dpi", fidelity(rho, sigma), fidelity(ch(rho), ch(sigma)), 1e-9 * s)], \
        [rho, sigma]


def chk_pinching_inequality(rng, s):
    h = random_density(3, seed=rng).entries
    sigma = random_density(3, seed=rng).entries
    pinched, v = pinch(h, sigma)
    m = float(np.min(np.linalg.eigvalsh(v * pinched - sigma)))
    return [Observation("v*E(sigma)-sigma>=0", -m, 0.0, 1e-9 * s)], [h, sigma]


def _random_blocks(rng, d):
    u = random_unitary(d, rng)
    cut = int(rng.integers(1, d))
    return [u[:, :cut] @ u[:, :cut].conj().T, u[:, cut:] @ u[:, cut:].conj().T]


def chk_appen1(rng, s):
    rho = random_density(3, seed=rng).entries
    projs = _random_blocks(rng, 3)
    sigma = block_pinch(projs, random_density(3, seed=rng).entries)
    lhs = fidelity(block_pinch(projs, rho), sigma)
    return [Observation("appen1", lhs, math.sqrt(len(projs)) * fidelity(rho, sigma), 1e-9 * s)], [rho, sigma]


def chk_fidelity_re(rng, s):
    rho, sigma = _pair(rng, 3)
    tau = random_density(3, seed=rng).entries
    lhs = -math.log2(fidelity(rho, sigma) ** 2)
    rhs = dv.relative_entropy(tau, rho) + dv.relative_entropy(tau, sigma)
    return [Observation("fidelity-re", lhs, rhs, 1e-8 * s)], [rho, sigma, tau]


def chk_lwdg(rng, s):
    rho, sigma = _pair(rng, 3)
    tau = random_density(3, seed=rng).entries
    a = rng.uniform(0.5 + 1e-3, 1 - 1e-3)
    b = a / (2 * a - 1)
    lhs = 2 * a / (1 - a) * math.log2(fidelity(rho, sigma))
    rhs = dv.sandwiched(rho, tau, b) - dv.sandwiched(sigma, tau, a)
    return [Observation("LWDg", lhs, rhs, 1e-8 * s)], [rho, sigma, tau]


def chk_lwd(rng, s):
    rho, sigma = _pair(rng, 4)
    a = rng.uniform(0.5 + 1e-2, 1 - 1e-2)
    b = a / (2 * a - 1)
    lhs = 2 * a / (1 - a) * math.log2(fidelity(rho, sigma))
    rhs = conditional_entropy("sandwiched", a, rho, [2, 2]).value - \
        conditional_entropy("sandwiched", b, sigma, [2, 2]).value
    return [Observation("LWD", lhs, rhs, 1e-6 * s)], [rho, sigma]


# ----------------------------------------------------------- entropy-props


def chk_discard_classical(rng, s):
    p = rng.dirichlet(np.ones(2))
    states = [random_density(4, seed=rng).entries for _ in range(2)]
    big = np.zeros((8, 8), dtype=complex)
    for x in range(2):
        big[4 * x:4 * x + 4, 4 * x:4 * x + 4] = p[x] * states[x]
    rho_ab = p[0] * states[0] + p[1] * states[1]
    a = rng.uniform(0.5, 2.0)
    if abs(a - 1) < 1e-3:
        a = 1.01
    h_xa = conditional_entropy("sandwiched", a, big, [4, 2]).value
    h_a = conditional_entropy("sandwiched", a, rho_ab, [2, 2]).value
    return [Observation("H(XA|B)>=H(A|B)", h_a, h_xa, 1e-7 * s)], [big]


def chk_dimension_bound(rng, s):
    rho = random_density(8, seed=rng).entries  # A ⊗ B ⊗ C, qubits
    a = rng.uniform(0.5, 2.0)
    if abs(a - 1) < 1e-3:
        a = 1.01
    i_abc = mutual_information("sandwiched", a, rho, [2, 4], "fixed-marginal").value
    i_ab = mutual_information("sandwiched", a, partial_trace(rho, [2, 2, 2], [0, 1]), [2, 2],
                              "fixed-marginal").value
    return [Observation("dimension-bound", i_abc, i_ab + 2.0, 1e-7 * s)], [rho]


def chk_i_alpha_monotone(rng, s):
    rho = random_density(4, seed=rng).entries
    a, b = _alpha_pair(rng, 0.5, 2.0)
    ia = mutual_information("sandwiched", a, rho, [2, 2]).value
    ib = mutual_information("sandwiched", b, rho, [2, 2]).value
    return [Observation("I_alpha monotone", ia, ib, 1e-7 * s)], [rho]


# ------------------------------------------------------------------ duality


def chk_dual1(rng, s):
    psi = random_pure(8, seed=rng)
    rho = np.outer(psi, psi.conj())
    a = rng.uniform(0.6, 2.0)
    if abs(a - 1) < 1e-2:
        a = 1.05
    ap = a / (2 * a - 1)
    rho_ab = partial_trace(rho, [2, 2, 2], [0, 1])
    rho_ac = partial_trace(rho, [2, 2, 2], [0, 2])
    lhs = min_over_sigma("sandwiched", a, rho_ab, [2, 2]).value
    rhs = -min_over_sigma("sandwiched", ap, rho_ac, [2, 2]).value
    return [_eq("dual-1", lhs, rhs, 2e-4 * s)], [rho]


def petz_min_closed(rho_ab, dims, beta: float) -> float:
    """``min_σ D_β(ρ_AB ‖ 1_A ⊗ σ_B)`` for Petz divergences (Sibson form)."""
    w, v = np.linalg.eigh(rho_ab)
    pw = (v * np.clip(w, 0, None) ** beta) @ v.conj().T
    m = partial_trace(pw, dims, [1])
    mw = np.clip(np.linalg.eigvalsh(m), 0, None)
    return beta / (beta - 1) * math.log2(float(np.sum(mw ** (1 / beta))))


def chk_dual2(rng, s):
    psi = random_pure(8, seed=rng)
    rho = np.outer(psi, psi.conj())
    b = rng.uniform(0.5, 2.0)
    if abs(b - 1) < 1e-2:
        b = 1.05
    rho_ab = partial_trace(rho, [2, 2, 2], [0, 1])
    rho_ac = partial_trace(rho, [2, 2, 2], [0, 2])
    rho_c = partial_trace(rho, [2, 2, 2], [2])
    lhs = min_over_sigma("petz", b, rho_ab, [2, 2]).value
    rhs = -dv.sandwiched(rho_ac, np.kron(np.eye(2), rho_c), 1 / b)
    return [_eq("dual-2", lhs, rhs, 2e-4 * s),
            _eq("petz-closed-form", lhs, petz_min_closed(rho_ab, [2, 2], b), 2e-4 * s)], [rho]


# -------------------------------------------------------------- variational

VAR_GRID = 32


def chk_var_dmax(rng, s):
    d = int(rng.integers(2, 4))
    rank = None if rng.uniform() < 0.7 else d - 1
    rho, sigma = _pair(rng, d, rank)
    r = rng.uniform(-0.5, 1.5)
    sup = flat_dmax(rho, sigma, r, grid=VAR_GRID).supremum
    inf = dual_dmax(rho, sigma, r).value
    return [_eq("dmaxvar", sup, inf, 2e-4 * s)], [rho, sigma]


def chk_var_pa(rng, s):
    cq = random_cq(2, 2, seed=rng)
    h = -min_over_sigma("umegaki", None, cq.matrix(), [2, 2]).value
    r = rng.uniform(max(h, 0.0), 1.5)
    sup = flat_pa(cq, r, grid=VAR_GRID).supremum
    inf = dual_pa(cq, r).value
    return [_eq("varpa", sup, inf, 2e-4 * s)], [cq.matrix()]


def chk_var_dec(rng, s):
    rho = random_density(4, seed=rng).entries
    i1 = mutual_information("umegaki", None, rho, [2, 2]).value
    r = rng.uniform(0.0, 0.5 * i1 + 0.1)
    sup = flat_dec(rho, r, dims=[2, 2], grid=VAR_GRID).supremum
    inf = dual_dec(rho, r, dims=[2, 2]).value
    return [_eq("vardec", sup, inf, 2e-4 * s)], [rho]


def chk_flat_variational(rng, s):
    rho, sigma = _pair(rng, 2)
    a = rng.uniform(0.1, 0.9)
    return [_eq("flat-variational", dv.log_euclidean(rho, sigma, a), flat_variational(rho, sigma, a), 2e-4 * s)], \
        [rho, sigma]


def chk_pa_ordering(rng, s):
    cq = random_cq(2, 2, seed=rng)
    r = float(rng.uniform(0.0, 1.5))
    g = dual_pa(cq, r).value
    e = exponent_pa(cq, r, grid=VAR_GRID).supremum
    return [Observation("G>=E_pa", e, g, 1e-6 * s)], [cq.matrix()]


def chk_dec_ordering(rng, s):
    rho = random_density(4, seed=rng).entries
    r = float(rng.uniform(0.0, 1.0))
    big_l = dual_dec(rho, r, dims=[2, 2]).value
    e = exponent_dec(rho, r, dims=[2, 2], grid=VAR_GRID).supremum
    return [Observation("L>=E_dec", e, big_l, 1e-6 * s)], [rho]


def chk_dmax_rate_monotone(rng, s):
    rho, sigma = _pair(rng, 2)
    rates = np.sort(rng.uniform(-0.5, 1.5, 4))
    vals = [exponent_dmax(rho, sigma, r, grid=VAR_GRID).supremum for r in rates]
    return [Observation("non-increasing in r", b, a, 1e-9 * s) for a, b in zip(vals, vals[1:])], [rho, sigma]


def chk_dec_threshold(rng, s):
    p = rng.dirichlet(np.ones(4)).reshape(2, 2)
    rho = classical_joint_state(p)
    half_i = 0.5 * mutual_information("umegaki", None, rho, [2, 2]).value
    r = float(rng.uniform(0.0, 1.0))
    if abs(r - half_i) < 1e-3:
        r = half_i + 2e-3
    e = exponent_dec(rho, r, dims=[2, 2], grid=VAR_GRID).supremum
    if r < half_i:
        return [Observation("positive below I/2", 1e-6, e, 0.0)], [p]
    return [Observation("zero above I/2", e, 1e-6, 0.0)], [p]


# ---------------------------------------------------------------- smoothing


def smoothing_instance(rng, commuting: bool = False):
    d = int(rng.integers(2, 4))
    lam = float(rng.uniform(-1.0, 1.0))
    if commuting:
        u = random_unitary(d, rng)
        p, q = rng.dirichlet(np.ones(d)), rng.dirichlet(np.ones(d))
        return u @ np.diag(p) @ u.conj().T, u @ np.diag(q) @ u.conj().T, lam, (p, q)
    rho, sigma = _pair(rng, d)
    return rho, sigma, lam, None


def chk_smooth_bracket(rng, s):
    rho, sigma, lam, _ = smoothing_instance(rng)
    res = smooth_quantum(rho, sigma, lam)
    return [Observation("bracket", res.bracket, 0.0, BRACKET_TOL * s)], [rho, sigma]


def chk_smooth_commuting(rng, s):
    rho, sigma, lam, (p, q) = smoothing_instance(rng, commuting=True)
    res = smooth_quantum(rho, sigma, lam, exact_commuting=False)
    return [_eq("commuting", res.epsilon, smooth_classical(p, q, lam).epsilon, 1e-6 * s)], [rho, sigma]


def chk_smooth_sandwich(rng, s):
    rho, sigma, lam, _ = smoothing_instance(rng)
    lo, hi = pinching_sandwich(rho, sigma, lam)
    mid = smooth_quantum(rho, sigma, lam)
    return [
        Observation("pinched<=eps", lo.epsilon_lower, mid.epsilon_upper, 1e-6 * s),
        Observation("eps<=shifted", mid.epsilon_lower, hi.epsilon_upper, 1e-6 * s),
    ], [rho, sigma]


def chk_smooth_monotone(rng, s):
    d = int(rng.integers(2, 5))
    p, q = rng.dirichlet(np.ones(d)), rng.dirichlet(np.ones(d))
    lams = np.sort(rng.uniform(-2, 2, 6))
    eps = [smooth_classical(p, q, lam).epsilon for lam in lams]
    return [Observation("non-increasing", b, a, 1e-8 * s) for a, b in zip(eps, eps[1:])], [p, q]


def chk_smooth_dpi(rng, s):
    rho, sigma, lam, _ = smoothing_instance(rng)
    d = rho.shape[0]
    ch = random_cptp(d, 2, 2, seed=rng)
    after = smooth_quantum(ch(rho), ch(sigma), lam)
    before = smooth_quantum(rho, sigma, lam)
    return [Observation("dpi", after.epsilon_lower, before.epsilon_upper, BRACKET_TOL * s)], [rho, sigma]


def chk_lift(rng, s):
    d = 3
    projs = _random_blocks(rng, d)
    rho_tilde = random_density(d, seed=rng).entries
    sigma = block_pinch(projs, random_density(d, seed=rng).entries)
    rho = block_pinch(projs, rho_tilde)
    st = uhlmann_block_lift(rho, sigma, projs, rho_tilde)
    return [
        _eq("fidelity", fidelity(rho, sigma), fidelity(rho_tilde, st), 1e-8 * s),
        Observation("pinched", float(np.max(np.abs(block_pinch(projs, st) - sigma))), 0.0, 1e-8 * s),
    ], [rho_tilde, sigma]


# -------------------------------------------------------------------- types


def _types_instance(rng):
    k = int(rng.integers(2, 4))
    p, q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
    return p, q, float(rng.uniform(-0.5, 1.0)), int(rng.integers(1, 40))


def chk_types_n1(rng, s):
    p, q, r, _ = _types_instance(rng)
    return [_eq("n=1", finite_n_optimum(p, q, r, 1).A_n, smooth_classical(p, q, r).fidelity_achieved, 1e-12 * s)], \
        [p, q]


def chk_types_bracket(rng, s):
    p, q, r, n = _types_instance(rng)
    tab = build_type_table(p, q, n)
    la = log2_optimum(tab, r)
    lb = float(np.max(log2_b_values(tab, r)))
    k = len(p)
    res = finite_n_optimum(p, q, r, n, asymptote=0.0, table=tab)
    x = -la / n
    return [
        Observation("maxB<=A", lb, la, 1e-9 * s),
        Observation("A<=(n+1)^k maxB", la, lb + k * math.log2(n + 1), 1e-9 * s),
        Observation("Ant11", res.bracket[0], x, 1e-9 * s),
        Observation("Ant22", x, res.bracket[1], 1e-9 * s),
    ], [p, q]


def chk_types_variational(rng, s):
    p, q, r, _ = _types_instance(rng)
    return [_eq("classical dmaxvar", simplex_inf_form(p, q, r), classical_dmax_sup(p, q, r), 1e-8 * s)], [p, q]


# ---------------------------------------------------------------- protocols


def chk_pa_relabel(rng, s):
    cq = random_cq(2, 2, seed=rng)
    nz = int(rng.integers(2, 5))
    f = HashFunction.random(2, 2, nz, rng)
    base = pa_performance(cq, f).value
    moved = pa_performance(cq, f.relabel(rng.permutation(nz))).value
    return [_eq("relabel", base, moved, 1e-10 * s),
            Observation("<=1", base, 1.0, 0.0), Observation(">=0", -base, 0.0, 0.0)], [cq.matrix()]


def chk_pa_half(rng, s):
    cq = random_cq(2, 2, seed=rng)
    f = HashFunction.random(2, 2, int(rng.integers(2, 4)), rng)
    perf, via_entropy = pa_half_entropy_check(cq, f)
    return [_eq("H_1/2 form", perf, via_entropy, 1e-6 * s)], [cq.matrix()]


def pa_floor_instance(rng):
    from .exponents import exponent_pa

    cq = random_cq(2, 2, seed=rng)
    h = -min_over_sigma("umegaki", None, cq.matrix(), [2, 2]).value
    n = int(rng.integers(2, 4))
    r = float(rng.uniform(h + 0.05, h + 1.0))
    nz = math.ceil(2.0 ** (n * r) - 1e-9)
    f = HashFunction.random(n, 2, nz, rng)
    floor = exponent_pa(cq, r, grid=32).supremum
    rate = -math.log2(pa_performance(cq, f, check_distance=False).value) / n
    return cq, rate, floor


def chk_pa_floor(rng, s):
    cq, rate, floor = pa_floor_instance(rng)
    return [Observation("rate>=floor", floor, rate, 1e-6 * s)], [cq.matrix()]


def chk_dec_local_unitary(rng, s):
    rho = random_density(4, seed=rng).entries
    sch = DecouplingScheme.random(2, 1, seed=rng)
    u = np.kron(random_unitary(2, rng), np.eye(2))
    a = dec_performance(rho, sch, (2, 2)).value
    b = dec_performance(u @ rho @ u.conj().T, sch, (2, 2)).value
    return [_eq("local unitary on R", a, b, 1e-8 * s), Observation("<=1", a, 1.0, 0.0)], [rho]


def classical_correlated(rng, d: int = 8, noise: float = 0.1) -> np.ndarray:
    """A joint distribution on d × d that is mostly diagonal, with I(X:Y) near log d."""
    p = (1 - noise) * np.diag(rng.dirichlet(np.ones(d) * 3)) + noise * rng.dirichlet(np.ones(d * d)).reshape(d, d)
    return p / p.sum()


def dec_floor_instance(rng):
    p = classical_correlated(rng)
    sch = DecouplingScheme.random(8, 2, seed=rng)
    floor = classical_dec_floor(p, sch.rate, grid=32)
    rate = -math.log2(dec_performance(classical_joint_state(p), sch, (8, 8)).value)
    return p, rate, floor


def chk_dec_floor(rng, s):
    p, rate, floor = dec_floor_instance(rng)
    return [Observation("rate>=floor", floor, rate, 1e-6 * s)], [p]


# ------------------------------------------------------------------ runner

Check = Callable[[np.random.Generator, float], tuple[list[Observation], list]]

SUITE_CHECKS: dict[str, dict[str, Check]] = {
    "divergence-props": {
        "alpha-monotone": chk_alpha_monotone,
        "sigma-monotone": chk_sigma_monotone,
        "dpi": chk_dpi,
        "flat-above-star": chk_flat_above_star,
        "half-fidelity": chk_half_fidelity,
        "fidelity-dpi": chk_fidelity_dpi,
        "pinching-inequality": chk_pinching_inequality,
        "appen1": chk_appen1,
        "fidelity-re": chk_fidelity_re,
        "LWDg": chk_lwdg,
    },
    "entropy-props": {
        "discard-classical": chk_discard_classical,
        "dimension-bound": chk_dimension_bound,
        "I-alpha-monotone": chk_i_alpha_monotone,
        "LWD": chk_lwd,
    },
    "duality": {"dual-1": chk_dual1, "dual-2": chk_dual2},
    "variational": {
        "dmaxvar": chk_var_dmax,
        "varpa": chk_var_pa,
        "vardec": chk_var_dec,
        "flat-variational": chk_flat_variational,
        "pa-ordering": chk_pa_ordering,
        "dec-ordering": chk_dec_ordering,
        "dmax-rate-monotone": chk_dmax_rate_monotone,
        "dec-threshold": chk_dec_threshold,
    },
    "smoothing": {
        "bracket": chk_smooth_bracket,
        "commuting": chk_smooth_commuting,
        "sandwich": chk_smooth_sandwich,
        "monotone-lambda": chk_smooth_monotone,
        "dpi": chk_smooth_dpi,
        "lift": chk_lift,
    },
    "types": {
        "n1-classical": chk_types_n1,
        "bracket": chk_types_bracket,
        "classical-variational": chk_types_variational,
    },
    "protocols": {
        "pa-relabel": chk_pa_relabel,
        "pa-half-entropy": chk_pa_half,
        "pa-floor": chk_pa_floor,
        "dec-local-unitary": chk_dec_local_unitary,
        "dec-floor": chk_dec_floor,
    },
}


def derive_seed(seed: int, check: str, trial: int) -> int:
    h = hashlib.sha256(f"{seed}:{check}:{trial}".encode()).digest()
    return int.from_bytes(h[:8], "little")


def run_check(fn: Check, seed: int, tol_scale: float = 1.0) -> tuple[list[Observation], str]:
    """Run one check on the instance drawn from ``seed``."""
    obs, inputs = fn(np.random.default_rng(seed), tol_scale)
    return obs, _digest(inputs)


def _run_named(suite: str, checks: dict[str, Check], trials: int, seed: int, tol_scale: float,
               threads: int) -> SuiteReport:
    t0 = time.perf_counter()
    jobs = [(name, fn, derive_seed(seed, f"{suite}/{name}", i)) for name, fn in checks.items() for i in range(trials)]

    def one(job):
        name, fn, sd = job
        return name, sd, run_check(fn, sd, tol_scale)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, jobs))
    else:
        results = [one(j) for j in jobs]
    rep = SuiteReport(suite, instances=len(jobs))
    for name, sd, (obs, digest) in results:
        for o in obs:
            if not o.ok:
                rep.failures.append(Failure(f"{name}:{o.name}", sd, digest, o.lhs, o.rhs, o.tol))
    rep.wall_time = time.perf_counter() - t0
    return rep


def run_suite(name: str, trials: int, seed: int = 0, tol_scale: float = 1.0, threads: int = 1,
              only: list[str] | None = None) -> SuiteReport:
    """Run the named property suite (or ``"all"``) on ``trials`` random instances per check."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if name == "all":
        t0 = time.perf_counter()
        kids = [run_suite(s, trials, seed, tol_scale, threads) for s in SUITES]
        rep = SuiteReport("all", sum(k.instances for k in kids), [f for k in kids for f in k.failures],
                          0.0, kids)
        rep.wall_time = time.perf_counter() - t0
        return rep
    if name not in SUITE_CHECKS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    checks = SUITE_CHECKS[name]
    if only:
        unknown = set(only) - set(checks)
        if unknown:
            raise ValueError(f"unknown checks {sorted(unknown)} in suite {name}")
        checks = {k: v for k, v in checks.items() if k in only}
    return _run_named(name, checks, trials, seed, tol_scale, threads)
