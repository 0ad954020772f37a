"""Strong converse exponents as suprema over the Rényi order, and their
variational (hinge) duals.

Every sup-form has the shape ``sup_α (1-α)/α · (s·payoff(α) − offset)`` over
``α ∈ [1/2, 1]``; :func:`sup_over_alpha` samples it on a grid, refines the best
grid point by golden-section search and reports every local maximum it saw.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .divergences import (
    log_euclidean,
    log_euclidean_q,
    project_to_support,
    relative_entropy,
    sandwiched,
    support_case,
    SupportCase,
)
from .entropies import (
    OptimizerConfig,
    ProductReference,
    block_state,
    conditional_entropy_closed,
    minimize_product,
    mutual_information_closed,
)
from .linalg import (
    ValidationError,
    entropy,
    intersection_basis,
    matrix_log_on_support,
    partial_trace,
    support_basis,
)
from .optimize import StateSpace, _fd_grad
from .states import CQState, DensityMatrix

log = logging.getLogger(__name__)

DEFAULT_GRID = 512


@dataclass
class ExponentCurve:
    alphas: np.ndarray
    payoffs: np.ndarray
    values: np.ndarray
    supremum: float
    argmax_alpha: float
    local_maxima: list[tuple[float, float]] = field(default_factory=list)
    label: str = ""
    warnings: list[str] = field(default_factory=list)

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.alphas.tolist(), self.payoffs.tolist(), self.values.tolist()))

    def as_dict(self) -> dict:
        return {
            "supremum": self.supremum,
            "argmax_alpha": self.argmax_alpha,
            "local_maxima": [list(m) for m in self.local_maxima],
            "label": self.label,
            "warnings": list(self.warnings),
        }


def _weight(alpha: float) -> float:
    return (1 - alpha) / alpha


def sup_over_alpha(
    payoff: Callable[[float], float],
    sign: float,
    offset: float,
    grid: int = DEFAULT_GRID,
    refine: bool = True,
    value_at_one: float = 0.0,
    payoff_at_one: float | None = None,
    lo: float = 0.5,
    label: str = "",
) -> ExponentCurve:
    """Supremum of ``(1-α)/α (sign·payoff(α) − offset)`` over ``[lo, 1]``.

    ``payoff`` is only called for ``α < 1``; the α = 1 endpoint takes
    ``value_at_one`` (the limit of the weighted expression) and
    ``payoff_at_one`` for display.
    """
    if grid < 2:
        raise ValidationError("grid must have at least 2 points")
    cache: dict[float, float] = {}

    def weighted(a: float) -> float:
        if a >= 1.0:
            return value_at_one
        if a not in cache:
            cache[a] = payoff(a)
        p = cache[a]
        if math.isinf(p):
            return math.inf if sign * p > 0 else -math.inf
        return _weight(a) * (sign * p - offset)

    alphas = np.linspace(lo, 1.0, grid)
    vals = np.array([weighted(float(a)) for a in alphas])
    pays = np.array([cache.get(float(a), payoff_at_one if payoff_at_one is not None else math.nan)
                     for a in alphas])
    warnings = []
    if np.any(np.isposinf(vals)):
        i = int(np.argmax(np.isposinf(vals)))
        return ExponentCurve(alphas, pays, vals, math.inf, float(alphas[i]), [], label, warnings)

    local = []
    for i in range(len(vals)):
        left = vals[i - 1] if i > 0 else -math.inf
        right = vals[i + 1] if i + 1 < len(vals) else -math.inf
        if vals[i] >= left and vals[i] >= right and (vals[i] > left or vals[i] > right):
            local.append((float(alphas[i]), float(vals[i])))
    i = int(np.argmax(vals))
    best_a, best_v = float(alphas[i]), float(vals[i])
    if refine:
        # bounded Brent search between the neighbours of the best grid point
        a = float(alphas[max(i - 1, 0)])
        c = float(alphas[min(i + 1, len(alphas) - 1)])
        c = min(c, 1 - 1e-12)
        if c > a:
            res = minimize_scalar(lambda t: -weighted(t), bounds=(a, c), method="bounded",
                                  options={"xatol": 1e-10})
            if -res.fun > best_v:
                best_a, best_v = float(res.x), float(-res.fun)
    if len(local) > 1:
        warnings.append(f"{len(local)} local maxima on the alpha grid")
    return ExponentCurve(alphas, pays, vals, best_v, best_a, local, label, warnings)


# ---------------------------------------------------------------- sup-forms


def _dmax_curve(rho, sigma, r, payoff_fn, grid, refine, label):
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    case = support_case(rho, sigma)
    if case is SupportCase.ORTHOGONAL:
        a = np.array([0.5, 1.0])
        return ExponentCurve(a, np.array([math.inf] * 2), np.array([math.inf] * 2), math.inf, 0.5, [], label)
    shift = 0.0
    if case is SupportCase.OVERLAPPING and payoff_fn is sandwiched:
        rho, w = project_to_support(rho, sigma)
        shift = -math.log2(w)
    if payoff_fn is sandwiched:
        at_one = relative_entropy(rho, sigma)
        one_val = 0.0
    else:
        at_one = math.inf if case is SupportCase.OVERLAPPING else relative_entropy(rho, sigma)
        one_val = -math.log2(log_euclidean_q(rho, sigma, 1.0))
    curve = sup_over_alpha(lambda a: payoff_fn(rho, sigma, a), 1.0, r, grid, refine,
                           value_at_one=one_val, payoff_at_one=at_one, label=label)
    if shift:
        # the rewrite adds the constant −log tr Π_σρΠ_σ to every weighted value
        curve.values = curve.values + shift
        curve.local_maxima = [(a, v + shift) for a, v in curve.local_maxima]
        curve.supremum += shift
    return curve


def exponent_dmax(rho, sigma, r: float, grid: int = DEFAULT_GRID, refine: bool = True) -> ExponentCurve:
    """``sup_{1/2 ≤ α < 1} (1-α)/α (D*_α(ρ‖σ) − r)`` with the support-case rules.

    Examples
    --------
    >>> import numpy as np
    >>> c = exponent_dmax(np.diag([1.0, 0.0]), np.eye(2) / 2, 0.0, grid=16)
    >>> round(c.supremum, 9), c.argmax_alpha
    (1.0, 0.5)
    """
    return _dmax_curve(rho, sigma, r, sandwiched, grid, refine, "smoothing exponent")


def flat_dmax(rho, sigma, r: float, grid: int = DEFAULT_GRID, refine: bool = True) -> ExponentCurve:
    """Sup-form with the log-Euclidean divergence (left side of the hinge dual)."""
    return _dmax_curve(rho, sigma, r, log_euclidean, grid, refine, "log-euclidean smoothing sup-form")


class _WarmEntropy:
    """Inner minimizations along an α sweep, warm-started from the last optimum.

    The first call uses the full multistart when ``multistart_first`` is set;
    later calls start from the previous optimizer only.
    """

    def __init__(self, make_ref, config, multistart_first: bool, x0=None):
        self.make_ref = make_ref
        self.config = config or OptimizerConfig()
        self.x = x0
        self.calls = 0
        self.multistart_first = multistart_first
        self.warnings: list[str] = []

    def __call__(self, alpha: float) -> float:
        ref = self.make_ref(alpha)
        convex = None if (self.calls == 0 and self.multistart_first) else True
        res = minimize_product(ref, self.config, self.x, convex=convex)
        self.calls += 1
        self.x = res.coords
        self.warnings.extend(res.warnings)
        return res.value


def _pa_curve(cq: CQState, r: float, kind: str, grid, refine, config, label):
    if r < 0:
        raise ValidationError("rate must be nonnegative")
    rho = cq.matrix()
    dims = [cq.alphabet_size, cq.dim_e]
    inner = _WarmEntropy(lambda a: ProductReference(kind, a, rho, dims, [np.eye(dims[0]), None]), config, False)
    # payoff is H_α(X|E) = −min_σ D
    h1 = conditional_entropy_closed(rho, dims)
    curve = sup_over_alpha(lambda a: -inner(a), -1.0, -r, grid, refine, 0.0, h1, label=label)
    curve.warnings.extend(sorted(set(inner.warnings)))
    return curve


def exponent_pa(cq: CQState, r: float, grid: int = DEFAULT_GRID, refine: bool = True,
                config: OptimizerConfig | None = None) -> ExponentCurve:
    """``sup_{1/2 ≤ α ≤ 1} (1-α)/α (r − H*_α(X|E))``."""
    return _pa_curve(cq, r, "sandwiched", grid, refine, config, "privacy amplification exponent")


def flat_pa(cq: CQState, r: float, grid: int = DEFAULT_GRID, refine: bool = True,
            config: OptimizerConfig | None = None) -> ExponentCurve:
    """``G(ρ_XE, r)`` as a sup-form with the log-Euclidean conditional entropy."""
    return _pa_curve(cq, r, "log-euclidean", grid, refine, config, "G sup-form")


def _dec_curve(rho_ra, dims, r, block, kind, grid, refine, config, label):
    if r < 0:
        raise ValidationError("rate must be nonnegative")
    rho = np.asarray(rho_ra.entries if isinstance(rho_ra, DensityMatrix) else rho_ra, dtype=complex)
    dims = list(rho_ra.dims) if dims is None and isinstance(rho_ra, DensityMatrix) else list(dims)
    big, bd = block_state(rho, dims, block)
    x0 = StateSpace(bd).coords_of([partial_trace(big, bd, [0]), partial_trace(big, bd, [1])])
    inner = _WarmEntropy(lambda a: ProductReference(kind, a, big, bd, [None, None]), config, True, x0)
    i1 = mutual_information_closed(rho, dims)
    curve = sup_over_alpha(lambda a: inner(a) / block, 1.0, 2 * r, grid, refine, 0.0, i1, label=label)
    curve.warnings.extend(sorted(set(inner.warnings)))
    return curve


def exponent_dec(rho_ra, r: float, block: int = 1, dims=None, grid: int = DEFAULT_GRID,
                 refine: bool = True, config: OptimizerConfig | None = None) -> ExponentCurve:
    """``sup_α (1-α)/α ((1/block) I*_α(R^b:A^b) − 2r)``.

    Block values upper-bound the regularized mutual information, so for
    ``block ≤ 2`` the result is an upper bound on the decoupling exponent.
    The inner double minimization is warm-started along the α grid.
    """
    if block not in (1, 2):
        raise ValidationError("block must be 1 or 2")
    return _dec_curve(rho_ra, dims, r, block, "sandwiched", grid, refine, config,
                      f"decoupling exponent, upper bound via finite blocks (block {block})")


def flat_dec(rho_ra, r: float, dims=None, grid: int = DEFAULT_GRID, refine: bool = True,
             config: OptimizerConfig | None = None) -> ExponentCurve:
    """``L(ρ_RA, r)`` as a sup-form with the log-Euclidean mutual information."""
    return _dec_curve(rho_ra, dims, r, 1, "log-euclidean", grid, refine, config, "L sup-form")


# -------------------------------------------------------------- hinge duals


@dataclass
class VariationalDual:
    value: float
    tau: np.ndarray
    branch: str  # "unpenalized" (hinge off) or "penalized" (hinge on)
    branch_values: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"value": self.value, "branch": self.branch, "branch_values": dict(self.branch_values),
                "warnings": list(self.warnings)}


def _ent_log2(w2: np.ndarray) -> float:
    # entropy from log2 eigenvalues
    return float(-np.sum(np.exp2(w2) * w2))


def _memo(fn):
    """Cache the most recent evaluations; f and g share one expensive pass."""
    cache: dict[bytes, object] = {}

    def wrapped(x):
        key = np.asarray(x, dtype=float).tobytes()
        if key not in cache:
            if len(cache) > 64:
                cache.clear()
            cache[key] = fn(x)
        return cache[key]

    return wrapped


def _slsqp(fun, x0, cons):
    cons = [dict(c, jac=lambda x, c=c: _fd_grad(c["fun"], x, 1e-7)) for c in cons]
    res = minimize(fun, x0, jac=lambda x: _fd_grad(fun, x, 1e-7), method="SLSQP", constraints=cons,
                   options={"maxiter": 400, "ftol": 1e-14})
    return res


def _hinge(f, g, n: int, x_rho: np.ndarray | None, rng: np.random.Generator, n_random: int = 2,
           g_floor: float = -math.inf):
    """Minimize ``f + |g|^+`` split into the two hinge branches.

    ``f`` and ``f + g`` are convex in the parameterized state. ``g_floor`` is a
    known lower bound on ``g``; when positive the inactive branch is empty.
    Returns the total, both branch values and the best coordinates.
    """

    def h(x):
        return f(x) + g(x)

    if n == 0:
        # a single admissible state: evaluate the hinge directly
        x = np.zeros(0)
        fx, gx = f(x), g(x)
        v1 = fx if gx <= 0 else math.inf
        vv2 = fx + gx if gx >= 0 else math.inf
        return fx + max(gx, 0.0), v1, vv2, x, ("unpenalized" if gx <= 0 else "penalized"), []

    starts = ([x_rho] if x_rho is not None else []) + [np.zeros(n)]
    starts += [rng.normal(scale=0.5, size=n) for _ in range(n_random)]
    best2 = None
    for s in starts[:2]:
        res = minimize(h, s, jac=lambda x: _fd_grad(h, x, 1e-7), method="L-BFGS-B",
                       options={"maxiter": 5000, "ftol": 1e-15, "gtol": 1e-11})
        if best2 is None or res.fun < best2[0]:
            best2 = (float(res.fun), res.x)
    v2, x2 = best2
    warnings = []
    tol = 1e-9

    def constrained(obj, sign, seeds):
        # min obj subject to sign·g ≥ 0; two feasible runs suffice
        best, found = None, 0
        for s in seeds:
            res = _slsqp(obj, s, [{"type": "ineq", "fun": lambda x: sign * g(x)}])
            if sign * g(res.x) >= -tol:
                found += 1
                if best is None or res.fun < best[0]:
                    best = (float(res.fun), res.x)
                if found >= 2:
                    break
        return best

    # branch 1: hinge inactive, g ≤ 0
    if g_floor > 0:
        b1 = None
    elif x_rho is not None and g(x_rho) <= 0:
        b1 = (f(x_rho), x_rho)
    else:
        seeds = ([x2] if g(x2) < 0 else []) + starts
        b1 = constrained(f, -1.0, seeds)
    # branch 2: hinge active, g ≥ 0
    if g(x2) >= 0:
        b2 = (v2, x2)
    else:
        seeds = ([x_rho] if x_rho is not None and g(x_rho) > 0 else []) + starts
        b2 = constrained(h, 1.0, seeds)
    v1 = b1[0] if b1 else math.inf
    vv2 = b2[0] if b2 else math.inf
    if b1 is None and b2 is None:
        warnings.append("no feasible point found in either branch")
        return math.inf, v1, vv2, x2, "penalized", warnings
    if v1 <= vv2:
        return v1, v1, vv2, b1[1], "unpenalized", warnings
    return vv2, v1, vv2, b2[1], "penalized", warnings


class _SubspaceStates:
    """Density matrices supported in the span of the columns of ``basis``."""

    def __init__(self, basis: np.ndarray):
        self.basis = basis
        self.k = basis.shape[1]
        self.space = StateSpace([self.k])

    def local(self, x):
        return self.space.states(x)[0]

    def embed(self, local_mat):
        return self.basis @ local_mat @ self.basis.conj().T

    def compress(self, m):
        return self.basis.conj().T @ np.asarray(m, dtype=complex) @ self.basis

    def coords_of(self, m):
        return self.space.coords_of([self.compress(m)])


def _rel_ent_local(st, log_target_local) -> float:
    # D(τ‖X) for τ on a subspace, with the compressed log2 X supplied
    return -_ent_log2(st.w) - float(np.real(np.trace(st.mat @ log_target_local)))


def _common_eigenbasis(rho, sigma) -> np.ndarray:
    # a generic real combination splits every joint eigenspace
    w, v = np.linalg.eigh(np.asarray(rho) + math.pi * np.asarray(sigma))
    return v


def commute(a, b, tol: float = 1e-10) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.max(np.abs(a @ b - b @ a))) <= tol


def dual_dmax(rho, sigma, r: float, seed: int = 0, classical: bool | None = None) -> VariationalDual:
    """``inf_τ D(τ‖ρ) + |D(τ‖σ) − r|^+`` over τ supported on supp ρ ∩ supp σ.

    Commuting inputs are optimized over the classical simplex in the common
    eigenbasis unless ``classical=False``.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    rng = np.random.default_rng(seed)
    basis = intersection_basis(rho, sigma)
    if basis.shape[1] == 0:
        return VariationalDual(math.inf, np.zeros_like(rho), "penalized", {"unpenalized": math.inf,
                                                                            "penalized": math.inf})
    if classical is None:
        classical = commute(rho, sigma)
    if classical:
        v = _common_eigenbasis(rho, sigma)
        p = np.real(np.diag(v.conj().T @ rho @ v))
        q = np.real(np.diag(v.conj().T @ sigma @ v))
        cut_p = 1e-9 * p.max()
        cut_q = 1e-9 * q.max()
        idx = np.where((p > cut_p) & (q > cut_q))[0]
        lp, lq = np.log2(p[idx]), np.log2(q[idx])

        def t_of(x):
            z = np.concatenate([[0.0], x])
            z = z - z.max()
            return np.exp(z) / np.sum(np.exp(z))

        def f(x):
            t = t_of(x)
            return float(np.sum(t * (np.log2(np.clip(t, 1e-300, None)) - lp)))

        def g(x):
            t = t_of(x)
            return float(np.sum(t * (np.log2(np.clip(t, 1e-300, None)) - lq))) - r

        pr = p[idx] / p[idx].sum()
        x_rho = np.log(pr[1:] / pr[0]) if np.isclose(p[idx].sum(), p.sum()) else None
        total, v1, v2, x, br, warns = _hinge(f, g, len(idx) - 1, x_rho, rng)
        tvec = np.zeros(len(p))
        tvec[idx] = t_of(x)
        tau = (v * tvec) @ v.conj().T
        return VariationalDual(total, tau, br, {"unpenalized": v1, "penalized": v2}, warns)

    sub = _SubspaceStates(basis)
    lr = sub.compress(matrix_log_on_support(rho))
    ls = sub.compress(matrix_log_on_support(sigma))

    def f(x):
        return _rel_ent_local(sub.local(x), lr)

    def g(x):
        return _rel_ent_local(sub.local(x), ls) - r

    x_rho = sub.coords_of(rho) if basis.shape[1] == support_basis(rho).shape[1] else None
    total, v1, v2, x, br, warns = _hinge(f, g, sub.space.n, x_rho, rng)
    tau = sub.embed(sub.local(x).mat)
    return VariationalDual(total, tau, br, {"unpenalized": v1, "penalized": v2}, warns)


def dual_pa(cq: CQState, r: float, seed: int = 0) -> VariationalDual:
    """``G = inf_τ D(τ‖ρ) + |r − H(X|E)_τ|^+`` over CQ τ with supp τ ⊆ supp ρ.

    ``branch_values`` holds G1 (hinge inactive) and G2 (hinge active).
    """
    if r < 0:
        raise ValidationError("rate must be nonnegative")
    rng = np.random.default_rng(seed)
    p = np.asarray(cq.probs, dtype=float)
    xs = np.where(p > 0)[0]
    subs = [_SubspaceStates(support_basis(cq.cond_states[x])) for x in xs]
    logs = [s.compress(matrix_log_on_support(cq.cond_states[x])) for s, x in zip(subs, xs)]
    lp = np.log2(p[xs])
    m = len(xs) - 1
    sizes = [s.space.n for s in subs]

    def unpack(x):
        z = np.concatenate([[0.0], x[:m]])
        z = z - z.max()
        t = np.exp(z) / np.sum(np.exp(z))
        out, i = [], m
        for s, n in zip(subs, sizes):
            out.append(s.local(x[i:i + n]))
            i += n
        return t, out

    @_memo
    def parts(x):
        t, sts = unpack(x)
        tl = np.log2(np.clip(t, 1e-300, None))
        d = float(np.sum(t * (tl - lp)))
        d += sum(ti * _rel_ent_local(st, lg) for ti, st, lg in zip(t, sts, logs))
        tau_e = sum(ti * s.embed(st.mat) for ti, s, st in zip(t, subs, sts))
        h_xe = float(-np.sum(t * tl)) + sum(ti * _ent_log2(st.w) for ti, st in zip(t, sts))
        return d, h_xe - entropy(tau_e)

    def f(x):
        return parts(x)[0]

    def g(x):
        return r - parts(x)[1]

    x_rho = np.concatenate([np.log(p[xs][1:] / p[xs][0])] +
                           [s.coords_of(cq.cond_states[x]) for s, x in zip(subs, xs)])
    # H(X|E) ≤ log|X| bounds g from below
    total, v1, v2, x, br, warns = _hinge(f, g, len(x_rho), x_rho, rng, g_floor=r - math.log2(len(xs)))
    t, sts = unpack(x)
    tau = np.zeros((len(p) * cq.dim_e,) * 2, dtype=complex)
    for ti, s, st, xi in zip(t, subs, sts, xs):
        e = cq.dim_e
        tau[xi * e:(xi + 1) * e, xi * e:(xi + 1) * e] = ti * s.embed(st.mat)
    return VariationalDual(total, tau, br, {"G1": v1, "G2": v2}, warns)


def dual_dec(rho_ra, r: float, dims=None, seed: int = 0) -> VariationalDual:
    """``L = inf_τ D(τ‖ρ) + |I(R:A)_τ − 2r|^+`` over τ with supp τ ⊆ supp ρ.

    ``branch_values`` holds L1 (hinge inactive) and L2 (hinge active).
    """
    if r < 0:
        raise ValidationError("rate must be nonnegative")
    rho = np.asarray(rho_ra.entries if isinstance(rho_ra, DensityMatrix) else rho_ra, dtype=complex)
    dims = list(rho_ra.dims) if dims is None and isinstance(rho_ra, DensityMatrix) else list(dims)
    rng = np.random.default_rng(seed)
    sub = _SubspaceStates(support_basis(rho))
    lr = sub.compress(matrix_log_on_support(rho))

    @_memo
    def parts(x):
        st = sub.local(x)
        tau = sub.embed(st.mat)
        h = _ent_log2(st.w)
        mi = entropy(partial_trace(tau, dims, [0])) + entropy(partial_trace(tau, dims, [1])) - h
        return -h - float(np.real(np.trace(st.mat @ lr))), mi

    def f(x):
        return parts(x)[0]

    def g(x):
        return parts(x)[1] - 2 * r

    total, v1, v2, x, br, warns = _hinge(f, g, sub.space.n, sub.coords_of(rho), rng)
    return VariationalDual(total, sub.embed(sub.local(x).mat), br, {"L1": v1, "L2": v2}, warns)


def flat_variational(rho, sigma, alpha: float, seed: int = 0) -> float:
    """``min_τ D(τ‖σ) − α/(α−1) D(τ‖ρ)`` for α ∈ (0,1), τ on supp ρ ∩ supp σ.

    Equals the log-Euclidean divergence; used as an independent check.
    """
    if not 0 < alpha < 1:
        raise ValidationError("alpha must lie in (0, 1)")
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    basis = intersection_basis(rho, sigma)
    if basis.shape[1] == 0:
        return math.inf
    sub = _SubspaceStates(basis)
    lr = sub.compress(matrix_log_on_support(rho))
    ls = sub.compress(matrix_log_on_support(sigma))
    c = alpha / (1 - alpha)

    def obj(x):
        st = sub.local(x)
        return _rel_ent_local(st, ls) + c * _rel_ent_local(st, lr)

    best = math.inf
    rng = np.random.default_rng(seed)
    for s in [np.zeros(sub.space.n), rng.normal(scale=0.5, size=sub.space.n)]:
        res = minimize(obj, s, jac=lambda x: _fd_grad(obj, x, 1e-7), method="L-BFGS-B",
                       options={"maxiter": 5000, "ftol": 1e-15, "gtol": 1e-11})
        best = min(best, float(res.fun))
    return best


def classical_dmax_sup(p, q, r: float, grid: int = DEFAULT_GRID) -> float:
    """Classical sup-form ``sup_α (1-α)/α (D_α(p‖q) − r)``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return exponent_dmax(np.diag(p), np.diag(q), r, grid=grid).supremum
