"""Minimization over products of density matrices.

States are parameterized in exponential coordinates ``σ = exp(H) / tr exp(H)``
with ``H`` expanded in a generalized Gell-Mann basis, so iterates stay strictly
positive definite. Two drivers share that parameterization: a quasi-Newton
(L-BFGS) run in the coordinates and entropic mirror descent (multiplicative
``σ ← exp(log σ − η ∇f)`` updates with backtracking).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .linalg import gell_mann_basis

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 5000
    convergence_tol: float = 1e-9
    multistart_count: int = 8
    seed: int = 0
    method: str = "lbfgs"  # or "mirror"
    fd_step: float = 1e-6

    def __post_init__(self):
        if self.max_iters <= 0 or self.convergence_tol <= 0 or self.fd_step <= 0:
            raise ValueError("optimizer tolerances and iteration counts must be positive")
        if self.multistart_count < 1:
            raise ValueError("multistart_count must be >= 1")
        if self.method not in ("lbfgs", "mirror"):
            raise ValueError(f"unknown method {self.method!r}")


class PDState:
    """A positive definite state with its eigendecomposition at hand."""

    __slots__ = ("h", "w", "v", "_mat")

    def __init__(self, h: np.ndarray):
        w, v = np.linalg.eigh(h)
        w = w - w.max()
        lz = math.log(np.sum(np.exp(w)))
        self.w = (w - lz) / math.log(2)  # log2 eigenvalues
        self.v = v
        self.h = h
        self._mat = None

    @property
    def mat(self) -> np.ndarray:
        if self._mat is None:
            self._mat = (self.v * np.exp2(self.w)) @ self.v.conj().T
        return self._mat

    def power(self, p: float) -> np.ndarray:
        return (self.v * np.exp2(p * self.w)) @ self.v.conj().T

    def log2(self) -> np.ndarray:
        return (self.v * self.w) @ self.v.conj().T

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp2(self.w)


class StateSpace:
    """Coordinates for a product of density-matrix blocks of the given dims."""

    def __init__(self, dims: Sequence[int]):
        self.dims = [int(d) for d in dims]
        self.bases = [gell_mann_basis(d) for d in self.dims]
        self.sizes = [len(b) for b in self.bases]
        self.n = sum(self.sizes)

    def split(self, x: np.ndarray) -> list[np.ndarray]:
        out, i = [], 0
        for s in self.sizes:
            out.append(x[i:i + s])
            i += s
        return out

    def hermitian(self, x: np.ndarray) -> list[np.ndarray]:
        hs = []
        for c, b, d in zip(self.split(x), self.bases, self.dims):
            hs.append(np.tensordot(c, b, axes=1) if len(c) else np.zeros((d, d), dtype=complex))
        return hs

    def states(self, x: np.ndarray) -> list[PDState]:
        return [PDState(h) for h in self.hermitian(x)]

    def coords_of(self, states: Sequence[np.ndarray], floor: float = 1e-12) -> np.ndarray:
        parts = []
        for s, b in zip(states, self.bases):
            s = np.asarray(s, dtype=complex)
            w, v = np.linalg.eigh(0.5 * (s + s.conj().T))
            w = np.clip(w, floor, None)
            h = (v * np.log(w)) @ v.conj().T
            parts.append(np.real(np.einsum("kij,ji->k", b, h)))
        return np.concatenate(parts) if parts else np.zeros(0)

    def random_coords(self, rng: np.random.Generator) -> np.ndarray:
        from .states import random_density

        return self.coords_of([random_density(d, seed=rng).entries for d in self.dims])


@dataclass
class StateOptResult:
    value: float
    states: list[np.ndarray]
    converged: bool
    iterations: int
    last_decrease: float
    start_values: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    coords: np.ndarray | None = None


Objective = Callable[[list[PDState]], float]


def _fd_grad(f, x: np.ndarray, h: float) -> np.ndarray:
    g = np.empty_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def _run_lbfgs(f, x0, config: OptimizerConfig, jac=None):
    hist = []

    def fun(x):
        return f(x)

    jac = jac or (lambda x: _fd_grad(f, x, config.fd_step))
    res = minimize(
        fun,
        x0,
        jac=jac,
        method="L-BFGS-B",
        options={"maxiter": config.max_iters, "ftol": 1e-15, "gtol": 1e-10, "maxcor": 30},
        callback=lambda xk: hist.append(float(f(xk))),
    )
    dec = abs(hist[-2] - hist[-1]) if len(hist) >= 2 else 0.0
    # a line-search stop at machine precision with a vanishing gradient is convergence
    small_grad = float(np.max(np.abs(res.jac), initial=0.0)) < 1e-6
    converged = bool(res.success) or dec < config.convergence_tol or small_grad
    return res.x, float(res.fun), converged, int(res.nit), dec


def _run_mirror(space: StateSpace, f, x0, config: OptimizerConfig):
    # gradient in σ-space along the Gell-Mann directions; update in log-space
    x = x0.copy()
    fx = f(x)
    eta = 1.0
    dec = math.inf
    it = 0
    converged = False
    for it in range(1, config.max_iters + 1):
        sts = space.states(x)
        mats = [s.mat for s in sts]
        g_blocks = []
        for bi, (b, m) in enumerate(zip(space.bases, mats)):
            gb = np.zeros(len(b))
            lo = float(np.min(np.linalg.eigvalsh(m)))
            h = min(config.fd_step, 0.5 * lo) if lo > 0 else config.fd_step
            for k, bk in enumerate(b):
                plus = list(mats)
                minus = list(mats)
                plus[bi] = m + h * bk
                minus[bi] = m - h * bk
                gb[k] = (f_sigma(space, f, plus) - f_sigma(space, f, minus)) / (2 * h)
            g_blocks.append(gb)
        g = np.concatenate(g_blocks)
        while True:
            xn = x - eta * g
            fn = f(xn)
            if fn <= fx - 1e-4 * eta * float(g @ g) or eta < 1e-14:
                break
            eta *= 0.5
        dec = fx - fn
        if fn <= fx:
            x, fx = xn, fn
        eta *= 1.5
        if 0 <= dec < config.convergence_tol:
            converged = True
            break
    return x, fx, converged, it, dec


def f_sigma(space: StateSpace, f, mats):
    x = space.coords_of(mats, floor=1e-300)
    return f(x)


def minimize_states(
    objective: Objective,
    dims: Sequence[int],
    config: OptimizerConfig | None = None,
    x0: Sequence[np.ndarray] | np.ndarray | None = None,
    convex: bool = False,
    jac: Callable[[list[PDState]], np.ndarray] | None = None,
) -> StateOptResult:
    """Minimize ``objective(states)`` over a product of density matrices.

    ``objective`` receives a list of :class:`PDState`. ``x0`` is either a list
    of starting states or a coordinate vector from a previous result. Convex
    problems get one start (``x0`` or the maximally mixed point); otherwise
    ``config.multistart_count`` starts are used and disagreement above 1e-6
    among them is reported in ``warnings``.

    ``jac`` optionally returns the gradient with respect to the coordinates.
    """
    config = config or OptimizerConfig()
    space = StateSpace(dims)
    rng = np.random.default_rng(config.seed)

    def f(x):
        val = objective(space.states(x))
        return val if np.isfinite(val) else 1e300

    g = None if jac is None else (lambda x: jac(space.states(x)))

    starts = []
    if x0 is not None:
        starts.append(np.asarray(x0, dtype=float) if isinstance(x0, np.ndarray) and x0.ndim == 1
                      else space.coords_of(x0))
    if not starts or not convex:
        starts.append(np.zeros(space.n))
    n_starts = 1 if convex else config.multistart_count
    while len(starts) < n_starts:
        starts.append(space.random_coords(rng))
    starts = starts[:n_starts]

    if space.n == 0:
        val = f(np.zeros(0))
        return StateOptResult(val, [s.mat for s in space.states(np.zeros(0))], True, 0, 0.0, [val],
                              coords=np.zeros(0))

    best = None
    values = []
    for s in starts:
        if config.method == "mirror":
            x, val, conv, nit, dec = _run_mirror(space, f, s, config)
        else:
            x, val, conv, nit, dec = _run_lbfgs(f, s, config, g)
        values.append(val)
        if best is None or val < best[1]:
            best = (x, val, conv, nit, dec)
    x, val, conv, nit, dec = best
    warnings = []
    if len(values) > 1 and max(values) - min(values) > 1e-6:
        warnings.append(f"multistart optima disagree: spread {max(values) - min(values):.3e}")
    if not conv:
        warnings.append("optimizer did not reach the convergence tolerance")
        log.warning("state optimization not converged (last decrease %.3e)", dec)
    return StateOptResult(val, [st.mat for st in space.states(x)], conv, nit, dec, values, warnings, x)


def maximize_states(objective: Objective, dims, config=None, x0=None, concave=False, jac=None):
    """Maximize by minimizing the negation; the returned value is the maximum."""
    neg_jac = None if jac is None else (lambda sts: -jac(sts))
    res = minimize_states(lambda s: -objective(s), dims, config, x0, concave, neg_jac)
    res.value = -res.value
    res.start_values = [-v for v in res.start_values]
    return res


def coord_grad_from_sigma_grad(state: PDState, grad_sigma: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Chain rule from ∇_σ f (Hermitian) to the Gell-Mann coordinates of H.

    With σ = e^H / Z: ∇_H f = (Dexp_H[G] − tr(Gσ) e^H) / Z.
    """
    ln2 = math.log(2)
    h = state.w * ln2  # eigenvalues of H - log Z
    e = np.exp(h)
    dh = h[:, None] - h[None, :]
    de = e[:, None] - e[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        gam = np.where(np.abs(dh) > 1e-10, de / np.where(dh == 0, 1, dh), 0.5 * (e[:, None] + e[None, :]))
    u = state.v
    gt = u.conj().T @ grad_sigma @ u
    dexp = u @ (gam * gt) @ u.conj().T
    tr_gs = float(np.real(np.sum(np.diag(gt) * e)))
    gh = dexp - tr_gs * state.mat
    return np.real(np.einsum("kij,ji->k", basis, gh))
