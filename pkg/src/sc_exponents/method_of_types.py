"""Finite-n classical smoothing via the method of types.

For commuting ρ = diag(p), σ = diag(q) the optimal smoothed state of ρ^{⊗n}
can be taken uniform on each type class, so ε(p^n‖q^n, nr) reduces to a
water-filling problem over the (n+1)^{|X|}-bounded list of types:

    A_n = max Σ_t √(P_n(t) P̃_n(t))  s.t.  P̃_n(t) ≤ 2^{nr} Q_n(t),  Σ_t P̃_n(t) ≤ 1,

and 1 − ε_n = 1 − √(1 − A_n²). Everything is carried in log₂ form.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln, logsumexp

from .linalg import ValidationError
from .smoothing import water_fill_log

LN2 = math.log(2)
MAX_N = {2: 400, 3: 200, 4: 100}


def compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors of length ``k`` summing to ``n``, in lexicographic order."""
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def _check_pq(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.ndim != 1 or p.shape != q.shape:
        raise ValidationError("p and q must be vectors of equal length")
    if np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
        raise ValidationError("p must be a probability vector")
    if np.any(q < 0):
        raise ValidationError("q must be nonnegative")
    return p / p.sum(), q


def _log2_weights(counts: np.ndarray, x: np.ndarray) -> np.ndarray:
    # Σ_i k_i log₂ x_i with 0·log 0 = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        lx = np.where(x > 0, np.log2(np.where(x > 0, x, 1.0)), -np.inf)
        terms = np.where(counts > 0, counts * lx, 0.0)
    return terms.sum(axis=1)


def _kl_rows(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(t > 0, t / np.where(x > 0, x, 0.0), 1.0)
        terms = np.where(t > 0, t * np.log2(ratio), 0.0)
    return terms.sum(axis=1)


@dataclass
class TypeTable:
    n: int
    alphabet_size: int
    types: np.ndarray  # (num_types, |X|) integer counts
    log2_class_size: np.ndarray
    entropy: np.ndarray
    d_p: np.ndarray
    d_q: np.ndarray
    log2_p: np.ndarray  # log₂ P_n(t)
    log2_q: np.ndarray  # log₂ Q_n(t)

    @property
    def num_types(self) -> int:
        return len(self.types)

    @property
    def P(self) -> np.ndarray:
        return np.exp2(self.log2_p)

    @property
    def Q(self) -> np.ndarray:
        return np.exp2(self.log2_q)


def build_type_table(p, q, n: int) -> TypeTable:
    """Enumerate the types of length ``n`` with exact per-type weights.

    Examples
    --------
    >>> tab = build_type_table([0.5, 0.5], [0.5, 0.5], 2)
    >>> tab.types.tolist()
    [[0, 2], [1, 1], [2, 0]]
    >>> float(2 ** tab.log2_class_size[1])
    2.0
    """
    p, q = _check_pq(p, q)
    k = len(p)
    if n < 1:
        raise ValidationError("n must be positive")
    if k not in MAX_N:
        raise ValidationError(f"alphabet size {k} not supported (2 to 4)")
    if n > MAX_N[k]:
        raise ValidationError(f"n = {n} exceeds the limit {MAX_N[k]} for |X| = {k}")
    types = np.array(list(compositions(n, k)), dtype=np.int64)
    log2_size = (gammaln(n + 1) - gammaln(types + 1).sum(axis=1)) / LN2
    t = types / n
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(t > 0, t * np.log2(np.where(t > 0, t, 1.0)), 0.0).sum(axis=1)
    return TypeTable(
        n=n,
        alphabet_size=k,
        types=types,
        log2_class_size=log2_size,
        entropy=h,
        d_p=_kl_rows(t, p),
        d_q=_kl_rows(t, q),
        log2_p=log2_size + _log2_weights(types, p),
        log2_q=log2_size + _log2_weights(types, q),
    )


@dataclass
class FiniteNExponent:
    n: int
    A_n: float
    log2_A_n: float
    minus_log_one_minus_eps_over_n: float
    asymptote: float
    gap: float
    epsilon: float
    log2_b_max: float
    bracket: tuple[float, float]  # bounds on -(1/n) log₂ A_n from the type sandwich
    value_bounds: tuple[float, float]  # implied bounds on -(1/n) log₂(1 - ε_n)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "A_n": self.A_n,
            "minus_log_one_minus_eps_over_n": self.minus_log_one_minus_eps_over_n,
            "asymptote": self.asymptote,
            "gap": self.gap,
            "epsilon": self.epsilon,
        }


def _log2_one_minus_eps(log2_a: float) -> float:
    # 1 - √(1 - A²) = A² / (1 + √(1 - A²)), stable for small A
    if log2_a == -math.inf:
        return -math.inf
    a2 = 2.0 ** (2 * log2_a)
    return 2 * log2_a - math.log2(1 + math.sqrt(max(0.0, 1 - a2)))


def log2_optimum(table: TypeTable, r: float) -> float:
    """log₂ A_n by exact water-filling over the type-indexed vectors."""
    lp = table.log2_p * LN2
    lc = (table.log2_q + table.n * r) * LN2
    if np.all(lc >= lp):
        return 0.0  # no cap binds: t̃ = P_n
    lt = water_fill_log(lp, lc)
    with np.errstate(invalid="ignore"):
        terms = 0.5 * (lp + lt)
    terms = terms[np.isfinite(terms)]
    if len(terms) == 0:
        return -math.inf
    return min(0.0, float(logsumexp(terms)) / LN2)


def log2_b_values(table: TypeTable, r: float) -> np.ndarray:
    """log₂ B_n(t) = ½ log₂ P_n(t) + ½ min(nr + log₂ Q_n(t), 0)."""
    return 0.5 * table.log2_p + 0.5 * np.minimum(table.n * r + table.log2_q, 0.0)


def hinge_values(table: TypeTable, r: float) -> np.ndarray:
    """M_n(t) = D(t‖p) + |D(t‖q) − r|^+ for every type."""
    return table.d_p + np.maximum(table.d_q - r, 0.0)


def simplex_inf_form(p, q, r: float) -> float:
    """min over distributions t of D(t‖p) + |D(t‖q) − r|^+.

    Both branches of the hinge are minimized on the tilted family
    ``t_β ∝ p^β q^{1−β}``, β ∈ [0, 1], so a one-dimensional search suffices.
    """
    p, q = _check_pq(p, q)
    both = (p > 0) & (q > 0)
    if not np.any(both):
        return math.inf
    lp, lq = np.log2(p[both]), np.log2(q[both])
    if np.any((p > 0) & (q == 0)):
        d_q_of_p = math.inf
    else:
        d_q_of_p = float(np.sum(p[both] * (lp - lq)))

    def m(beta):
        lt = beta * lp + (1 - beta) * lq
        lt = lt - logsumexp(lt * LN2) / LN2
        t = np.exp2(lt)
        dp = float(np.sum(t * (lt - lp)))
        dq = float(np.sum(t * (lt - lq)))
        return dp + max(dq - r, 0.0)

    grid = np.linspace(0.0, 1.0, 401)
    vals = [m(b) for b in grid]
    if math.isfinite(d_q_of_p):
        vals[-1] = max(d_q_of_p - r, 0.0)  # t = p exactly
    i = int(np.argmin(vals))
    best = vals[i]
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(m, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return min(best, float(res.fun))


def finite_n_optimum(p, q, r: float, n: int, asymptote: float | None = None,
                     table: TypeTable | None = None) -> FiniteNExponent:
    """Exact A_n and the finite-n exponent −(1/n) log₂(1 − ε_n).

    Examples
    --------
    >>> res = finite_n_optimum([0.5, 0.5], [0.5, 0.5], -1.0, 1)
    >>> round(res.A_n, 5)
    0.70711
    """
    p, q = _check_pq(p, q)
    table = table or build_type_table(p, q, n)
    la = log2_optimum(table, r)
    lb = log2_b_values(table, r)
    lb_max = float(np.max(lb))
    k = table.alphabet_size
    slack = k * math.log2(n + 1) / n
    m_min = float(np.min(hinge_values(table, r)))
    bracket = (0.5 * m_min - slack, 0.5 * m_min + slack)
    value = -_log2_one_minus_eps(la) / n + 0.0
    if asymptote is None:
        asymptote = simplex_inf_form(p, q, r)
    a = 2.0 ** la
    eps = math.sqrt(max(0.0, 1.0 - a * a))
    return FiniteNExponent(
        n=n,
        A_n=a,
        log2_A_n=la,
        minus_log_one_minus_eps_over_n=value,
        asymptote=asymptote,
        gap=abs(value - asymptote) if math.isfinite(value) or math.isfinite(asymptote) else 0.0,
        epsilon=eps,
        log2_b_max=lb_max,
        bracket=bracket,
        value_bounds=(2 * bracket[0], 2 * bracket[1] + 1.0 / n),
    )


def convergence_report(p, q, r: float, n_list: Sequence[int], asymptote: float | None = None,
                       check: bool = True) -> list[FiniteNExponent]:
    """Finite-n exponents along ``n_list`` against the asymptotic value.

    With ``check`` set, each n is tested against the type sandwich: the
    finite-n value lies within ``2|X| log₂(n+1)/n + 1/n`` of the hinge minimum
    over types, and that minimum differs from the asymptote only by the mesh
    error, which is reported as part of the allowed gap.
    """
    p, q = _check_pq(p, q)
    if asymptote is None:
        asymptote = simplex_inf_form(p, q, r)
    out = []
    for n in n_list:
        table = build_type_table(p, q, n)
        res = finite_n_optimum(p, q, r, n, asymptote, table)
        if check and math.isfinite(res.minus_log_one_minus_eps_over_n):
            lo, hi = res.value_bounds
            v = res.minus_log_one_minus_eps_over_n
            if not lo - 1e-9 <= v <= hi + 1e-9:
                raise AssertionError(f"n={n}: value {v} outside type sandwich [{lo}, {hi}]")
            mesh = abs(float(np.min(hinge_values(table, r))) - asymptote)
            allowed = mesh + 2 * table.alphabet_size * math.log2(n + 1) / n + 1.0 / n
            if res.gap > allowed + 1e-9:
                raise AssertionError(f"n={n}: gap {res.gap} exceeds {allowed}")
        out.append(res)
    return out


def report_csv(rows: Sequence[FiniteNExponent]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["n", "A_n", "minus_log_one_minus_eps_over_n", "asymptote", "gap"])
    for r in rows:
        w.writerow([r.n, f"{r.A_n:.12g}", f"{r.minus_log_one_minus_eps_over_n:.12g}",
                    f"{r.asymptote:.12g}", f"{r.gap:.12g}"])
    return buf.getvalue()
