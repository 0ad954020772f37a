"""Finite-n simulators for privacy amplification and decoupling.

Both performance functions are maxima of squared fidelities with a partly
free product state. The free factor enters concavely, so each maximization is
a concave ascent with a duality-gap stopping rule: for concave f with
gradient G at ω, ``max f ≤ f(ω) + λ_max(G) − tr(ωG)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exponents import exponent_pa, sup_over_alpha
from .linalg import (
    ValidationError,
    partial_trace,
    purified_distance,
    root_fidelity,
)
from .states import CQState, random_density, random_pure, random_unitary

MAX_E_QUBITS = 10
MAX_DEC_DIM = 64


# ------------------------------------------------------------ concave ascent


def _psd_sqrt_and_pinv_sqrt(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    top = max(float(w.max(initial=0.0)), 0.0)
    on = w > max(top * 1e-12, 1e-300)
    s = np.sqrt(np.clip(w, 0.0, None))  # no cutoff here: values stay continuous
    si = np.zeros_like(w)
    si[on] = 1.0 / s[on]
    return (v * s) @ v.conj().T, (v * si) @ v.conj().T


@dataclass
class _FidelityTerm:
    """F(ρ_j, L(ω)) with L(ω) = ω ⊗ I placed on subsystem ``slot`` of ``dims``."""

    sqrt_rho: np.ndarray
    dims: tuple[int, ...]
    slot: int

    def lift(self, omega: np.ndarray) -> np.ndarray:
        mats = [omega if k == self.slot else np.eye(d) for k, d in enumerate(self.dims)]
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    def value_grad(self, omega: np.ndarray) -> tuple[float, np.ndarray]:
        a = self.sqrt_rho
        inner = a @ self.lift(omega) @ a
        s, si = _psd_sqrt_and_pinv_sqrt(inner)
        val = float(np.real(np.trace(s)))
        g_full = 0.5 * a @ si @ a
        g = partial_trace(g_full, list(self.dims), [self.slot]) if len(self.dims) > 1 else g_full
        return val, 0.5 * (g + g.conj().T)


@dataclass
class AscentResult:
    value: float  # maximal Σ_j F(ρ_j, L(ω))
    omega: np.ndarray
    gap: float
    iterations: int


def _face_gap(omega: np.ndarray, grad: np.ndarray) -> float:
    # λ_max(G) − tr(ωG) on the face of the state space containing ω; optima
    # with singular ω are non-smooth in the kernel directions
    w, v = np.linalg.eigh(omega)
    b = v[:, w > 1e-10 * max(float(w.max()), 1e-300)]
    top = float(np.max(np.linalg.eigvalsh(b.conj().T @ grad @ b)))
    return top - float(np.real(np.trace(omega @ grad)))


def maximize_fidelity_sum(terms: Sequence[_FidelityTerm], d: int, omega0: np.ndarray | None = None,
                          max_iters: int = 2000, tol: float = 1e-12) -> AscentResult:
    """Maximize ``Σ_j F(ρ_j, L_j(ω))`` over density matrices ω of dimension ``d``.

    Multiplicative ascent ``ω ← GωG / tr(GωG)`` with backtracking toward ω,
    where G is the gradient. For a single block with identity lift this is
    the Bures barycenter fixed point. The reported ``gap`` bounds the
    suboptimality on the face of the state space that contains ω.
    """

    def evaluate(om):
        val, grad = 0.0, np.zeros((d, d), dtype=complex)
        for t in terms:
            v, g = t.value_grad(om)
            val += v
            grad += g
        return val, grad

    omega = np.eye(d, dtype=complex) / d if omega0 is None else np.asarray(omega0, dtype=complex)
    val, grad = evaluate(omega)
    gap = math.inf
    it = 0
    for it in range(1, max_iters + 1):
        gap = _face_gap(omega, grad)
        if gap <= tol * max(1.0, abs(val)):
            break
        prop = grad @ omega @ grad
        prop = 0.5 * (prop + prop.conj().T)
        tr = float(np.real(np.trace(prop)))
        if tr <= 0:
            break
        prop /= tr
        step = 1.0
        improved = False
        while step > 1e-8:
            cand = (1 - step) * omega + step * prop
            cval, cgrad = evaluate(cand)
            if cval > val:
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        done = cval - val <= 1e-15 * max(1.0, abs(val))
        omega, val, grad = cand, cval, cgrad
        if done:
            gap = _face_gap(omega, grad)
            break
    return AscentResult(val, omega, max(gap, 0.0), it)


# ------------------------------------------------------- privacy amplification


@dataclass
class HashFunction:
    n: int
    input_size: int  # |X|
    output_size: int  # |Z|
    table: np.ndarray  # f on X^n (lexicographic) with values in range(|Z|)

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=np.int64)
        if self.table.shape != (self.input_size ** self.n,):
            raise ValidationError(f"table: expected {self.input_size ** self.n} entries, got {self.table.shape}")
        if self.output_size < 1 or np.any(self.table < 0) or np.any(self.table >= self.output_size):
            raise ValidationError("table: values must lie in range(output_size)")

    @classmethod
    def injective(cls, n: int, input_size: int, output_size: int) -> "HashFunction":
        if output_size < input_size ** n:
            raise ValidationError("an injective hash needs |Z| >= |X|^n")
        return cls(n, input_size, output_size, np.arange(input_size ** n))

    @classmethod
    def constant(cls, n: int, input_size: int, output_size: int, value: int = 0) -> "HashFunction":
        return cls(n, input_size, output_size, np.full(input_size ** n, value))

    @classmethod
    def random(cls, n: int, input_size: int, output_size: int, seed=None) -> "HashFunction":
        rng = np.random.default_rng(seed)
        return cls(n, input_size, output_size, rng.integers(0, output_size, input_size ** n))

    def relabel(self, perm: Sequence[int]) -> "HashFunction":
        return HashFunction(self.n, self.input_size, self.output_size, np.asarray(perm)[self.table])


@dataclass
class PAPerformance:
    value: float  # max_ω F²(P_f(ρ^{⊗n}), π_Z ⊗ ω)
    omega: np.ndarray
    gap: float
    purified_distance: float


def _hashed_blocks(cq: CQState, f: HashFunction) -> list[np.ndarray]:
    if f.input_size != cq.alphabet_size:
        raise ValidationError("hash input alphabet does not match the CQ state")
    if f.n * math.log2(cq.dim_e) > MAX_E_QUBITS + 1e-9:
        raise ValidationError(f"environment of {f.n} copies exceeds {MAX_E_QUBITS} qubits")
    big = cq.tensor_power(f.n)
    blocks: dict[int, np.ndarray] = {}
    for x, z in enumerate(f.table):
        if big.probs[x] == 0:
            continue
        term = big.probs[x] * big.cond_states[x]
        blocks[int(z)] = blocks[int(z)] + term if int(z) in blocks else term
    return list(blocks.values())


def pa_performance(cq: CQState, f: HashFunction, check_distance: bool = True) -> PAPerformance:
    """Security parameter ``max_ω F²(P_f(ρ_XE^{⊗n}), π_Z ⊗ ω_E)``.

    Examples
    --------
    >>> from sc_exponents.states import CQState
    >>> cq = CQState([0.5, 0.5], (np.eye(1), np.eye(1)))
    >>> round(pa_performance(cq, HashFunction.injective(2, 2, 16)).value, 12)
    0.25
    """
    blocks = _hashed_blocks(cq, f)
    d = blocks[0].shape[0]
    terms = [_FidelityTerm(_psd_sqrt_and_pinv_sqrt(b)[0], (d,), 0) for b in blocks]
    res = maximize_fidelity_sum(terms, d)
    perf = min(1.0, res.value ** 2 / f.output_size)
    pd = math.sqrt(max(0.0, 1.0 - perf))
    if check_distance and len(blocks) * d <= 256:
        # purified-distance form on the full block-diagonal matrices
        nz = f.output_size
        used = len(blocks)
        full = np.zeros((used * d, used * d), dtype=complex)
        for i, b in enumerate(blocks):
            full[i * d:(i + 1) * d, i * d:(i + 1) * d] = b
        # the unused outputs contribute zero fidelity; fold them into the trace of the reference
        ref = np.kron(np.eye(used), res.omega) / nz
        pd_direct = purified_distance(full, ref) if used == nz else math.sqrt(
            max(0.0, 1.0 - root_fidelity(full, ref) ** 2))
        # compared squared: the square root is ill-conditioned next to F = 1
        if abs(pd_direct ** 2 - pd ** 2) > 1e-9:
            raise AssertionError(f"purified-distance form {pd_direct} != sqrt(1 - F^2) = {pd}")
    return PAPerformance(perf, res.omega, res.gap, pd)


@dataclass
class DecayRow:
    n: int
    output_size: int
    floor: float
    rates: list[float]
    best_rate: float
    gap_to_floor: float


def _rate(perf: float, n: int) -> float:
    return math.inf if perf <= 0 else -math.log2(perf) / n + 0.0


def pa_decay_experiment(cq: CQState, r: float, n_list: Sequence[int], strategy: str = "random",
                        k: int = 32, seed: int = 0, floor: float | None = None,
                        slack: float = 1e-6) -> list[DecayRow]:
    """Sample hash functions at rate ``r`` and record −(1/n) log₂ of the performance.

    ``strategy="random"`` keeps every sample; ``"best-of-k"`` keeps the best of
    ``k``. Every recorded rate must be at least the exponent at ``r`` minus
    ``slack``; a violation raises ``AssertionError``.
    """
    if strategy not in ("random", "best-of-k"):
        raise ValidationError(f"unknown strategy {strategy!r}")
    if floor is None:
        floor = exponent_pa(cq, r, grid=64).supremum
    rng = np.random.default_rng(seed)
    rows = []
    for n in n_list:
        nz = max(1, math.ceil(2.0 ** (n * r) - 1e-9))
        rates = []
        for _ in range(k):
            f = HashFunction.random(n, cq.alphabet_size, nz, rng)
            rates.append(_rate(pa_performance(cq, f, check_distance=False).value, n))
        for v in rates:
            if v < floor - slack:
                raise AssertionError(f"n={n}: observed rate {v} below the optimality floor {floor}")
        best = min(rates)
        kept = rates if strategy == "random" else [best]
        rows.append(DecayRow(n, nz, floor, kept, best, best - floor))
    return rows


def pa_half_entropy_check(cq: CQState, f: HashFunction) -> tuple[float, float]:
    """``(performance, 2^{H*_{1/2}(Z|E) − log|Z|})`` for the hashed state, which agree."""
    from .entropies import conditional_entropy

    blocks = _hashed_blocks(cq, f)
    d = blocks[0].shape[0]
    nz = len(blocks)
    full = np.zeros((nz * d, nz * d), dtype=complex)
    for i, b in enumerate(blocks):
        full[i * d:(i + 1) * d, i * d:(i + 1) * d] = b
    h = conditional_entropy("sandwiched", 0.5, full, [nz, d]).value
    return pa_performance(cq, f).value, 2.0 ** (h - math.log2(f.output_size))


# ------------------------------------------------------------------ decoupling


@dataclass
class DecouplingScheme:
    unitary: np.ndarray  # on A ⊗ A′, output ordered Ā ⊗ Ã
    dim_bar: int
    dim_tilde: int
    catalyst: np.ndarray = field(default_factory=lambda: np.eye(1, dtype=complex))

    def __post_init__(self):
        self.unitary = np.asarray(self.unitary, dtype=complex)
        self.catalyst = np.asarray(self.catalyst, dtype=complex)
        n = self.unitary.shape[0]
        if self.unitary.shape != (n, n):
            raise ValidationError("unitary must be square")
        if float(np.max(np.abs(self.unitary.conj().T @ self.unitary - np.eye(n)))) > 1e-10:
            raise ValidationError("unitary is not unitary within 1e-10")
        if self.dim_bar * self.dim_tilde != n:
            raise ValidationError(f"|Ā|·|Ã| = {self.dim_bar * self.dim_tilde} != |A|·|A′| = {n}")

    @property
    def dim_catalyst(self) -> int:
        return self.catalyst.shape[0]

    @property
    def rate(self) -> float:
        return math.log2(self.dim_tilde)

    @classmethod
    def random(cls, dim_a: int, dim_tilde: int, seed=None, catalyst=None) -> "DecouplingScheme":
        cat = np.eye(1, dtype=complex) if catalyst is None else np.asarray(catalyst, dtype=complex)
        n = dim_a * cat.shape[0]
        if n % dim_tilde:
            raise ValidationError("|Ã| must divide |A|·|A′|")
        return cls(random_unitary(n, seed), n // dim_tilde, dim_tilde, cat)


def decoupled_state(rho_ra: np.ndarray, dims: Sequence[int], scheme: DecouplingScheme) -> np.ndarray:
    """``tr_Ã[U (ρ_RA ⊗ σ_A′) U†]`` on R ⊗ Ā."""
    d_r, d_a = dims
    if d_a * scheme.dim_catalyst != scheme.unitary.shape[0]:
        raise ValidationError("scheme does not act on A ⊗ A′")
    big = np.kron(rho_ra, scheme.catalyst)
    u = np.kron(np.eye(d_r), scheme.unitary)
    out = u @ big @ u.conj().T
    return partial_trace(out, [d_r, scheme.dim_bar, scheme.dim_tilde], [0, 1])


@dataclass
class DecPerformance:
    value: float
    omega_r: np.ndarray
    omega_bar: np.ndarray
    start_values: list[float]


def max_product_fidelity(rho: np.ndarray, dims: Sequence[int], multistart: int = 8, seed: int = 0,
                         rounds: int = 300, tol: float = 1e-12) -> DecPerformance:
    """``max_{ω_1, ω_2} F²(ρ, ω_1 ⊗ ω_2)`` by alternating concave maximization."""
    d1, d2 = dims
    rng = np.random.default_rng(seed)
    rho = np.asarray(rho, dtype=complex)
    starts = [partial_trace(rho, [d1, d2], [1]), random_density(d2, seed=rng).entries]
    while len(starts) < multistart:
        v = random_pure(d2, seed=rng)
        starts.append(np.outer(v, v.conj()))
    best = None
    values = []
    for w2 in starts[:multistart]:
        val = -math.inf
        w1 = None
        for _ in range(rounds):
            s2 = _psd_sqrt_and_pinv_sqrt(w2)[0]
            conj = np.kron(np.eye(d1), s2)
            t1 = _FidelityTerm(_psd_sqrt_and_pinv_sqrt(conj @ rho @ conj)[0], (d1, d2), 0)
            w1 = maximize_fidelity_sum([t1], d1, w1).omega
            s1 = _psd_sqrt_and_pinv_sqrt(w1)[0]
            conj = np.kron(s1, np.eye(d2))
            t2 = _FidelityTerm(_psd_sqrt_and_pinv_sqrt(conj @ rho @ conj)[0], (d1, d2), 1)
            res = maximize_fidelity_sum([t2], d2, w2)
            w2 = res.omega
            new = res.value
            if new - val <= tol:
                val = max(val, new)
                break
            val = new
        f2 = root_fidelity(rho, np.kron(w1, w2)) ** 2
        values.append(f2)
        if best is None or f2 > best[0]:
            best = (f2, w1, w2)
    return DecPerformance(min(1.0, best[0]), best[1], best[2], values)


def dec_performance(rho_ra, scheme: DecouplingScheme, dims: Sequence[int] | None = None,
                    multistart: int = 8, seed: int = 0) -> DecPerformance:
    """``max_{ω_R, ω_Ā} F²(tr_Ã[U(ρ_RA ⊗ σ_A′)U†], ω_R ⊗ ω_Ā)``."""
    rho_ra = np.asarray(getattr(rho_ra, "entries", rho_ra), dtype=complex)
    if dims is None:
        d = int(round(math.sqrt(rho_ra.shape[0])))
        dims = (d, d)
    d_r = dims[0]
    total = d_r * scheme.unitary.shape[0]
    if total > MAX_DEC_DIM:
        raise ValidationError(f"total dimension {total} exceeds {MAX_DEC_DIM}")
    out = decoupled_state(rho_ra, dims, scheme)
    return max_product_fidelity(out, (d_r, scheme.dim_bar), multistart, seed)


# ----------------------------------------------- classical mutual information


def classical_mutual_information(p_xy: np.ndarray, alpha: float, starts: int = 4, iters: int = 2000,
                                 tol: float = 1e-13, seed: int = 0) -> float:
    """``min_{q_X, q_Y} D_α(p_XY ‖ q_X ⊗ q_Y)`` for a joint distribution, α ∈ (0, 1).

    Alternates the exact Sibson minimizations over one marginal with the
    other fixed. For classical states all Rényi variants coincide.
    """
    p = np.asarray(p_xy, dtype=float)
    if abs(alpha - 1) < 1e-12:
        px, py = p.sum(1), p.sum(0)
        m = p > 0
        return float(np.sum(p[m] * np.log2(p[m] / np.outer(px, py)[m])))
    rng = np.random.default_rng(seed)
    pa = p ** alpha

    def sibson_y(qx):
        w = (pa.T @ qx ** (1 - alpha)) ** (1 / alpha)
        return w / w.sum()

    def sibson_x(qy):
        w = (pa @ qy ** (1 - alpha)) ** (1 / alpha)
        return w / w.sum()

    def value(qx, qy):
        return math.log2(float(qx ** (1 - alpha) @ pa @ qy ** (1 - alpha))) / (alpha - 1)

    best = math.inf
    inits = [p.sum(1)] + [rng.dirichlet(np.ones(p.shape[0])) for _ in range(starts - 1)]
    for qx in inits:
        qy = sibson_y(qx)
        val = value(qx, qy)
        for _ in range(iters):
            qx = sibson_x(qy)
            qy = sibson_y(qx)
            new = value(qx, qy)
            if val - new < tol:
                val = min(val, new)
                break
            val = new
        best = min(best, val)
    return best


def classical_dec_floor(p_xy: np.ndarray, rate: float, grid: int = 64) -> float:
    """``sup_{½≤α≤1} (1−α)/α (I_α(X:Y) − 2 rate)`` for a classical joint distribution."""
    i1 = classical_mutual_information(p_xy, 1.0)
    curve = sup_over_alpha(lambda a: classical_mutual_information(p_xy, a), 1.0, 2 * rate, grid, True,
                           0.0, i1, label="classical decoupling floor")
    return curve.supremum


def classical_joint_state(p_xy: np.ndarray) -> np.ndarray:
    """Diagonal ρ_RA for a joint distribution p(x, y)."""
    return np.diag(np.asarray(p_xy, dtype=float).ravel()).astype(complex)


# --------------------------------------------------------- Haar decoupling


@dataclass
class HaarReport:
    samples: int
    mean: float
    std_error: float
    bound: float
    holds: bool


def haar_decoupling_check(psi_ra: np.ndarray, dims: Sequence[int], dim_tilde: int, samples: int = 500,
                          seed: int = 0) -> HaarReport:
    """Haar average of ``‖σ_RĀ(U) − ψ_R ⊗ σ_Ā(U)‖₁²`` against
    ``(|R||A|/|Ã|²)(tr ψ_RA² + tr ψ_R² tr ψ_A²)``.

    ``psi_ra`` is a state vector or density matrix on R ⊗ A, ``dims = (|R|, |A|)``.
    """
    if samples < 100:
        raise ValidationError("haar_decoupling_check needs at least 100 samples")
    d_r, d_a = dims
    if d_a % dim_tilde:
        raise ValidationError("|Ã| must divide |A|")
    if d_a > 16 or d_r > 4:
        raise ValidationError("dimension limits |A| <= 16, |R| <= 4 exceeded")
    psi = np.asarray(psi_ra, dtype=complex)
    rho = np.outer(psi, psi.conj()) if psi.ndim == 1 else psi
    rho_r = partial_trace(rho, [d_r, d_a], [0])
    rho_a = partial_trace(rho, [d_r, d_a], [1])
    purity = lambda m: float(np.real(np.trace(m @ m)))
    bound = d_r * d_a / dim_tilde ** 2 * (purity(rho) + purity(rho_r) * purity(rho_a))
    d_bar = d_a // dim_tilde
    rng = np.random.default_rng(seed)
    vals = np.empty(samples)
    for i in range(samples):
        u = np.kron(np.eye(d_r), random_unitary(d_a, rng))
        out = partial_trace(u @ rho @ u.conj().T, [d_r, d_bar, dim_tilde], [0, 1])
        sig_bar = partial_trace(out, [d_r, d_bar], [1])
        diff = out - np.kron(rho_r, sig_bar)
        vals[i] = float(np.sum(np.abs(np.linalg.eigvalsh(diff)))) ** 2
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples))
    return HaarReport(samples, mean, se, bound, mean <= bound + 3 * se)
