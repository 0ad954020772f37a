"""Acceptance criteria, one test each. Every test prints a single PASS/FAIL line."""

import math
import time

import numpy as np

from sc_exponents import divergences as dv
from sc_exponents.entropies import mutual_information_closed
from sc_exponents.exponents import exponent_dmax, exponent_pa
from sc_exponents.method_of_types import convergence_report
from sc_exponents.protocols import (
    DecouplingScheme,
    HashFunction,
    classical_joint_state,
    haar_decoupling_check,
    pa_decay_experiment,
    pa_performance,
)
from sc_exponents.smoothing import BRACKET_TOL, pinching_sandwich, smooth_classical, smooth_quantum
from sc_exponents.states import CQState, random_density
from sc_exponents.verify import (
    chk_alpha_monotone,
    chk_appen1,
    chk_dpi,
    chk_dual1,
    chk_dual2,
    chk_fidelity_re,
    chk_lwd,
    chk_lwdg,
    chk_pinching_inequality,
    chk_sigma_monotone,
    chk_var_dec,
    chk_var_dmax,
    chk_var_pa,
    dec_floor_instance,
    derive_seed,
    pa_floor_instance,
    run_check,
    smoothing_instance,
)
RESULTS: dict[str, str] = {}


def report(number, title, ok, detail, t0, budget):
    wall = time.perf_counter() - t0
    ok = ok and wall < budget
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2} {title}: {detail} ({wall:.1f}s, budget {budget}s)"
    RESULTS[f"{number:02d}"] = line
    print(line)
    assert ok, line


def sweep(checks, trials, tag):
    """Run each named check on ``trials`` seeded instances; return (instances, failures, worst)."""
    bad, worst, count = [], 0.0, 0
    for name, fn in checks.items():
        for i in range(trials):
            sd = derive_seed(0, f"acceptance/{tag}/{name}", i)
            obs, digest = run_check(fn, sd)
            count += 1
            for o in obs:
                worst = max(worst, o.lhs - o.rhs)
                if not o.ok:
                    bad.append(f"{name}:{o.name} seed={sd} lhs={o.lhs:.3g} rhs={o.rhs:.3g}")
    return count, bad, worst


def test_criterion_01_commutative_convergence():
    t0 = time.perf_counter()
    p, q, r = [0.7, 0.3], [0.5, 0.5], 0.05
    sup = exponent_dmax(np.diag(p), np.diag(q), r).supremum
    rows = convergence_report(p, q, r, [50, 100, 200], asymptote=sup)
    gaps = [abs(row.minus_log_one_minus_eps_over_n - sup) for row in rows]
    ok = gaps[2] <= 0.08 and gaps[0] > gaps[1] > gaps[2]
    report(1, "commutative convergence", ok, "gaps " + ", ".join(f"{g:.4f}" for g in gaps), t0, 30)


def test_criterion_02_variational_dualities():
    t0 = time.perf_counter()
    n, bad, worst = sweep({"dmaxvar": chk_var_dmax, "varpa": chk_var_pa, "vardec": chk_var_dec}, 25, "c2")
    report(2, "variational dualities", not bad, f"{n} instances, worst |sup-inf| {worst:.2e}, tol 2e-4", t0, 300)


def test_criterion_03_divergence_properties():
    t0 = time.perf_counter()
    checks = {"alpha-monotone": chk_alpha_monotone, "sigma-monotone": chk_sigma_monotone, "dpi": chk_dpi}
    n, bad, worst = sweep(checks, 200, "c3")
    report(3, "divergence properties", not bad, f"{n} instances, {len(bad)} violations, worst excess {worst:.2e}",
           t0, 120)


def test_criterion_04_duality_relations():
    t0 = time.perf_counter()
    n, bad, worst = sweep({"dual-1": chk_dual1, "dual-2": chk_dual2}, 25, "c4")
    report(4, "duality relations", not bad, f"{n} pure 2x2x2 states, worst deviation {worst:.2e}, tol 2e-4",
           t0, 180)


def test_criterion_05_inequality_lemmas():
    t0 = time.perf_counter()
    checks = {"LWDg": chk_lwdg, "LWD": chk_lwd, "fidelity-re": chk_fidelity_re, "appen1": chk_appen1,
              "pinching-inequality": chk_pinching_inequality}
    n, bad, worst = sweep(checks, 200, "c5")
    report(5, "inequality lemmas", not bad, f"{n} instances, {len(bad)} violations", t0, 180)


def test_criterion_06_smoothing_certification():
    t0 = time.perf_counter()
    brackets, commuting_err, sandwich_bad = [], [], 0
    for i in range(30):
        for commuting in (False, True):
            rng = np.random.default_rng(derive_seed(0, f"acceptance/c6/{commuting}", i))
            rho, sigma, lam, pq = smoothing_instance(rng, commuting=commuting)
            mid = smooth_quantum(rho, sigma, lam, exact_commuting=False)
            if commuting:
                commuting_err.append(abs(mid.epsilon - smooth_classical(*pq, lam).epsilon))
            else:
                brackets.append(mid.bracket)
            lo, hi = pinching_sandwich(rho, sigma, lam)
            if not (lo.epsilon_lower <= mid.epsilon_upper + 1e-6 and mid.epsilon_lower <= hi.epsilon_upper + 1e-6):
                sandwich_bad += 1
    ok = max(brackets) <= BRACKET_TOL and max(commuting_err) <= 1e-6 and sandwich_bad == 0
    detail = (f"max bracket {max(brackets):.1e}, max commuting error {max(commuting_err):.1e}, "
              f"sandwich failures {sandwich_bad}/60")
    report(6, "smoothing certification", ok, detail, t0, 300)


def test_criterion_07_pa_exact_instance():
    t0 = time.perf_counter()
    e = np.ones((1, 1), dtype=complex)
    cq = CQState(np.array([0.5, 0.5]), (e, e))
    theory = exponent_pa(cq, 2.0).supremum
    injective = [-math.log2(pa_performance(cq, HashFunction.injective(n, 2, 2 ** (2 * n))).value) / n
                 for n in (2, 4, 6)]
    rows = pa_decay_experiment(cq, 2.0, [2, 4, 6], strategy="random", k=8, seed=0)
    sampled = min(min(row.rates) for row in rows)
    ok = abs(theory - 1.0) <= 1e-9 and all(abs(v - 1.0) <= 1e-9 for v in injective) and sampled >= 1.0 - 1e-6
    detail = f"theorem {theory:.10f}, injective {[round(v, 10) for v in injective]}, min random {sampled:.10f}"
    report(7, "PA exact exponent", ok, detail, t0, 60)


def test_criterion_08_optimality_floors():
    t0 = time.perf_counter()
    bad = []
    for i in range(50):
        cq, rate, floor = pa_floor_instance(np.random.default_rng(derive_seed(0, "acceptance/c8/pa", i)))
        if rate < floor - 1e-6:
            bad.append(f"pa {i}")
        rng = np.random.default_rng(derive_seed(0, "acceptance/c8/dec", i))
        p, rate, floor = dec_floor_instance(rng)
        half_i = 0.5 * mutual_information_closed(classical_joint_state(p), [8, 8])
        if rate < floor - 1e-6 or not DecouplingScheme.random(8, 2).rate < half_i:
            bad.append(f"dec {i}")
    report(8, "optimality floors", not bad, f"100 instances, {len(bad)} below floor", t0, 600)


def test_criterion_09_haar_decoupling():
    t0 = time.perf_counter()
    phi = np.eye(2, 4).reshape(-1) / math.sqrt(2)
    rep = haar_decoupling_check(phi, (2, 4), 2, samples=500, seed=0)
    detail = f"mean {rep.mean:.4f}, bound {rep.bound:.4f}, 3 SE {3 * rep.std_error:.4f}"
    report(9, "Haar decoupling", rep.mean <= rep.bound + 3 * rep.std_error, detail, t0, 120)


def test_criterion_10_blocking_trend():
    t0 = time.perf_counter()
    better = total = 0
    for i in range(20):
        rng = np.random.default_rng(derive_seed(0, "acceptance/c10", i))
        rho, sigma = random_density(2, seed=rng).entries, random_density(2, seed=rng).entries
        for a in (0.5, 0.7, 0.9):
            exact = dv.sandwiched(rho, sigma, a)
            g1 = abs(dv.pinched_block_sandwiched(rho, sigma, a, 1) - exact)
            g3 = abs(dv.pinched_block_sandwiched(rho, sigma, a, 3) - exact)
            better += g3 < g1
            total += 1
    report(10, "blocking-limit trend", better >= 0.9 * total, f"m=3 closer on {better}/{total}", t0, 120)
