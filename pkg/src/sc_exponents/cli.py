"""Command line entry point ``sc-exponents``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .linalg import ValidationError

DIGITS = 12


def fmt(x) -> str:
    return f"{float(x):.{DIGITS}g}"


def clean(obj):
    """Round floats to 12 significant digits and make the object JSON-safe."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
        return float(fmt(x)) + 0.0
    if isinstance(obj, complex):
        return {"re": clean(obj.real), "im": clean(obj.imag)}
    return obj


def emit(payload: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    payload = clean(payload)
    if as_json:
        out.write(json.dumps(payload, sort_keys=False) + "\n")
        return
    for k, v in payload.items():
        out.write(f"{k}: {json.dumps(v) if isinstance(v, (list, dict)) else v}\n")


def write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ValidationError(f"{path}: cannot write ({exc.strerror})") from None


def floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def curve_csv(curve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "payoff", "weighted_value"])
    for a, p, v in curve.rows():
        w.writerow([fmt(a), fmt(p), fmt(v)])
    w.writerow(["supremum", fmt(curve.supremum), fmt(curve.argmax_alpha)])
    return buf.getvalue()


# ------------------------------------------------------------- subcommands


def cmd_divergence(args) -> int:
    from .divergences import DivergenceSpec, divergence
    from .states import load_state

    rho, sigma = load_state(args.rho), load_state(args.sigma)
    spec = DivergenceSpec(args.kind, args.alpha, args.eps)
    emit(divergence(spec, rho.entries, sigma.entries).as_dict(), args.json)
    return 0


def cmd_entropy(args) -> int:
    from .entropies import conditional_entropy, mutual_information, regularized_mutual_information_estimate
    from .states import load_state

    st = load_state(args.state)
    if len(st.dims) != 2:
        raise ValidationError(f"{args.state}.dims: expected two subsystems")
    if args.what == "cond":
        res = conditional_entropy(args.kind, args.alpha, st.entries, st.dims).as_dict()
    elif args.what == "mi":
        res = mutual_information(args.kind, args.alpha, st.entries, st.dims).as_dict()
    elif args.what == "mi-bar":
        res = mutual_information(args.kind, args.alpha, st.entries, st.dims, variant="fixed-marginal").as_dict()
    else:
        vals = regularized_mutual_information_estimate(st.entries, args.alpha, args.block, st.dims, kind=args.kind)
        res = {"block_values": vals}
    res = {k: v for k, v in res.items() if k not in ("optimizer_states", "coords")}
    emit({"what": args.what, **res}, args.json)
    return 0


def cmd_exponent(args) -> int:
    from .exponents import exponent_dec, exponent_dmax, exponent_pa
    from .states import load_cq, load_state

    if args.task == "dmax":
        if not args.sigma:
            raise ValidationError("exponent --task dmax requires --sigma")
        curve = exponent_dmax(load_state(args.state).entries, load_state(args.sigma).entries, args.rate,
                              grid=args.grid)
    elif args.task == "pa":
        curve = exponent_pa(load_cq(args.state), args.rate, grid=args.grid)
    else:
        st = load_state(args.state)
        curve = exponent_dec(st.entries, args.rate, block=args.block, dims=st.dims, grid=args.grid)
    if args.emit:
        write_text(args.emit, curve_csv(curve))
    emit({"task": args.task, "rate": args.rate, "supremum": curve.supremum, "argmax_alpha": curve.argmax_alpha,
          "local_maxima": curve.local_maxima, "warnings": curve.warnings}, args.json)
    return 0


def cmd_smooth(args) -> int:
    from .smoothing import smooth_classical, smooth_quantum
    from .states import load_state

    rho, sigma = load_state(args.rho).entries, load_state(args.sigma).entries
    if args.classical:
        off = max(np.max(np.abs(rho - np.diag(np.diag(rho)))), np.max(np.abs(sigma - np.diag(np.diag(sigma)))))
        if off > 1e-12:
            raise ValidationError("--classical needs diagonal rho and sigma")
        res = smooth_classical(np.real(np.diag(rho)), np.real(np.diag(sigma)), args.lam)
    else:
        res = smooth_quantum(rho, sigma, args.lam, seed=args.seed)
    emit(res.as_dict(), args.json)
    return 0


def cmd_types_sim(args) -> int:
    from .method_of_types import convergence_report, report_csv

    rows = convergence_report(args.p, args.q, args.rate, args.n)
    if args.emit:
        write_text(args.emit, report_csv(rows))
    emit({"asymptote": rows[0].asymptote if rows else None, "rows": [r.as_dict() for r in rows]}, args.json)
    return 0


def cmd_pa_sim(args) -> int:
    from .protocols import pa_decay_experiment
    from .states import load_cq

    rows = pa_decay_experiment(load_cq(args.state), args.rate, args.n, strategy=args.strategy, k=args.k,
                               seed=args.seed)
    emit({"rate": args.rate, "rows": [r.__dict__ for r in rows]}, args.json)
    return 0


def cmd_dec_sim(args) -> int:
    from .protocols import DecouplingScheme, dec_performance, haar_decoupling_check
    from .states import load_state

    st = load_state(args.state)
    if len(st.dims) != 2:
        raise ValidationError(f"{args.state}.dims: expected (|R|, |A|)")
    d_r, d_a = st.dims
    dim_tilde = 2 ** args.discard_qubits
    if d_a % dim_tilde:
        raise ValidationError(f"cannot discard {args.discard_qubits} qubits from |A| = {d_a}")
    if args.scheme == "haar-check":
        rep = haar_decoupling_check(st.entries, (d_r, d_a), dim_tilde, samples=args.samples, seed=args.seed)
        emit(rep.__dict__, args.json)
        return 0 if rep.holds else 1
    rng = np.random.default_rng(args.seed)
    rates = []
    for _ in range(args.samples):
        sch = DecouplingScheme.random(d_a, dim_tilde, seed=rng)
        perf = dec_performance(st.entries, sch, (d_r, d_a), seed=int(rng.integers(2 ** 31))).value
        rates.append(math.inf if perf <= 0 else -math.log2(perf))
    emit({"rate": math.log2(dim_tilde), "samples": args.samples, "min_decay": min(rates),
          "mean_decay": float(np.mean(rates)), "max_decay": max(rates)}, args.json)
    return 0


def _without_timing(d: dict) -> dict:
    # wall time varies between runs; keep stdout byte-identical
    d = {k: v for k, v in d.items() if k != "wall_time"}
    d["children"] = [_without_timing(c) for c in d["children"]]
    return d


def cmd_verify(args) -> int:
    from .verify import run_suite

    rep = run_suite(args.suite, args.trials, seed=args.seed, tol_scale=args.tol_scale, threads=args.threads)
    if args.json:
        sys.stdout.write(json.dumps(clean(_without_timing(rep.as_dict()))) + "\n")
    else:
        for child in rep.children or [rep]:
            status = "ok" if child.ok else f"{len(child.failures)} failures"
            sys.stdout.write(f"{child.name}: {child.instances} instances, {status}\n")
        for f in rep.failures:
            sys.stdout.write(f"  FAIL {f.check} seed={f.seed} digest={f.inputs_digest} "
                             f"observed={fmt(f.observed)} bound={fmt(f.bound)} tol={fmt(f.tolerance)}\n")
    return 0 if rep.ok else 1


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommands accept the same flags without overriding earlier values
        g = argparse.ArgumentParser(add_help=False)
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("--seed", type=int, default=d(0))
        g.add_argument("--tol-scale", type=float, default=d(1.0))
        g.add_argument("--threads", type=int, default=d(1))
        g.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")
        return g

    common = global_flags(True)
    ap = argparse.ArgumentParser(prog="sc-exponents", parents=[global_flags(False)],
                                 description="Rényi divergences, strong converse exponents and protocol simulators")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("divergence", parents=[common])
    p.add_argument("--kind", required=True, choices=["umegaki", "petz", "sandwiched", "log-euclidean", "max"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--eps", type=float, default=0.0, help="smoothing parameter for --kind max")
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("entropy", parents=[common])
    p.add_argument("--kind", default="sandwiched", choices=["umegaki", "petz", "sandwiched", "log-euclidean"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--state", required=True)
    p.add_argument("--what", default="cond", choices=["cond", "mi", "mi-bar", "mi-reg"])
    p.add_argument("--block", type=int, default=2, help="largest block for mi-reg")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("exponent", parents=[common])
    p.add_argument("--task", required=True, choices=["dmax", "pa", "dec"])
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--sigma")
    p.add_argument("--block", type=int, default=1, choices=[1, 2])
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--emit", help="write the α-curve as CSV")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("smooth", parents=[common])
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--classical", action="store_true")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("types-sim", parents=[common])
    p.add_argument("--p", type=floats, required=True)
    p.add_argument("--q", type=floats, required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--n", type=ints, required=True)
    p.add_argument("--emit")
    p.set_defaults(func=cmd_types_sim)

    p = sub.add_parser("pa-sim", parents=[common])
    p.add_argument("--state", required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--n", type=ints, required=True)
    p.add_argument("--strategy", default="random", choices=["random", "best-of-k"])
    p.add_argument("--k", type=int, default=32)
    p.set_defaults(func=cmd_pa_sim)

    p = sub.add_parser("dec-sim", parents=[common])
    p.add_argument("--state", required=True)
    p.add_argument("--scheme", default="random", choices=["random", "haar-check"])
    p.add_argument("--discard-qubits", type=int, default=1)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_dec_sim)

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("suite", choices=["divergence-props", "entropy-props", "duality", "variational", "smoothing",
                                     "types", "protocols", "all"])
    p.add_argument("trials", type=int)
    p.add_argument("seed_pos", type=int, nargs="?", help="seed (same as --seed)")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "seed_pos", None) is not None:
        args.seed = args.seed_pos
    env = os.environ.get("RENYI_THREADS")
    if env:
        try:
            args.threads = int(env)
        except ValueError:
            ap.error(f"RENYI_THREADS must be an integer, got {env!r}")
    if args.command == "verify" and args.trials < 1:
        ap.error("trials must be at least 1")
    if args.threads < 1:
        ap.error("--threads must be at least 1")
    try:
        return args.func(args)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
