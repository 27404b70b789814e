"""Command-line harness: ``symtc {complete,phase,convergence,spectral,max3lin,generate}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import experiments as ex
from . import max3lin
from .errors import CompletionError, ParseError
from .pipeline import CompletionConfig, complete, sampling_probability
from .sampling import sample_bernoulli
from .tensor_core import (
    generate_orthogonal_model,
    read_model,
    read_tensor,
    rmse,
    write_model,
    write_tensor,
)

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _emit(args, config: dict, rows: list, fields=None):
    """Write rows as CSV or JSON, preceded by the effective config as a comment line."""
    buf = io.StringIO()
    if args.format == "json":
        json.dump({"config": config, "rows": rows}, buf, indent=1, default=float)
        buf.write("\n")
    else:
        buf.write("# " + json.dumps(config, default=str) + "\n")
        if rows:
            w = csv.DictWriter(buf, fieldnames=fields or list(rows[0]), lineterminator="\n",
                               extrasaction="ignore")
            w.writeheader()
            w.writerows(rows)
    _write(args.out, buf.getvalue())


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_complete(args) -> int:
    omega = read_tensor(args.tensor)
    if omega.nnz == 0:
        print("error: tensor file has no entries", file=sys.stderr)
        return EXIT_ERROR
    truth = read_model(args.truth) if args.truth else None
    cfg = CompletionConfig(
        rank=args.rank, outer_iters=args.tau, p=args.p, mu=args.mu, seed=args.seed,
        epsilon=args.epsilon, sample_mode=args.sample_mode,
        rtpm_trials=args.rtpm_trials, rtpm_iters=args.rtpm_iters,
    )
    res = complete(omega, cfg, truth)
    if res.model is None:
        print(f"error: {res.error}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    _write(args.out, res.model.to_json() + "\n")
    if args.trace:
        _write(args.trace, res.trace.to_csv())
    summary = {"fit_error": res.final_fit, "iterations": len(res.trace) - 1}
    if truth is not None:
        summary["rmse"] = rmse(res.model, truth)
    print(json.dumps(summary), file=sys.stderr)
    return EXIT_OK if res.final_fit <= args.threshold else EXIT_NOT_CONVERGED


def cmd_generate(args) -> int:
    truth = generate_orthogonal_model(args.n, args.rank, None, args.seed)
    p = args.p if args.p is not None else sampling_probability(args.alpha, args.n, args.rank)
    omega = sample_bernoulli(truth, min(p, 1.0), args.seed + 1)
    write_tensor(omega, args.tensor)
    write_model(truth, args.truth)
    print(json.dumps({"n": args.n, "r": args.rank, "p": min(p, 1.0), "nnz": omega.nnz}))
    return EXIT_OK


def cmd_phase(args) -> int:
    alphas = _floats(args.alphas) if args.alphas else ex.alpha_grid(*args.alpha_range)
    cfg = ex.PhaseSweepConfig(
        n_list=_ints(args.n), r_list=_ints(args.r), rho_list=_floats(args.rho),
        alphas=tuple(alphas), trials=args.trials, threshold=args.threshold, seed=args.seed,
        sample_mode=args.sample_mode, outer_iters=args.tau,
        rtpm_trials=args.rtpm_trials, rtpm_iters=args.rtpm_iters,
    )
    rows = ex.phase_sweep(cfg, threads=args.threads)
    _emit(args, ex.config_dict(cfg), rows,
          ["n", "r", "rho", "alpha", "p", "recovery_rate", "trials", "clamped"])
    return EXIT_OK


def cmd_convergence(args) -> int:
    res, truth = ex.convergence_run(args.n, args.r, args.alpha, args.seed, args.tau,
                                    args.epsilon, init_truth=args.init_truth,
                                    sample_mode=args.sample_mode)
    config = {"n": args.n, "r": args.r, "alpha": args.alpha, "seed": args.seed,
              "tau": args.tau, "epsilon": args.epsilon, "init_truth": args.init_truth}
    tr = res.trace
    rows = [
        {"iter": i, "fit_error": f, "rmse": e, "d_infinity": d, "seconds": s}
        for i, f, e, d, s in zip(tr.iters, tr.fit_error, tr.rmse, tr.d_infinity, tr.seconds)
    ]
    _emit(args, config, rows, ["iter", "fit_error", "rmse", "d_infinity", "seconds"])
    final = res.final_rmse
    return EXIT_OK if final is not None and final < ex.RECOVERY_THRESHOLD else EXIT_NOT_CONVERGED


def cmd_spectral(args) -> int:
    rows = ex.spectral_study(args.n, _floats(args.alphas), args.seeds, args.seed,
                             args.restarts, args.iters, args.r, args.threads)
    config = {"n": args.n, "r": args.r, "alphas": _floats(args.alphas), "seeds": args.seeds,
              "seed": args.seed, "restarts": args.restarts, "iters": args.iters}
    _emit(args, config, rows, ["n", "p", "alpha", "ratio", "seed"])
    return EXIT_OK


def cmd_max3lin(args) -> int:
    if args.mode == "counterexample":
        report = max3lin.counterexample_report()
        _write(args.out, json.dumps(report) + "\n")
        return EXIT_OK
    if args.p is not None:
        p = args.p
    else:
        p = args.alpha * math.log(args.n) / args.n**1.5
    p = min(p, 1.0)
    config = {"n": args.n, "p": p, "seed": args.seed, "trials": args.trials, "mode": args.mode}
    rows = []
    for t in range(args.trials):
        seed = args.seed + t
        inst = max3lin.generate_planted(args.n, p, seed)
        row = {"seed": seed, "m": inst.m}
        if args.mode == "solve":
            if inst.m == 0:
                row.update(success=False, satisfied=0)
            else:
                res = max3lin.solve_as_completion(inst, seed=seed)
                row.update(success=res.success, satisfied=res.satisfied,
                           planted=bool(res.assignment is not None
                                        and np.array_equal(res.assignment, inst.planted)))
        else:
            connected = max3lin.propagation_connected(inst)[0] if inst.m else False
            row["propagation_connected"] = connected
            if args.n <= max3lin.BRUTE_FORCE_LIMIT:
                sols = max3lin.brute_force_solutions(inst)
                row["solution_count"] = len(sols)
                row["planted_found"] = any(np.array_equal(s, inst.planted) for s in sols)
        rows.append(row)
    report = {"config": config, "rows": rows}
    if args.mode == "solve":
        report["success_rate"] = sum(r["success"] for r in rows) / len(rows)
    _write(args.out, json.dumps(report) + "\n")
    return EXIT_OK


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1, help="worker processes for trials")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_rtpm(p):
    p.add_argument("--rtpm-trials", type=int, default=None, help="power-method starts per component")
    p.add_argument("--rtpm-iters", type=int, default=None, help="power steps per start")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symtc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complete", help="complete a tensor file")
    p.add_argument("tensor")
    p.add_argument("--rank", "-r", type=int, required=True)
    p.add_argument("--tau", type=int, default=100, help="outer iterations")
    p.add_argument("--p", type=float, default=None, help="sampling rate (default: observed fraction)")
    p.add_argument("--mu", type=float, default=None, help="clipping level (default: no clipping)")
    p.add_argument("--truth", default=None, help="factor-model JSON to score against")
    p.add_argument("--trace", default=None, help="write the convergence trace CSV here")
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--threshold", type=float, default=1e-9, help="fit error counted as converged")
    p.add_argument("--sample-mode", choices=("reuse", "split"), default="reuse")
    _add_common(p)
    _add_rtpm(p)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("generate", help="write a random sampled instance and its truth")
    p.add_argument("tensor")
    p.add_argument("truth")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--rank", "-r", type=int, default=3)
    p.add_argument("--alpha", type=float, default=8.0)
    p.add_argument("--p", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("phase", help="recovery rate against alpha")
    p.add_argument("--n", default="50", help="comma-separated dimensions")
    p.add_argument("--r", default="3", help="comma-separated ranks")
    p.add_argument("--rho", default="0", help="comma-separated factor correlations")
    p.add_argument("--alphas", default=None, help="explicit comma-separated alpha grid")
    p.add_argument("--alpha-range", nargs=3, type=float, default=(1.0, 12.0, 12),
                   metavar=("MIN", "MAX", "STEPS"))
    p.add_argument("--trials", type=int, default=40)
    p.add_argument("--threshold", type=float, default=ex.RECOVERY_THRESHOLD)
    p.add_argument("--tau", type=int, default=100)
    p.add_argument("--sample-mode", choices=("reuse", "split"), default="reuse")
    _add_common(p)
    _add_rtpm(p)
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("convergence", help="per-iteration trace of one run")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--alpha", type=float, default=12.0)
    p.add_argument("--tau", type=int, default=200)
    p.add_argument("--epsilon", type=float, default=1e-15)
    p.add_argument("--sample-mode", choices=("reuse", "split"), default="reuse")
    p.add_argument("--init-truth", action="store_true", help="start from the truth (debug)")
    _add_common(p)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("spectral", help="centered operator-norm ratio against alpha")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--alphas", default="16,64,256")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--iters", type=int, default=50)
    _add_common(p)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("max3lin", help="planted MAX-3LIN experiments")
    p.add_argument("--mode", choices=("solve", "audit", "counterexample"), default="solve")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--alpha", type=float, default=40.0, help="p = alpha ln n / n^1.5")
    p.add_argument("--trials", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_max3lin)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (CompletionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
