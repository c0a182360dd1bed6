"""Command-line interface: solve, minimize, fluctuation, convergence, verify."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .capacity import p_capacity, relative_capacity
from .experiments import (
    Ledger,
    run_convergence,
    run_fluctuation,
    write_convergence_csv,
    write_fluctuation_csv,
)
from .io import FormatError, read_config, read_set_file, write_function_file, write_set_file
from .lattice import LatticeError
from .optimize import Objective, minimize
from .verification import run_suite

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2


def _load_config(path) -> dict:
    if path is None:
        return {}
    return read_config(path)


def _result_payload(res) -> dict:
    return {
        "value": res.value,
        "rawValue": res.raw_value,
        "residual": res.residual,
        "iterations": res.iterations,
        "truncationRadius": res.truncation_radius,
        "correctedValue": res.corrected_value,
    }


def cmd_solve(args) -> int:
    cfg = _load_config(args.config)
    X = read_set_file(args.set)
    if args.mode == "relative":
        if args.R is None:
            print("solve: relative mode needs --R", file=sys.stderr)
            return EXIT_PARSE
        res = relative_capacity(X, args.R, tol=cfg.get("tolerance", 1e-12))
    else:
        res = p_capacity(
            X, args.p,
            truncation=args.truncation,
            c_t=cfg.get("truncation_factor", 4.0),
            max_sweeps=cfg.get("max_sweeps", 400),
        )
    payload = _result_payload(res)
    payload["N"] = len(X)
    payload["d"] = X.dim
    payload["mode"] = args.mode
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.dump_potential:
        write_function_file(res.potential, args.dump_potential)
    return EXIT_OK


def cmd_minimize(args) -> int:
    cfg = _load_config(args.config)
    objective = Objective(kind=args.objective, p=args.p, R=args.R,
                          truncation=args.truncation,
                          max_sweeps=cfg.get("max_sweeps", 400))
    best = None
    for rep in range(args.restarts):
        state = minimize(args.N, objective, d=args.dim, seed=args.seed + rep,
                         max_sweeps=cfg.get("sweeps", 10),
                         exchange_batch=cfg.get("exchange_batch", 50))
        if best is None or state.best_value < best.best_value:
            best = state
    payload = {
        "N": args.N,
        "d": args.dim,
        "objective": args.objective,
        "value": best.best_value,
        "seed": args.seed,
        "restarts": args.restarts,
        "evaluations": best.evaluations,
        "budgetExhausted": best.budget_exhausted,
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        write_set_file(best.best_set, args.out)
        Path(str(args.out) + ".json").write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_fluctuation(args) -> int:
    cfg = _load_config(args.config)
    if args.N != sorted(args.N):
        print("fluctuation: N list must be nondecreasing", file=sys.stderr)
        return EXIT_PARSE
    objective = Objective(kind="p_cap", p=args.p)
    ledger = Ledger(args.ledger)
    records = run_fluctuation(
        args.N, objective, d=args.dim, restarts=args.restarts,
        seed=args.seed, ledger=ledger,
        truncation_factor=cfg.get("truncation_factor", 3.0),
        max_sweeps=cfg.get("sweeps", 6),
        exchange_batch=cfg.get("exchange_batch", 30),
    )
    if args.out:
        write_fluctuation_csv(records, args.out)
    else:
        for r in records:
            print(json.dumps(asdict(r)))
    return EXIT_OK


def cmd_convergence(args) -> int:
    cfg = _load_config(args.config)
    records = run_convergence(
        args.p, args.dim, args.k,
        truncation_factor=cfg.get("truncation_factor", 4.0),
        max_sweeps=cfg.get("max_sweeps", 400),
    )
    if args.out:
        write_convergence_csv(records, args.out)
    else:
        for r in records:
            print(json.dumps(asdict(r)))
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, seed=args.seed, trials=args.trials)
    text = json.dumps(report.to_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK if report.passed else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="isocap",
        description="Discrete capacities, rearrangements and shape optimization "
                    "on the integer lattice.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="capacity of a set from a set file")
    sp.add_argument("--set", required=True, help="set file (header 'd N')")
    sp.add_argument("--mode", choices=["p", "relative"], default="p")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--R", type=float, default=None)
    sp.add_argument("--truncation", type=float, default=None)
    sp.add_argument("--out", default=None)
    sp.add_argument("--dump-potential", default=None)
    sp.add_argument("--config", default=None)
    sp.set_defaults(func=cmd_solve)

    mp = sub.add_parser("minimize", help="search for a minimizing set")
    mp.add_argument("--N", type=int, required=True)
    mp.add_argument("--dim", type=int, default=3)
    mp.add_argument("--objective", choices=["p_cap", "relative", "eigen"],
                    default="p_cap")
    mp.add_argument("--p", type=float, default=2.0)
    mp.add_argument("--R", type=float, default=None)
    mp.add_argument("--truncation", type=float, default=None)
    mp.add_argument("--seed", type=int, default=0)
    mp.add_argument("--restarts", type=int, default=1)
    mp.add_argument("--out", default=None)
    mp.add_argument("--config", default=None)
    mp.set_defaults(func=cmd_minimize)

    fp = sub.add_parser("fluctuation", help="ball-likeness of minimizers vs N")
    fp.add_argument("--N", type=int, nargs="+", required=True)
    fp.add_argument("--dim", type=int, default=3)
    fp.add_argument("--p", type=float, default=2.0)
    fp.add_argument("--seed", type=int, default=0)
    fp.add_argument("--restarts", type=int, default=1)
    fp.add_argument("--ledger", default=None)
    fp.add_argument("--out", default=None)
    fp.add_argument("--config", default=None)
    fp.set_defaults(func=cmd_fluctuation)

    cp = sub.add_parser("convergence", help="lattice-ball capacities vs continuum")
    cp.add_argument("--p", type=float, default=2.0)
    cp.add_argument("--dim", type=int, default=3)
    cp.add_argument("--k", type=float, nargs="+", required=True)
    cp.add_argument("--out", default=None)
    cp.add_argument("--config", default=None)
    cp.set_defaults(func=cmd_convergence)

    vp = sub.add_parser("verify", help="run randomized invariant suites")
    vp.add_argument("--suite", default="all")
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--trials", type=int, default=200)
    vp.add_argument("--out", default=None)
    vp.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (LatticeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
