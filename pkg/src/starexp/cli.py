"""Command-line harness: ``python -m starexp <command> ...``.

Exit codes: 0 success, 2 bad arguments, 3 numerical failure, 4 I/O.
"""
import argparse
import json
import sys

import numpy as np
import scipy.sparse as sp

from . import bench
from .bounds import BoundParams, choose_c, lemma_star_bound, theorem_bound
from .errors import (
    BudgetError, ConvergenceError, DomainError, InadmissibleParameters, MatrixMarketError,
    NumericalOverflowError, SingularityError, StarExpError,
)
from .expm_action import IntervalMap, solve_arnoldi, solve_direct
from .gallery import KINDS, GallerySpec, generate
from .mmio import load_matrix_market

EXIT_OK, EXIT_ARGS, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def _m_list(text):
    """``10:25`` (inclusive), ``10:25:5`` or ``10,12,14``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            step = parts[2] if len(parts) == 3 else 1
            values = list(range(parts[0], parts[1] + 1, step))
        else:
            values = [int(p) for p in text.split(",") if p]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad M list {text!r}") from None
    if not values or min(values) < 2:
        raise argparse.ArgumentTypeError(f"M list {text!r} must be non-empty with every M >= 2")
    return values


def _complex_pair(text):
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad complex value {text!r}") from None
    if len(parts) == 1:
        return complex(parts[0])
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")


def _add_problem_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="Matrix Market file holding A")
    src.add_argument("--gallery", choices=[k for k in KINDS if k != "from_file"])
    p.add_argument("--n", type=int, help="dimension for --gallery")
    vec = p.add_mutually_exclusive_group()
    vec.add_argument("--vector", help="Matrix Market file holding v")
    vec.add_argument("--seed", type=int, default=0, help="seed for the random start vector")
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--krylov", type=int, default=0, help="Arnoldi dimension k (0: direct solve)")


def build_parser():
    parser = _Parser(prog="starexp", description="exp(tA)v on an interval via Legendre coefficients")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve once and report values on a grid")
    _add_problem_args(p)
    p.add_argument("--eval-points", type=int, default=100)
    p.add_argument("--out", help="write the solution curve CSV here")

    p = sub.add_parser("curve", help="emit the solution curve t,norm,re_0,...")
    _add_problem_args(p)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="run experiments from a TOML config")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--repetitions", type=int)

    p = sub.add_parser("sweep-m", help="error versus M for each experiment in a config")
    p.add_argument("--config", required=True)
    p.add_argument("--m-list", type=_m_list, required=True)
    p.add_argument("--out")
    p.add_argument("--repetitions", type=int)

    p = sub.add_parser("bound", help="evaluate the truncation-error bound")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--c", type=_complex_pair, help="expansion center RE[,IM] (default -9 rho/(M-1))")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--C-M", dest="C_M", type=float, default=1.0)
    p.add_argument("--ell", type=int, help="also evaluate the star-Taylor remainder bound at this ell")
    p.add_argument("--t", type=float, default=1.0, help="reference time for the remainder bound")
    p.add_argument("--no-strict", action="store_true", help="report violated hypotheses instead of failing")
    return parser


def _load_problem(args):
    if args.matrix:
        A = load_matrix_market(args.matrix)
        if A.shape[0] != A.shape[1]:
            raise DomainError(f"{args.matrix}: matrix is not square")
        n = A.shape[0]
        v = None
    else:
        if args.n is None:
            raise _ArgError("--gallery needs --n")
        A, v = generate(GallerySpec(args.gallery, args.n, seed=args.seed))
        n = A.shape[0]
    if args.vector:
        v = load_matrix_market(args.vector)
        v = np.asarray(v.toarray() if sp.issparse(v) else v).ravel()
    elif v is None:
        v = np.random.default_rng(args.seed).standard_normal(n)
        v /= np.linalg.norm(v)
    return A, v


def _solve(args):
    A, v = _load_problem(args)
    interval = IntervalMap(args.t0, args.tmax)
    if args.krylov > 0:
        return A, v, solve_arnoldi(A, v, interval, args.M, args.krylov)
    return A, v, solve_direct(A, v, interval, args.M)


def _cmd_solve(args, out):
    if args.eval_points < 2:
        raise _ArgError("--eval-points must be >= 2")
    A, v, sol = _solve(args)
    grid = np.linspace(args.t0, args.tmax, args.eval_points)
    if args.out:
        bench.emit_curve(sol, grid, args.out)
    final = sol.evaluate(args.tmax)
    report = {
        "method": sol.method_tag, "n": sol.N, "M": sol.M,
        "condition_estimate": sol.condition_estimate,
        "initial_residual": sol.initial_residual,
        "norm_at_tmax": float(np.linalg.norm(final)),
    }
    print(json.dumps(report), file=out)


def _cmd_curve(args, out):
    if args.points < 2:
        raise _ArgError("--points must be >= 2")
    _, _, sol = _solve(args)
    bench.emit_curve(sol, np.linspace(args.t0, args.tmax, args.points), args.out)
    print(f"wrote {args.points} points to {args.out}", file=out)


def _print_rows(rows, out):
    for r in rows:
        status = r.failure or f"err(tmax)={r.rel_err_tmax:.3e} err(grid)={r.rel_err_max_grid:.3e}"
        cw = "" if r.condition_warning is None else f" cond~{r.condition_warning:.2e}"
        print(f"{r.example_id or '-'} n={r.n} M={r.M} k={r.k} {r.method}: {status} "
              f"t={r.time_seconds:.3g}s{cw}", file=out)


def _run_configs(args, out, sweep):
    configs = bench.load_configs(args.config)
    rows = []
    for cfg in configs:
        cfg = bench.with_overrides(cfg, repetitions=args.repetitions)
        part = bench.sweep_M(cfg, args.m_list) if sweep else bench.run_experiment(cfg)
        _print_rows(part, out)
        rows.extend(part)
    target = args.out or (configs[0].output if len(configs) == 1 else None)
    if target:
        bench.emit_csv(rows, target)
    return EXIT_NUMERIC if any(r.failure for r in rows) else EXIT_OK


def _cmd_bound(args, out):
    if args.M < 2 or args.rho < 0:
        raise _ArgError("need M >= 2 and rho >= 0")
    c = args.c if args.c is not None else choose_c(args.rho, args.M)
    params = BoundParams(c=c, rho=args.rho, kappa=args.kappa, M=args.M, ell=args.ell, C_M=args.C_M)
    strict = not args.no_strict
    res = theorem_bound(params, strict=strict)
    report = {"c": [c.real, c.imag], "branch": res.branch, "bound": res.value,
              "violations": list(res.violations)}
    if args.ell is not None:
        lem = lemma_star_bound(params, args.t, strict=strict)
        report["remainder_bound"] = lem.value
        report["remainder_violations"] = list(lem.violations)
    print(json.dumps(report), file=out)


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgError as exc:
        print(f"starexp: error: {exc}", file=err)
        return EXIT_ARGS
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        if args.command == "solve":
            _cmd_solve(args, out)
        elif args.command == "curve":
            _cmd_curve(args, out)
        elif args.command == "bench":
            return _run_configs(args, out, sweep=False)
        elif args.command == "sweep-m":
            return _run_configs(args, out, sweep=True)
        elif args.command == "bound":
            _cmd_bound(args, out)
    except _ArgError as exc:
        print(f"starexp: error: {exc}", file=err)
        return EXIT_ARGS
    except MatrixMarketError as exc:
        print(f"starexp: {exc}", file=err)
        return EXIT_IO
    except OSError as exc:
        print(f"starexp: {exc}", file=err)
        return EXIT_IO
    except (InadmissibleParameters, BudgetError, DomainError) as exc:
        print(f"starexp: error: {exc}", file=err)
        return EXIT_ARGS
    except (SingularityError, ConvergenceError, NumericalOverflowError, StarExpError) as exc:
        print(f"starexp: numerical failure: {exc}", file=err)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
