"""Command-line front end.

Exit codes: 0 success, 2 invalid arguments, 3 Newton failure,
4 stability precondition violated (Jacobian not an M-matrix / gamma < f_y).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .errors import ConfigError, ConvergenceError, SingularSystemError, StabilityError
from .harness import (
    ConvergenceReport,
    discrete_error,
    format_eps,
    parse_eps,
    run_convergence,
    to_csv,
    to_markdown,
)
from .mesh import KINDS, build_mesh, write_mesh_csv
from .problem import get_problem
from .scheme import SchemeParams
from .solver import SolverConfig, newton_solve
from .spline import cubic_spline, global_error, linear_spline, write_dense_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NEWTON = 3
EXIT_STABILITY = 4

DEFAULT_EPS_LIST = "2^-3,2^-5,2^-10,2^-20,2^-30,2^-40"
OVERRIDE_KEYS = ("lam", "a", "q", "n", "k", "c0")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _eps_arg(text):
    try:
        return parse_eps(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _eps_list_arg(text):
    return [_eps_arg(part) for part in text.split(",") if part.strip()]


def _add_overrides(parser):
    group = parser.add_argument_group("mesh parameter overrides")
    group.add_argument("--lam", type=float, help="Shishkin transition point (default: min(2 eps ln N / sqrt(m), 1/4))")
    group.add_argument("--a", type=float, help="Bakhvalov a (default 2/sqrt(m)) or Liseikin a (default 1)")
    group.add_argument("--q", type=float, help="Bakhvalov q (default 0.4)")
    group.add_argument("--n", type=float, help="Liseikin n (default 2)")
    group.add_argument("--k", type=float, help="Liseikin k (default 1)")
    group.add_argument("--c0", type=float, help="Liseikin c0 (default 0)")


def _overrides(args) -> dict:
    return {key: getattr(args, key) for key in OVERRIDE_KEYS if getattr(args, key) is not None}


def _add_scheme_options(parser):
    parser.add_argument("--problem", default="builtin:example1")
    parser.add_argument("--t", type=float, default=0.5, help="family parameter in [0, 1]")
    parser.add_argument("--gamma", type=float, default=None, help="stabilizer (default: problem's, 1 for example1)")
    parser.add_argument("--tol", type=float, default=1e-10)
    parser.add_argument("--maxit", type=int, default=50)
    parser.add_argument("--init", type=float, default=-0.5, help="constant initial guess")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spbvp", description="Fitted schemes for eps^2 y'' = f(x, y) on layer-adapted meshes.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_solve = sub.add_parser("solve", help="solve once and write nodal (and dense) CSV")
    _add_scheme_options(p_solve)
    p_solve.add_argument("--mesh", required=True, choices=KINDS)
    p_solve.add_argument("--eps", required=True, type=_eps_arg, help="real or 2^-k")
    p_solve.add_argument("--N", required=True, type=int, help="number of intervals, a multiple of 4")
    p_solve.add_argument("--spline", choices=("linear", "cubic", "none"), default="none")
    p_solve.add_argument("--samples", type=int, default=10, help="dense samples per interval")
    p_solve.add_argument("--out", default="solution.csv", help="nodal CSV path; dense CSV goes to <stem>_dense.csv")
    _add_overrides(p_solve)

    p_conv = sub.add_parser("convergence", help="E_N / Ord table over eps and N = 2^k")
    _add_scheme_options(p_conv)
    p_conv.add_argument("--mesh", default="all", choices=KINDS + ("all",))
    p_conv.add_argument("--kmin", type=int, default=4)
    p_conv.add_argument("--kmax", type=int, default=12)
    p_conv.add_argument("--eps-list", type=_eps_list_arg, default=_eps_list_arg(DEFAULT_EPS_LIST))
    p_conv.add_argument("--global", dest="global_kind", choices=("linear", "cubic", "none"), default="none")
    p_conv.add_argument("--samples", type=int, default=10)
    p_conv.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p_conv.add_argument("--out", default=None, help="output path (default: stdout)")
    _add_overrides(p_conv)

    p_mesh = sub.add_parser("mesh", help="dump a mesh as i,x_i,h_i CSV")
    p_mesh.add_argument("--kind", required=True, choices=KINDS)
    p_mesh.add_argument("--eps", required=True, type=_eps_arg)
    p_mesh.add_argument("--N", required=True, type=int)
    p_mesh.add_argument("--m", type=float, default=1.0, help="lower bound of f_y")
    p_mesh.add_argument("--out", default=None, help="output path (default: stdout)")
    _add_overrides(p_mesh)
    return parser


def _check_N(N):
    if N < 8 or N % 4:
        raise ConfigError(f"--N must be a multiple of 4 and at least 8 (got {N})")


def _open_out(path):
    return open(path, "w", encoding="utf-8", newline="")


def cmd_solve(args) -> int:
    _check_N(args.N)
    if args.samples < 1:
        raise ConfigError("--samples must be at least 1")
    p = get_problem(args.problem)
    gamma = args.gamma if args.gamma is not None else p.gamma_default
    sp = SchemeParams(t=args.t, gamma=gamma, eps=args.eps)
    cfg = SolverConfig(tol=args.tol, max_iterations=args.maxit, initial_value=args.init, strict=True)
    mesh = build_mesh(args.mesh, args.N, args.eps, p.m, _overrides(args))

    try:
        sol = newton_solve(p, mesh, sp, cfg)
    except StabilityError as exc:
        print(f"stability precondition violated: {exc}", file=sys.stderr)
        return EXIT_STABILITY
    except (SingularSystemError, ConvergenceError) as exc:
        print(f"Newton failed: {exc}", file=sys.stderr)
        return EXIT_NEWTON

    x, y = mesh.points, sol.values
    exact = p.exact(x, args.eps) if p.exact is not None else None
    out = Path(args.out)
    with _open_out(out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "x", "y_num"] + (["y_exact", "abs_err"] if exact is not None else []))
        for i in range(mesh.N + 1):
            row = [i, repr(float(x[i])), repr(float(y[i]))]
            if exact is not None:
                row += [repr(float(exact[i])), repr(float(abs(exact[i] - y[i])))]
            writer.writerow(row)

    print(f"problem={p.name} mesh={args.mesh} eps={format_eps(args.eps)} N={args.N} t={args.t:g} gamma={gamma:g}")
    print(f"iterations={sol.iterations} final_correction={sol.final_correction:.3e} converged={sol.converged}")
    if exact is not None:
        print(f"E_N={discrete_error(sol, p, args.eps):.3e}")
    print(f"nodal CSV: {out}")

    if args.spline != "none":
        g = linear_spline(sol) if args.spline == "linear" else cubic_spline(sol)
        dense = out.with_name(out.stem + "_dense" + (out.suffix or ".csv"))
        with _open_out(dense) as fh:
            write_dense_csv(g, fh, p, args.eps, args.samples)
        if p.exact is not None:
            print(f"global_E_N ({args.spline})={global_error(g, p, args.eps, args.samples):.3e}")
        print(f"dense CSV: {dense}")

    if not sol.converged:
        print(f"Newton did not converge in {args.maxit} iterations", file=sys.stderr)
        return EXIT_NEWTON
    return EXIT_OK


def cmd_convergence(args) -> int:
    if args.kmin < 3 or args.kmax < args.kmin:
        raise ConfigError(f"need 3 <= kmin <= kmax (got kmin={args.kmin}, kmax={args.kmax})")
    if not args.eps_list:
        raise ConfigError("--eps-list is empty")
    p = get_problem(args.problem)
    gamma = args.gamma if args.gamma is not None else p.gamma_default
    sp = SchemeParams(t=args.t, gamma=gamma, eps=1.0)
    cfg = SolverConfig(tol=args.tol, max_iterations=args.maxit, initial_value=args.init, strict=True)
    kinds = KINDS if args.mesh == "all" else (args.mesh,)

    report = ConvergenceReport()
    for kind in kinds:
        report.extend(
            run_convergence(
                p,
                kind,
                range(args.kmin, args.kmax + 1),
                args.eps_list,
                sp,
                cfg,
                sample_density=args.samples,
                global_kind=args.global_kind,
                mesh_overrides=_overrides(args) if args.mesh != "all" else None,
            )
        )

    text = to_csv(report) if args.format == "csv" else to_markdown(report)
    if args.out:
        with _open_out(args.out) as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    failed = [r for r in report.rows if r.error]
    for r in failed:
        print(f"failed: {r.mesh} eps={format_eps(r.eps)} N={r.N}: {r.error}", file=sys.stderr)
    if len(failed) < len(report.rows):
        return EXIT_OK
    if all(r.error.startswith("ConfigError") for r in failed):
        return EXIT_USAGE
    if any(r.error.startswith("StabilityError") for r in failed):
        return EXIT_STABILITY
    return EXIT_NEWTON


def cmd_mesh(args) -> int:
    _check_N(args.N)
    mesh = build_mesh(args.kind, args.N, args.eps, args.m, _overrides(args))
    diag_lines = [f"{key}={val!r}" for key, val in mesh.diagnostics.items()]
    if args.out:
        with _open_out(args.out) as fh:
            write_mesh_csv(mesh, fh)
        print("\n".join(diag_lines))
    else:
        write_mesh_csv(mesh, sys.stdout)
        print("\n".join(diag_lines), file=sys.stderr)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "convergence": cmd_convergence, "mesh": cmd_mesh}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
