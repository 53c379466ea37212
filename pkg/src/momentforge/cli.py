"""Command-line entry point: ``momentforge {info,build,export,solve} PROBLEM``.

Exit codes: 0 success, 1 solver did not reach optimality, 2 usage or I/O
error, 3 problem file rejected.
"""
from __future__ import annotations

import argparse
import contextlib
import os
import sys
import time
from pathlib import Path

from .dsl import ProblemError, load_problem
from .evaluation import ClosureError
from .export import write_sdpa_sparse, write_structured
from .pipeline import SYM_MODES, Caps, ambient_group, build, symmetry_group
from .relaxation import RelaxationError
from .rewrite import RewriteError
from .solver import OPTIMAL, SolverOptions, solve
from .symmetry import GroupError

EXIT_OK, EXIT_SOLVER, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _tolerance(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem", help="problem file (.ncpop)")
    common.add_argument("--level", type=_positive, help="relaxation level (overrides the file)")
    common.add_argument("--sym", choices=SYM_MODES, default="full",
                        help="symmetry reduction: none, full, or full plus order-two split")
    common.add_argument("--cap-group", type=_positive, help="maximum group order")
    common.add_argument("--cap-basis", type=_positive, help="maximum generating basis size")

    p = _Parser(prog="momentforge", description="Symmetry-adapted moment relaxations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    info = sub.add_parser("info", parents=[common], help="group orders and problem sizes")
    info.add_argument("--levels", type=_positive,
                      help="report sizes for levels 1..N (default: the problem level)")
    sub.add_parser("build", parents=[common], help="build the relaxation and print its size")
    exp = sub.add_parser("export", parents=[common], help="write .dat-s and/or .relax files")
    exp.add_argument("--format", choices=("sdpa", "relax", "both"), default="sdpa")
    exp.add_argument("--out", required=True,
                     help="output path; the extension is replaced per format")
    sol = sub.add_parser("solve", parents=[common], help="solve with the built-in solver")
    sol.add_argument("--tol", type=_tolerance, default=1e-9, help="duality gap target")
    sol.add_argument("--max-iter", type=_positive, default=200)
    return p


def _limit_threads():
    value = os.environ.get("MOMENTFORGE_THREADS")
    if not value:
        return contextlib.nullcontext()
    try:
        n = int(value)
    except ValueError:
        raise UsageError(f"MOMENTFORGE_THREADS must be an integer, got {value!r}") from None
    if n < 1:
        raise UsageError("MOMENTFORGE_THREADS must be at least 1")
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=n)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _caps(args, pd) -> Caps:
    return Caps.for_problem(pd, group=args.cap_group, basis=args.cap_basis)


def cmd_info(args, pd) -> int:
    caps = _caps(args, pd)
    al = pd.alphabet
    print(f"letters: {len(al)} ({' '.join(al.names)})")
    print(f"rewrite rules: {len(pd.rewrite)}")
    t0 = time.perf_counter()
    ambient = ambient_group(pd, caps)
    group = symmetry_group(pd, caps, ambient)
    _log(f"groups: {time.perf_counter() - t0:.3f} s")
    print(f"ambient group order: {ambient.order}")
    print(f"symmetry group order: {group.order}")
    orders = group.element_orders()
    print("symmetry element orders: " + ", ".join(f"{k}:{v}" for k, v in orders.items()))
    print(f"symmetry group abelian: {'yes' if group.is_abelian() else 'no'}")
    top = args.levels or args.level or pd.level
    if top is None:
        return EXIT_OK
    levels = range(1, top + 1) if args.levels else [top]
    for d in levels:
        t0 = time.perf_counter()
        full = build(pd, d, "full", caps, ambient, group)
        plain = build(pd, d, "none", caps)
        line = (f"level {d}: basis {len(full.basis)}, variables {plain.sdp.m} (none) / "
                f"{full.sdp.m} (full)")
        if pd.split_perm is not None:
            split = build(pd, d, "split", caps, ambient, group)
            line += ", split blocks " + "+".join(map(str, split.sdp.block_sizes))
        print(line)
        _log(f"level {d}: {time.perf_counter() - t0:.3f} s")
    return EXIT_OK


def _build(args, pd):
    t0 = time.perf_counter()
    b = build(pd, args.level, args.sym, _caps(args, pd))
    _log(f"build: {time.perf_counter() - t0:.3f} s")
    return b


def _summary(b) -> None:
    print(f"level: {b.basis.level}")
    print(f"symmetry: {b.mode} (group order {b.group.order})")
    print(f"basis: {len(b.basis)}")
    print(f"variables: {b.sdp.m}")
    print("blocks: " + " ".join(map(str, b.sdp.block_sizes)))


def cmd_build(args, pd) -> int:
    _summary(_build(args, pd))
    return EXIT_OK


def cmd_export(args, pd) -> int:
    out = Path(args.out)
    parent = out.parent if str(out.parent) else Path(".")
    if not parent.is_dir():
        raise UsageError(f"output directory {str(parent)!r} does not exist")
    b = _build(args, pd)
    targets = []
    if args.format in ("sdpa", "both"):
        targets.append(("sdpa", out.with_suffix(".dat-s")))
    if args.format in ("relax", "both"):
        targets.append(("relax", out.with_suffix(".relax")))
    for kind, path in targets:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                if kind == "sdpa":
                    write_sdpa_sparse(b.sdp, fh)
                else:
                    write_structured(b.sdp, b.relaxation, pd.alphabet, fh)
        except OSError as exc:
            raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None
        print(f"wrote {path}")
    _summary(b)
    return EXIT_OK


def cmd_solve(args, pd) -> int:
    b = _build(args, pd)
    t0 = time.perf_counter()
    sol = solve(b.sdp, SolverOptions(tolerance=args.tol, max_iterations=args.max_iter))
    _log(f"solve: {time.perf_counter() - t0:.3f} s")
    print(f"variables: {b.sdp.m}")
    print("blocks: " + " ".join(map(str, b.sdp.block_sizes)))
    print(f"status: {sol.status}")
    print(f"objective: {sol.objective_value:.12f}")
    print(f"duality gap: {sol.duality_gap:.3e}")
    print(f"iterations: {sol.iterations}")
    return EXIT_OK if sol.status == OPTIMAL else EXIT_SOLVER


COMMANDS = {"info": cmd_info, "build": cmd_build, "export": cmd_export, "solve": cmd_solve}


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        with _limit_threads():
            path = Path(args.problem)
            if not path.is_file():
                raise UsageError(f"problem file {args.problem!r} not found")
            try:
                pd = load_problem(path)
            except UnicodeDecodeError:
                raise ProblemError("file is not valid UTF-8", 1, 1) from None
            return COMMANDS[args.command](args, pd)
    except ProblemError as exc:
        _log(f"{args.problem}:{exc.line}:{exc.column}: error: {exc.message}")
        return EXIT_PARSE
    except UsageError as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE
    except (RelaxationError, GroupError, ClosureError, RewriteError) as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
