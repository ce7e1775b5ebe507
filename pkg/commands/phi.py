"""Solve for the modified error function and write it as a data file"""
import asyncio
import time
from typing import List

from config import EXIT_OK, EXIT_HEURISTIC
from contraction import Params
from analysis import compare_solutions
from grid import evaluate
from picard import PhiSolution, solve_phi, truncation_bound
from shooting import shoot
from utils import write_csv, write_json, write_sidecar
from commands import (
    arguments_of,
    label,
    output_path,
    resolve_x_max,
    shooting_options,
    solver_options,
)


def setup(subparsers, parent):
    parser = subparsers.add_parser(
        "phi",
        parents=[parent],
        help="solve one curve, or a family with --gammas / --deltas",
    )
    parser.add_argument("--delta", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--method", choices=["picard", "shooting", "both"], default="picard")
    parser.add_argument("--gammas", type=float, nargs="+", help="family at fixed --delta")
    parser.add_argument("--deltas", type=float, nargs="+", help="family at fixed --gamma")
    parser.set_defaults(handler=run, format="csv")


def _solver_for(args, x_max: float):
    if args.method == "picard":
        options = solver_options(args, x_max)
        return lambda p: solve_phi(p, options)
    options = shooting_options(args, x_max)
    return lambda p: shoot(p, options)


def _exit_code(solutions: List[PhiSolution]) -> int:
    return EXIT_OK if all(s.converged_under_guarantee for s in solutions) else EXIT_HEURISTIC


async def run(args) -> int:
    """Examples:
        phi --delta 0 --gamma 0
        phi --delta 1.5 --gamma -0.6 --method shooting
        phi --delta 1.5 --gammas -0.9 -0.6 0 1 10 --method shooting
    """
    if args.gammas or args.deltas:
        return await run_family(args)

    if args.delta is None or args.gamma is None:
        raise ValueError("--delta and --gamma are required")

    started = time.time()
    p = Params(args.delta, args.gamma)
    x_max = resolve_x_max(args, p)
    path = output_path(args, f"phi_d{label(p.delta)}_g{label(p.gamma)}_{args.method}")

    if args.method == "both":
        picard_sol, shooting_sol = await asyncio.gather(
            asyncio.to_thread(solve_phi, p, solver_options(args, x_max)),
            asyncio.to_thread(shoot, p, shooting_options(args, x_max)),
        )
        solutions = [picard_sol, shooting_sol]
        finer = min(solutions, key=lambda s: s.phi.grid.spacing)
        xs = finer.phi.grid.points
        a = evaluate(picard_sol.phi, xs)
        b = evaluate(shooting_sol.phi, xs)
        header = ["x", "phi_picard", "phi_shooting", "diff"]
        columns = [xs, a, b, a - b]
        extra = {"sup_diff": compare_solutions(picard_sol, shooting_sol)}
    else:
        sol = await asyncio.to_thread(_solver_for(args, x_max), p)
        solutions = [sol]
        header = ["x", "phi"]
        columns = [sol.phi.grid.points, sol.phi.values]
        extra = {}

    if args.format == "json":
        write_json(path, {name: [float(v) for v in col] for name, col in zip(header, columns)})
    else:
        write_csv(path, header, zip(*columns))

    code = _exit_code(solutions)
    extra.update({"solutions": [s.summary() for s in solutions], "exit_code": code})
    write_sidecar(path, "phi", arguments_of(args), started, time.time(), extra)

    for s in solutions:
        glyph = "✅" if s.converged_under_guarantee else "⚠️"
        print(f"[CLI] {glyph} {s.method}: Phi'(0) = {s.derivative_at_zero:.12g}, "
              f"error estimate {s.error_estimate:.3e}")
    print(f"[CLI] wrote {path}")
    return code


async def run_family(args) -> int:
    """One curve per member, solved concurrently on a common x_max"""
    if args.method == "both":
        raise ValueError("families take --method picard or --method shooting")

    if args.gammas:
        if args.delta is None:
            raise ValueError("--gammas needs --delta")
        members = [Params(args.delta, g) for g in args.gammas]
    else:
        if args.gamma is None:
            raise ValueError("--deltas needs --gamma")
        members = [Params(d, args.gamma) for d in args.deltas]

    started = time.time()
    x_max = args.xmax if args.xmax is not None else max(truncation_bound(p) for p in members)
    solve = _solver_for(args, x_max)

    results = await asyncio.gather(
        *(asyncio.to_thread(solve, p) for p in members),
        return_exceptions=True,
    )

    failures = [(p, r) for p, r in zip(members, results) if isinstance(r, Exception)]
    for p, error in failures:
        print(f"[CLI] ❌ ({p.delta}, {p.gamma}): {error}")
    if failures:
        raise failures[0][1]

    fixed = f"d{label(args.delta)}" if args.gammas else f"g{label(args.gamma)}"
    path = output_path(args, f"phi_family_{fixed}_{args.method}")

    header = ["x"] + [f"phi_d{label(p.delta)}_g{label(p.gamma)}" for p in members]
    columns = [results[0].phi.grid.points] + [s.phi.values for s in results]

    if args.format == "json":
        write_json(path, {name: [float(v) for v in col] for name, col in zip(header, columns)})
    else:
        write_csv(path, header, zip(*columns))

    code = _exit_code(results)
    write_sidecar(path, "phi", arguments_of(args), started, time.time(),
                  {"solutions": [s.summary() for s in results], "exit_code": code})
    print(f"[CLI] wrote {len(members)} curves to {path}")
    return code
