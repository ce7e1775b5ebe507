"""Sup-norm distance between the picard and shooting curves"""
import asyncio
import sys
import time

from config import EXIT_OK, EXIT_FAILURE, EXIT_HEURISTIC, CROSS_METHOD_TOL
from contraction import Params, contraction_constants
from analysis import compare_solutions
from picard import solve_phi
from shooting import shoot
from utils import write_report, write_sidecar
from commands import (
    arguments_of,
    label,
    output_path,
    resolve_x_max,
    shooting_options,
    solver_options,
)


def setup(subparsers, parent):
    parser = subparsers.add_parser("compare", parents=[parent], help="picard against shooting")
    parser.add_argument("--delta", type=float, required=True)
    parser.add_argument("--gamma", type=float, required=True)
    parser.add_argument("--agreement-tol", type=float, default=CROSS_METHOD_TOL)
    parser.set_defaults(handler=run, format="json")


async def run(args) -> int:
    started = time.time()
    p = Params(args.delta, args.gamma)
    x_max = resolve_x_max(args, p)
    contraction = contraction_constants(p)

    picard_sol, shooting_sol = await asyncio.gather(
        asyncio.to_thread(solve_phi, p, solver_options(args, x_max)),
        asyncio.to_thread(shoot, p, shooting_options(args, x_max)),
    )
    diff = compare_solutions(picard_sol, shooting_sol)
    agree = diff <= args.agreement_tol

    if not agree:
        code = EXIT_FAILURE
    elif contraction.in_region:
        code = EXIT_OK
    else:
        code = EXIT_HEURISTIC

    report = {
        "delta": p.delta,
        "gamma": p.gamma,
        "M": contraction.m,
        "in_region": contraction.in_region,
        "sup_diff": diff,
        "agreement_tol": args.agreement_tol,
        "agree": agree,
        "picard_derivative_at_zero": picard_sol.derivative_at_zero,
        "shooting_derivative_at_zero": shooting_sol.derivative_at_zero,
    }

    path = output_path(args, f"compare_d{label(p.delta)}_g{label(p.gamma)}")
    write_report(path, args.format, report)
    write_sidecar(path, "compare", arguments_of(args), started, time.time(), {
        "solutions": [picard_sol.summary(), shooting_sol.summary()],
        "exit_code": code,
    })

    if agree:
        print(f"[CLI] ✅ sup diff {diff:.3e} <= {args.agreement_tol:.1e}")
    else:
        print(f"[CLI] ❌ sup diff {diff:.3e} exceeds {args.agreement_tol:.1e}", file=sys.stderr)
    print(f"[CLI] wrote {path}")
    return code
