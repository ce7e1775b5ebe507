"""Run both solvers and check the qualitative properties of their output"""
import asyncio
import sys
import time
from dataclasses import replace
from typing import Dict, Optional

import numpy as np

from config import (
    EXIT_OK,
    EXIT_FAILURE,
    BOUNDS_TOL,
    CONCAVITY_TOL,
    CROSS_METHOD_TOL,
    FIXED_POINT_TOL,
)
from contraction import Params, contraction_constants
from analysis import check_properties, compare_solutions
from grid import GridFunction
from picard import PhiSolution, solve_phi
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

CORRUPT_NEAR = 0.3
CORRUPT_BUMP = 0.1


def setup(subparsers, parent):
    parser = subparsers.add_parser("verify", parents=[parent], help="property checks and cross-method agreement")
    parser.add_argument("--delta", type=float, required=True)
    parser.add_argument("--gamma", type=float, required=True)
    parser.add_argument("--selftest", choices=["corrupt"], help="feed a deliberately broken curve to the checks")
    parser.set_defaults(handler=run, format="json")


def corrupt(sol: PhiSolution) -> PhiSolution:
    """Bump the sample nearest 0.3 upwards so monotonicity breaks"""
    values = sol.phi.values.copy()
    i = int(np.argmin(np.abs(values - CORRUPT_NEAR)))
    values[i] += CORRUPT_BUMP
    return replace(sol, phi=GridFunction(sol.phi.grid, values))


def verdicts(sol: PhiSolution, p: Params, tol: float) -> Dict:
    report = check_properties(sol, p, BOUNDS_TOL, CONCAVITY_TOL)
    entry = report.to_dict()
    passed = report.passed()
    # the fixed-point residual is only a verdict for the iteration that targets it
    if sol.method == "picard":
        entry["fixed_point_ok"] = report.fixed_point_residual <= max(FIXED_POINT_TOL, 2.0 * tol)
        passed = passed and entry["fixed_point_ok"]
    entry["passed"] = passed
    entry["solution"] = sol.summary()
    return entry


async def run(args) -> int:
    """Examples:
        verify --delta 0.1 --gamma 0.1
        verify --delta 0 --gamma 0 --selftest corrupt
    """
    started = time.time()
    p = Params(args.delta, args.gamma)
    x_max = resolve_x_max(args, p)
    contraction = contraction_constants(p)

    picard_result, shooting_result = await asyncio.gather(
        asyncio.to_thread(solve_phi, p, solver_options(args, x_max)),
        asyncio.to_thread(shoot, p, shooting_options(args, x_max)),
        return_exceptions=True,
    )

    # outside the region picard may stall or leave K; shooting then stands alone
    if isinstance(picard_result, ValueError) and not contraction.in_region:
        print(f"[CLI] ⚠️ picard skipped: {picard_result}", file=sys.stderr)
        picard_result = None
    for result in (picard_result, shooting_result):
        if isinstance(result, Exception):
            raise result

    solutions = [s for s in (picard_result, shooting_result) if s is not None]
    if args.selftest == "corrupt":
        solutions = [corrupt(s) for s in solutions]

    report = {
        "delta": p.delta,
        "gamma": p.gamma,
        "M": contraction.m,
        "in_region": contraction.in_region,
        "selftest": args.selftest,
    }
    for sol in solutions:
        report[sol.method] = verdicts(sol, p, args.tol)

    cross: Optional[float] = None
    if len(solutions) == 2:
        cross = compare_solutions(*solutions)
        report["cross_method_diff"] = cross
        report["cross_method_ok"] = cross <= CROSS_METHOD_TOL

    passed = all(report[s.method]["passed"] for s in solutions) and report.get("cross_method_ok", True)
    report["passed"] = passed

    path = output_path(args, f"verify_d{label(p.delta)}_g{label(p.gamma)}")
    write_report(path, args.format, report)
    code = EXIT_OK if passed else EXIT_FAILURE
    write_sidecar(path, "verify", arguments_of(args), started, time.time(), {"M": contraction.m, "exit_code": code})

    if passed:
        print(f"[CLI] ✅ all verdicts pass ({', '.join(s.method for s in solutions)})")
    else:
        failing = [s.method for s in solutions if not report[s.method]["passed"]]
        if report.get("cross_method_ok") is False:
            failing.append(f"cross-method diff {cross:.3e}")
        print(f"[CLI] ❌ failed: {', '.join(failing)}", file=sys.stderr)
    print(f"[CLI] wrote {path}")
    return code
