"""Solve the solidification consistency relations for (delta, gamma)"""
import sys
import time
from typing import Optional

from config import EXIT_OK, EXIT_FAILURE, STEFAN_DEFAULT_TOL, STEFAN_MAX_SWEEPS
from contraction import Params, contraction_constants
from stefan import (
    StefanConvergenceError,
    ThermalCoefficients,
    coefficient_slopes,
    coefficient_trends,
    phase_params_from_coefficients,
    solve_phase_parameters,
)
from utils import write_report, write_sidecar
from commands import arguments_of, label, output_path, shooting_options, solver_options


def setup(subparsers, parent):
    parser = subparsers.add_parser("stefan", parents=[parent], help="(alpha, beta, lambda) -> (delta, gamma)")
    parser.add_argument("--alpha", type=float, required=True, help="specific heat slope")
    parser.add_argument("--beta", type=float, required=True, help="conductivity slope")
    parser.add_argument("--lambda", dest="lam", type=float, required=True, help="front coefficient")
    parser.add_argument("--residual-tol", type=float, default=STEFAN_DEFAULT_TOL)
    parser.add_argument("--max-sweeps", type=int, default=STEFAN_MAX_SWEEPS)
    material = parser.add_argument_group("material", "reference coefficients and temperatures (all four or none)")
    material.add_argument("--c-ref", type=float, help="specific heat at theta_o, J/(kg K)")
    material.add_argument("--k-ref", type=float, help="thermal conductivity at theta_o, W/(m K)")
    material.add_argument("--theta-i", type=float, help="initial liquid temperature, K")
    material.add_argument("--theta-o", type=float, help="imposed boundary temperature, K")
    parser.set_defaults(handler=run, format="json")


def material_of(args) -> Optional[ThermalCoefficients]:
    values = (args.c_ref, args.k_ref, args.theta_i, args.theta_o)
    if all(v is None for v in values):
        return None
    if any(v is None for v in values):
        raise ValueError("--c-ref, --k-ref, --theta-i and --theta-o go together")
    return ThermalCoefficients(
        c_ref=args.c_ref,
        k_ref=args.k_ref,
        alpha=args.alpha,
        beta=args.beta,
        theta_i=args.theta_i,
        theta_o=args.theta_o,
    )


async def run(args) -> int:
    """Examples:
        stefan --alpha 0 --beta 0 --lambda 1
        stefan --alpha 0.05 --beta -0.05 --lambda 0.5
        stefan --alpha 0.05 --beta -0.05 --lambda 0.5 --c-ref 2000 --k-ref 0.2 --theta-i 330 --theta-o 300
    """
    started = time.time()
    path = output_path(args, f"stefan_a{label(args.alpha)}_b{label(args.beta)}_l{label(args.lam)}")

    tc = material_of(args)
    sweep = {
        "tol": args.residual_tol,
        "max_sweeps": args.max_sweeps,
        "solver_options": solver_options(args),
        "shooting_options": shooting_options(args),
    }

    try:
        if tc is None:
            result = solve_phase_parameters(args.alpha, args.beta, args.lam, **sweep)
        else:
            result = phase_params_from_coefficients(tc, args.lam, **sweep)
    except StefanConvergenceError as e:
        report = {
            "alpha": args.alpha,
            "beta": args.beta,
            "lambda": args.lam,
            "delta": e.delta,
            "gamma": e.gamma,
            "residual_alpha": e.residuals[0],
            "residual_beta": e.residuals[1],
            "sweeps": e.sweeps,
            "converged": False,
        }
        write_report(path, args.format, report)
        write_sidecar(path, "stefan", arguments_of(args), started, time.time(), {
            "M": contraction_constants(Params(e.delta, e.gamma)).m,
            "exit_code": EXIT_FAILURE,
        })
        print(f"[CLI] ❌ {e}", file=sys.stderr)
        return EXIT_FAILURE

    report = result.to_dict()
    report["converged"] = True
    report["M"] = contraction_constants(Params(result.delta, result.gamma)).m
    report.update(coefficient_trends(result.delta, result.gamma))
    if tc is not None:
        report["specific_heat_slope"], report["conductivity_slope"] = coefficient_slopes(tc)

    write_report(path, args.format, report)
    write_sidecar(path, "stefan", arguments_of(args), started, time.time(), {"M": report["M"], "exit_code": EXIT_OK})

    print(f"[CLI] ✅ delta={result.delta:.12g} gamma={result.gamma:.12g} "
          f"Phi(lambda)={result.phi_at_lambda:.12g} after {result.sweeps} sweeps")
    print(f"[CLI] wrote {path}")
    return EXIT_OK
