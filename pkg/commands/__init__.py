"""Shared helpers for the command modules"""
import argparse
import os
from typing import Dict, Optional

from config import OUTPUT_DIR, DEFAULT_TOL, DEFAULT_GRID_POINTS, DEFAULT_STEP_COUNT
from contraction import Params
from picard import SolverOptions, truncation_bound
from shooting import ShootingOptions


def common_options() -> argparse.ArgumentParser:
    """Flags every command accepts; build one per command since set_defaults mutates shared actions"""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--output", help="data file path (default: under PHI_OUTPUT_DIR)")
    parent.add_argument("--format", choices=["csv", "json"], help="data file format (each command sets its own default)")
    parent.add_argument("--tol", type=float, default=DEFAULT_TOL, help="picard sup-norm tolerance")
    parent.add_argument("--grid-points", type=int, default=DEFAULT_GRID_POINTS)
    parent.add_argument("--steps", type=int, default=DEFAULT_STEP_COUNT, help="RK4 steps for shooting")
    parent.add_argument("--xmax", type=float, default=None, help="override the truncation point")
    parent.add_argument("--verbose", action="store_true")
    return parent


def resolve_x_max(args, p: Params) -> float:
    return args.xmax if args.xmax is not None else truncation_bound(p)


def solver_options(args, x_max: Optional[float] = None) -> SolverOptions:
    return SolverOptions(
        tol=args.tol,
        grid_points=args.grid_points,
        x_max_override=x_max if x_max is not None else args.xmax,
    )


def shooting_options(args, x_max: Optional[float] = None) -> ShootingOptions:
    return ShootingOptions(x_max=x_max if x_max is not None else args.xmax, step_count=args.steps)


def output_path(args, stem: str) -> str:
    if args.output:
        return args.output
    return os.path.join(OUTPUT_DIR, f"{stem}.{args.format}")


def arguments_of(args) -> Dict:
    """The parsed flags, minus the handler, for sidecar metadata"""
    return {k: v for k, v in vars(args).items() if not callable(v)}


def label(value: float) -> str:
    return f"{value:g}"
