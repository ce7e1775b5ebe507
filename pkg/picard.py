"""Fixed-point (Picard) iteration for the modified error function"""
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

import config
from config import (
    DEFAULT_TOL,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_GRID_POINTS,
    DEFAULT_TAIL_EPSILON,
    MIN_SOLVER_GRID_POINTS,
    X_MAX_FLOOR,
)
from contraction import Params, contraction_constants
from grid import GridFunction, make_uniform_grid, cumulative_integral, sup_norm_diff

METHODS = ("picard", "shooting")


class NonConvergenceError(ValueError):
    """Raised when the iteration cap is hit; keeps the last iterate for inspection"""

    def __init__(self, message: str, last_iterate: GridFunction, residual: float, iterations: int):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class SolverOptions:
    tol: float = DEFAULT_TOL
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    grid_points: int = DEFAULT_GRID_POINTS
    x_max_override: Optional[float] = None
    tail_epsilon: float = DEFAULT_TAIL_EPSILON

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.grid_points < MIN_SOLVER_GRID_POINTS or self.grid_points % 2 == 0:
            raise ValueError(f"grid_points must be odd and >= {MIN_SOLVER_GRID_POINTS}")
        if self.x_max_override is not None and not self.x_max_override > 0:
            raise ValueError("x_max_override must be positive")
        if not self.tail_epsilon > 0:
            raise ValueError("tail_epsilon must be positive")


@dataclass(frozen=True, eq=False)
class PhiSolution:
    """A converged modified error function and how it was obtained"""
    params: Params
    phi: GridFunction
    derivative_at_zero: float
    f_infinity: float
    method: str
    error_estimate: float
    iterations_or_steps: int
    converged_under_guarantee: bool
    m: float
    warning: Optional[str] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    def summary(self) -> Dict:
        """Scalar fields only, for JSON reports"""
        return {
            "delta": self.params.delta,
            "gamma": self.params.gamma,
            "method": self.method,
            "derivative_at_zero": self.derivative_at_zero,
            "f_infinity": self.f_infinity,
            "error_estimate": self.error_estimate,
            "iterations_or_steps": self.iterations_or_steps,
            "converged_under_guarantee": self.converged_under_guarantee,
            "M": self.m,
            "x_max": self.phi.grid.x_max,
            "grid_points": self.phi.grid.size,
            "warning": self.warning,
        }


def validate_phi(phi: GridFunction, tol: float):
    """Raise ValueError unless phi(0)=0, phi is nondecreasing, in [0,1] and ends at 1"""
    values = phi.values
    if values[0] != 0.0:
        raise ValueError("solution does not start at 0")
    if np.any(np.diff(values) < 0.0):
        raise ValueError("solution is not nondecreasing")
    if values.min() < 0.0 or values.max() > 1.0:
        raise ValueError("solution leaves [0, 1]")
    if abs(values[-1] - 1.0) > 10.0 * tol:
        raise ValueError(f"solution ends at {values[-1]!r}, not 1")


def truncation_bound(p: Params, tail_epsilon: float = DEFAULT_TAIL_EPSILON) -> float:
    """Smallest x with exp(-c x^2) <= tail_epsilon, c = min(1,1+gamma)/max(1,1+delta); at least 5"""
    if not tail_epsilon > 0:
        raise ValueError("tail_epsilon must be positive")
    if tail_epsilon >= 1.0:
        return X_MAX_FLOOR

    c = min(1.0, 1.0 + p.gamma) / max(1.0, 1.0 + p.delta)
    return max(math.sqrt(math.log(1.0 / tail_epsilon) / c), X_MAX_FLOOR)


def compute_F(h: GridFunction, p: Params) -> Tuple[GridFunction, float]:
    """F(x; h) on the grid of h and its value at x_max (standing in for F(+inf; h))"""
    if not h.in_k():
        raise ValueError("h is not in K (needs h(0) = 0 and 0 <= h <= 1)")

    grid = h.grid
    x = grid.points
    conductivity = 1.0 + p.delta * h.values
    capacity = 1.0 + p.gamma * h.values

    exponent = cumulative_integral(GridFunction(grid, 2.0 * x * capacity / conductivity))
    F = cumulative_integral(GridFunction(grid, np.exp(-exponent.values) / conductivity))

    return F, float(F.values[-1])


def _apply_T(h: GridFunction, p: Params) -> Tuple[GridFunction, float]:
    F, f_infinity = compute_F(h, p)
    return GridFunction(h.grid, F.values / f_infinity), f_infinity


def apply_T(h: GridFunction, p: Params) -> GridFunction:
    """T(h) = F(.; h) / F(+inf; h)"""
    return _apply_T(h, p)[0]


def posterior_error_bound(m: float, last_step: float) -> Optional[float]:
    """Banach a-posteriori bound M/(1-M) * ||h_{k+1} - h_k||; None when M >= 1"""
    if m < 0:
        raise ValueError("contraction constant must be nonnegative")
    if m >= 1.0:
        return None
    return m / (1.0 - m) * last_step


def solve_phi(p: Params, opts: Optional[SolverOptions] = None) -> PhiSolution:
    """Iterate h_{k+1} = T(h_k) from h_0 = 0 until the stopping rule holds

    Inside the region the a-posteriori bound and the raw increment must both
    be within tol. Outside it only the increment is checked and the result
    carries a warning instead of a guarantee.
    """
    opts = opts or SolverOptions()
    report = contraction_constants(p)
    x_max = opts.x_max_override or truncation_bound(p, opts.tail_epsilon)
    grid = make_uniform_grid(x_max, opts.grid_points)

    warning = None
    if not report.in_region:
        warning = f"M = {report.m:.6g} >= 1: heuristic stop, no uniqueness guarantee"
        print(f"[PICARD] ⚠️ ({p.delta}, {p.gamma}): {warning}")

    h = GridFunction.constant(grid, 0.0)
    step = math.inf

    for iteration in range(1, opts.max_iterations + 1):
        h_next, f_infinity = _apply_T(h, p)
        step = sup_norm_diff(h_next, h)
        bound = posterior_error_bound(report.m, step)
        h = h_next

        if config.VERBOSE:
            print(f"[PICARD] iter {iteration}: step={step:.3e} bound={bound}")

        if bound is None:
            done, estimate = step <= opts.tol, step
        else:
            done, estimate = bound <= opts.tol and step <= opts.tol, bound

        if done:
            validate_phi(h, opts.tol)
            return PhiSolution(
                params=p,
                phi=h,
                derivative_at_zero=1.0 / f_infinity,
                f_infinity=f_infinity,
                method="picard",
                error_estimate=estimate,
                iterations_or_steps=iteration,
                converged_under_guarantee=bound is not None,
                m=report.m,
                warning=warning,
            )

    raise NonConvergenceError(
        f"picard iteration did not converge in {opts.max_iterations} iterations "
        f"(last step {step:.3e})",
        last_iterate=h,
        residual=step,
        iterations=opts.max_iterations,
    )
