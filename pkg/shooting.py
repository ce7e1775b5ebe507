"""Shooting on the initial slope: an independent solver for the boundary value problem"""
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

import config
from config import (
    DEFAULT_STEP_COUNT,
    SLOPE_BRACKET_HI_START,
    BOUNDARY_TOL,
    MAX_BRACKET_DOUBLINGS,
    MAX_BISECTIONS,
    ESCAPE_BAND,
    SINGULARITY_FLOOR,
)
from contraction import Params, contraction_constants
from grid import Grid, GridFunction, make_uniform_grid
from picard import PhiSolution, truncation_bound, validate_phi

# terminal misses up to this multiple of tol_boundary are accepted once bisection runs dry
EXHAUSTED_SLACK = 100.0


class SingularityError(ValueError):
    """1 + delta*y fell below the floor: the trajectory left the physical band"""

    def __init__(self, message: str, x: float, y: float):
        super().__init__(message)
        self.x = x
        self.y = y


class BracketError(ValueError):
    pass


class MonotonicityError(ValueError):
    pass


@dataclass(frozen=True)
class ShootingOptions:
    x_max: Optional[float] = None
    step_count: int = DEFAULT_STEP_COUNT
    slope_bracket_hi_start: float = SLOPE_BRACKET_HI_START
    tol_boundary: float = BOUNDARY_TOL
    max_bracket_doublings: int = MAX_BRACKET_DOUBLINGS

    def __post_init__(self):
        if self.x_max is not None and not self.x_max > 0:
            raise ValueError("x_max must be positive")
        if self.step_count < 2 or self.step_count % 2 != 0:
            raise ValueError("step_count must be a positive even integer")
        if not self.slope_bracket_hi_start > 0:
            raise ValueError("slope_bracket_hi_start must be positive")
        if not self.tol_boundary > 0:
            raise ValueError("tol_boundary must be positive")
        if self.max_bracket_doublings < 1:
            raise ValueError("max_bracket_doublings must be positive")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One RK4 integration from (y, y')(0) = (0, slope0)"""
    slope0: float
    grid: Grid
    values: Optional[np.ndarray]
    terminal_y: float
    terminal_yp: float
    escaped: bool
    exit_x: float

    def as_grid_function(self) -> GridFunction:
        if self.values is None:
            raise ValueError("trajectory was integrated without recording")
        if self.escaped:
            raise ValueError(f"trajectory escaped the band at x={self.exit_x:.4g}")
        return GridFunction(self.grid, self.values)


def ode_second_derivative(x: float, y: float, yp: float, p: Params) -> float:
    """y'' = -(delta y'^2 + 2x(1 + gamma y) y') / (1 + delta y)"""
    denominator = 1.0 + p.delta * y
    if denominator < SINGULARITY_FLOOR:
        raise SingularityError(f"1 + delta*y = {denominator:.3e} at x = {x:.6g}", x=x, y=y)
    return -(p.delta * yp * yp + 2.0 * x * (1.0 + p.gamma * y) * yp) / denominator


def integrate_ivp(
    slope0: float,
    p: Params,
    opts: Optional[ShootingOptions] = None,
    record: bool = True,
) -> Trajectory:
    """Fixed-step classical RK4 on (y, y') from x = 0 to x_max

    Stops early when y leaves the escape band; the trajectory is then flagged
    and terminal_y is the value at the exit point.
    """
    if slope0 < 0:
        raise ValueError("slope0 must be nonnegative")

    opts = opts or ShootingOptions()
    x_max = opts.x_max or truncation_bound(p)
    n = opts.step_count
    h = x_max / n
    half = 0.5 * h
    band_lo, band_hi = ESCAPE_BAND

    y, yp = 0.0, float(slope0)
    values = np.zeros(n + 1) if record else None
    escaped = False
    exit_x = x_max

    for k in range(n):
        x = k * h
        k1y, k1p = yp, ode_second_derivative(x, y, yp, p)
        k2y = yp + half * k1p
        k2p = ode_second_derivative(x + half, y + half * k1y, k2y, p)
        k3y = yp + half * k2p
        k3p = ode_second_derivative(x + half, y + half * k2y, k3y, p)
        k4y = yp + h * k3p
        k4p = ode_second_derivative(x + h, y + h * k3y, k4y, p)

        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        yp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)

        if record:
            values[k + 1] = y

        if y < band_lo or y > band_hi:
            escaped = True
            exit_x = (k + 1) * h
            break

    return Trajectory(
        slope0=float(slope0),
        grid=make_uniform_grid(x_max, n + 1),
        values=values,
        terminal_y=y,
        terminal_yp=yp,
        escaped=escaped,
        exit_x=exit_x,
    )


def _terminal(slope: float, p: Params, opts: ShootingOptions) -> float:
    """Terminal y for a trial slope; escapes map to +/-inf"""
    try:
        trajectory = integrate_ivp(slope, p, opts, record=False)
    except SingularityError as e:
        # only an overshooting trajectory can reach the singular level
        if e.y > 1.0:
            return math.inf
        raise

    if trajectory.escaped:
        return math.inf if trajectory.terminal_y > 1.0 else -math.inf
    return trajectory.terminal_y


def shoot(p: Params, opts: Optional[ShootingOptions] = None) -> PhiSolution:
    """Find the initial slope s* with y(x_max) = 1 by bracket doubling and bisection"""
    opts = opts or ShootingOptions()
    opts = replace(opts, x_max=opts.x_max or truncation_bound(p))
    report = contraction_constants(p)
    tol = opts.tol_boundary

    lo, f_lo = 0.0, 0.0
    hi = opts.slope_bracket_hi_start
    f_hi = _terminal(hi, p, opts)
    shots = 1

    doublings = 0
    while f_hi <= 1.0:
        if doublings >= opts.max_bracket_doublings:
            print(f"[SHOOTING] ❌ ({p.delta}, {p.gamma}): no overshoot up to slope {hi:.6g}")
            raise BracketError(
                f"terminal value never exceeds 1 (slope up to {hi:.6g}, terminal {f_hi:.6g})"
            )
        lo, f_lo = hi, f_hi
        hi *= 2.0
        f_hi = _terminal(hi, p, opts)
        shots += 1
        doublings += 1

    slope, error = None, math.inf
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break

        f_mid = _terminal(mid, p, opts)
        shots += 1

        # escapes share +/-inf with the bracket end, so only an inversion is fatal
        if f_mid < f_lo or f_mid > f_hi:
            raise MonotonicityError(
                f"terminal map not increasing on [{lo!r}, {hi!r}]: "
                f"{f_lo!r}, {f_mid!r}, {f_hi!r}"
            )

        if config.VERBOSE:
            print(f"[SHOOTING] slope={mid:.17g} terminal={f_mid:.17g}")

        if abs(f_mid - 1.0) < error:
            slope, error = mid, abs(f_mid - 1.0)
        if error <= tol:
            break

        if f_mid < 1.0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    if slope is None or error > EXHAUSTED_SLACK * tol:
        raise BracketError(f"bisection stalled with terminal error {error:.3e}")

    trajectory = integrate_ivp(slope, p, opts, record=True)
    phi = GridFunction(trajectory.grid, np.clip(trajectory.as_grid_function().values, 0.0, 1.0))
    validate_phi(phi, max(tol, error))

    warning = None
    if not report.in_region:
        warning = f"M = {report.m:.6g} >= 1: no uniqueness guarantee"

    return PhiSolution(
        params=p,
        phi=phi,
        derivative_at_zero=slope,
        f_infinity=1.0 / slope,
        method="shooting",
        error_estimate=error,
        iterations_or_steps=shots,
        converged_under_guarantee=report.in_region and error <= tol,
        m=report.m,
        warning=warning,
    )
