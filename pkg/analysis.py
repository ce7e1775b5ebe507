"""Reference error function, property verdicts and cross-method comparison"""
import math
from dataclasses import dataclass, asdict
from typing import Dict, Optional

import numpy as np

from config import BOUNDS_TOL, CONCAVITY_TOL, RESIDUAL_EDGE_POINTS
from contraction import Params
from grid import GridFunction, evaluate, sup_norm_diff
from picard import PhiSolution, apply_T

TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
SERIES_CROSSOVER = 3.0
CONTINUED_FRACTION_TERMS = 200


def _erf_series(x: float) -> float:
    """erf(x) = 2x/sqrt(pi) e^{-x^2} sum_n (2x^2)^n / (1*3*...*(2n+1)); all terms positive"""
    two_x2 = 2.0 * x * x
    term, total, n = 1.0, 1.0, 0
    while term > 1e-17 * total:
        n += 1
        term *= two_x2 / (2 * n + 1)
        total += term
    return TWO_OVER_SQRT_PI * x * math.exp(-x * x) * total


def _erfc_continued_fraction(x: float) -> float:
    """erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), evaluated backwards"""
    tail = x
    for k in range(CONTINUED_FRACTION_TERMS, 0, -1):
        tail = x + 0.5 * k / tail
    return math.exp(-x * x) / (math.sqrt(math.pi) * tail)


def _erf_scalar(x: float) -> float:
    if math.isnan(x) or x < 0:
        raise ValueError(f"erf_reference is defined on x >= 0, got {x}")
    if x <= SERIES_CROSSOVER:
        return _erf_series(x)
    return 1.0 - _erfc_continued_fraction(x)


def erf_reference(x):
    """Classical error function on the half-line (scalar or array)"""
    if np.ndim(x) == 0:
        return _erf_scalar(float(x))
    return np.vectorize(_erf_scalar, otypes=[float])(np.asarray(x, dtype=float))


def erfc_reference(x: float) -> float:
    """Complementary error function: continued fraction beyond the crossover, 1 - series below"""
    if math.isnan(x) or x < 0:
        raise ValueError(f"erfc_reference is defined on x >= 0, got {x}")
    if x >= SERIES_CROSSOVER:
        return _erfc_continued_fraction(x)
    return 1.0 - _erf_series(x)


@dataclass(frozen=True)
class PropertyReport:
    bounds_ok: bool
    monotone_ok: bool
    concave_ok: Optional[bool]
    fixed_point_residual: float
    ode_residual: float
    max_violation: float

    def passed(self) -> bool:
        return self.bounds_ok and self.monotone_ok and self.concave_ok is not False

    def to_dict(self) -> Dict:
        return asdict(self)


def ode_residual(sol: PhiSolution, p: Params) -> float:
    """Max conservative-form residual |q' + 2x(1+gamma y) y'|, q = (1+delta y) y'

    Both derivatives are central differences; RESIDUAL_EDGE_POINTS points are
    dropped at each end.
    """
    y = sol.phi.values
    x = sol.phi.grid.points
    h = sol.phi.grid.spacing

    yp = np.gradient(y, h)
    flux = (1.0 + p.delta * y) * yp
    residual = np.abs(np.gradient(flux, h) + 2.0 * x * (1.0 + p.gamma * y) * yp)

    edge = RESIDUAL_EDGE_POINTS
    interior = residual[edge:-edge]
    return float(interior.max()) if interior.size else 0.0


def check_properties(
    sol: PhiSolution,
    p: Params,
    tol: float = BOUNDS_TOL,
    concavity_tol: float = CONCAVITY_TOL,
) -> PropertyReport:
    """Verdicts for boundedness, monotonicity and (delta >= 0 only) concavity

    Concavity is judged on second differences relative to their largest
    magnitude, which sits near x = 0.
    """
    values = sol.phi.values
    h = sol.phi.grid.spacing

    bounds_violation = max(-float(values.min()), float(values.max()) - 1.0)
    monotone_violation = -float(np.diff(values).min())
    violations = [bounds_violation, monotone_violation]

    concave_ok = None
    if p.delta >= 0:
        second = (values[2:] - 2.0 * values[1:-1] + values[:-2]) / (h * h)
        scale = float(np.abs(second).max())
        concave_violation = float(second.max()) / scale if scale > 0 else 0.0
        concave_ok = concave_violation <= concavity_tol
        violations.append(concave_violation)

    # measure the fixed-point residual on the projection onto K
    projected = np.clip(values, 0.0, 1.0)
    projected[0] = 0.0
    h_k = GridFunction(sol.phi.grid, projected)
    fixed_point_residual = sup_norm_diff(apply_T(h_k, p), h_k)

    return PropertyReport(
        bounds_ok=bounds_violation <= tol,
        monotone_ok=monotone_violation <= tol,
        concave_ok=concave_ok,
        fixed_point_residual=fixed_point_residual,
        ode_residual=ode_residual(sol, p),
        max_violation=max(violations),
    )


def compare_solutions(a: PhiSolution, b: PhiSolution) -> float:
    """Sup-norm difference, sampled on the finer grid over the common domain"""
    if a.params != b.params:
        raise ValueError("solutions belong to different parameters")

    finer = a if a.phi.grid.spacing <= b.phi.grid.spacing else b
    x_common = min(a.phi.grid.x_max, b.phi.grid.x_max)
    xs = finer.phi.grid.points
    xs = xs[xs <= x_common]

    return float(np.max(np.abs(evaluate(a.phi, xs) - evaluate(b.phi, xs))))
