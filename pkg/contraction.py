"""Contraction constants of the fixed-point map and the guaranteed parameter region"""
import math
from dataclasses import dataclass, asdict
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import bisect

from config import (
    PARAM_FLOOR,
    BOUNDARY_SEARCH_CAP,
    BOUNDARY_SCAN_POINTS,
    BOUNDARY_TOL_DEFAULT,
)

SQRT_PI = math.sqrt(math.pi)
SELF_CHECK_RTOL = 1e-14


@dataclass(frozen=True)
class Params:
    """The pair (delta, gamma); delta is the conductivity slope, gamma the capacity slope"""
    delta: float
    gamma: float

    def __post_init__(self):
        for name in ("delta", "gamma"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or 1.0 + value < PARAM_FLOOR:
                raise ValueError(f"{name} outside (−1,∞)")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class ContractionReport:
    params: Params
    m1: float
    m2: float
    m3: float
    m: float
    in_region: bool

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["delta"] = self.params.delta
        data["gamma"] = self.params.gamma
        del data["params"]
        return data


class RegionRecord(NamedTuple):
    delta: float
    gamma: float
    m: float
    in_region: bool


def _constants(delta, gamma) -> Tuple[np.ndarray, ...]:
    """M1, M2, M3, M and the directly displayed M, elementwise over arrays"""
    d = np.asarray(delta, dtype=float)
    g = np.asarray(gamma, dtype=float)

    max_d = np.maximum(1.0, 1.0 + d)
    min_d = np.minimum(1.0, 1.0 + d)
    max_g = np.maximum(1.0, 1.0 + g)
    min_g = np.minimum(1.0, 1.0 + g)

    bracket = 2.0 * np.abs(d) + np.abs(d - g) * max_d / (min_d * min_g)

    m1 = SQRT_PI * np.sqrt(max_d) / (2.0 * min_d * np.sqrt(min_g))
    m2 = 2.0 * max_d * np.sqrt(max_g) / (SQRT_PI * np.sqrt(min_d))
    m3 = SQRT_PI * np.sqrt(max_d) / (4.0 * min_d ** 2 * np.sqrt(min_g)) * bracket
    m = 2.0 * m2 * m3

    m_direct = max_d ** 1.5 * np.sqrt(max_g) / (min_d ** 2.5 * np.sqrt(min_g)) * bracket

    return m1, m2, m3, m, m_direct


def contraction_m(delta, gamma) -> np.ndarray:
    """Contraction constant M(delta, gamma) for scalars or arrays (no domain check)"""
    return _constants(delta, gamma)[3]


def contraction_constants(p: Params) -> ContractionReport:
    """Evaluate M1, M2, M3 and M = 2*M2*M3 for a parameter pair"""
    m1, m2, m3, m, m_direct = (float(v) for v in _constants(p.delta, p.gamma))

    # the product form and the displayed closed form must agree
    if abs(m - m_direct) > SELF_CHECK_RTOL * max(abs(m_direct), np.finfo(float).tiny):
        raise ArithmeticError(
            f"contraction constant self-check failed at {p}: {m!r} vs {m_direct!r}"
        )

    return ContractionReport(params=p, m1=m1, m2=m2, m3=m3, m=m, in_region=m < 1.0)


def remark_closed_form(delta: float) -> float:
    """M(delta, 0) for delta > 0 in closed form: delta (1+delta)^(3/2) (3+delta)"""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return delta * (1.0 + delta) ** 1.5 * (3.0 + delta)


def earlier_closed_form(delta: float) -> float:
    """The older sufficient condition for gamma = 0 (must be < 1), weaker than M(delta, 0) < 1"""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    root = (1.0 + delta) ** 1.5
    return 0.5 * delta * root * (3.0 + delta) * (1.0 + root)


def earlier_boundary(tol: float = BOUNDARY_TOL_DEFAULT) -> float:
    """Largest delta admitted by the older gamma = 0 condition"""
    return float(bisect(lambda d: earlier_closed_form(d) - 1.0, 1e-12, 1.0, xtol=tol))


def _axis(bounds: Sequence[float], count: int, name: str) -> np.ndarray:
    lo, hi = float(bounds[0]), float(bounds[1])

    if lo > hi:
        raise ValueError(f"{name} range is reversed: [{lo}, {hi}]")
    if 1.0 + lo < PARAM_FLOOR:
        raise ValueError(f"{name} range leaves (−1,∞)")
    if count < 1:
        raise ValueError(f"{name} resolution must be positive")

    if count == 1:
        if lo != hi:
            raise ValueError(f"{name} resolution 1 needs a degenerate range")
        return np.array([lo])

    axis = np.linspace(lo, hi, count)
    # keep the classical point on the lattice whenever the range spans it
    if lo < 0.0 < hi:
        axis = np.union1d(axis, [0.0])
    return axis


def region_scan(
    delta_range: Sequence[float],
    gamma_range: Sequence[float],
    resolution: Union[int, Tuple[int, int]],
) -> List[RegionRecord]:
    """Evaluate M on a rectangular (delta, gamma) lattice, delta-major order"""
    if isinstance(resolution, int):
        resolution = (resolution, resolution)

    deltas = _axis(delta_range, resolution[0], "delta")
    gammas = _axis(gamma_range, resolution[1], "gamma")

    dd, gg = np.meshgrid(deltas, gammas, indexing="ij")
    m = contraction_m(dd, gg)

    return [
        RegionRecord(float(d), float(g), float(v), bool(v < 1.0))
        for d, g, v in zip(dd.ravel(), gg.ravel(), m.ravel())
    ]


def region_boundary(
    gamma: float,
    tol: float = BOUNDARY_TOL_DEFAULT,
    side: str = "upper",
) -> Optional[float]:
    """Edge of the region along fixed gamma, or None if M never crosses 1

    side="upper" walks delta from 0 up to the search cap, side="lower" walks
    delta from 0 down towards -1.
    """
    Params(0.0, gamma)

    if side == "upper":
        deltas = np.linspace(0.0, BOUNDARY_SEARCH_CAP, BOUNDARY_SCAN_POINTS)
    elif side == "lower":
        deltas = np.linspace(0.0, -1.0 + PARAM_FLOOR, BOUNDARY_SCAN_POINTS)
    else:
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")

    excess = contraction_m(deltas, gamma) - 1.0
    crossings = np.nonzero((excess[:-1] < 0.0) != (excess[1:] < 0.0))[0]
    if crossings.size == 0:
        return None

    i = int(crossings[0])
    if excess[i] == 0.0:
        return float(deltas[i])
    if excess[i + 1] == 0.0:
        return float(deltas[i + 1])

    a, b = sorted((float(deltas[i]), float(deltas[i + 1])))
    return float(bisect(lambda d: float(contraction_m(d, gamma)) - 1.0, a, b, xtol=tol))
