"""Uniform grids and sampled functions on the truncated half-line [0, x_max]"""
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from config import SPACING_RTOL

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing, uniformly spaced points from 0 to x_max (odd count)"""
    points: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)

        if points.ndim != 1 or points.size < 3 or points.size % 2 == 0:
            raise ValueError(f"grid needs an odd number of points >= 3, got {points.size}")
        if points[0] != 0.0:
            raise ValueError("grid must start at 0")

        steps = np.diff(points)
        if np.any(steps <= 0):
            raise ValueError("grid points must be strictly increasing")

        # spacing check allows for the rounding of the largest abscissa
        allowance = SPACING_RTOL * steps[0] + 8 * np.finfo(float).eps * points[-1]
        if np.max(np.abs(steps - steps[0])) > allowance:
            raise ValueError("grid spacing must be uniform")

        points.flags.writeable = False
        object.__setattr__(self, "points", points)

    @property
    def x_max(self) -> float:
        return float(self.points[-1])

    @property
    def size(self) -> int:
        return int(self.points.size)

    @property
    def spacing(self) -> float:
        return self.x_max / (self.size - 1)

    def same_as(self, other: "Grid") -> bool:
        return self is other or (self.size == other.size and np.array_equal(self.points, other.points))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a real function on a Grid"""
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)

        if values.shape != self.grid.points.shape:
            raise ValueError(
                f"values length {values.size} does not match grid length {self.grid.size}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")

        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls(grid, fn(grid.points))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "GridFunction":
        return cls(grid, np.full(grid.size, float(value)))

    def in_k(self) -> bool:
        """Discrete membership in K: h(0) = 0 and 0 <= h <= 1"""
        return bool(self.values[0] == 0.0 and self.values.min() >= 0.0 and self.values.max() <= 1.0)

    @cached_property
    def _interpolant(self) -> PchipInterpolator:
        return PchipInterpolator(self.grid.points, self.values, extrapolate=False)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return evaluate(self, x)


def make_uniform_grid(x_max: float, n: int) -> Grid:
    """Build n equally spaced points on [0, x_max]

    Example:
        make_uniform_grid(1.0, 3) -> points [0.0, 0.5, 1.0]
    """
    if not x_max > 0:
        raise ValueError(f"x_max must be positive, got {x_max}")
    if int(n) != n or n < 3 or n % 2 == 0:
        raise ValueError(f"n must be an odd integer >= 3, got {n}")

    return Grid(np.linspace(0.0, float(x_max), int(n)))


def evaluate(f: GridFunction, x: ArrayLike) -> ArrayLike:
    """Monotone piecewise-cubic interpolation of f at x (scalar or array)"""
    xs = np.asarray(x, dtype=float)
    points = f.grid.points

    if np.any(np.isnan(xs)) or np.any(xs < 0.0) or np.any(xs > f.grid.x_max):
        raise ValueError(f"x outside [0, {f.grid.x_max}]")

    out = f._interpolant(xs)

    # exact at grid points
    idx = np.minimum(np.searchsorted(points, xs), f.grid.size - 1)
    out = np.where(points[idx] == xs, f.values[idx], out)

    # pchip never leaves the sample range; clip away rounding
    out = np.clip(out, f.values.min(), f.values.max())

    if np.ndim(x) == 0:
        return float(out)
    return out


def sup_norm_diff(f: GridFunction, g: GridFunction) -> float:
    """Max over grid points of |f - g|"""
    if not f.grid.same_as(g.grid):
        raise ValueError("grid functions live on different grids")
    return float(np.max(np.abs(f.values - g.values)))


def cumulative_integral(f: GridFunction) -> GridFunction:
    """Running integral from 0 by composite Simpson

    Even indices sum whole Simpson pairs; odd indices add the single-interval
    rule (h/12)(5f0 + 8f1 - f2) to the preceding even value. Where the three
    samples of a pair share a sign, that half-pair value is clamped between
    0 and the pair total, so a nonnegative integrand always gives a
    nondecreasing result. Resolved integrands never reach the clamp.
    """
    y = f.values
    h = f.grid.spacing
    out = np.zeros_like(y)

    left, mid, right = y[:-2:2], y[1:-1:2], y[2::2]
    pair = h / 3.0 * (left + 4.0 * mid + right)
    half = h / 12.0 * (5.0 * left + 8.0 * mid - right)

    low = np.minimum(np.minimum(left, mid), right)
    high = np.maximum(np.maximum(left, mid), right)
    same_sign = (low >= 0.0) | (high <= 0.0)
    clamped = np.clip(half, np.minimum(pair, 0.0), np.maximum(pair, 0.0))
    half = np.where(same_sign, clamped, half)

    out[2::2] = np.cumsum(pair)
    out[1::2] = out[:-2:2] + half

    return GridFunction(f.grid, out)
