import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contraction import Params, contraction_constants
from grid import GridFunction, evaluate, make_uniform_grid, sup_norm_diff
from picard import (
    NonConvergenceError,
    PhiSolution,
    SolverOptions,
    apply_T,
    compute_F,
    posterior_error_bound,
    solve_phi,
    truncation_bound,
    validate_phi,
)


def test_truncation_bound_classical():
    assert truncation_bound(Params(0.0, 0.0)) == pytest.approx(math.sqrt(16.0 * math.log(10.0)), rel=1e-12)


def test_truncation_bound_grows_with_stiffness():
    base = truncation_bound(Params(0.0, 0.0))
    assert truncation_bound(Params(1.5, 0.0)) > base
    assert truncation_bound(Params(0.0, -0.9)) > base
    assert truncation_bound(Params(0.0, 5.0)) == base


def test_truncation_bound_floor():
    assert truncation_bound(Params(0.0, 0.0), tail_epsilon=1.0) == 5.0
    assert truncation_bound(Params(0.0, 0.0), tail_epsilon=0.5) == 5.0
    with pytest.raises(ValueError):
        truncation_bound(Params(0.0, 0.0), tail_epsilon=0.0)


@pytest.mark.parametrize(
    "kwargs",
    [{"tol": 0.0}, {"max_iterations": 0}, {"grid_points": 2000}, {"grid_points": 101}, {"x_max_override": -1.0}],
)
def test_solver_options_validation(kwargs):
    with pytest.raises(ValueError):
        SolverOptions(**kwargs)


def test_posterior_error_bound():
    assert posterior_error_bound(0.5, 1e-3) == pytest.approx(1e-3)
    assert posterior_error_bound(0.0, 1.0) == 0.0
    assert posterior_error_bound(1.0, 1e-3) is None
    with pytest.raises(ValueError):
        posterior_error_bound(-0.1, 1.0)


def test_T_of_zero_is_erf(erf_oracle):
    grid = make_uniform_grid(truncation_bound(Params(0.3, -0.2)), 2001)
    image = apply_T(GridFunction.constant(grid, 0.0), Params(0.3, -0.2))
    assert np.max(np.abs(image.values - erf_oracle(grid.points))) <= 1e-9


def test_compute_F_requires_k():
    grid = make_uniform_grid(6.0, 101)
    with pytest.raises(ValueError, match="not in K"):
        compute_F(GridFunction.constant(grid, 0.5), Params(0.1, 0.1))


def test_f_infinity_between_bounds(erf_oracle):
    p = Params(0.1, 0.1)
    report = contraction_constants(p)
    grid = make_uniform_grid(truncation_bound(p), 2001)
    _, f_infinity = compute_F(GridFunction.from_callable(grid, erf_oracle), p)
    assert 1.0 / report.m2 <= f_infinity <= report.m1


def test_classical_limit(classical, erf_oracle):
    xs = np.linspace(0.0, 5.0, 2001)
    assert np.max(np.abs(evaluate(classical.phi, xs) - erf_oracle(xs))) <= 1e-8
    assert classical.iterations_or_steps == 2
    assert classical.converged_under_guarantee
    assert classical.method == "picard"
    assert classical.derivative_at_zero == pytest.approx(2.0 / math.sqrt(math.pi), abs=1e-8)
    assert classical.warning is None


def test_inside_region_solution(inside):
    values = inside.phi.values
    assert values[0] == 0.0
    assert values[-1] == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.diff(values) >= 0.0)
    assert inside.error_estimate <= 1e-10
    assert inside.converged_under_guarantee
    assert inside.f_infinity * inside.derivative_at_zero == pytest.approx(1.0, rel=1e-15)
    assert sup_norm_diff(apply_T(inside.phi, inside.params), inside.phi) <= 2e-10


def test_summary_fields(inside):
    summary = inside.summary()
    assert summary["method"] == "picard"
    assert summary["M"] == pytest.approx(0.242)
    assert summary["grid_points"] == 2001
    assert summary["x_max"] == pytest.approx(truncation_bound(inside.params))


def test_non_convergence_keeps_last_iterate():
    with pytest.raises(NonConvergenceError) as info:
        solve_phi(Params(0.1, 0.1), SolverOptions(max_iterations=1))
    error = info.value
    assert error.iterations == 1
    assert error.residual == pytest.approx(1.0, abs=1e-6)
    assert error.last_iterate.in_k()


def test_x_max_override():
    sol = solve_phi(Params(0.0, 0.0), SolverOptions(x_max_override=7.5, grid_points=1501))
    assert sol.phi.grid.x_max == 7.5
    assert sol.phi.grid.size == 1501


def test_validate_phi_rejects():
    grid = make_uniform_grid(1.0, 5)
    with pytest.raises(ValueError, match="start"):
        validate_phi(GridFunction(grid, [0.1, 0.5, 0.8, 0.9, 1.0]), 1e-10)
    with pytest.raises(ValueError, match="nondecreasing"):
        validate_phi(GridFunction(grid, [0.0, 0.5, 0.4, 0.9, 1.0]), 1e-10)
    with pytest.raises(ValueError, match="ends"):
        validate_phi(GridFunction(grid, [0.0, 0.5, 0.6, 0.7, 0.8]), 1e-10)


def test_unknown_method_rejected(inside):
    with pytest.raises(ValueError, match="unknown method"):
        PhiSolution(
            params=inside.params,
            phi=inside.phi,
            derivative_at_zero=1.0,
            f_infinity=1.0,
            method="collocation",
            error_estimate=0.0,
            iterations_or_steps=1,
            converged_under_guarantee=False,
            m=0.0,
        )


def _smooth_k_member(grid, scale, rate, kind):
    x = grid.points
    if kind == "tanh":
        return GridFunction(grid, scale * np.tanh(rate * x))
    return GridFunction(grid, scale * (1.0 - np.exp(-rate * x * x)))


k_members = st.tuples(
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=0.05, max_value=20.0),
    st.sampled_from(["tanh", "gauss"]),
)


@settings(max_examples=50, deadline=None)
@given(first=k_members, second=k_members)
def test_T_contracts_inside_region(first, second):
    p = Params(0.1, 0.1)
    m = contraction_constants(p).m
    grid = make_uniform_grid(truncation_bound(p), 2001)
    h1 = _smooth_k_member(grid, *first)
    h2 = _smooth_k_member(grid, *second)

    distance = sup_norm_diff(h1, h2)
    image_distance = sup_norm_diff(apply_T(h1, p), apply_T(h2, p))
    assert image_distance <= m * distance * (1.0 + 1e-6) + 1e-15


@settings(max_examples=30, deadline=None)
@given(k_members)
def test_T_maps_k_into_k(member):
    p = Params(-0.2, 0.1)
    grid = make_uniform_grid(truncation_bound(p), 401)
    image = apply_T(_smooth_k_member(grid, *member), p)
    assert image.in_k()
    assert image.values[-1] == 1.0
    assert np.all(np.diff(image.values) >= 0.0)


@settings(max_examples=100, deadline=None)
@given(
    tail=st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=200, max_size=200),
    pair=st.sampled_from([(0.1, 0.1), (-0.2, 0.1), (1.5, -0.6)]),
)
def test_T_maps_arbitrary_samples_into_k(tail, pair):
    p = Params(*pair)
    grid = make_uniform_grid(truncation_bound(p), 201)
    image = apply_T(GridFunction(grid, [0.0] + tail), p)
    assert image.in_k()
    assert image.values[-1] == 1.0
    assert np.all(np.diff(image.values) >= 0.0)
    # strictly increasing until the tail underflows against the total
    rising = grid.points[1:] <= 2.5
    assert np.all(np.diff(image.values)[rising] > 0.0)


def test_outside_region_stops_with_k_function():
    p = Params(1.5, -0.6)
    sol = solve_phi(p)
    assert not sol.converged_under_guarantee
    assert sol.warning is not None
    assert sol.phi.in_k()
    assert sol.iterations_or_steps < SolverOptions().max_iterations
    assert np.all(np.diff(sol.phi.values) >= 0.0)


def test_iteration_count_within_geometric_bound(inside):
    p = inside.params
    tol = SolverOptions().tol
    m = contraction_constants(p).m
    zero = GridFunction.constant(inside.phi.grid, 0.0)
    first_step = sup_norm_diff(apply_T(zero, p), zero)
    bound = math.ceil(math.log(tol * (1.0 - m) / first_step) / math.log(m)) + 1
    assert inside.iterations_or_steps <= bound


def test_grid_refinement_changes_phi_little(inside):
    p = inside.params
    fine = solve_phi(p, SolverOptions(grid_points=4001))
    assert fine.phi.grid.x_max == inside.phi.grid.x_max
    assert np.max(np.abs(fine.phi.values[::2] - inside.phi.values)) <= 1e-8
