import numpy as np
import pytest

import oracles
from effode import (
    InputSystem,
    Trajectory,
    check_nonnegativity,
    derivative_field,
    integrate,
    marginal_cost,
    solve,
    state_at,
    trajectory_csv,
)
from effode.errors import DivergenceError, ParameterError, RangeError
from effode.trajectory import build_grid


def test_solve_demo_terminal_state_matches_closed_form(demo_system):
    traj = solve(demo_system, 1.0, 1e-3)
    exact = oracles.demo_state(1.0)
    assert traj.states[-1] == pytest.approx(exact, abs=1e-6)
    # the integrator is far better than the documented tolerance
    assert traj.states[-1] == pytest.approx(exact, abs=1e-10)


def test_solve_zero_system_stays_at_zero():
    sys = InputSystem(dim=2, intercepts=[0.0, 0.0], coefficients=np.zeros((2, 2)))
    traj = solve(sys, 1.0, 0.1)
    assert np.array_equal(traj.states, np.zeros_like(traj.states))


def test_solve_constant_field_grows_linearly():
    b = np.array([3.0, 7.0])
    sys = InputSystem(dim=2, intercepts=b, coefficients=np.zeros((2, 2)))
    traj = solve(sys, 2.0, 0.25)
    expected = traj.grid[:, None] * b[None, :]
    assert np.array_equal(traj.states, expected)


def test_solve_agrees_with_matrix_exponential_oracle(demo_system):
    traj = solve(demo_system, 1.5, 1e-3)
    for y in (0.25, 0.8, 1.5):
        k = int(np.argmin(np.abs(traj.grid - y)))
        exact = oracles.affine_solution(
            demo_system.intercepts, demo_system.coefficients, [0.0, 0.0], traj.grid[k]
        )
        assert traj.states[k] == pytest.approx(exact, rel=1e-10)


def test_grid_covers_interval_with_partial_final_step(demo_system):
    traj = solve(demo_system, 1.0005, 1e-3)
    assert traj.grid[0] == 0.0
    assert traj.grid[-1] == 1.0005
    assert (np.diff(traj.grid) > 0).all()


def test_solve_parameter_errors(demo_system):
    with pytest.raises(ParameterError):
        solve(demo_system, -1.0, 1e-3)
    with pytest.raises(ParameterError):
        solve(demo_system, 1.0, 0.0)
    with pytest.raises(ParameterError):
        solve(demo_system, 1.0, 2.0)


def test_solve_reports_divergence_point():
    sys = InputSystem(dim=1, intercepts=[1.0], coefficients=[[500.0]])
    with pytest.raises(DivergenceError) as err:
        solve(sys, 10.0, 0.5)
    assert "output level" in str(err.value)


def test_state_at_zero_is_zero(demo_trajectory):
    assert np.array_equal(state_at(demo_trajectory, 0.0), np.zeros(2))


def test_state_at_grid_point_is_verbatim(demo_trajectory):
    for k in (1, 500, 1999):
        y = demo_trajectory.grid[k]
        assert np.array_equal(state_at(demo_trajectory, y), demo_trajectory.states[k])


def test_state_at_half_matches_closed_form(demo_trajectory):
    # (e^{0.375} - 1) / 0.75 = 0.6066552194909351
    x = state_at(demo_trajectory, 0.5)
    assert x[0] == pytest.approx(0.6066552194909351, abs=1e-6)
    assert x[1] == pytest.approx(2 * 0.6066552194909351, abs=1e-6)


def test_state_at_between_grid_points_tracks_closed_form(demo_trajectory):
    for y in (0.0004, 0.12345, 0.98765, 1.76543):
        assert state_at(demo_trajectory, y) == pytest.approx(
            oracles.demo_state(y), abs=1e-9
        )


def test_state_at_out_of_range(demo_trajectory):
    with pytest.raises(RangeError):
        state_at(demo_trajectory, -0.5)
    with pytest.raises(RangeError):
        state_at(demo_trajectory, 2.5)


def test_marginal_cost_at_origin_is_intercept_sum(demo_system):
    assert marginal_cost(demo_system, [0.0, 0.0]) == 3.0


def test_marginal_cost_at_unit_output(demo_system, demo_trajectory):
    m = marginal_cost(demo_system, state_at(demo_trajectory, 1.0))
    assert m == pytest.approx(oracles.demo_marginal(1.0), abs=1e-4)
    assert m == pytest.approx(6.3510000498380240, abs=1e-4)


def test_marginal_cost_zero_system():
    sys = InputSystem(dim=2, intercepts=[0.0, 0.0], coefficients=np.zeros((2, 2)))
    assert marginal_cost(sys, [5.0, 5.0]) == 0.0


def test_marginal_cost_increases_along_demo_path(demo_trajectory):
    m = demo_trajectory.derivatives.sum(axis=1)
    assert (np.diff(m) > 0).all()


def test_nonnegativity_demo_path_is_clean(demo_trajectory):
    assert check_nonnegativity(demo_trajectory) == []


def test_nonnegativity_flags_negative_input():
    sys = InputSystem(dim=2, intercepts=[-1.0, 2.0], coefficients=np.zeros((2, 2)))
    traj = solve(sys, 1.0, 0.25)
    violations = check_nonnegativity(traj, tolerance=1e-9)
    assert violations == [(k, 0) for k in range(1, len(traj.grid))]


def test_nonnegativity_empty_trajectory(demo_system):
    empty = Trajectory(
        grid=np.zeros(0),
        states=np.zeros((0, 2)),
        derivatives=np.zeros((0, 2)),
        system=demo_system,
    )
    assert check_nonnegativity(empty) == []


def test_rk4_error_shrinks_at_fourth_order(demo_system):
    exact = oracles.demo_state(1.0)[0]
    errs = []
    for h in (1e-1, 5e-2, 2.5e-2):
        traj = solve(demo_system, 1.0, h)
        errs.append(abs(traj.states[-1][0] - exact))
    assert errs[0] / errs[1] >= 12.0
    assert errs[1] / errs[2] >= 12.0


def test_solution_map_is_linear_in_intercepts():
    A = [[0.2, 0.1], [0.05, 0.3]]
    u = np.array([1.0, 0.0])
    v = np.array([0.5, 2.0])
    t_u = solve(InputSystem(2, u, A), 1.0, 0.01)
    t_v = solve(InputSystem(2, v, A), 1.0, 0.01)
    t_uv = solve(InputSystem(2, u + v, A), 1.0, 0.01)
    assert np.allclose(t_uv.states, t_u.states + t_v.states, rtol=1e-9, atol=1e-12)


def test_stored_derivatives_reevaluate_bitwise(demo_system):
    traj = solve(demo_system, 1.0, 0.01)
    for k in range(len(traj.grid)):
        d = derivative_field(demo_system, traj.states[k])
        assert np.array_equal(d, traj.derivatives[k])


def test_integrate_from_offset_state_matches_oracle(demo_system):
    grid = build_grid(1.0, 0.01)
    states, _ = integrate(demo_system, [0.5, 0.0], grid)
    exact = oracles.affine_solution(
        demo_system.intercepts, demo_system.coefficients, [0.5, 0.0], 1.0
    )
    assert states[-1] == pytest.approx(exact, rel=1e-10)


def test_trajectory_arrays_are_immutable(demo_trajectory):
    with pytest.raises(ValueError):
        demo_trajectory.states[0, 0] = 1.0


def test_trajectory_csv_layout(demo_system):
    traj = solve(demo_system, 0.01, 0.005)
    text = trajectory_csv(traj)
    lines = text.strip().split("\n")
    assert lines[0] == "y,x1,x2,dx1,dx2"
    assert len(lines) == 1 + len(traj.grid)
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[3]) == 1.0  # dx1 at the origin equals the first intercept
    # full round-trip precision
    last = lines[-1].split(",")
    assert float(last[1]) == traj.states[-1][0]
