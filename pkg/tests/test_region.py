import numpy as np
import pytest

import oracles
from effode import (
    Ball,
    FeasibleRegion,
    InputSystem,
    LowerBound,
    MarginalCutoff,
    RegionTemplate,
    contains,
    epsilon_region,
    ray_exit,
    ray_exit_info,
)
from effode.errors import (
    AnchoringError,
    DirectionError,
    ParameterError,
    RegionConstructionError,
    UnboundedRayError,
)

ANCHOR = np.array([1.25, 2.5])


def test_contains_sampled_point(demo_region):
    assert contains(demo_region, [1.25, 6.21])


def test_contains_rejects_point_below_bound(demo_region):
    assert not contains(demo_region, [1.25, 2.49])


def test_contains_rejects_point_outside_ball(demo_region):
    assert not contains(demo_region, [8.0, 8.0])  # 64 + 64 > 100


def test_region_needs_a_constraint():
    with pytest.raises(ParameterError):
        FeasibleRegion(())


def test_ray_exit_vertical_hits_ball(demo_region):
    worst = ray_exit(demo_region, ANCHOR, [1.25, 6.21])
    assert worst == pytest.approx([1.25, np.sqrt(98.4375)], abs=1e-9)


def test_ray_exit_horizontal_hits_ball(demo_region):
    worst = ray_exit(demo_region, ANCHOR, [2.25, 2.5])
    assert worst == pytest.approx([np.sqrt(93.75), 2.5], abs=1e-9)
    t = oracles.ray_exit_t_bisect(demo_region, ANCHOR, np.array([1.0, 0.0]))
    assert worst[0] == pytest.approx(1.25 + t, abs=1e-7)


def test_ray_that_never_leaves_is_an_error():
    region = FeasibleRegion((LowerBound(0, 0.0),))
    with pytest.raises(UnboundedRayError):
        ray_exit(region, [1.0, 1.0], [2.0, 1.0])


def test_ray_origin_must_be_inside(demo_region):
    with pytest.raises(AnchoringError):
        ray_exit(demo_region, [0.0, 0.0], [1.0, 1.0])


def test_ray_direction_must_be_nondegenerate(demo_region):
    with pytest.raises(DirectionError):
        ray_exit(demo_region, ANCHOR, ANCHOR + 1e-13)


def test_ray_exit_reports_all_tight_constraints():
    region = FeasibleRegion((LowerBound(0, 0.0), LowerBound(1, 0.0)))
    info = ray_exit_info(region, [1.0, 1.0], [0.0, 0.0])
    assert info.t == pytest.approx(1.0, abs=1e-12)
    assert info.tight == (0, 1)


def test_ray_exit_collinearity(demo_region):
    origin = ANCHOR
    through = np.array([2.0, 5.0])
    info = ray_exit_info(demo_region, origin, through)
    direction = through - origin
    offset = info.point - origin
    ratio = offset / direction
    assert ratio[0] == pytest.approx(ratio[1], rel=1e-9)
    assert ratio[0] >= 0


def test_ball_only_exit_matches_quadratic_solution():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        center = rng.uniform(-2, 2, n)
        radius = float(rng.uniform(1, 6))
        origin = center + rng.uniform(-0.3, 0.3, n)
        direction = rng.normal(size=n)
        region = FeasibleRegion((Ball(center, radius),))
        info = ray_exit_info(region, origin, origin + direction)
        # independent quadratic: |o - c + t d|^2 = r^2
        rel = origin - center
        a = direction @ direction
        b = direction @ rel
        g = rel @ rel - radius**2
        t_exact = (-b + np.sqrt(b * b - a * g)) / a
        assert info.t == pytest.approx(t_exact, rel=1e-12, abs=1e-12)


def test_closed_form_exits_match_membership_bisection():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(2, 6))
        anchor = rng.uniform(0.5, 4.0, n)
        bounds = tuple(
            LowerBound(i, float(anchor[i] - rng.uniform(0.05, 1.0))) for i in range(n)
        )
        center = anchor + rng.uniform(-1.0, 1.0, n)
        radius = float(np.linalg.norm(anchor - center) + rng.uniform(2.0, 6.0))
        region = FeasibleRegion(bounds + (Ball(center, radius),))
        direction = rng.normal(size=n)
        info = ray_exit_info(region, anchor, anchor + direction)
        t_oracle = oracles.ray_exit_t_bisect(region, anchor, direction)
        assert abs(info.t - t_oracle) <= 1e-7 * max(1.0, info.t)


def test_boundary_bracketing(demo_region):
    rng = np.random.default_rng(3)
    for _ in range(100):
        direction = rng.normal(size=2)
        direction[1] = abs(direction[1])  # keep exits away from the anchor corner
        direction[0] = abs(direction[0])
        info = ray_exit_info(demo_region, ANCHOR, ANCHOR + direction)
        assert contains(demo_region, ANCHOR + (info.t - 1e-6) * direction)
        assert not contains(demo_region, ANCHOR + (info.t + 1e-6) * direction)


def test_cutoff_exit_found_by_bisection(demo_system):
    region = epsilon_region(demo_system, ANCHOR, epsilon=0.1)
    direction = np.array([0.0, 1.0])
    info = ray_exit_info(region, ANCHOR, ANCHOR + direction)
    t_oracle = oracles.ray_exit_t_bisect(region, ANCHOR, direction)
    assert abs(info.t - t_oracle) <= 1e-6 * max(1.0, info.t)
    # at the exit the reciprocal-rate sum sits at the cutoff
    field = demo_system.intercepts + demo_system.coefficients @ info.point
    assert float(np.sum(1.0 / field)) == pytest.approx(0.1, abs=1e-6)


def test_epsilon_region_contains_sampled_point(demo_system):
    region = epsilon_region(demo_system, ANCHOR, epsilon=0.1)
    assert contains(region, [1.25, 6.21])


def test_epsilon_region_rejects_anchor_that_fails_cutoff(demo_system):
    # reciprocal-rate sum at the anchor is about 0.774
    with pytest.raises(RegionConstructionError):
        epsilon_region(demo_system, ANCHOR, epsilon=10.0)


def test_epsilon_region_constant_field_reduces_to_bounds():
    sys = InputSystem(dim=2, intercepts=[1.0, 1.0], coefficients=np.zeros((2, 2)))
    region = epsilon_region(sys, [2.0, 3.0], epsilon=1.0)
    # cutoff sum is 2 everywhere, so membership is the anchored orthant
    assert contains(region, [2.0, 3.0])
    assert contains(region, [50.0, 1000.0])
    assert not contains(region, [1.9, 3.0])


def test_cutoff_sum_monotone_for_nonnegative_coefficients():
    rng = np.random.default_rng(19)
    for _ in range(100):
        n = int(rng.integers(2, 5))
        sys = InputSystem(
            dim=n,
            intercepts=rng.uniform(0.5, 2.0, n),
            coefficients=rng.uniform(0.0, 1.0, (n, n)),
        )
        x = rng.uniform(0.0, 3.0, n)
        smaller = x * rng.uniform(0.0, 1.0, n)

        def recip_sum(p):
            field = sys.intercepts + sys.coefficients @ p
            return float(np.sum(1.0 / field))

        assert recip_sum(smaller) >= recip_sum(x)


def test_template_anchoring():
    template = RegionTemplate((Ball(np.zeros(2), 10.0),))
    region = template.anchored_at([1.0, 2.0])
    assert contains(region, [1.0, 2.0])
    assert not contains(region, [0.9, 2.0])
    assert not contains(region, [9.0, 5.0])


def test_constraint_parameter_validation():
    with pytest.raises(ParameterError):
        Ball(np.zeros(2), -1.0)
    with pytest.raises(ParameterError):
        LowerBound(-1, 0.0)
    with pytest.raises(ParameterError):
        MarginalCutoff(InputSystem(1, [1.0], [[0.0]]), 0.0)
