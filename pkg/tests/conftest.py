import numpy as np
import pytest

from effode import Ball, FeasibleRegion, InputSystem, LowerBound, solve


def make_demo_system():
    """Two-input demo: rates (1 + 0.25(x1+x2), 2 + 0.5(x1+x2))."""
    return InputSystem(
        dim=2,
        intercepts=[1.0, 2.0],
        coefficients=[[0.25, 0.25], [0.5, 0.5]],
    )


def make_demo_region():
    """Explicit region: x1 >= 1.25, x2 >= 2.5, inside the radius-10 ball."""
    return FeasibleRegion(
        (LowerBound(0, 1.25), LowerBound(1, 2.5), Ball(np.zeros(2), 10.0))
    )


@pytest.fixture
def demo_system():
    return make_demo_system()


@pytest.fixture
def demo_region():
    return make_demo_region()


@pytest.fixture(scope="session")
def demo_trajectory():
    return solve(make_demo_system(), 2.0, 1e-3)
