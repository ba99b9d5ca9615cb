import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from semikernel import rays
from semikernel.errors import DomainError
from semikernel.model import OperatorSpec, discriminant, ell
from semikernel.rays import Branch, PointKind, Reach

TOY = OperatorSpec.toy(2, 0.01)


def test_trajectory_reaches_turning_point():
    st_ = rays.trajectory((0.5, 0), [0.0], Branch.MINUS, 1.0)
    assert np.allclose(st_.x, 0, atol=1e-15)
    assert np.allclose(st_.xi, 0, atol=1e-15)


@pytest.mark.parametrize("branch", list(Branch))
def test_trajectory_initial_state(branch):
    st_ = rays.trajectory((0.5, 0.2), [0.6], branch, 0.0)
    assert np.array_equal(st_.x, [0.5, 0.2])
    assert st_.xi[0] == branch.sign * math.sqrt(1.0 - 0.36)


@pytest.mark.parametrize("branch", list(Branch))
def test_energy_example(branch):
    assert abs(rays.energy(rays.trajectory((0.5, 0), [0.6], branch, 0.37))) <= 1e-12


@given(
    st.floats(0.01, 1.0),
    st.floats(-1, 1),
    st.floats(-0.99, 0.99),
    st.sampled_from(list(Branch)),
    st.floats(-5, 5),
)
@settings(max_examples=300, deadline=None)
def test_energy_conserved(x1, x2, frac, branch, t):
    xi2 = frac * math.sqrt(2 * x1)
    assert abs(rays.energy(rays.trajectory((x1, x2), [xi2], branch, t))) <= 1e-12 * max(1, t * t)


def test_trajectory_rejects_bad_input():
    with pytest.raises(DomainError):
        rays.trajectory((0.1, 0), [1.0], Branch.PLUS, 0.0)
    with pytest.raises(DomainError):
        rays.trajectory((0.1, 0), [0.1, 0.2], Branch.PLUS, 0.0)


@pytest.mark.parametrize("xbar,xp,expected", [((0.5, 0), 0.75, 0.28125), ((0.5, 0), 0.0, 0.0), ((1.0, 0), 2.0, 1.0)])
def test_caustic_examples(xbar, xp, expected):
    assert rays.caustic_gamma(xbar, [xp]) == pytest.approx(expected)


def test_tangency_example():
    T = rays.tangency_time(0.5, 0.6)
    assert T == pytest.approx(1.25)
    st_ = rays.trajectory((0.5, 0), [0.6], Branch.MINUS, T)
    assert np.allclose(st_.x, [0.28125, 0.75], atol=1e-14)
    assert st_.x[0] == pytest.approx(rays.caustic_gamma((0.5, 0), st_.x[1:]), abs=1e-14)


def test_tangency_head_on():
    assert rays.tangency_time(0.5, 0.0) == pytest.approx(1.0)


def test_tangency_grazing_and_invalid():
    with pytest.raises(OverflowError):
        rays.tangency_time(0.5, 1.0)
    with pytest.raises(DomainError):
        rays.tangency_time(0.5, 1.2)


@given(st.floats(0.05, 1.0), st.floats(-1, 1), st.floats(-0.95, 0.95), st.sampled_from(list(Branch)))
@settings(max_examples=200, deadline=None)
def test_tangency_first_order(x1, x2, frac, branch):
    xi2 = frac * math.sqrt(2 * x1)
    T = rays.tangency_time(x1, xi2)
    st_ = rays.trajectory((x1, x2), [xi2], branch, -branch.sign * T)
    assert st_.x[0] == pytest.approx(rays.caustic_gamma((x1, x2), st_.x[1:]), abs=1e-10)
    # the ray's x1 velocity matches the slope of Gamma along the ray
    slope = (st_.x[1] - x2) / (2 * x1) * st_.xi[1]
    assert st_.xi[0] == pytest.approx(slope, abs=1e-9)


def test_vertex_examples():
    v, r = rays.vertex_on_ellipse((0.5, 0), 0.0, Branch.MINUS)
    assert np.allclose(v, 0, atol=1e-15) and abs(r) < 1e-15
    v, r = rays.vertex_on_ellipse((0.5, 0.1), 1.0, Branch.MINUS)
    assert np.allclose(v, [0.5, 0.1]) and abs(r) < 1e-15


def test_vertex_random():
    rng = np.random.default_rng(0)
    for _ in range(100):
        x1 = rng.uniform(0.01, 1)
        xi2 = rng.uniform(-1, 1) * math.sqrt(2 * x1)
        _, r = rays.vertex_on_ellipse((x1, rng.uniform(-1, 1)), xi2, Branch(rng.choice(["plus", "minus"])))
        assert abs(r) <= 1e-10


@pytest.mark.parametrize("x,expected", [((0.4, 0.3), Reach.TWO_RAYS), ((0.01, 1.0), Reach.NONE), ((0.5, 1.0), Reach.ONE_RAY)])
def test_reachability_examples(x, expected):
    assert rays.reachability((0.5, 0), x) is expected


# ----------------------------------------------------------------------------
# stationary points

def test_stationary_example():
    sp = rays.stationary_points(TOY, (1, 0), (1, 1))
    betas = sorted({round(abs(p.xi1.real - p.eta1.real) / 2, 12) for p in sp.points})
    assert betas == pytest.approx([math.sqrt((2 - math.sqrt(3)) / 2), math.sqrt((2 + math.sqrt(3)) / 2)])
    assert betas[0] == pytest.approx(0.36603, abs=1e-5)
    assert all(p.is_real for p in sp.points)


def test_shadow_points_complex():
    sp = rays.stationary_points(TOY, (0.1, 0), (0.1, 0.5))
    assert len(sp.points) == 4
    assert all(p.kind is PointKind.COMPLEX_PAIR for p in sp.points)


@given(st.floats(0.01, 1), st.floats(0.01, 1), st.floats(-1, 1))
@example(1.0, 1.0, 1e-5)  # nearly double root: the small beta^2 must avoid cancellation
@example(1.0, 1.0, 3.77131243182776e-159)  # z2^2 underflows
@example(0.25, 0.25, 5e-324)
@settings(max_examples=200, deadline=None)
def test_toy_points_solve_the_system(x1, y1, z2):
    for p in rays.stationary_points(TOY, (x1, z2), (y1, 0)).points:
        if p.alpha_defined:
            assert np.max(np.abs(rays.stationary_residual(x1, y1, z2, 0.0, 0.0, (p.xi1, p.eta1, p.xi2)))) <= 1e-10


@pytest.mark.parametrize("k", [0.1, -0.3, 0.5])
def test_generalized_points_solve_the_system(k):
    spec = OperatorSpec.generalized_toy(k, 0.01)
    sp = rays.stationary_points(spec, (0.6, 0.2), (0.4, -0.1))
    assert len(sp.real_points) >= 2
    for p in sp.points:
        res = rays.stationary_residual(0.6, 0.4, 0.3, 0.0, k, (p.xi1, p.eta1, p.xi2))
        assert np.max(np.abs(res)) <= 1e-10


def test_generalized_continuous_at_k_zero():
    toy = rays.stationary_points(TOY, (0.6, 0.2), (0.4, -0.1))
    gen = rays.stationary_points(OperatorSpec.generalized_toy(1e-12, 0.01), (0.6, 0.2), (0.4, -0.1))
    for a, b in zip(toy.points, gen.points):
        assert abs(a.xi1 - b.xi1) + abs(a.eta1 - b.eta1) + abs(a.xi2 - b.xi2) <= 1e-10


def test_reachability_matches_stationary_realness():
    rng = np.random.default_rng(9)
    eps = 0.05
    for _ in range(200):
        xbar = np.array([rng.uniform(0.05, 1), rng.uniform(-1, 1)])
        x = np.array([rng.uniform(-0.5, 1), rng.uniform(-1.5, 1.5)])
        sp = rays.stationary_points(TOY, x, xbar)
        reach = rays.reachability(xbar, x)
        if reach is Reach.TWO_RAYS:
            assert len(sp.real_points) >= 2
        if discriminant(TOY, x, xbar) <= -eps * ell(TOY, x, xbar) ** 2:
            assert not sp.real_points


def test_travel_times_diagonal():
    times = sorted(rays.travel_time(rays.stationary_points(TOY, (1, 0), (1, 0))))
    assert times[0] == pytest.approx(0.0, abs=1e-15)
    assert times[-1] == pytest.approx(2 * math.sqrt(2))


@pytest.mark.parametrize("a", [0.1, 0.2, 0.4])
def test_long_ray_time_scales_like_sqrt_ell(a):
    T = max(rays.travel_time(rays.stationary_points(TOY, (a, 0), (a, 0))))
    assert T / math.sqrt(ell(TOY, (a, 0), (a, 0))) == pytest.approx(2 * math.sqrt(2))


def test_stationary_points_reject_other_kinds():
    with pytest.raises(DomainError):
        rays.stationary_points(OperatorSpec.toy(3), (0, 0, 0), (0, 0, 0))
