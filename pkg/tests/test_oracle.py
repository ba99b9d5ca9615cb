import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special as sc
from hypothesis import given, settings
from hypothesis import strategies as st

from semikernel import oracle
from semikernel.errors import ConfigurationError, DomainError
from semikernel.model import OperatorSpec
from semikernel.oracle import FiberKernel1D, GridOracleConfig, airy_projector_1d


def projector_quad(c, h, x, y, E):
    """(kappa^2/c) int_{-inf}^{E} Ai(-kappa(x + l/c)) Ai(-kappa(y + l/c)) dl by scipy.quad."""
    k = (2 * c / h**2) ** (1 / 3)
    f = lambda lam: sc.airy(-k * (x + lam / c))[0] * sc.airy(-k * (y + lam / c))[0]
    # the integrand is negligible once both Airy arguments exceed 12
    lo = -c * (12 / k + min(x, y)) - 1.0
    val, _ = scipy.integrate.quad(f, lo, E, limit=2000, epsabs=1e-14, epsrel=1e-12)
    return k * k / c * val


@pytest.mark.parametrize("c,h,x,y,E", [(1.0, 1.0, 0.0, 0.0, 0.0), (1.0, 0.3, 0.2, -0.1, 0.1), (1.4, 0.2, 0.1, 0.3, -0.05), (0.7, 0.5, -0.2, 0.4, 0.3)])
def test_fiber_projector_vs_quad(c, h, x, y, E):
    assert airy_projector_1d(FiberKernel1D(c, h), x, y, E) == pytest.approx(projector_quad(c, h, x, y, E), rel=1e-8, abs=1e-11)


def test_fiber_empty_window():
    assert abs(airy_projector_1d(FiberKernel1D(1.0, 0.2), 0.1, 0.2, -50.0)) < 1e-14


def test_fiber_monotone_on_diagonal():
    E = np.linspace(-2, 2, 401)
    vals = airy_projector_1d(FiberKernel1D(1.0, 0.2), 0.1, 0.1, E)
    assert np.all(np.diff(vals) >= -1e-14)


def test_fiber_slope_validation():
    with pytest.raises(DomainError):
        FiberKernel1D(0.0, 0.1)
    with pytest.raises(DomainError):
        FiberKernel1D(1.0, -0.1)


@pytest.mark.parametrize("x", [0.0, 0.2])
def test_fiber_matches_grid_1d(x):
    h, L = 0.1, 2.0
    spec = OperatorSpec.toy(1, h)
    a = oracle.toy_kernel_mollified(spec, (x,), (x,), 10 * h / (2 * L)).value
    errs = []
    for n in (800, 1600):
        cfg = GridOracleConfig(((-L, L),), n, 10 * h / (2 * L))
        errs.append(abs(oracle.grid_oracle_1d(cfg, spec, x, x).value / a - 1))
    assert errs[0] < 2e-2
    # refining the grid shrinks the gap, so it is discretization and not normalization
    assert errs[1] < 0.6 * errs[0]


def test_d1_deep_forbidden():
    spec = OperatorSpec.toy(1, 0.05)
    x = -10 * 0.05 ** (2 / 3) * 3
    assert abs(oracle.toy_kernel(spec, (x,), (x,)).value) <= 1e-8


@given(st.tuples(st.floats(-0.3, 0.6), st.floats(-0.5, 0.5)), st.tuples(st.floats(-0.3, 0.6), st.floats(-0.5, 0.5)))
@settings(max_examples=40, deadline=None)
def test_toy_kernel_symmetric(x, y):
    spec = OperatorSpec.toy(2, 0.08)
    assert oracle.toy_kernel(spec, x, y).value == pytest.approx(oracle.toy_kernel(spec, y, x).value, abs=1e-10)


def test_toy_kernel_positive_and_monotone_on_diagonal():
    for x1 in (-0.2, 0.0, 0.3):
        vals = [oracle.toy_kernel(OperatorSpec.toy(2, 0.05, tau), (x1, 0), (x1, 0)).value for tau in np.linspace(-0.3, 0.3, 13)]
        assert min(vals) >= -1e-10
        assert np.all(np.diff(vals) >= -1e-10)


@pytest.mark.parametrize("x,y", [((0.1, 0.2), (0.0, -0.1)), ((0.3, 0.0), (0.2, 0.15))])
def test_generalized_reflection(x, y):
    a = oracle.toy_kernel(OperatorSpec.generalized_toy(0.3, 0.05), x, y).value
    b = oracle.toy_kernel(OperatorSpec.generalized_toy(-0.3, 0.05), (x[0], -x[1]), (y[0], -y[1])).value
    assert a == pytest.approx(b, abs=1e-10 * max(1, abs(a)))


def test_generalized_slope_guard():
    with pytest.raises(DomainError):
        oracle.toy_kernel(OperatorSpec.generalized_toy(1.0, 0.04), (0, 0), (0, 0))


def test_toy_3d_vs_weyl_deep_inside():
    # far from the turning plane the exact diagonal approaches the Weyl value
    spec = OperatorSpec.toy(3, 0.02)
    from semikernel.weyl import weyl_diag

    assert oracle.toy_kernel(spec, (0.5, 0, 0), (0.5, 0, 0)).value == pytest.approx(weyl_diag(spec, (0.5, 0, 0)), rel=2e-3)


def test_toy_kernel_rejects_general_kind():
    with pytest.raises(DomainError):
        oracle.toy_kernel(OperatorSpec.from_catalog("linear", 2), (0, 0), (0, 0))


# ----------------------------------------------------------------------------
# finite differences

@pytest.fixture(scope="module")
def grid_h01():
    spec = OperatorSpec.toy(2, 0.1)
    return spec, GridOracleConfig.standard(spec, n=63)


@pytest.mark.slow
@pytest.mark.parametrize("x", [(0.0, 0.0), (0.1875, 0.0)])
def test_grid_2d_vs_fiber(grid_h01, x):
    spec, cfg = grid_h01
    g = oracle.grid_oracle_2d(cfg, spec, x, x).value
    a = oracle.toy_kernel_mollified(spec, x, x, cfg.mollify_eps).value
    assert g == pytest.approx(a, rel=3e-2)


def test_grid_generalized_reflection():
    cfg = GridOracleConfig(((-3.0, 3.0), (-3.0, 3.0)), 25, 0.5)
    sp, sm = OperatorSpec.generalized_toy(0.4, 0.3), OperatorSpec.generalized_toy(-0.4, 0.3)
    x, y = (0.23076923076923, 0.69230769230769), (0.0, -0.46153846153846)
    a = oracle.grid_oracle_2d(cfg, sp, x, y).value
    b = oracle.grid_oracle_2d(cfg, sm, (x[0], -x[1]), (y[0], -y[1])).value
    assert a == pytest.approx(b, rel=1e-10)


def test_free_particle_density():
    tau, h, L = 0.5, 0.05, 3.0
    spec = OperatorSpec.from_catalog("flat", 1, h, tau)
    cfg = GridOracleConfig(((-L, L),), 600, 10 * h / L)
    g = oracle.grid_oracle_1d(cfg, spec, 0.0, 0.0).value
    assert g == pytest.approx(2 * math.sqrt(2 * tau) / (2 * math.pi * h), rel=0.05)


def test_below_ground_state_is_empty():
    spec = OperatorSpec.from_catalog("flat", 1, 0.05, -1.0)
    cfg = GridOracleConfig(((-1.0, 1.0),), 100, 0.05)
    assert abs(oracle.grid_oracle_1d(cfg, spec, 0.0, 0.0).value) < 1e-12


def test_grid_deep_forbidden():
    spec = OperatorSpec.toy(1, 0.05)
    cfg = GridOracleConfig(((-1.5, 1.5),), 400, 0.02)
    assert abs(oracle.grid_oracle_1d(cfg, spec, -1.0, -1.0).value) <= 1e-6


def test_snapping_reports_error():
    spec = OperatorSpec.toy(1, 0.3)
    cfg = GridOracleConfig(((-4.0, 4.0),), 99, 0.3)
    on = oracle.grid_oracle_1d(cfg, spec, 0.0, 0.0)
    off = oracle.grid_oracle_1d(cfg, spec, 0.01, 0.0)
    assert on.est_err == 0.0
    assert off.est_err > 0.0
    assert off.meta["x"] == (0.0,)


@pytest.mark.parametrize(
    "box,n,eps",
    [(((-1, 1),), 8, 0.1), (((1, -1),), 32, 0.1), (((-1, 1),), 32, 0.0), (((-1, 1), (-1, 1)), (32,), 0.1)],
)
def test_config_validation(box, n, eps):
    with pytest.raises(ConfigurationError):
        GridOracleConfig(box, n, eps)


def test_box_checks():
    spec = OperatorSpec.toy(1, 0.1)
    cfg = GridOracleConfig(((-1.0, 1.0),), 64, 0.1)
    with pytest.raises(ConfigurationError):
        oracle.grid_oracle_1d(cfg, spec, 0.95, 0.0)
    high_wall = GridOracleConfig(((-0.3, 1.0),), 64, 0.1)
    with pytest.raises(ConfigurationError):
        oracle.grid_oracle_1d(high_wall, spec, 0.0, 0.0)


def test_grid_budget_and_dimension():
    with pytest.raises(ConfigurationError):
        oracle.grid_oracle_2d(GridOracleConfig(((-1, 1), (-1, 1)), 70, 0.5), OperatorSpec.toy(2, 0.1), (0, 0), (0, 0))
    with pytest.raises(ConfigurationError):
        oracle.grid_oracle_1d(GridOracleConfig(((-1, 1),), 32, 0.5), OperatorSpec.toy(2, 0.1), 0.0, 0.0)
