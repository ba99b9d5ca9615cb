import math

import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings
from hypothesis import strategies as st

from semikernel import _contour, oracle, oscint
from semikernel.errors import AccuracyError, DomainError
from semikernel.model import OperatorSpec, ZoneLabel
from semikernel.oscint import ReducedArgs, corr_diag, corr_term, dtau_J, dtau_J_kappa
from semikernel.weyl import weyl_diag


def line_reference(a, eta=0.8, L=14.0, n=400_001):
    """(1/pi) int exp(i phi) along Im beta = -eta, where the cubic damps both tails."""
    s = np.linspace(-L, L, n)
    b = s - 1j * eta
    kz = a.kappa * a.z2
    phi = a.A * b + a.C0 / (4 * b) - b**3 / 3 - kz * b * b / 6 - 0.5 * kz * (a.x1 + a.y1)
    return complex(np.trapezoid(np.exp(1j * phi), s)) / math.pi


@pytest.mark.parametrize("x,expected", [(0.0, 0.7100561), (1.0, 0.454814)])
def test_dtau_examples(x, expected):
    assert dtau_J(ReducedArgs(0.0, x, x, 0.0)).value == pytest.approx(expected, abs=2e-6)


@pytest.mark.parametrize("x", np.linspace(-2, 3, 9))
@pytest.mark.parametrize("tau", np.linspace(-1, 1, 5))
def test_airy_reduction(x, tau):
    assert dtau_J(ReducedArgs(tau, x, x, 0.0)).value == pytest.approx(2 * sc.airy(-2 * (x + tau))[0], abs=1e-12)


@pytest.mark.parametrize(
    "args",
    [
        ReducedArgs(0.0, 0.5, -0.3, 1.2),
        ReducedArgs(1.0, 2.0, 0.5, 3.0),
        ReducedArgs(-0.5, 0.2, 0.1, 0.0),
        ReducedArgs(0.0, 0.0, 0.0, 6.0),
        ReducedArgs(0.0, 0.5, 0.5, 0.5, 0.3),
        ReducedArgs(0.3, -0.4, 1.1, -2.0, -0.7),
    ],
)
def test_dtau_vs_line_reference(args):
    fn = dtau_J_kappa if args.kappa else dtau_J
    rep = fn(args)
    ref = line_reference(args)
    assert rep.value == pytest.approx(ref.real, abs=1e-10)
    assert rep.imag == pytest.approx(ref.imag, abs=1e-10)


def test_kappa_example_to_spec_tolerance():
    a = ReducedArgs(0.0, 0.5, 0.5, 0.5, 0.3)
    assert dtau_J_kappa(a).value == pytest.approx(line_reference(a, eta=1.2).real, abs=1e-4)


def test_shadow_decay():
    v = {z: abs(dtau_J(ReducedArgs(0.0, 0.0, 0.0, z)).value) for z in (4, 5, 6, 8, 10, 12)}
    assert v[6] < 1e-3
    for z in (4, 5, 6):
        assert v[2 * z] < v[z] / 2**6


@given(st.floats(-1, 1), st.floats(-2, 2), st.floats(-2, 2), st.floats(-3, 3))
@settings(max_examples=60, deadline=None)
def test_dtau_symmetries(tau, x1, y1, z2):
    v = dtau_J(ReducedArgs(tau, x1, y1, z2)).value
    assert dtau_J(ReducedArgs(tau, y1, x1, z2)).value == pytest.approx(v, abs=1e-11)
    assert dtau_J(ReducedArgs(tau, x1, y1, -z2)).value == pytest.approx(v, abs=1e-11)


@given(st.floats(-1, 1), st.floats(-2, 2), st.floats(-2, 2), st.floats(-3, 3), st.floats(-1, 1))
@settings(max_examples=60, deadline=None)
def test_kappa_reflection(tau, x1, y1, z2, kappa):
    a = dtau_J_kappa(ReducedArgs(tau, x1, y1, z2, kappa))
    b = dtau_J_kappa(ReducedArgs(tau, x1, y1, -z2, -kappa))
    assert b.value == pytest.approx(a.value, abs=1e-11)


@given(st.floats(-1, 1), st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1))
@settings(max_examples=60, deadline=None)
def test_kappa_drops_out_at_zero_separation(tau, x1, y1, kappa):
    a = dtau_J_kappa(ReducedArgs(tau, x1, y1, 0.0, kappa)).value
    assert a == pytest.approx(dtau_J(ReducedArgs(tau, x1, y1, 0.0)).value, abs=1e-8)


def test_kappa_zero_matches_plain():
    a = ReducedArgs(0.2, 0.7, -0.1, 1.5)
    assert dtau_J_kappa(a).value == pytest.approx(dtau_J(a).value, abs=1e-14)


@pytest.mark.parametrize("args", [ReducedArgs(0.0, 0.5, -0.3, 1.2), ReducedArgs(1.0, 2.0, 0.5, 3.0), ReducedArgs(0.0, 0.0, 0.0, 5.0)])
def test_contour_independence(args):
    a = dtau_J(args)
    peak = max(abs(a.value), 1.0)
    for delta in (0.1, 0.35, 1.0):
        b = dtau_J(args, delta=delta)
        # different paths agree to their error estimates plus rounding of the peak
        assert abs(a.value - b.value) <= a.est_err + b.est_err + 1e-13 * peak


def test_dtau_rejects_kappa():
    with pytest.raises(DomainError):
        dtau_J(ReducedArgs(0, 0, 0, 1, 0.2))
    with pytest.raises(DomainError):
        dtau_J_kappa(ReducedArgs(0, 0, 0, 1, 1.5))
    with pytest.raises(DomainError):
        ReducedArgs(math.nan, 0, 0, 0)


def test_contour_budget_exhaustion():
    a = ReducedArgs(0.0, 0.5, -0.3, 1.2)
    phi = oscint._phase(a)
    with pytest.raises(AccuracyError) as exc:
        _contour.integrate(lambda b: 1j * phi(b), a.A, rtol=1e-16, max_evals=500)
    assert exc.value.value is not None


# ----------------------------------------------------------------------------
# kernel from the contour vs the fiber oracle

@pytest.mark.parametrize(
    "spec,x,y",
    [
        (OperatorSpec.toy(2, 0.05), (0.0, 0.0), (0.0, 0.0)),
        (OperatorSpec.toy(2, 0.05), (0.3, 0.0), (0.25, 0.1)),
        (OperatorSpec.toy(2, 0.02, 0.1), (-0.05, 0.2), (0.1, 0.0)),
        (OperatorSpec.toy(1, 0.05), (0.1,), (-0.02,)),
        (OperatorSpec.toy(3, 0.05), (0.1, 0.0, 0.05), (0.05, 0.1, 0.0)),
    ],
)
def test_kernel_J_equals_fiber_oracle(spec, x, y):
    ref = oracle.toy_kernel(spec, x, y)
    rep = oscint.kernel_J(spec, x, y)
    scale = weyl_diag(spec, x) + spec.h ** (-2 * spec.d / 3)
    assert rep.value == pytest.approx(ref.value, abs=1e-9 * scale)


def test_kernel_J_generalized_is_approximate():
    # the kappa phase reproduces the diagonal only at zero separation
    spec = OperatorSpec.generalized_toy(0.3, 0.05)
    exact = oracle.toy_kernel(spec, (0.0, 0.0), (0.0, 0.0)).value
    approx = oscint.kernel_J(spec, (0.0, 0.0), (0.0, 0.0)).value
    assert approx == pytest.approx(exact, rel=1e-2)


@pytest.mark.parametrize("h", [0.1, 0.05])
def test_rescaled_self_similarity(h):
    X, Y = np.array([0.7, 0.0]), np.array([0.2, 1.3])
    f = lambda hh: oracle.toy_kernel(OperatorSpec.toy(2, hh), hh ** (2 / 3) * X, hh ** (2 / 3) * Y).value * hh ** (4 / 3)
    assert f(h) == pytest.approx(f(h / 2), rel=1e-6)


# ----------------------------------------------------------------------------
# correction terms

def test_corr_routes_agree():
    spec = OperatorSpec.toy(2, 0.05)
    for x, y in (((0, 0), (0, 0)), ((0.05, 0), (0.02, 0.05))):
        a = corr_term(spec, x, y)
        b = corr_term(spec, x, y, method="quadrature")
        assert b == pytest.approx(a, rel=1e-8, abs=1e-10)


def test_corr_term_equals_corr_diag_at_turning_point():
    spec = OperatorSpec.toy(2, 0.05)
    assert corr_term(spec, (0, 0), (0, 0)) == pytest.approx(corr_diag(spec, (0, 0)), rel=1e-6)


@pytest.mark.parametrize("x1", [-0.1, 0.0, 0.05, 0.2])
def test_corr_diag_matches_contour(x1):
    spec = OperatorSpec.toy(2, 0.03)
    assert corr_diag(spec, (x1, 0.3)) == pytest.approx(corr_term(spec, (x1, 0.3), (x1, 0.3)), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("fn", [lambda s: corr_term(s, (0, 0), (0, 0)), lambda s: corr_diag(s, (0, 0))])
def test_turning_point_homogeneity(fn):
    ratio = fn(OperatorSpec.toy(2, 0.05)) / fn(OperatorSpec.toy(2, 0.025))
    assert ratio == pytest.approx(2 ** (-4 / 3), rel=0.1)


@pytest.mark.parametrize("h", [0.05, 0.01])
@pytest.mark.parametrize("X", [20.0, 40.0])
def test_corr_small_deep_in_allowed_region(h, X):
    spec = OperatorSpec.toy(2, h)
    x = (X * h ** (2 / 3), 0.0)
    c = corr_term(spec, x, x)
    assert abs(c) <= 2e-4 * h ** (-4 / 3)
    assert abs(c) <= 1e-4 * weyl_diag(spec, x)


def test_corr_diag_deep_forbidden():
    assert abs(corr_diag(OperatorSpec.toy(2, 0.05), (-1.0, 0))) < 1e-12


def test_corr_general_d_reduces_to_d2():
    spec = OperatorSpec.toy(2, 0.05)
    assert oscint.corr_general_d(spec, (0.1, 0), (0.1, 0)) == pytest.approx(corr_diag(spec, (0.1, 0)), rel=1e-5)


@pytest.mark.parametrize("d,p", [(1, 2 / 3), (3, 2.0)])
def test_corr_general_d_envelope(d, p):
    # h^{(1-d)/2} l^{-(d+3)/4} with l = h^{2/3}
    hs = [0.08, 0.04, 0.02, 0.01]
    x = (0.0,) * d
    vals = [abs(oscint.corr_general_d(OperatorSpec.toy(d, h), x, x)) for h in hs]
    slope = np.polyfit(np.log(1 / np.array(hs)), np.log(vals), 1)[0]
    assert slope == pytest.approx(p, abs=0.02)


def test_corr_general_d_deep_allowed():
    for d in (1, 3):
        h = 0.02
        x = (30 * h ** (2 / 3),) + (0.0,) * (d - 1)
        spec = OperatorSpec.toy(d, h)
        assert abs(oscint.corr_general_d(spec, x, x)) <= 1e-3 * weyl_diag(spec, x)


def test_corr_subtracts_plain_toy_weyl():
    h = 0.05
    gen = OperatorSpec.generalized_toy(0.4, h)
    toy = OperatorSpec.toy(2, h)
    assert corr_term(gen, (0.1, 0), (0.1, 0)) == pytest.approx(corr_term(toy, (0.1, 0), (0.1, 0)), abs=1e-12)


def test_corr_rejects_general_kind():
    with pytest.raises(DomainError):
        corr_term(OperatorSpec.from_catalog("linear", 2), (0, 0), (0, 0))
    with pytest.raises(DomainError):
        corr_term(OperatorSpec.toy(3), (0, 0, 0), (0, 0, 0))


def test_calibration_recovers_constants():
    def ref(h, x1):
        return oracle.toy_kernel(OperatorSpec.toy(2, h), (x1, 0.0), (x1, 0.0)).value

    cal = oscint.calibrate_corr_diag(ref, h_values=(0.08, 0.02))
    assert cal.prefactor == pytest.approx(oscint.AIRY_PREFACTOR, rel=1e-6)
    assert cal.arg_const == pytest.approx(oscint.AIRY_ARG, rel=1e-6)
    assert cal.rms_rel < 1e-8


@pytest.mark.parametrize(
    "zone,h,ell,expected",
    [(ZoneLabel.REGULAR, 0.01, 0.25, 56.57), (ZoneLabel.SINGULAR, 0.01, 0.1, 215.44), (ZoneLabel.SHADOW, 0.01, 0.3, 1.71911)],
)
def test_predicted_envelope(zone, h, ell, expected):
    assert oscint.predicted_envelope(zone, h, ell) == pytest.approx(expected, rel=1e-4)


def test_tail_cutoff_bounds_airy():
    u = oscint.tail_cutoff()
    assert sc.airy(u)[0] < 1e-12
