"""Reduced oscillatory integrals and the Airy-type correction terms.

Rescaled variables: with ``X = h^{-2/3} x``, ``T = h^{-2/3} tau`` and
``kappa = h^{1/3} k`` the toy-model kernel becomes h-independent up to the
factor ``h^{-2d/3}``.  In these variables

    dJ(T, X1, Y1, Z) = (1/pi) int exp(i phi(beta)) d beta,
    phi = (X1 + Y1 + 2T) beta + ((X1 - Y1)^2 + Z^2)/(4 beta) - beta^3/3,

and the spectral-density normalisation gives the kernel as
``e = (1/(2 pi)) int_{-inf}^{T} (T - s) dJ(s) ds``.  Exchanging the two
integrals on a contour with ``Im beta < 0`` uses

    int_{-inf}^{T} (T - s) exp(2 i s beta) ds = -exp(2 i T beta)/(4 beta^2),

so the kernel is a single contour integral with weight ``beta^{-2}``
(``(i beta)^{-d/2} / beta`` in dimension d).  The truncated s-quadrature
of ``(T - s) dJ(s)`` is kept as an independent cross-check.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _contour
from .errors import AccuracyError, DomainError
from .model import Kind, ZoneLabel
from .specfn import airy, airy_tail_integral
from .weyl import weyl_diag, weyl_kernel

# diagonal Airy form: prefactor and argument constant, see calibrate_corr_diag
AIRY_PREFACTOR = 1.0 / math.pi
AIRY_ARG = 2.0
# tail cut for the s-quadrature route
TAIL_TOL = 1e-12
DEFAULT_RTOL = 1e-12


@dataclass(frozen=True)
class ReducedArgs:
    """Arguments of the reduced integrals, all in rescaled units."""

    tau: float
    x1: float
    y1: float
    z2: float
    kappa: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.tau, self.x1, self.y1, self.z2, self.kappa)):
            raise DomainError("reduced arguments must be finite")

    @property
    def A(self):
        return self.x1 + self.y1 + 2 * self.tau

    @property
    def C0(self):
        return (self.x1 - self.y1) ** 2 + self.z2**2


@dataclass(frozen=True)
class QuadratureReport:
    value: float
    est_err: float
    n_evals: int
    contour: str
    imag: float = 0.0


def _phase(args, extra_z2sq=0.0):
    A = args.A
    C0 = args.C0 + extra_z2sq
    kz = args.kappa * args.z2
    shift = -0.5 * kz * (args.x1 + args.y1)

    def phi(b):
        return A * b + C0 / (4 * b) - b**3 / 3 - kz * b * b / 6 + shift

    return phi


def _run(logf, A, rtol, delta=None):
    val, err, n, path, _ = _contour.integrate(logf, A, rtol=rtol, delta=delta)
    return val, err, n, path.describe()


def dtau_J(args, rtol=DEFAULT_RTOL, delta=None):
    """Contour evaluation of ``dJ`` for the plain toy model (kappa = 0)."""
    if args.kappa != 0.0:
        raise DomainError("dtau_J is the kappa = 0 integral; use dtau_J_kappa")
    return _dtau(args, rtol, delta)


def dtau_J_kappa(args, rtol=DEFAULT_RTOL, delta=None):
    """``dJ_kappa``: the plain phase times ``exp(i(-kappa Z beta^2/6 - kappa Z (X1+Y1)/2))``.

    The real part is returned; ``imag`` on the report carries the rest.
    """
    if abs(args.kappa) > 1:
        raise DomainError("|kappa| must not exceed 1")
    return _dtau(args, rtol, delta)


def _dtau(args, rtol, delta):
    phi = _phase(args)
    val, err, n, desc = _run(lambda b: 1j * phi(b), args.A, rtol, delta)
    return QuadratureReport(val.real / math.pi, err / math.pi, n, desc, val.imag / math.pi)


def kernel_rescaled(args, d=2, rtol=DEFAULT_RTOL, delta=None, zp_sq=None):
    """Rescaled kernel ``int_{-inf}^{T} (T - s) dJ(s) ds / (2 pi)`` in dimension d.

    For d != 2 the transverse offset enters only through ``|z'|^2``, passed
    as ``zp_sq`` (``args.z2`` is then ignored).  d = 1 has no transverse
    variable.
    """
    if d not in (1, 2, 3):
        raise DomainError("d must be 1, 2 or 3")
    if d != 2 and args.kappa != 0.0:
        raise DomainError("magnetic coupling is two-dimensional")
    if d == 2:
        phi = _phase(args)
    else:
        zsq = 0.0 if d == 1 else (args.z2**2 if zp_sq is None else float(zp_sq))
        phi = _phase(ReducedArgs(args.tau, args.x1, args.y1, 0.0), extra_z2sq=zsq)
    half = d / 2

    def logf(b):
        return 1j * phi(b) - np.log(b) - half * np.log(1j * b)

    val, err, n, desc = _run(logf, args.A, rtol, delta)
    # -i (2 pi)^{-d-1} pi^{d/2} times the contour integral
    pref = -1j * (2 * math.pi) ** (-d - 1) * math.pi**half
    out = pref * val
    return QuadratureReport(out.real, abs(pref) * err, n, desc, out.imag)


def _rescale(spec, x, y):
    s = spec.h ** (-2.0 / 3.0)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    zp = (x[1:] - y[1:]) * s
    kappa = spec.h ** (1.0 / 3.0) * spec.k if spec.kind == Kind.GENERALIZED_TOY else 0.0
    z2 = float(zp[0]) if zp.size else 0.0
    return ReducedArgs(spec.tau * s, x[0] * s, y[0] * s, z2, kappa), float(zp @ zp)


def _require_toy(spec):
    if not spec.is_toy_kind:
        raise DomainError("reduced integrals exist for the toy kinds only")


def kernel_J(spec, x, y, rtol=DEFAULT_RTOL):
    """``h^{-2d/3}`` times the rescaled kernel: the J-integral part in physical units.

    For the toy model this is the exact projector kernel.  For the
    generalized model it is the reduced approximation with the kappa phase.
    """
    _require_toy(spec)
    args, zsq = _rescale(spec, x, y)
    rep = kernel_rescaled(args, spec.d, rtol=rtol, zp_sq=zsq)
    f = spec.h ** (-2.0 * spec.d / 3.0)
    return QuadratureReport(f * rep.value, f * rep.est_err, rep.n_evals, rep.contour, f * rep.imag)


def _toy_weyl(spec, x, y):
    """Weyl term of the plain toy model (k = 0) at ``spec.h`` and ``spec.tau``."""
    if spec.kind == Kind.TOY:
        return weyl_kernel(spec, x, y).value
    from .model import OperatorSpec

    return weyl_kernel(OperatorSpec.toy(spec.d, spec.h, spec.tau), x, y).value


def corr_term(spec, x, y, method="contour", report=False, rtol=DEFAULT_RTOL):
    """Correction term ``e_corr = J part - e^W`` for the 2-d toy kinds.

    The subtracted Weyl term is the plain toy (k = 0) one for both kinds,
    so ``corr_term`` is continuous in k at coincident transverse points.

    Parameters
    ----------
    method : {"contour", "quadrature"}
        ``contour`` uses the exchanged single-contour form; ``quadrature``
        integrates ``(T - s) dJ(s)`` over s with a truncated Gauss-Legendre
        rule.
    """
    _require_toy(spec)
    if spec.d != 2:
        raise DomainError("corr_term is two-dimensional; see corr_general_d")
    if method == "contour":
        rep = kernel_J(spec, x, y, rtol=rtol)
    elif method == "quadrature":
        rep = _kernel_by_s_quadrature(spec, x, y)
    else:
        raise DomainError(f"unknown method {method!r}")
    value = rep.value - _toy_weyl(spec, x, y)
    if report:
        return QuadratureReport(value, rep.est_err, rep.n_evals, rep.contour, rep.imag)
    return value


def tail_cutoff(span_hint=1.0, tol=TAIL_TOL):
    """Airy argument beyond which ``(T - s) Ai`` is below tol.

    From ``Ai(u) <= exp(-2/3 u^{3/2}) / (2 sqrt(pi) u^{1/4})``; the
    polynomial weight is absorbed by ``span_hint``.
    """
    return (1.5 * (math.log(max(span_hint, 1.0) ** 2 / tol))) ** (2.0 / 3.0)


def _kernel_by_s_quadrature(spec, x, y, panels_per_unit=6, gl=16):
    args, _ = _rescale(spec, x, y)
    T = args.tau
    half_sum = 0.5 * (args.x1 + args.y1)
    # A(s) = X1 + Y1 + 2 s; cut where A(s) = -Lambda
    lam = tail_cutoff(span_hint=T + half_sum + 20.0)
    s_min = -0.5 * lam - half_sum
    if s_min >= T:
        return QuadratureReport(0.0, 0.0, 0, "empty window")
    nodes, weights = np.polynomial.legendre.leggauss(gl)

    def total(npan):
        edges = np.linspace(s_min, T, npan + 1)
        acc, err, n = 0.0, 0.0, 0
        for a, b in zip(edges[:-1], edges[1:]):
            m, r = 0.5 * (a + b), 0.5 * (b - a)
            for t, w in zip(nodes, weights):
                s = m + r * t
                rep = _dtau(ReducedArgs(s, args.x1, args.y1, args.z2, args.kappa), 1e-13, None)
                acc += w * r * (T - s) * rep.value
                err += w * r * (T - s) * rep.est_err
                n += rep.n_evals
        return acc, err, n

    # oscillation wavelength in s is about pi / sqrt(A)
    amax = max(args.A, 1.0)
    npan = int(math.ceil((T - s_min) * panels_per_unit * math.sqrt(amax) / 4)) + 4
    coarse, _, n1 = total(npan)
    fine, qerr, n2 = total(2 * npan)
    f = spec.h ** (-4.0 / 3.0) / (2 * math.pi)
    est = f * (abs(fine - coarse) + qerr)
    return QuadratureReport(f * fine, est, n1 + n2, f"s in [{s_min:.4g}, {T:.4g}], {2 * npan} panels")


# ----------------------------------------------------------------------------
# diagonal Airy form

def airy_diag_rescaled(X, prefactor=AIRY_PREFACTOR, arg_const=AIRY_ARG):
    """``prefactor * int_{-inf}^{X} (X - s) Ai(-c s) ds`` in closed form.

    With ``w0 = -c X`` the integral is ``(-Ai'(w0) - w0 int_{w0}^inf Ai) / c^2``.
    """
    w0 = -arg_const * np.asarray(X, dtype=float)
    _, aip = airy(w0)
    return prefactor * (-np.asarray(aip) - w0 * np.asarray(airy_tail_integral(w0))) / arg_const**2


def corr_diag(spec, x, prefactor=AIRY_PREFACTOR, arg_const=AIRY_ARG):
    """Diagonal correction: Airy integral minus ``(tau - V(x))_+ / (2 pi h^2)``."""
    _require_toy(spec)
    if spec.d != 2:
        raise DomainError("corr_diag is two-dimensional")
    x = np.asarray(x, dtype=float)
    # on the diagonal the magnetic phase drops out and only x1 + tau matters
    X = (x[0] + spec.tau) * spec.h ** (-2.0 / 3.0)
    airy_part = spec.h ** (-4.0 / 3.0) * float(airy_diag_rescaled(X, prefactor, arg_const))
    gap = max(x[0] + spec.tau, 0.0)
    return airy_part - gap / (2 * math.pi * spec.h**2)


@dataclass(frozen=True)
class Calibration:
    prefactor: float
    arg_const: float
    rms_rel: float
    n_points: int


def calibrate_corr_diag(reference, h_values=(0.08, 0.04, 0.02, 0.01), offsets=(-1.0, -0.5, 0.0, 0.5, 1.0, 1.5)):
    """Fit the prefactor and argument constant of the diagonal Airy form.

    Parameters
    ----------
    reference : callable
        ``reference(h, x1)`` returns the exact diagonal kernel of the 2-d toy
        model at ``x = (x1, 0)``, tau = 0.
    offsets : sequence of float
        Points ``x1 = offset * h^{2/3}`` around the turning line.

    The argument constant is found by golden-section search; for each trial
    value the prefactor is the linear least-squares optimum.
    """
    rows = []
    for h in h_values:
        for o in offsets:
            x1 = o * h ** (2.0 / 3.0)
            target = reference(h, x1) * h ** (4.0 / 3.0)  # rescaled kernel
            rows.append((x1 * h ** (-2.0 / 3.0), target))
    X = np.array([r[0] for r in rows])
    t = np.array([r[1] for r in rows])

    def fit(c):
        m = airy_diag_rescaled(X, 1.0, c)
        p = float(m @ t / (m @ m))
        res = p * m - t
        return p, float(res @ res)

    lo, hi = 1.0, 3.0
    g = (math.sqrt(5) - 1) / 2
    a, b = hi - g * (hi - lo), lo + g * (hi - lo)
    fa, fb = fit(a)[1], fit(b)[1]
    for _ in range(80):
        if fa < fb:
            hi, b, fb = b, a, fa
            a = hi - g * (hi - lo)
            fa = fit(a)[1]
        else:
            lo, a, fa = a, b, fb
            b = lo + g * (hi - lo)
            fb = fit(b)[1]
    c = 0.5 * (lo + hi)
    p, ss = fit(c)
    rms = math.sqrt(ss / len(t)) / float(np.sqrt(np.mean(t * t)))
    return Calibration(p, c, rms, len(t))


# ----------------------------------------------------------------------------
# general dimension

def corr_general_d(spec, x, y, rtol=DEFAULT_RTOL):
    """Correction ``J part - e^W`` for the toy model in d = 1, 2, 3."""
    if spec.kind != Kind.TOY:
        raise DomainError("corr_general_d applies to the toy model")
    return kernel_J(spec, x, y, rtol=rtol).value - weyl_kernel(spec, x, y).value


# ----------------------------------------------------------------------------
# zone envelopes

def predicted_envelope(zone, h, ell, s=3):
    """Magnitude envelope of the kernel remainder in each zone (constant 1).

    Regular ``h^{-1/2} l^{-5/4}``, Singular ``h^{-2/3} l^{-1}``, Shadow
    ``h^{(2s-4)/3} l^{-s}``.  Forbidden uses the shadow form.
    """
    if not (h > 0 and ell > 0):
        raise DomainError("h and ell must be positive")
    zone = ZoneLabel(zone)
    if zone == ZoneLabel.REGULAR:
        return h**-0.5 * ell**-1.25
    if zone == ZoneLabel.SINGULAR:
        return h ** (-2.0 / 3.0) / ell
    return h ** ((2 * s - 4) / 3.0) * ell ** (-s)
