"""Closed-form Hamiltonian geometry of the toy model on energy level 0.

Trajectories of ``H = |xi|^2/2 - x_1`` starting at ``xbar`` with tangential
momentum ``xibar'`` are parabolas.  For a fixed source in d = 2 they envelope
the caustic parabola ``Gamma`` and their vertices lie on the ellipse
``(2 x_1 - xbar_1)^2 + (x_2 - xbar_2)^2 = xbar_1^2``.

The reduced phase of the propagator has (up to) four stationary points
``(xi_1, eta_1, xi_2)``; writing ``xi_1 = alpha + beta`` and
``eta_1 = alpha - beta`` they solve a biquadratic in beta.
"""
import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .model import Kind


class Branch(str, enum.Enum):
    """Sign of the initial normal momentum.

    ``MINUS`` starts with ``xibar_1 = -sqrt(2 xbar_1 - |xibar'|^2)`` (moving
    toward the turning line), ``PLUS`` with the positive root.
    """

    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self):
        return 1.0 if self is Branch.PLUS else -1.0


class Reach(str, enum.Enum):
    TWO_RAYS = "TwoRays"
    ONE_RAY = "OneRay"
    NONE = "None"


class PointKind(str, enum.Enum):
    SHORT_REAL = "ShortReal"
    LONG_REAL = "LongReal"
    COMPLEX_PAIR = "ComplexPair"


@dataclass(frozen=True)
class RayState:
    t: float
    x: np.ndarray
    xi: np.ndarray
    branch: Branch


@dataclass(frozen=True)
class StationaryPoint:
    xi1: complex
    eta1: complex
    xi2: complex
    kind: PointKind
    alpha_defined: bool = True

    @property
    def is_real(self):
        return self.kind is not PointKind.COMPLEX_PAIR


@dataclass(frozen=True)
class StationaryPointSet:
    points: tuple
    k: float = 0.0

    @property
    def real_points(self):
        return [p for p in self.points if p.is_real]


def _momentum_root(xbar1, xibar_prime):
    disc = 2.0 * xbar1 - float(np.dot(xibar_prime, xibar_prime))
    if disc < 0:
        raise DomainError("no real ray: 2 xbar_1 - |xibar'|^2 < 0")
    return math.sqrt(disc)


def trajectory(xbar, xibar_prime, branch, t):
    """State at time t on the ray from ``xbar`` with tangential momentum ``xibar'``."""
    xbar = np.asarray(xbar, dtype=float)
    xip = np.atleast_1d(np.asarray(xibar_prime, dtype=float))
    if xip.shape != (xbar.size - 1,):
        raise DomainError("xibar_prime must have d - 1 components")
    branch = Branch(branch)
    root = branch.sign * _momentum_root(xbar[0], xip)
    x = np.empty_like(xbar)
    x[0] = xbar[0] + 0.5 * t * t + t * root
    x[1:] = xbar[1:] + xip * t
    xi = np.empty_like(xbar)
    xi[0] = t + root
    xi[1:] = xip
    return RayState(float(t), x, xi, branch)


def energy(state):
    """``|xi|^2/2 - x_1``; zero along every ray."""
    return 0.5 * float(state.xi @ state.xi) - float(state.x[0])


def caustic_gamma(xbar, xprime):
    """Height ``|x' - xbar'|^2 / (4 xbar_1)`` of the caustic over ``x'``."""
    xbar = np.asarray(xbar, dtype=float)
    if xbar[0] <= 0:
        raise DomainError("caustic needs xbar_1 > 0")
    off = np.atleast_1d(np.asarray(xprime, dtype=float)) - xbar[1:]
    return float(off @ off) / (4.0 * xbar[0])


def tangency_time(xbar1, xibar2):
    """Positive time at which the ray touches the caustic.

    The ``MINUS`` branch touches at ``+T``, the ``PLUS`` branch at ``-T``.
    """
    disc = 2.0 * xbar1 - xibar2 * xibar2
    if disc == 0:
        raise OverflowError("grazing ray: tangency time is infinite")
    if disc < 0:
        raise DomainError("no real ray: 2 xbar_1 - xibar_2^2 < 0")
    return 2.0 * xbar1 / math.sqrt(disc)


def vertex_on_ellipse(xbar, xibar2, branch):
    """Vertex of the ray parabola and its residual in the ellipse equation.

    The vertex is where ``xi_1 = 0``, i.e. at ``t = -xibar_1``.
    """
    xbar = np.asarray(xbar, dtype=float)
    if xbar.shape != (2,):
        raise DomainError("vertex geometry is two-dimensional")
    branch = Branch(branch)
    root = branch.sign * _momentum_root(xbar[0], np.array([xibar2]))
    state = trajectory(xbar, [xibar2], branch, -root)
    v = state.x
    resid = (2 * v[0] - xbar[0]) ** 2 + (v[1] - xbar[1]) ** 2 - xbar[0] ** 2
    return v, float(resid)


def reachability(xbar, x):
    """How many level-0 rays from ``xbar`` pass through ``x``."""
    x = np.asarray(x, dtype=float)
    gamma = caustic_gamma(xbar, x[1:])
    tol = 1e-12 * max(1.0, abs(x[0]))
    if abs(x[0] - gamma) <= tol:
        return Reach.ONE_RAY
    return Reach.TWO_RAYS if x[0] > gamma else Reach.NONE


# ----------------------------------------------------------------------------
# stationary points of the reduced phase

NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-13


def _toy_points(x1, y1, z2, tau):
    A = x1 + y1 + 2 * tau
    C0 = (x1 - y1) ** 2 + z2 * z2
    disc = A * A - C0  # equals 4 (x1 + tau)(y1 + tau) - z2^2
    pts = []
    sq = cmath.sqrt(disc)
    # beta_+ beta_- = r0/2 with r0 = sqrt(C0): take the root without
    # cancellation directly and get the other by division.  For the divided
    # root 1/(2 beta) = direct/r0, so alpha and xi2 follow from the unit ratios
    # and nothing tiny is squared or divided by
    r0 = math.hypot(x1 - y1, z2)
    direct = cmath.sqrt(0.5 * (A + sq)) if A >= 0 else cmath.sqrt(0.5 * (A - sq))
    quotient = r0 / (2 * direct) if direct != 0 else 0j
    roots = ((direct, False), (quotient, True)) if A >= 0 else ((quotient, True), (direct, False))
    real = disc >= 0 and (roots[1][0] ** 2).real >= 0
    u, v = ((x1 - y1) / r0, z2 / r0) if r0 > 0 else (0.0, 0.0)
    for idx, (beta, divided) in enumerate(roots):
        kind = (PointKind.LONG_REAL if idx == 0 else PointKind.SHORT_REAL) if real else PointKind.COMPLEX_PAIR
        for sgn in (1.0, -1.0):
            b = sgn * beta
            if abs(b) == 0.0:
                pts.append(StationaryPoint(0j, 0j, 0j, PointKind.SHORT_REAL, alpha_defined=False))
                continue
            if divided:
                alpha, xi2 = sgn * direct * u, sgn * direct * v
            else:
                alpha, xi2 = (x1 - y1) / (2 * b), z2 / (2 * b)
            if real:
                alpha, xi2, b = alpha.real, xi2.real, b.real
            pts.append(StationaryPoint(complex(alpha + b), complex(alpha - b), complex(xi2), kind))
    return pts


def stationary_residual(x1, y1, z2, tau, k, point):
    """Residuals of the three stationarity equations at a point.

    With ``c = 1 + k xi_2`` the equations are multiplied through by powers
    of c so that they stay polynomial.
    """
    xi1, eta1, xi2 = point
    c = 1 + k * xi2
    return np.array(
        [
            2 * x1 * c - (-2 * tau + xi1 * xi1 + xi2 * xi2),
            2 * y1 * c - (-2 * tau + eta1 * eta1 + xi2 * xi2),
            z2 * c * c - (xi2 * (xi1 - eta1) * c + k * (tau - 0.5 * xi2 * xi2) * (xi1 - eta1) - k * (xi1**3 - eta1**3) / 6),
        ],
        dtype=complex,
    )


def _newton(x1, y1, z2, tau, k, seed):
    u = np.array(seed, dtype=complex)
    f = stationary_residual(x1, y1, z2, tau, k, u)
    for _ in range(NEWTON_MAX_ITER):
        if np.max(np.abs(f)) < NEWTON_TOL:
            return u
        xi1, eta1, xi2 = u
        c = 1 + k * xi2
        dT = xi1 - eta1
        jac = np.array(
            [
                [-2 * xi1, 0, 2 * x1 * k - 2 * xi2],
                [0, -2 * eta1, 2 * y1 * k - 2 * xi2],
                [
                    -(xi2 * c + k * (tau - 0.5 * xi2 * xi2) - 0.5 * k * xi1 * xi1),
                    (xi2 * c + k * (tau - 0.5 * xi2 * xi2) - 0.5 * k * eta1 * eta1),
                    2 * z2 * k * c - dT * c,
                ],
            ],
            dtype=complex,
        )
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Jacobian in stationary-point Newton iteration") from exc
        lam = 1.0
        for _ in range(30):
            trial = u + lam * step
            ft = stationary_residual(x1, y1, z2, tau, k, trial)
            if np.max(np.abs(ft)) <= np.max(np.abs(f)):
                break
            lam *= 0.5
        u, f = trial, ft
    if np.max(np.abs(f)) < 1e3 * NEWTON_TOL:
        return u
    raise ConvergenceError(f"Newton did not converge in {NEWTON_MAX_ITER} iterations (residual {np.max(np.abs(f)):.3e})")


def stationary_points(spec, x, y, tau=None):
    """Stationary points of the reduced phase for the pair (x, y).

    For the toy model the biquadratic is solved in closed form.  For the
    generalized toy model each k = 0 point seeds a damped Newton iteration
    on the k-dependent system; points with a collapsed beta are kept with
    ``alpha_defined=False``.
    """
    if spec.d != 2 or not spec.is_toy_kind:
        raise DomainError("stationary points are implemented for the 2-d toy kinds")
    tau = spec.tau if tau is None else float(tau)
    x1, x2 = (float(v) for v in x)
    y1, y2 = (float(v) for v in y)
    z2 = x2 - y2
    base = _toy_points(x1, y1, z2, tau)
    if spec.kind == Kind.TOY or spec.k == 0.0:
        return StationaryPointSet(tuple(base), 0.0)
    k = spec.k
    out = []
    for p in base:
        if not p.alpha_defined:
            out.append(p)
            continue
        # continue in k from 0 so the seed stays in the basin
        u = (p.xi1, p.eta1, p.xi2)
        for kk in np.linspace(0.0, k, 5)[1:]:
            u = _newton(x1, y1, z2, tau, kk, u)
        xi1, eta1, xi2 = (complex(v) for v in u)
        real = p.kind is not PointKind.COMPLEX_PAIR and max(abs(xi1.imag), abs(eta1.imag), abs(xi2.imag)) < 1e-9
        kind = p.kind if real else PointKind.COMPLEX_PAIR
        if real:
            xi1, eta1, xi2 = complex(xi1.real), complex(eta1.real), complex(xi2.real)
        out.append(StationaryPoint(xi1, eta1, xi2, kind))
    return StationaryPointSet(tuple(out), k)


def travel_time(sp):
    """Travel times ``|xi_1 - eta_1| / (1 + k xi_2)`` of the real points."""
    times = []
    for p in sp.real_points:
        c = 1.0 + sp.k * p.xi2.real
        times.append(abs(p.xi1.real - p.eta1.real) / c)
    return times
