"""Airy and Bessel functions on the real line.

All routines accept scalars or arrays and return the same shape (python
floats for scalar input).  Evaluation is delegated to the compiled kernels
when they are available and to the numpy fallback otherwise; see
``semikernel._backend``.

Airy branches
-------------
``|t| <= 2``
    Maclaurin series.
``-9 <= t <= 8``
    Taylor expansion about nodes spaced 1/8 apart.  The node values come
    from stepping the Airy ODE away from the Maclaurin values at 0 on the
    oscillatory side and from the asymptotic value at 8 on the decaying side.
otherwise
    Asymptotic expansions truncated at the smallest term (exponential form
    for t > 0, trigonometric form for t < 0).

Ai underflows to exactly 0 for t above roughly 105; this is treated as
tail truncation, not an error.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _backend, _numeric
from .errors import DomainError

BACKEND = _backend.BACKEND

BESSEL_ORDERS = (0.0, 0.5, 1.0, 1.5)


@dataclass(frozen=True)
class SpecFnAccuracy:
    """Accuracy contract of the evaluators.

    Attributes
    ----------
    abs_tol : float
        Absolute error target.
    max_terms : int
        Largest number of series terms any branch may use.
    """

    abs_tol: float = 1e-12
    max_terms: int = 400

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be at least 1")


AIRY_ACCURACY = SpecFnAccuracy(abs_tol=1e-12, max_terms=400)
BESSEL_ACCURACY = SpecFnAccuracy(abs_tol=1e-10, max_terms=200)


def _as_finite(t, name="t"):
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _out(arr, scalar):
    return float(arr) if scalar else arr


def airy(t):
    """Return ``(Ai(t), Ai'(t))``.

    Parameters
    ----------
    t : float or array_like
        Finite real argument(s).
    """
    arr = _as_finite(t)
    ai, aip = _backend.airy(arr)
    scalar = arr.ndim == 0
    return _out(np.asarray(ai), scalar), _out(np.asarray(aip), scalar)


def airy_ai(t):
    """Airy function Ai(t)."""
    return airy(t)[0]


def airy_ai_prime(t):
    """Derivative Ai'(t)."""
    return airy(t)[1]


def airy_branches(t):
    """Evaluate every Airy branch separately, for overlap self-tests.

    Returns a dict mapping ``"series"``, ``"table"`` and ``"asymptotic"`` to
    ``(Ai, Ai')`` pairs.  The table branch is only meaningful inside
    ``[TABLE_LO, TABLE_HI]``.
    """
    arr = np.atleast_1d(_as_finite(t))
    return {
        "series": _numeric.airy_series(arr),
        "table": _numeric.airy_taylor(arr),
        "asymptotic": _numeric.airy_asymptotic(arr),
    }


def bessel_j(order, t):
    """Bessel function J_order(t) for order in {0, 1/2, 1, 3/2}.

    Half-integer orders use the closed trigonometric forms.  Integer orders
    accept negative t through parity; half-integer orders require t >= 0.
    """
    nu = float(order)
    if not any(nu == o for o in BESSEL_ORDERS):
        raise DomainError(f"unsupported Bessel order {order!r}; expected one of {BESSEL_ORDERS}")
    arr = _as_finite(t)
    scalar = arr.ndim == 0
    if nu in (0.0, 1.0):
        a = np.abs(arr)
        j0, j1 = _backend.bessel_j01(a)
        if nu == 0.0:
            return _out(np.asarray(j0), scalar)
        return _out(np.sign(arr) * np.asarray(j1), scalar)
    if np.any(arr < 0):
        raise DomainError("half-integer orders require t >= 0")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        s, c = np.sin(arr), np.cos(arr)
        pref = np.sqrt(2.0 / (math.pi * arr))
        if nu == 0.5:
            val = pref * s
            small = arr < 1e-4
            # J_{1/2}(t) ~ sqrt(2t/pi) (1 - t^2/6)
            val = np.where(small, np.sqrt(2.0 * arr / math.pi) * (1 - arr * arr / 6), val)
        else:
            val = pref * (s / arr - c)
            small = arr < 1e-2
            # J_{3/2}(t) ~ sqrt(2/pi) t^{3/2}/3 (1 - t^2/10 + t^4/280)
            t2 = arr * arr
            series = math.sqrt(2.0 / math.pi) * arr**1.5 / 3.0 * (1 - t2 / 10 + t2 * t2 / 280)
            val = np.where(small, series, val)
    return _out(np.asarray(val, dtype=float), scalar)


def bessel_j_scaled(order, t):
    """``J_order(t) / t**order`` with the finite limit at t = 0.

    Used by the ball-indicator Fourier transform where the removable
    singularity at the diagonal must not lose precision.
    """
    nu = float(order)
    arr = _as_finite(t)
    scalar = arr.ndim == 0
    a = np.abs(arr)
    lim = 1.0 / (2.0**nu * math.gamma(nu + 1.0))
    small = a < 1e-3
    safe = np.where(small, 1.0, a)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.asarray(bessel_j(nu, safe), dtype=float) / safe**nu
    # two-term series J_nu(t)/t^nu = lim (1 - t^2/(4(nu+1)) + ...)
    series = lim * (1 - a * a / (4 * (nu + 1)) + a**4 / (32 * (nu + 1) * (nu + 2)))
    return _out(np.where(small, series, direct), scalar)


def airy_pair_tail(a, b, lower):
    """Integral of Ai(s + a) Ai(s + b) for s from ``lower`` to infinity.

    Closed form through the Wronskian antiderivative; coincident arguments
    use ``Ai'(u)**2 - u Ai(u)**2``.
    """
    aa = _as_finite(a, "a")
    bb = _as_finite(b, "b")
    ll = _as_finite(lower, "lower")
    out = _backend.airy_pair_tail(aa, bb, ll)
    scalar = np.ndim(out) == 0
    return _out(np.asarray(out), scalar)


def airy_tail_integral(t):
    """Integral of Ai(s) for s from ``t`` to infinity.

    Composite Gauss-Legendre on [t, 16] (Ai(16) < 1e-19).  Panels are
    sized so that each covers at most a quarter of a local oscillation
    on the negative axis.
    """
    arr = np.atleast_1d(_as_finite(t)).astype(float)
    out = np.empty_like(arr)
    nodes, weights = np.polynomial.legendre.leggauss(20)
    for i, lo in enumerate(arr):
        hi = 16.0
        if lo >= hi:
            out[i] = 0.0
            continue
        # local wavelength 2 pi / sqrt(|s|); panels of half a wavelength
        span = hi - lo
        wl = 2 * math.pi / math.sqrt(max(-lo, 1.0))
        npan = max(8, int(math.ceil(span / (0.5 * wl))))
        edges = np.linspace(lo, hi, npan + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
        half = 0.5 * (edges[1:] - edges[:-1])[:, None]
        pts = mid + half * nodes[None, :]
        ai, _ = _backend.airy(pts.ravel())
        out[i] = float(np.sum(np.asarray(ai).reshape(pts.shape) * weights[None, :] * half))
    return float(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))
