"""Weyl approximation of the projector kernel.

The Weyl kernel is the h-Fourier transform of the indicator of the classical
sublevel set ``{xi : a(m, xi) < tau}`` at the midpoint ``m = (x + y)/2``:

    e^W(x, y) = (2 pi h)^{-d} int_{a(m, xi) < tau} exp(i <x - y, xi>/h) d xi.

With the half kinetic normalization this set is the ellipsoid
``1/2 (xi - V_.)^T g^{..} (xi - V_.) < tau - V(m)``; its transform is the
ball transform ``(2 pi rho/w)^{d/2} J_{d/2}(rho w)`` with
``rho = sqrt(2 (tau - V(m)))`` after a linear change of variables.  The
magnetic shift contributes the unimodular factor
``exp(i <x - y, V_.(m)>/h)`` whose real part is kept.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError
from .specfn import bessel_j_scaled

MAX_EVALS = 10_000_000
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class Route(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    DIRECT_QUADRATURE = "DirectQuadrature"


@dataclass(frozen=True)
class WeylValue:
    value: float
    route: Route
    est_err: float


def _ellipsoid(spec, x, y):
    """Energy gap at the midpoint, the metric matrix and the magnetic phase."""
    x = spec._point(x)
    y = spec._point(y)
    m = 0.5 * (x + y)
    gap = spec.tau - spec.V(m)
    ginv = spec.inverse_metric(m)
    phase = float((x - y) @ spec.magnetic_potential(m)) / spec.h
    return x - y, gap, ginv, phase


def ball_volume(d):
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _closed(spec, z, gap, ginv, phase):
    d = spec.d
    if d > 3:
        raise DomainError("closed-form Weyl kernel is implemented for d <= 3")
    if gap <= 0:
        return 0.0
    rho = math.sqrt(2.0 * gap)
    zt = math.sqrt(max(float(z @ np.linalg.solve(ginv, z)), 0.0))
    det = float(np.linalg.det(ginv))
    ball = (2 * math.pi) ** (d / 2) * rho**d * bessel_j_scaled(d / 2, rho * zt / spec.h)
    return (2 * math.pi * spec.h) ** (-d) * ball / math.sqrt(det) * math.cos(phase)


def _panels(lo, hi, npan):
    edges = np.linspace(lo, hi, npan + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return pts, wts


def _ball_transform_direct(d, rho, w, refine):
    """Tensor-grid quadrature of ``int_{|eta| < rho} exp(i <w, eta>) d eta``.

    ``w`` is a vector; the grid does not assume it points along an axis.
    """
    wn = float(np.linalg.norm(w))
    npan = int(math.ceil(refine * (rho * wn / math.pi + 2)))
    r, wr = _panels(0.0, rho, npan)
    if d == 1:
        x, wx = _panels(-rho, rho, 2 * npan)
        vals = np.exp(1j * w[0] * x)
        return complex(np.sum(vals * wx)), x.size
    if d == 2:
        m = int(math.ceil(refine * (rho * wn + 32)))
        th = 2 * math.pi * np.arange(m) / m
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
        proj = dirs @ w  # (m,)
        if r.size * m > MAX_EVALS:
            raise AccuracyError("direct Weyl quadrature exceeds the evaluation cap")
        vals = np.exp(1j * np.outer(r, proj))
        return complex(np.sum(vals * (wr * r)[:, None]) * (2 * math.pi / m)), r.size * m
    if d == 3:
        mu, wmu = _panels(-1.0, 1.0, npan)
        m = int(math.ceil(refine * (rho * wn + 32)))
        ph = 2 * math.pi * np.arange(m) / m
        s = np.sqrt(np.clip(1 - mu * mu, 0, None))
        dirs = np.stack(
            [np.outer(s, np.cos(ph)), np.outer(s, np.sin(ph)), np.repeat(mu[:, None], m, axis=1)], axis=-1
        )
        proj = dirs @ w  # (nmu, m)
        if r.size * proj.size > MAX_EVALS:
            raise AccuracyError("direct Weyl quadrature exceeds the evaluation cap")
        total = 0j
        for ri, wri in zip(r, wr):
            total += wri * ri * ri * np.sum(np.exp(1j * ri * proj) * wmu[:, None]) * (2 * math.pi / m)
        return complex(total), r.size * proj.size
    raise DomainError("direct Weyl quadrature is implemented for d <= 3")


def _direct(spec, z, gap, ginv, phase):
    d = spec.d
    if gap <= 0:
        return 0.0, 0.0
    rho = math.sqrt(2.0 * gap)
    # xi = V(m) + L eta with L L^T = ginv^{-1}, so the set becomes |eta| < rho
    L = np.linalg.cholesky(np.linalg.inv(ginv))
    w = L.T @ z / spec.h
    jac = float(np.linalg.det(L))
    pref = (2 * math.pi * spec.h) ** (-d) * jac
    coarse, _ = _ball_transform_direct(d, rho, w, 1.0)
    fine, _ = _ball_transform_direct(d, rho, w, 1.5)
    val = pref * (np.exp(1j * phase) * fine).real
    err = pref * abs(fine - coarse)
    return float(val), float(err)


def weyl_kernel(spec, x, y, route="auto"):
    """Weyl kernel ``e^W(x, y)`` at the energy level ``spec.tau``.

    Parameters
    ----------
    route : {"auto", "closed", "quadrature"}
        ``auto`` prefers the closed form.
    """
    z, gap, ginv, phase = _ellipsoid(spec, x, y)
    if route in ("auto", "closed"):
        val = _closed(spec, z, gap, ginv, phase)
        # rounding of the Bessel evaluation, relative to the diagonal value
        scale = (2 * math.pi * spec.h) ** (-spec.d) * ball_volume(spec.d) * max(2 * gap, 0.0) ** (spec.d / 2)
        return WeylValue(float(val), Route.CLOSED_FORM, float(1e-13 * scale))
    if route == "quadrature":
        val, err = _direct(spec, z, gap, ginv, phase)
        return WeylValue(val, Route.DIRECT_QUADRATURE, err)
    raise DomainError(f"unknown Weyl route {route!r}")


def weyl_diag(spec, x):
    """Diagonal value ``(2 pi h)^{-d} omega_d (2 (tau - V(x)))_+^{d/2}``.

    In d = 2 this is ``(tau - V(x))_+ / (2 pi h^2)``.
    """
    x = spec._point(x)
    gap = spec.tau - spec.V(x)
    if gap <= 0:
        return 0.0
    det = float(np.linalg.det(spec.inverse_metric(x)))
    return (2 * math.pi * spec.h) ** (-spec.d) * ball_volume(spec.d) * (2 * gap) ** (spec.d / 2) / math.sqrt(det)
