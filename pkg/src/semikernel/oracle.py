"""Reference kernels for the toy models.

Two independent constructions:

* Fiber decomposition.  After a partial Fourier transform in ``x'`` every
  fiber is the 1-d operator ``1/2 h^2 D_1^2 - c x_1`` whose projector is
  explicit in Airy functions,

      e_1(x1, y1, E) = kappa int_{-kappa E/c}^inf Ai(t - kappa x1) Ai(t - kappa y1) dt,

  with ``kappa = (2c/h^2)^{1/3}``, and the full kernel is the inverse
  transform over the transverse momentum.  The slope is ``c = 1`` for the
  toy model and ``c = 1 + k xi_2`` for the generalized one.
* Finite differences on a box with Dirichlet walls, a dense eigensolve
  (``numpy.linalg.eigh``) and an energy-mollified projector
  ``sum_j w(E_j) psi_j(x) conj(psi_j(y))`` with ``w = erfc((E - tau)/eps)/2``.

The box quantizes the continuous spectrum, so grid values are compared with
the equally mollified fiber kernel, ``int e(E) (-w'(E)) dE``.
"""
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError
from .model import Kind
from .specfn import airy_pair_tail, bessel_j

HERMITE_NODES = 40


@dataclass(frozen=True)
class FiberKernel1D:
    """Fiber operator ``1/2 h^2 D_1^2 - slope x_1``."""

    slope: float
    h: float

    def __post_init__(self):
        if not self.slope > 0:
            raise DomainError("fiber slope must be positive")
        if not self.h > 0:
            raise DomainError("h must be positive")

    @property
    def kappa(self):
        return (2 * self.slope / self.h**2) ** (1.0 / 3.0)


@dataclass(frozen=True)
class KernelValue:
    value: float
    method: str
    est_err: float
    meta: dict = field(default_factory=dict, compare=False)


def airy_projector_1d(fk, x1, y1, E):
    """Projector kernel of one fiber below energy E (array E allowed)."""
    return _fiber(np.asarray(fk.slope, float), fk.h, x1, y1, E)


def _fiber(c, h, x1, y1, E):
    kap = (2 * c / h**2) ** (1.0 / 3.0)
    return kap * np.asarray(airy_pair_tail(-kap * x1, -kap * y1, -kap * np.asarray(E) / c))


def _xi_range(x1, y1, tau, h):
    # beyond |xi'| = Xi the fibers sit 16 Airy widths inside the forbidden side
    w = (h * h / 2) ** (1.0 / 3.0)
    return math.sqrt(2 * max(max(x1, y1) + tau + 16 * w, 4 * w))


def _toy2d(x1, y1, z2, tau, h, k, scale=3.0):
    Xi = _xi_range(x1, y1, tau, h)
    if k != 0 and abs(k) * Xi >= 1:
        raise DomainError("fiber slope 1 + k xi_2 is not positive on the integration range")
    kap = (2 / h**2) ** (1.0 / 3.0)
    n = int(scale * Xi * (abs(z2) / h + 2 * kap * Xi)) + 64
    xi = np.linspace(-Xi, Xi, 2 * n + 1)
    f = _fiber(1 + k * xi, h, x1, y1, tau - 0.5 * xi**2) * np.cos(z2 * xi / h)
    w = np.full(xi.size, xi[1] - xi[0])
    w[0] = w[-1] = 0.5 * w[0]
    fine = float(f @ w) / (2 * math.pi * h)
    coarse = float(f[::2] @ (2 * w[::2])) / (2 * math.pi * h)
    # the trapezoid rule is spectrally accurate here; the half-step value
    # differs by far more than the fine one's error.  Rounding sets a floor.
    floor = 8 * np.finfo(float).eps * float(np.abs(f) @ w) / (2 * math.pi * h)
    return fine, max(abs(fine - coarse), floor), xi.size


_GL16 = np.polynomial.legendre.leggauss(16)


def _toy3d(x1, y1, zp, tau, h):
    R = _xi_range(x1, y1, tau, h)
    kap = (2 / h**2) ** (1.0 / 3.0)

    def rule(npan):
        edges = np.linspace(0, R, npan + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        r = (mid[:, None] + half[:, None] * _GL16[0]).ravel()
        wr = (half[:, None] * _GL16[1]).ravel()
        f = r * np.asarray(bessel_j(0, r * zp / h)) * _fiber(1.0, h, x1, y1, tau - 0.5 * r * r)
        scale = float(np.abs(f) @ wr) / (2 * math.pi * h * h)
        return float(f @ wr) / (2 * math.pi * h * h), r.size, scale

    npan = int(R * (zp / h + 2 * kap * R) / 4) + 8
    coarse, _, _ = rule(npan)
    fine, n, scale = rule(2 * npan)
    return fine, max(abs(fine - coarse), 8 * np.finfo(float).eps * scale), n


def toy_kernel(spec, x, y):
    """Exact projector kernel of the toy kinds by fiber decomposition.

    For the generalized model the real part is returned.
    """
    if not spec.is_toy_kind:
        raise DomainError("the fiber oracle covers the toy kinds only")
    if spec.d > 3:
        raise DomainError("the fiber oracle is implemented for d <= 3")
    x = spec._point(x)
    y = spec._point(y)
    h, tau = spec.h, spec.tau
    if spec.d == 1:
        v = float(_fiber(1.0, h, x[0], y[0], tau))
        return KernelValue(v, "oracle-airy", 1e-14 * max(abs(v), 1.0))
    if spec.d == 2:
        k = spec.k if spec.kind == Kind.GENERALIZED_TOY else 0.0
        v, err, n = _toy2d(x[0], y[0], x[1] - y[1], tau, h, k)
    else:
        v, err, n = _toy3d(x[0], y[0], float(np.linalg.norm(x[1:] - y[1:])), tau, h)
    return KernelValue(v, "oracle-airy", err, {"nodes": n})


def toy_kernel_mollified(spec, x, y, eps, nodes=HERMITE_NODES):
    """``int e(E) (-w'(E)) dE`` with ``w = erfc((E - tau)/eps)/2``.

    Gauss-Hermite in ``E = tau + eps t``.
    """
    if not eps > 0:
        raise DomainError("mollification width must be positive")
    t, w = np.polynomial.hermite.hermgauss(nodes)
    total = 0.0
    err = 0.0
    for ti, wi in zip(t, w):
        kv = toy_kernel(spec.with_tau(spec.tau + eps * ti), x, y)
        total += wi * kv.value
        err += wi * kv.est_err
    return KernelValue(total / math.sqrt(math.pi), "oracle-airy-mollified", err / math.sqrt(math.pi), {"eps": eps})


# ----------------------------------------------------------------------------
# finite-difference oracles

@dataclass(frozen=True)
class GridOracleConfig:
    """Box, resolution and energy smoothing for the grid eigensolver.

    Attributes
    ----------
    box : tuple of (lo, hi) pairs, one per dimension
    n : tuple of int
        Interior points per dimension (Dirichlet nodes excluded).
    mollify_eps : float
        Width of the smooth energy step.
    """

    box: tuple
    n: tuple
    mollify_eps: float

    def __post_init__(self):
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        n = tuple(int(v) for v in (self.n if np.ndim(self.n) else (self.n,) * len(box)))
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "n", n)
        if len(n) != len(box):
            raise ConfigurationError("box and n must have the same dimension")
        if any(v < 16 for v in n):
            raise ConfigurationError("need at least 16 points per dimension")
        if any(hi <= lo for lo, hi in box):
            raise ConfigurationError("box intervals must be nonempty")
        if not self.mollify_eps > 0:
            raise ConfigurationError("mollify_eps must be positive")

    @property
    def spacing(self):
        return tuple((hi - lo) / (m + 1) for (lo, hi), m in zip(self.box, self.n))

    def nodes(self, axis):
        lo, hi = self.box[axis]
        return lo + self.spacing[axis] * np.arange(1, self.n[axis] + 1)

    @classmethod
    def standard(cls, spec, n=64, half_width=1.0):
        """Symmetric box ``[-L, L]^d`` with ``eps = 10 h / (2L)``."""
        box = ((-half_width, half_width),) * spec.d
        return cls(box, (n,) * spec.d, 10 * spec.h / (2 * half_width))


def default_box(spec, eps):
    """Box rule: lower wall at ``-max(1, 4 (tau + eps))``, upper symmetric."""
    L = max(1.0, 4 * abs(spec.tau + eps))
    return ((-L, L),) * spec.d


def _turning_width(h):
    return (h * h / 2) ** (1.0 / 3.0)


def _check_box(cfg, spec, points):
    w = _turning_width(spec.h)
    margin = 2 * w
    for p in points:
        for axis, (lo, hi) in enumerate(cfg.box):
            if not (lo + margin <= p[axis] <= hi - margin):
                raise ConfigurationError(
                    f"evaluation point {tuple(p)} is within {margin:.3g} of the box wall on axis {axis}"
                )
    if spec.is_toy_kind:
        # the lower wall must sit two Airy widths inside the forbidden side of tau + eps
        turning = -(spec.tau + cfg.mollify_eps)
        if cfg.box[0][0] > turning - margin:
            raise ConfigurationError(
                f"lower wall {cfg.box[0][0]:.3g} is within {margin:.3g} of the turning point {turning:.3g}"
            )


def _second_difference(m, step):
    main = np.full(m, -2.0)
    off = np.ones(m - 1)
    return (np.diag(main) + np.diag(off, 1) + np.diag(off, -1)) / step**2


def _central_difference(m, step):
    off = np.ones(m - 1)
    return (np.diag(off, 1) - np.diag(off, -1)) / (2 * step)


def _potential_on_grid(spec, grids):
    mesh = np.meshgrid(*grids, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    if spec.kind == Kind.TOY:
        return -pts[:, 0]
    if spec.kind == Kind.GENERALIZED_TOY:
        return -pts[:, 0] - 0.5 * spec.k**2 * pts[:, 0] ** 2
    return np.array([spec.V(p) for p in pts])


class GridSolution:
    """Eigen-decomposition of a discretized operator; evaluates kernels."""

    def __init__(self, cfg, spec):
        if len(cfg.box) != spec.d:
            raise ConfigurationError("grid dimension does not match the operator")
        if spec.d not in (1, 2):
            raise ConfigurationError("grid oracles are one- or two-dimensional")
        if spec.kind == Kind.GENERAL and spec.d == 2:
            raise ConfigurationError("the 2-d grid oracle covers the toy kinds")
        size = int(np.prod(cfg.n))
        if spec.d == 2 and size > 4096:
            raise ConfigurationError("2-d grid exceeds the dense eigensolve budget of 4096 points")
        self.cfg = cfg
        self.spec = spec
        h = spec.h
        grids = [cfg.nodes(a) for a in range(spec.d)]
        self.grids = grids
        steps = cfg.spacing
        lap = [_second_difference(m, s) for m, s in zip(cfg.n, steps)]
        if spec.d == 1:
            H = -0.5 * h * h * lap[0]
        else:
            i1, i2 = np.eye(cfg.n[0]), np.eye(cfg.n[1])
            H = -0.5 * h * h * (np.kron(lap[0], i2) + np.kron(i1, lap[1]))
        H = H + np.diag(_potential_on_grid(spec, grids))
        if spec.kind == Kind.GENERALIZED_TOY and spec.k != 0.0:
            # -k x_1 (h D_2) with h D_2 = -i h d/dx_2; Hermitian central difference
            hd2 = -1j * h * np.kron(np.eye(cfg.n[0]), _central_difference(cfg.n[1], steps[1]))
            H = H.astype(complex) - spec.k * (np.diag(grids[0].repeat(cfg.n[1])) @ hd2)
        self.energies, self.vectors = np.linalg.eigh(H)
        self.cell = float(np.prod(steps))

    def _snap(self, p):
        idx, off = [], []
        for a, g in enumerate(self.grids):
            i = int(np.argmin(np.abs(g - p[a])))
            idx.append(i)
            off.append(float(p[a] - g[i]))
        return tuple(idx), off

    def _flat(self, idx):
        if len(idx) == 1:
            return idx[0]
        return idx[0] * self.cfg.n[1] + idx[1]

    def weights(self, eps=None):
        from math import erfc

        eps = self.cfg.mollify_eps if eps is None else eps
        return np.array([0.5 * erfc((E - self.spec.tau) / eps) for E in self.energies])

    def kernel_at(self, ix, iy, w):
        a = self.vectors[self._flat(ix)]
        b = self.vectors[self._flat(iy)]
        return float(np.real(np.sum(w * a * np.conj(b)))) / self.cell

    def kernel(self, x, y, eps=None):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        ix, ox = self._snap(x)
        iy, oy = self._snap(y)
        w = self.weights(eps)
        val = self.kernel_at(ix, iy, w)
        # snapping error: one-sided differences toward the requested point
        err = 0.0
        for a in range(self.spec.d):
            for idx, off, other, first in ((ix, ox, iy, True), (iy, oy, ix, False)):
                if off[a] == 0.0:
                    continue
                nb = list(idx)
                nb[a] = min(max(nb[a] + (1 if off[a] > 0 else -1), 0), self.cfg.n[a] - 1)
                nb = tuple(nb)
                v2 = self.kernel_at(nb, other, w) if first else self.kernel_at(other, nb, w)
                err += abs(v2 - val) * abs(off[a]) / self.cfg.spacing[a]
        snapped_x = tuple(float(self.grids[a][ix[a]]) for a in range(self.spec.d))
        snapped_y = tuple(float(self.grids[a][iy[a]]) for a in range(self.spec.d))
        return KernelValue(val, "oracle-grid", err, {"x": snapped_x, "y": snapped_y, "eps": eps or self.cfg.mollify_eps})


@functools.lru_cache(maxsize=4)
def _solve_cached(cfg, kind, d, h, tau, k):
    from .model import OperatorSpec

    spec = OperatorSpec(Kind(kind), d, h, tau, k)
    return GridSolution(cfg, spec)


def grid_solution(cfg, spec):
    """Eigen-decomposition for (cfg, spec); toy kinds are cached."""
    if spec.is_toy_kind:
        return _solve_cached(cfg, spec.kind.value, spec.d, spec.h, spec.tau, spec.k)
    return GridSolution(cfg, spec)


def grid_oracle_1d(cfg, spec, x1, y1):
    """Mollified projector kernel of the 1-d finite-difference operator."""
    if spec.d != 1:
        raise ConfigurationError("grid_oracle_1d needs a one-dimensional operator")
    _check_box(cfg, spec, [np.array([x1]), np.array([y1])])
    return grid_solution(cfg, spec).kernel([x1], [y1])


def grid_oracle_2d(cfg, spec, x, y):
    """Mollified projector kernel of the 2-d finite-difference operator."""
    if spec.d != 2:
        raise ConfigurationError("grid_oracle_2d needs a two-dimensional operator")
    _check_box(cfg, spec, [np.asarray(x, float), np.asarray(y, float)])
    return grid_solution(cfg, spec).kernel(x, y)
