"""Operators under study, their symbols, and the geometry of point pairs.

Three operator kinds are supported:

``toy``
    ``1/2 h^2 D^2 - x_1`` in dimension d.
``generalized_toy``
    ``1/2 h^2 D_1^2 + 1/2 (h D_2)^2 - (1 + k h D_2) x_1`` in d = 2.  Written
    in the magnetic form ``1/2 sum (h D_j - V_j)^2 + V`` this has
    ``V_1 = 0``, ``V_2 = k x_1`` and ``V = -x_1 - k^2 x_1^2 / 2``.
``general``
    ``1/2 sum (h D_j - V_j) g^{jk} (h D_k - V_k) + V`` with user supplied
    callables, or one of the entries of :data:`CATALOG`.

The kinetic part always carries the factor 1/2, so the toy symbol is
``|xi|^2 / 2 - x_1``.
"""
import configparser
import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DomainError


class Kind(str, enum.Enum):
    TOY = "toy"
    GENERALIZED_TOY = "generalized_toy"
    GENERAL = "general"


class ZoneLabel(str, enum.Enum):
    REGULAR = "Regular"
    SINGULAR = "Singular"
    SHADOW = "Shadow"
    FORBIDDEN = "Forbidden"


DEFAULT_ZONE_EPS = 0.05
GRAD_STEP = 1e-6


# ----------------------------------------------------------------------------
# catalog of named general-kind operators

def _identity_metric(d):
    eye = np.eye(d)
    return lambda x: eye


def _zero_magnetic(d):
    zero = np.zeros(d)
    return lambda x: zero


def _catalog_entry(name, d):
    if name == "linear":
        # the toy operator written in the general form
        return _identity_metric(d), (lambda x: -x[0]), _zero_magnetic(d)
    if name == "flat":
        return _identity_metric(d), (lambda x: 0.0), _zero_magnetic(d)
    if name == "well":
        return _identity_metric(d), (lambda x: 0.5 * float(np.dot(x, x)) - 0.5), _zero_magnetic(d)
    if name == "tilted_metric":
        def metric(x):
            g = np.eye(d)
            g[0, 0] = 1.0 + 0.2 * float(np.dot(x[1:], x[1:]))
            return g

        return metric, (lambda x: -x[0]), _zero_magnetic(d)
    raise ConfigurationError(f"unknown catalog operator {name!r}; known: {sorted(CATALOG)}")


CATALOG = {
    "linear": "g = identity, V = -x_1 (toy operator in general form)",
    "flat": "g = identity, V = 0 (fails microhyperbolicity at tau = 0)",
    "well": "g = identity, V = |x|^2/2 - 1/2",
    "tilted_metric": "g^{11} = 1 + 0.2 |x'|^2, V = -x_1",
}


# ----------------------------------------------------------------------------
# operator specification

@dataclass(frozen=True)
class OperatorSpec:
    """An operator together with h and the energy level tau.

    Use the ``toy``, ``generalized_toy``, ``general`` or ``from_catalog``
    constructors rather than calling the class directly.
    """

    kind: Kind
    d: int
    h: float
    tau: float = 0.0
    k: float = 0.0
    metric: Optional[Callable] = field(default=None, compare=False, repr=False)
    potential: Optional[Callable] = field(default=None, compare=False, repr=False)
    magnetic: Optional[Callable] = field(default=None, compare=False, repr=False)
    name: Optional[str] = None

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0):
            raise DomainError("h must be positive and finite")
        if not math.isfinite(self.tau):
            raise DomainError("tau must be finite")
        if self.d < 1:
            raise DomainError("dimension must be at least 1")
        if self.kind == Kind.GENERALIZED_TOY and self.d != 2:
            raise DomainError("the generalized toy model is two-dimensional")
        if self.kind == Kind.GENERAL and None in (self.metric, self.potential, self.magnetic):
            raise DomainError("general operators need metric, potential and magnetic callables")

    # constructors ---------------------------------------------------------

    @classmethod
    def toy(cls, d=2, h=0.1, tau=0.0):
        return cls(Kind.TOY, int(d), float(h), float(tau))

    @classmethod
    def generalized_toy(cls, k, h=0.1, tau=0.0):
        return cls(Kind.GENERALIZED_TOY, 2, float(h), float(tau), float(k))

    @classmethod
    def general(cls, metric, potential, magnetic, d, h, tau=0.0, name=None):
        return cls(Kind.GENERAL, int(d), float(h), float(tau), 0.0, metric, potential, magnetic, name)

    @classmethod
    def from_catalog(cls, name, d=2, h=0.1, tau=0.0):
        metric, potential, magnetic = _catalog_entry(name, int(d))
        return cls.general(metric, potential, magnetic, d, h, tau, name=name)

    def with_h(self, h):
        return replace(self, h=float(h))

    def with_tau(self, tau):
        return replace(self, tau=float(tau))

    @property
    def is_toy_kind(self):
        return self.kind in (Kind.TOY, Kind.GENERALIZED_TOY)

    # coefficient access -----------------------------------------------------

    def _point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise DomainError(f"expected a point in R^{self.d}, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError("point coordinates must be finite")
        return x

    def V(self, x):
        """Scalar potential at x."""
        x = self._point(x)
        if self.kind == Kind.TOY:
            return -x[0]
        if self.kind == Kind.GENERALIZED_TOY:
            return -x[0] - 0.5 * self.k**2 * x[0] ** 2
        return float(self.potential(x))

    def grad_V(self, x):
        x = self._point(x)
        g = np.zeros(self.d)
        if self.kind == Kind.TOY:
            g[0] = -1.0
        elif self.kind == Kind.GENERALIZED_TOY:
            g[0] = -1.0 - self.k**2 * x[0]
        else:
            step = GRAD_STEP * max(1.0, float(np.linalg.norm(x)))
            for j in range(self.d):
                e = np.zeros(self.d)
                e[j] = step
                g[j] = (float(self.potential(x + e)) - float(self.potential(x - e))) / (2 * step)
        return g

    def magnetic_potential(self, x):
        """Vector (V_1, ..., V_d) at x."""
        x = self._point(x)
        if self.kind == Kind.TOY:
            return np.zeros(self.d)
        if self.kind == Kind.GENERALIZED_TOY:
            return np.array([0.0, self.k * x[0]])
        return np.asarray(self.magnetic(x), dtype=float)

    def inverse_metric(self, x):
        """Matrix g^{jk}(x)."""
        x = self._point(x)
        if self.is_toy_kind:
            return np.eye(self.d)
        g = np.asarray(self.metric(x), dtype=float)
        if g.shape != (self.d, self.d):
            raise DomainError("metric must return a d x d matrix")
        return g

    # config files -----------------------------------------------------------

    def to_config(self, section="operator"):
        """Return a ``ConfigParser`` holding this spec under ``section``."""
        cp = configparser.ConfigParser()
        cp[section] = {
            "kind": self.kind.value,
            "d": str(self.d),
            "h": repr(self.h),
            "tau": repr(self.tau),
            "k": repr(self.k),
        }
        if self.kind == Kind.GENERAL:
            if self.name is None:
                raise ConfigurationError("only catalog operators of general kind can be serialized")
            cp[section]["potential"] = self.name
        return cp

    @classmethod
    def from_section(cls, sec, h=None):
        """Build a spec from a config section mapping.

        ``h`` overrides (or supplies) the semiclassical parameter, which study
        configs leave out of the operator section.
        """
        try:
            kind = Kind(sec.get("kind", "toy").strip())
        except ValueError as exc:
            raise ConfigurationError(f"unknown operator kind {sec.get('kind')!r}") from exc
        d = int(sec.get("d", "2"))
        tau = float(sec.get("tau", "0"))
        if h is None:
            if "h" not in sec:
                raise ConfigurationError("operator section needs h")
            h = float(sec["h"])
        if kind == Kind.TOY:
            return cls.toy(d, h, tau)
        if kind == Kind.GENERALIZED_TOY:
            return cls.generalized_toy(float(sec.get("k", "0")), h, tau)
        if "potential" not in sec:
            raise ConfigurationError("general operators in config files must name a catalog potential")
        return cls.from_catalog(sec["potential"].strip(), d, h, tau)

    @classmethod
    def from_config(cls, path_or_parser, section="operator"):
        cp = path_or_parser
        if not isinstance(cp, configparser.ConfigParser):
            cp = configparser.ConfigParser()
            if not cp.read(path_or_parser):
                raise ConfigurationError(f"cannot read config file {path_or_parser}")
        if section not in cp:
            raise ConfigurationError(f"missing [{section}] section")
        return cls.from_section(cp[section])


# ----------------------------------------------------------------------------
# symbols and distances

def principal_symbol(spec, x, xi):
    """``a(x, xi) = 1/2 g^{jk}(xi_j - V_j)(xi_k - V_k) + V``."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (spec.d,) or not np.all(np.isfinite(xi)):
        raise DomainError("xi must be a finite covector of the operator dimension")
    p = xi - spec.magnetic_potential(x)
    return float(0.5 * p @ spec.inverse_metric(x) @ p + spec.V(x))


def grad_symbol(spec, x, xi):
    """Return ``(grad_x a, grad_xi a)``."""
    x = spec._point(x)
    xi = np.asarray(xi, dtype=float)
    gxi = spec.inverse_metric(x) @ (xi - spec.magnetic_potential(x))
    if spec.kind == Kind.TOY:
        gx = np.zeros(spec.d)
        gx[0] = -1.0
    elif spec.kind == Kind.GENERALIZED_TOY:
        # a = xi_1^2/2 + xi_2^2/2 - (1 + k xi_2) x_1
        gx = np.array([-(1.0 + spec.k * xi[1]), 0.0])
    else:
        step = GRAD_STEP * max(1.0, float(np.linalg.norm(x)))
        gx = np.empty(spec.d)
        for j in range(spec.d):
            e = np.zeros(spec.d)
            e[j] = step
            gx[j] = (principal_symbol(spec, x + e, xi) - principal_symbol(spec, x - e, xi)) / (2 * step)
    return gx, gxi


def nu(spec, x):
    """Distance to the energy level, ``|V(x) - tau|``."""
    return abs(spec.V(x) - spec.tau)


def ell(spec, x, y):
    """``max(|x - y|, |V(x) - tau|, |V(y) - tau|, h^{2/3})``."""
    x = spec._point(x)
    y = spec._point(y)
    return max(float(np.linalg.norm(x - y)), nu(spec, x), nu(spec, y), spec.h ** (2.0 / 3.0))


@dataclass(frozen=True)
class PointPair:
    x: tuple
    y: tuple
    ell: float
    ell0: float
    nu_x: float
    nu_y: float
    zone: ZoneLabel


def make_pair(spec, x, y, eps=DEFAULT_ZONE_EPS):
    xa = spec._point(x)
    ya = spec._point(y)
    return PointPair(
        tuple(float(v) for v in xa),
        tuple(float(v) for v in ya),
        ell(spec, xa, ya),
        float(np.linalg.norm(xa - ya)),
        nu(spec, xa),
        nu(spec, ya),
        zone_classify(spec, xa, ya, eps),
    )


# ----------------------------------------------------------------------------
# microhyperbolicity

MICRO_KINDS = ("full", "xi", "symbol_xi", "symbol_full")


def microhyperbolicity(spec, kind, samples, eps0):
    """Check a microhyperbolicity lower bound at every sample.

    Parameters
    ----------
    kind : {"full", "xi", "symbol_xi", "symbol_full"}
        ``full``: |V - tau| + |grad V| >= eps0 at points x.
        ``xi``: |V - tau| >= eps0 at points x.
        ``symbol_xi``: |a - tau| + |grad_xi a| >= eps0 at phase points.
        ``symbol_full``: |a - tau| + |grad_{x,xi} a| >= eps0 at phase points.
    samples : sequence
        Points x for the first two kinds, ``(x, xi)`` pairs for the others.
    """
    if kind not in MICRO_KINDS:
        raise DomainError(f"unknown microhyperbolicity kind {kind!r}")
    if not eps0 > 0:
        raise DomainError("eps0 must be positive")
    samples = list(samples)
    if not samples:
        raise DomainError("empty sample set")
    for s in samples:
        if kind in ("full", "xi"):
            gap = nu(spec, s)
            if kind == "full":
                gap += float(np.linalg.norm(spec.grad_V(s)))
        else:
            x, xi = s
            gap = abs(principal_symbol(spec, x, xi) - spec.tau)
            gx, gxi = grad_symbol(spec, x, xi)
            if kind == "symbol_xi":
                gap += float(np.linalg.norm(gxi))
            else:
                gap += float(np.sqrt(gx @ gx + gxi @ gxi))
        if gap < eps0:
            return False
    return True


# ----------------------------------------------------------------------------
# zones

def discriminant(spec, x, y):
    """Zone discriminant D; positive means two real rays connect x and y.

    Toy kinds: ``4 x1 y1 - |x' - y'|^2`` with x1, y1 shifted so that the
    energy level is 0.  General kind: the metric quadratic form built from
    grad V and g at the midpoint.
    """
    x = spec._point(x)
    y = spec._point(y)
    if spec.is_toy_kind:
        x1 = x[0] + spec.tau
        y1 = y[0] + spec.tau
        zp = x[1:] - y[1:]
        return float(4 * x1 * y1 - zp @ zp)
    m = 0.5 * (x + y)
    z = x - y
    ginv = spec.inverse_metric(m)
    gv = spec.grad_V(m)
    zz = float(z @ np.linalg.solve(ginv, z))
    vv = float(gv @ ginv @ gv)
    return float(4 * (spec.V(x) - spec.tau) * (spec.V(y) - spec.tau) - zz * vv + (z @ gv) ** 2)


def _forbidden(spec, x, y):
    thresh = spec.h ** (2.0 / 3.0)
    if spec.is_toy_kind:
        return x[0] + spec.tau < -thresh or y[0] + spec.tau < -thresh
    m = 0.5 * (x + y)
    gv = spec.grad_V(m)
    scale = math.sqrt(float(gv @ spec.inverse_metric(m) @ gv))
    return spec.tau - spec.V(x) < -thresh * scale or spec.tau - spec.V(y) < -thresh * scale


def zone_classify(spec, x, y, eps=DEFAULT_ZONE_EPS):
    """Regular, Singular, Shadow or Forbidden label for the pair (x, y)."""
    if not 0 < eps < 1:
        raise DomainError("zone eps must lie in (0, 1)")
    x = spec._point(x)
    y = spec._point(y)
    if _forbidden(spec, x, y):
        return ZoneLabel.FORBIDDEN
    D = discriminant(spec, x, y)
    L2 = ell(spec, x, y) ** 2
    if D >= eps * L2:
        return ZoneLabel.REGULAR
    if D <= -eps * L2:
        return ZoneLabel.SHADOW
    return ZoneLabel.SINGULAR


# ----------------------------------------------------------------------------
# scaling functions

def scaling_function(spec, x, which="gamma", eps=1.0):
    """Scaling functions ``gamma`` and ``gamma2``.

    ``gamma = eps |V - tau| + h^{2/3}`` and
    ``gamma2 = (eps |V - tau| + |grad V|^2 + h)^{1/2}``.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    gap = eps * nu(spec, x)
    if which == "gamma":
        return gap + spec.h ** (2.0 / 3.0)
    if which == "gamma2":
        gv = spec.grad_V(x)
        return math.sqrt(gap + float(gv @ spec.inverse_metric(x) @ gv) + spec.h)
    raise DomainError(f"unknown scaling function {which!r}")
