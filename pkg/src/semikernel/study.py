"""h-sweeps of the toy-model kernel against its semiclassical approximations.

A study evaluates, for every ``(h, pair)``, the exact kernel ``e_ref`` (fiber
oracle), the Weyl kernel and the Airy correction, and fits power laws
``|resid| ~ C h^{-p}`` to the residuals.

Config files are INI::

    [operator]
    kind = toy            ; toy | generalized_toy
    tau = 0
    k = 0

    [study]
    h_values = 0.04 0.02 0.01          ; or h_max, h_min, n_h (geometric)
    approximations = weyl weyl+corr
    zone_eps = 0.05
    seed = 0
    random_pairs = 0                   ; extra pairs drawn with the seed
    random_radius = 0.5
    output = study.csv                 ; JSON and SVG are written next to it
    plot = yes
    exponent_tol = 0.15

    [pair regular]
    x = 0.3 0
    y = 0.25 0.1
    scale_exponent = 0                 ; points are multiplied by h^p
    expect_weyl = <= 1.15              ; "<= a", ">= a", "a..b" or "a" (+- tol)
    expect_total = <= 1.15
"""
import configparser
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle, oscint
from .errors import (
    AccuracyError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    FitError,
    StudyError,
)
from .model import OperatorSpec, make_pair, zone_classify
from .weyl import weyl_kernel

CSV_HEADER = "h,x1,x2,y1,y2,ell,ell0,zone,e_ref,e_weyl,e_corr,resid_weyl,resid_total"
APPROXIMATIONS = ("weyl", "weyl+corr")
R2_MIN = 0.98
FLOOR_FACTOR = 1e3
MAX_FLAGGED = 0.2
# named regime boundaries for l-targeted pair families, l = h^p
REGIMES = {"h^(1/3)": 1.0 / 3.0, "h^(2/5)": 0.4, "h^(4/9)": 4.0 / 9.0, "h^(2/3)": 2.0 / 3.0}
_ROW_ERRORS = (AccuracyError, ConvergenceError, DomainError, FloatingPointError)


@dataclass(frozen=True)
class Expectation:
    """Admissible range for a fitted exponent.

    Explicit bounds are used as given; a single target value is widened by
    the study's ``exponent_tol``.
    """

    lo: float = -math.inf
    hi: float = math.inf

    @classmethod
    def parse(cls, text):
        t = text.strip()
        m = re.fullmatch(r"(<=|>=)\s*(\S+)", t)
        try:
            if m:
                v = float(m.group(2))
                return cls(hi=v) if m.group(1) == "<=" else cls(lo=v)
            if ".." in t:
                a, b = t.split("..")
                return cls(float(a), float(b))
            v = float(t)
        except ValueError as exc:
            raise ConfigurationError(f"cannot parse exponent expectation {text!r}") from exc
        return cls(v, v)

    def holds(self, p, tol):
        if self.lo != self.hi:
            tol = 0.0
        return self.lo - tol <= p <= self.hi + tol

    def __str__(self):
        if self.lo == self.hi:
            return f"{self.lo:g}"
        if self.lo == -math.inf:
            return f"<= {self.hi:g}"
        if self.hi == math.inf:
            return f">= {self.lo:g}"
        return f"{self.lo:g}..{self.hi:g}"


@dataclass(frozen=True)
class PairSeed:
    """Point pair; physical points are ``x h^p`` with ``p = scale_exponent``."""

    name: str
    x: tuple
    y: tuple
    scale_exponent: float = 0.0
    expect: dict = field(default_factory=dict, compare=False)

    def at(self, h):
        s = h**self.scale_exponent
        return tuple(s * v for v in self.x), tuple(s * v for v in self.y)


@dataclass(frozen=True)
class StudyConfig:
    spec: OperatorSpec
    h_values: tuple
    pairs: tuple
    approximations: tuple = APPROXIMATIONS
    zone_eps: float = 0.05
    seed: int = 0
    output: str = "study.csv"
    plot: bool = False
    exponent_tol: float = 0.15

    def __post_init__(self):
        hs = tuple(float(h) for h in self.h_values)
        object.__setattr__(self, "h_values", hs)
        if len(hs) < 3:
            raise ConfigurationError("a study needs at least three h values")
        if any(b >= a for a, b in zip(hs, hs[1:])) or hs[-1] <= 0:
            raise ConfigurationError("h values must be positive and strictly decreasing")
        if not self.spec.is_toy_kind or self.spec.d != 2:
            raise ConfigurationError("studies cover the two-dimensional toy kinds")
        bad = [a for a in self.approximations if a not in APPROXIMATIONS]
        if bad or not self.approximations:
            raise ConfigurationError(f"approximations must be a subset of {APPROXIMATIONS}")
        if not self.pairs:
            raise ConfigurationError("a study needs at least one pair")
        if not 0 < self.zone_eps < 1:
            raise ConfigurationError("zone_eps must lie in (0, 1)")
        for p in self.pairs:
            for h in hs:
                for pt in p.at(h):
                    if len(pt) != 2:
                        raise ConfigurationError(f"pair {p.name}: points must have two coordinates")
                    if math.hypot(*pt) >= 1:
                        raise ConfigurationError(f"pair {p.name}: point {pt} leaves the unit ball at h={h:g}")

    @property
    def csv_path(self):
        return Path(self.output)

    @property
    def json_path(self):
        return self.csv_path.with_suffix(".json")

    @property
    def svg_path(self):
        return self.csv_path.with_suffix(".svg")

    @classmethod
    def from_parser(cls, cp, base_dir=None):
        if "operator" not in cp or "study" not in cp:
            raise ConfigurationError("study configs need [operator] and [study] sections")
        st = cp["study"]
        try:
            if "h_values" in st:
                hs = tuple(float(v) for v in st["h_values"].replace(",", " ").split())
            else:
                h_max, h_min, n = float(st["h_max"]), float(st["h_min"]), int(st.get("n_h", "5"))
                if n < 2:
                    raise ConfigurationError("n_h must be at least 2")
                hs = tuple(float(v) for v in np.geomspace(h_max, h_min, n))
            spec = OperatorSpec.from_section(cp["operator"], h=hs[0])
            seed = st.getint("seed", 0)
            pairs = []
            for name in cp.sections():
                if not name.startswith("pair"):
                    continue
                sec = cp[name]
                expect = {}
                for key, approx in (("expect_weyl", "weyl"), ("expect_total", "weyl+corr")):
                    if key in sec:
                        expect[approx] = Expectation.parse(sec[key])
                pairs.append(
                    PairSeed(
                        name[4:].strip() or f"pair{len(pairs)}",
                        _floats(sec["x"]),
                        _floats(sec["y"]),
                        sec.getfloat("scale_exponent", 0.0),
                        expect,
                    )
                )
            pairs.extend(random_pairs(st.getint("random_pairs", 0), seed, st.getfloat("random_radius", 0.5)))
            output = st.get("output", "study.csv")
            if base_dir is not None and not Path(output).is_absolute():
                output = str(Path(base_dir) / output)
            return cls(
                spec,
                hs,
                tuple(pairs),
                tuple(st.get("approximations", " ".join(APPROXIMATIONS)).split()),
                st.getfloat("zone_eps", 0.05),
                seed,
                output,
                st.getboolean("plot", False),
                st.getfloat("exponent_tol", 0.15),
            )
        except (KeyError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"malformed study config: {exc}") from exc

    @classmethod
    def from_file(cls, path):
        cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        if not cp.read(path):
            raise ConfigurationError(f"cannot read config file {path}")
        return cls.from_parser(cp, base_dir=Path(path).parent)


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def random_pairs(n, seed, radius=0.5):
    """``n`` pairs drawn uniformly from the disk of the given radius."""
    if n <= 0:
        return []
    if not 0 < radius < 1:
        raise ConfigurationError("random_radius must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        r = radius * np.sqrt(rng.random(2))
        th = 2 * math.pi * rng.random(2)
        x = (float(r[0] * math.cos(th[0])), float(r[0] * math.sin(th[0])))
        y = (float(r[1] * math.cos(th[1])), float(r[1] * math.sin(th[1])))
        out.append(PairSeed(f"random{i}", x, y))
    return out


# ----------------------------------------------------------------------------
# rows and fits

@dataclass(frozen=True)
class Row:
    h: float
    pair: str
    index: int
    x: tuple
    y: tuple
    ell: float
    ell0: float
    zone: str
    e_ref: float
    e_weyl: float
    e_corr: float
    resid_weyl: float
    resid_total: float
    ref_err: float = 0.0
    corr_err: float = 0.0
    flagged: bool = False
    note: str = ""

    def resid(self, approximation):
        return self.resid_weyl if approximation == "weyl" else self.resid_total

    def floor(self, approximation):
        """Noise level below which the residual carries no information."""
        err = self.ref_err if approximation == "weyl" else self.ref_err + self.corr_err
        return FLOOR_FACTOR * err

    def csv(self):
        vals = [self.h, *self.x, *self.y, self.ell, self.ell0]
        tail = [self.e_ref, self.e_weyl, self.e_corr, self.resid_weyl, self.resid_total]
        return ",".join([*(format(v, ".17g") for v in vals), self.zone, *(format(v, ".17g") for v in tail)])


@dataclass(frozen=True)
class Fit:
    pair: str
    approximation: str
    p: float
    C: float
    r2: float
    verdict: str
    n_rows: int
    expectation: str = ""

    def as_dict(self):
        return {
            "pair": self.pair,
            "approximation": self.approximation,
            "p": _json_num(self.p),
            "C": _json_num(self.C),
            "r2": _json_num(self.r2),
            "verdict": self.verdict,
            "n_rows": self.n_rows,
            "expectation": self.expectation,
        }


@dataclass(frozen=True)
class StudyReport:
    rows: tuple
    fits: tuple
    config: StudyConfig = field(repr=False, compare=False, default=None)

    def fit(self, pair, approximation):
        for f in self.fits:
            if f.pair == pair and f.approximation == approximation:
                return f
        raise KeyError((pair, approximation))

    def csv_text(self):
        return "\n".join([CSV_HEADER, *(r.csv() for r in self.rows)]) + "\n"


def _json_num(v):
    return None if v is None or not math.isfinite(v) else float(v)


def fit_exponent(rows):
    """Least-squares fit of ``log r = log C + p log(1/h)``.

    Parameters
    ----------
    rows : iterable of (h, r)
        Rows with ``r <= 0`` (or non-finite) are dropped.

    Returns
    -------
    p, C, r2 : float
        A constant series gives ``p = 0`` and ``r2 = 1``.
    """
    pts = [(float(h), float(r)) for h, r in rows if h > 0 and r > 0 and math.isfinite(r)]
    if len(pts) < 3:
        raise FitError(f"need at least 3 positive residuals, got {len(pts)}")
    X = np.log([1.0 / h for h, _ in pts])
    Y = np.log([r for _, r in pts])
    if np.ptp(X) == 0:
        raise FitError("all h values coincide")
    p, logC = np.polyfit(X, Y, 1)
    pred = logC + p * X
    ss_tot = float(np.sum((Y - Y.mean()) ** 2))
    ss_res = float(np.sum((Y - pred) ** 2))
    # a flat series is fitted exactly
    if ss_tot <= 1e-28 * max(1.0, float(Y @ Y)):
        return 0.0, float(math.exp(Y.mean())), 1.0
    return float(p), float(math.exp(logC)), 1.0 - ss_res / ss_tot


def verdict_for(rows, approximation, expectation=None, tol=0.15, pair=""):
    """Fit one (pair, approximation) series and judge it.

    Verdicts: ``pass``/``fail`` against the expectation, ``fitted`` without
    one, ``inconclusive`` when R^2 < 0.98, ``at numerical floor`` when
    fewer than three rows rise above 1e3 times their error estimate, and
    ``insufficient`` when flagged rows leave fewer than three.
    """
    usable = [r for r in rows if not r.flagged and math.isfinite(r.resid(approximation))]
    above = [r for r in usable if abs(r.resid(approximation)) > r.floor(approximation)]
    exp_text = str(expectation) if expectation else ""
    if len(above) < 3:
        verdict = "at numerical floor" if len(usable) >= 3 else "insufficient"
        return Fit(pair, approximation, math.nan, math.nan, math.nan, verdict, len(above), exp_text)
    p, C, r2 = fit_exponent([(r.h, abs(r.resid(approximation))) for r in above])
    if r2 < R2_MIN:
        verdict = "inconclusive"
    elif expectation is None:
        verdict = "fitted"
    else:
        verdict = "pass" if expectation.holds(p, tol) else "fail"
    return Fit(pair, approximation, p, C, r2, verdict, len(above), exp_text)


# ----------------------------------------------------------------------------
# the sweep

def _reference(spec, x, y):
    kv = oracle.toy_kernel(spec, x, y)
    return kv.value, kv.est_err


def _row(cfg, spec, seed, index, reference):
    x, y = seed.at(spec.h)
    pair = make_pair(spec, x, y, cfg.zone_eps)
    base = dict(h=spec.h, pair=seed.name, index=index, x=pair.x, y=pair.y, ell=pair.ell, ell0=pair.ell0, zone=pair.zone.value)
    nan = math.nan
    try:
        e_ref, ref_err = reference(spec, x, y)
        e_weyl = weyl_kernel(spec, x, y).value
        e_corr, corr_err, resid_total = nan, 0.0, nan
        if "weyl+corr" in cfg.approximations:
            rep = oscint.corr_term(spec, x, y, report=True)
            e_corr, corr_err = rep.value, rep.est_err
            # the correction is defined against the plain toy Weyl term
            resid_total = e_ref - (oscint._toy_weyl(spec, x, y) + e_corr)
    except _ROW_ERRORS as exc:
        return Row(**base, e_ref=nan, e_weyl=nan, e_corr=nan, resid_weyl=nan, resid_total=nan, flagged=True, note=str(exc))
    return Row(
        **base,
        e_ref=e_ref,
        e_weyl=e_weyl,
        e_corr=e_corr,
        resid_weyl=e_ref - e_weyl,
        resid_total=resid_total,
        ref_err=ref_err,
        corr_err=corr_err,
    )


def run_study(cfg, reference=None, write=True):
    """Evaluate every (h, pair), fit the residuals and write the report.

    Parameters
    ----------
    reference : callable, optional
        ``reference(spec, x, y) -> (value, est_err)`` replaces the fiber
        oracle; used for synthetic injection checks.
    write : bool
        Write CSV, JSON and (if configured) SVG next to ``cfg.output``.
    """
    reference = reference or _reference
    rows = []
    for h in cfg.h_values:
        spec = cfg.spec.with_h(h)
        for i, seed in enumerate(cfg.pairs):
            rows.append(_row(cfg, spec, seed, i, reference))
    hidx = {h: j for j, h in enumerate(cfg.h_values)}
    rows.sort(key=lambda r: (hidx[r.h], r.index))
    n_flag = sum(r.flagged for r in rows)
    if n_flag > MAX_FLAGGED * len(rows):
        notes = sorted({r.note for r in rows if r.flagged})
        raise StudyError(f"{n_flag} of {len(rows)} rows failed: {'; '.join(notes)}")
    fits = []
    for seed in cfg.pairs:
        series = [r for r in rows if r.pair == seed.name]
        for approx in cfg.approximations:
            fits.append(verdict_for(series, approx, seed.expect.get(approx), cfg.exponent_tol, seed.name))
    report = StudyReport(tuple(rows), tuple(fits), cfg)
    if write:
        write_report(report)
    return report


def check_zones(report, eps=None):
    """Rows whose zone column disagrees with a fresh classification."""
    cfg = report.config
    eps = cfg.zone_eps if eps is None else eps
    return [r for r in report.rows if zone_classify(cfg.spec.with_h(r.h), r.x, r.y, eps).value != r.zone]


def write_report(report):
    cfg = report.config
    cfg.csv_path.parent.mkdir(parents=True, exist_ok=True)
    with open(cfg.csv_path, "w", newline="\n") as fh:
        fh.write(report.csv_text())
    meta = {
        "operator": {"kind": cfg.spec.kind.value, "d": cfg.spec.d, "tau": cfg.spec.tau, "k": cfg.spec.k},
        "h_values": list(cfg.h_values),
        "zone_eps": cfg.zone_eps,
        "seed": cfg.seed,
        "exponent_tol": cfg.exponent_tol,
        "pairs": [
            {"name": p.name, "x": list(p.x), "y": list(p.y), "scale_exponent": p.scale_exponent} for p in cfg.pairs
        ],
        "flagged_rows": [{"h": r.h, "pair": r.pair, "note": r.note} for r in report.rows if r.flagged],
    }
    with open(cfg.json_path, "w") as fh:
        json.dump({"fits": [f.as_dict() for f in report.fits], "meta": meta}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if cfg.plot:
        cfg.svg_path.write_text(svg_plot(report))


# ----------------------------------------------------------------------------
# SVG

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def svg_plot(report, width=640, height=440):
    """Log-log plot of |resid| against 1/h with the fitted lines, as SVG markup."""
    series = []
    for f in report.fits:
        pts = [
            (1.0 / r.h, abs(r.resid(f.approximation)))
            for r in report.rows
            if r.pair == f.pair and not r.flagged and abs(r.resid(f.approximation)) > 0
        ]
        pts = [(a, b) for a, b in pts if math.isfinite(b)]
        if pts:
            series.append((f, pts))
    left, right, top, bottom = 70, 180, 20, 50
    pw, ph = width - left - right, height - top - bottom
    allx = [math.log10(a) for _, pts in series for a, _ in pts] or [0.0, 1.0]
    ally = [math.log10(b) for _, pts in series for _, b in pts] or [0.0, 1.0]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def sx(v):
        return left + pw * (v - x0) / (x1 - x0)

    def sy(v):
        return top + ph * (1 - (v - y0) / (y1 - y0))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
        f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">log10(1/h)</text>',
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" transform="rotate(-90 16 {top + ph / 2:.1f})">log10|resid|</text>',
    ]
    for v, anchor in ((x0, "start"), (x1, "end")):
        out.append(f'<text x="{sx(v):.1f}" y="{top + ph + 15}" text-anchor="{anchor}">{v:.3g}</text>')
    for v in (y0, y1):
        out.append(f'<text x="{left - 6}" y="{sy(v) + 4:.1f}" text-anchor="end">{v:.3g}</text>')
    for j, (f, pts) in enumerate(series):
        col = _COLORS[j % len(_COLORS)]
        for a, b in pts:
            out.append(f'<circle cx="{sx(math.log10(a)):.2f}" cy="{sy(math.log10(b)):.2f}" r="3" fill="{col}"/>')
        if math.isfinite(f.p):
            la, lb = math.log10(pts[0][0]), math.log10(pts[-1][0])
            fa = math.log10(f.C) + f.p * la
            fb = math.log10(f.C) + f.p * lb
            out.append(
                f'<line x1="{sx(la):.2f}" y1="{sy(fa):.2f}" x2="{sx(lb):.2f}" y2="{sy(fb):.2f}" stroke="{col}"/>'
            )
        label = f"{f.pair} {f.approximation}: " + (f"p={f.p:.3f}" if math.isfinite(f.p) else f.verdict)
        ly = top + 14 * (j + 1)
        out.append(f'<text x="{left + pw + 10}" y="{ly}" fill="{col}">{_escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
