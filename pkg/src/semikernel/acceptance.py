"""Acceptance checks, one function per criterion.

Each ``crit_N`` returns a :class:`CriterionResult` whose ``status`` is
``pass``, ``fail`` or ``inconclusive``.  A scaling criterion whose log-log
fit has R^2 below 0.98 is inconclusive rather than failed.
"""
import math
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle, oscint, rays, study
from .model import OperatorSpec
from .oscint import ReducedArgs
from .specfn import airy
from .weyl import weyl_kernel

AI0 = 0.3550280538878172
AIP0 = -0.2588194037928068
SWEEP_H = tuple(0.04 * 0.25 ** (np.arange(5) / 4))
QUICK = (1, 2, 3, 8, 9)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    status: str
    detail: str
    metrics: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self):
        return self.status == "pass"

    def line(self):
        return f"[{self.status.upper():>12}] {self.number:2d} {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _result(number, title, ok, detail, metrics, t0):
    return CriterionResult(number, title, "pass" if ok else "fail", detail, metrics, time.perf_counter() - t0)


# ----------------------------------------------------------------------------

def crit_1():
    """Airy constants at 0 and the ODE residual on [-20, 10]."""
    t0 = time.perf_counter()
    ai, aip = airy(0.0)
    e0 = max(abs(ai - AI0), abs(aip - AIP0))
    t = np.linspace(-20, 10, 601)
    # five-point second difference of Ai at step 1e-3
    s = 1e-3
    f = [np.asarray(airy(t + k * s)[0]) for k in (-2, -1, 0, 1, 2)]
    aipp = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * s * s)
    ode = float(np.max(np.abs(aipp - t * f[2])))
    ok = e0 <= 1e-10 and ode <= 1e-6
    return _result(1, "Airy constants and ODE", ok, f"|Ai(0), Ai'(0) err|={e0:.2e}, max ODE residual={ode:.2e}", {"const_err": e0, "ode": ode}, t0)


def crit_2():
    """Contour evaluator against ``2 Ai(-2 (x + tau))`` on the diagonal."""
    t0 = time.perf_counter()
    worst = 0.0
    for x in np.linspace(-2, 3, 9):
        for tau in np.linspace(-1, 1, 5):
            v = oscint.dtau_J(ReducedArgs(float(tau), float(x), float(x), 0.0)).value
            worst = max(worst, abs(v - 2 * airy(-2 * (x + tau))[0]))
    return _result(2, "contour vs Airy identity", worst <= 1e-6, f"max abs err={worst:.2e} on 45 points", {"max_err": worst}, t0)


def _weyl_pairs(n=20, seed=7, max_arg=200.0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        i = len(out) % 3
        h = float(10 ** rng.uniform(-1.3, -0.3))
        tau = float(rng.uniform(-0.2, 0.5))
        if i == 0:
            spec = OperatorSpec.toy(2, h, tau)
        elif i == 1:
            spec = OperatorSpec.generalized_toy(float(rng.uniform(-1, 1)), h, tau)
        else:
            spec = OperatorSpec.from_catalog("tilted_metric", 2, h, tau + 1.0)
        x = rng.uniform(-0.7, 0.7, 2)
        y = rng.uniform(-0.7, 0.7, 2)
        gap = spec.tau - spec.V(0.5 * (x + y))
        if gap <= 0:
            continue
        if math.sqrt(2 * gap) * float(np.linalg.norm(x - y)) / h > max_arg:
            continue
        out.append((spec, x, y))
    return out


def crit_3():
    """Closed-form Weyl kernel against direct quadrature at 20 random pairs."""
    t0 = time.perf_counter()
    worst = 0.0
    for spec, x, y in _weyl_pairs():
        a = weyl_kernel(spec, x, y, "closed").value
        b = weyl_kernel(spec, x, y, "quadrature").value
        worst = max(worst, abs(a - b) / abs(a))
    return _result(3, "Weyl closed form vs quadrature", worst <= 1e-6, f"max rel err={worst:.2e} on 20 pairs", {"max_rel": worst}, t0)


# 63 x 63 interior nodes on [-1, 1]^2 have spacing 1/32, so these are nodes
_Q = 1.0 / 32
STANDARD_POINTS = (
    ((0, 0), (0, 0)),  # turning point
    ((-10 * _Q, 0), (-10 * _Q, 0)),  # forbidden
    ((6 * _Q, 0), (6 * _Q, 0)),
    ((12 * _Q, 0), (12 * _Q, 0)),
    ((-5 * _Q, 0), (-5 * _Q, 0)),
    ((9 * _Q, 0), (8 * _Q, 3 * _Q)),
    ((3 * _Q, 0), (3 * _Q, 3 * _Q)),
    ((0, 0), (0, 6 * _Q)),
    ((6 * _Q, 3 * _Q), (3 * _Q, -3 * _Q)),
    ((4 * _Q, -4 * _Q), (-2 * _Q, 4 * _Q)),
)


def crit_4(h_values=(0.08, 0.12), n=63):
    """Fiber oracle against the finite-difference oracle, both mollified."""
    t0 = time.perf_counter()
    worst = 0.0
    per_h = {}
    for h in h_values:
        spec = OperatorSpec.toy(2, h)
        cfg = oracle.GridOracleConfig(((-1.0, 1.0), (-1.0, 1.0)), n, 10 * h / 2)
        sol = oracle.grid_solution(cfg, spec)
        hw = 0.0
        for x, y in STANDARD_POINTS:
            oracle._check_box(cfg, spec, [np.asarray(x, float), np.asarray(y, float)])
            g = sol.kernel(x, y).value
            a = oracle.toy_kernel_mollified(spec, x, y, cfg.mollify_eps).value
            hw = max(hw, abs(g - a) / abs(a))
        per_h[h] = hw
        worst = max(worst, hw)
    detail = ", ".join(f"h={h:g}: {v:.2e}" for h, v in per_h.items())
    return _result(4, "fiber oracle vs grid oracle", worst <= 3e-2, f"max rel diff {detail}", {"max_rel": worst}, t0)


def _sweep(spec, x, y, approximation="weyl", reference=None):
    cfg = study.StudyConfig(spec, SWEEP_H, (study.PairSeed("p", tuple(x), tuple(y)),), ("weyl", "weyl+corr"))
    rep = study.run_study(cfg, reference=reference, write=False)
    return rep, rep.fit("p", approximation)


def _fit_text(f):
    if math.isfinite(f.p):
        return f"p={f.p:.3f} (R^2={f.r2:.3f})"
    return f.verdict


def crit_5():
    """Regular zone: ``|e_ref - e^W|`` fits ``p <= 1.15`` with R^2 >= 0.98."""
    t0 = time.perf_counter()
    rep, f = _sweep(OperatorSpec.toy(2), (0.3, 0.0), (0.25, 0.1))
    amp = max(abs(r.resid_weyl) * r.h for r in rep.rows)
    detail = f"{_fit_text(f)}, max h|resid|={amp:.3g}"
    metrics = {"p": f.p, "r2": f.r2, "max_h_resid": amp}
    if f.verdict == "inconclusive":
        return CriterionResult(5, "regular-zone remainder", "inconclusive", detail, metrics, time.perf_counter() - t0)
    return _result(5, "regular-zone remainder", f.p <= 1.15 and f.r2 >= study.R2_MIN, detail, metrics, t0)


def crit_6():
    """Turning diagonal: Weyl residual ~ h^{-4/3}, corrected residual p <= 1.15."""
    t0 = time.perf_counter()
    rep, fw = _sweep(OperatorSpec.toy(2), (0.0, 0.0), (0.0, 0.0))
    ft = rep.fit("p", "weyl+corr")
    ok_w = fw.r2 >= study.R2_MIN and 1.18 <= fw.p <= 1.48
    # exact oracle and exact J-integral agree to rounding: nothing left to fit
    ok_t = ft.verdict == "at numerical floor" or (ft.r2 >= study.R2_MIN and ft.p <= 1.15)
    _, gk = _sweep(OperatorSpec.generalized_toy(0.3), (0.0, 0.0), (0.0, 0.0), "weyl+corr")
    ok_k = gk.r2 >= study.R2_MIN and gk.p <= 1.15
    detail = f"weyl {_fit_text(fw)}; weyl+corr {_fit_text(ft)}; k=0.3 weyl+corr {_fit_text(gk)}"
    metrics = {"p_weyl": fw.p, "p_total": ft.p, "p_total_k": gk.p}
    inconclusive = fw.verdict == "inconclusive" or gk.verdict == "inconclusive"
    if inconclusive and ok_t:
        return CriterionResult(6, "turning-diagonal correction", "inconclusive", detail, metrics, time.perf_counter() - t0)
    return _result(6, "turning-diagonal correction", ok_w and ok_t and ok_k, detail, metrics, t0)


def crit_7():
    """Shadow pair (0,0)-(0,0.3): ``|e_ref|`` fits ``p <= -1``."""
    t0 = time.perf_counter()
    spec = OperatorSpec.toy(2)
    vals = [oracle.toy_kernel(spec.with_h(h), (0.0, 0.0), (0.0, 0.3)).value for h in SWEEP_H]
    p, C, r2 = study.fit_exponent(zip(SWEEP_H, np.abs(vals)))
    detail = f"p={p:.3f} (R^2={r2:.3f}), e_ref from {vals[0]:.3g} to {vals[-1]:.3g}"
    metrics = {"p": p, "r2": r2, "values": [float(v) for v in vals]}
    if r2 < study.R2_MIN:
        return CriterionResult(7, "shadow-zone decay", "inconclusive", detail, metrics, time.perf_counter() - t0)
    return _result(7, "shadow-zone decay", p <= -1, detail, metrics, t0)


def crit_8():
    """Generalized model: z = 0 identity, k-reflection, z2-continuity of corr."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    ident = 0.0
    for _ in range(10):
        tau, x1, y1 = rng.uniform(-1, 1.5, 3)
        kap = float(rng.uniform(-0.8, 0.8))
        a = oscint.dtau_J_kappa(ReducedArgs(tau, x1, y1, 0.0, kap)).value
        b = oscint.dtau_J(ReducedArgs(tau, x1, y1, 0.0)).value
        ident = max(ident, abs(a - b))
    # x2 -> -x2 maps k to -k; a small grid with a symmetric box
    cfg = oracle.GridOracleConfig(((-3.0, 3.0), (-3.0, 3.0)), 31, 0.5)
    refl = 0.0
    for x, y in (((0.375, 0.75), (0.0, -0.375)), ((-0.375, 0.0), (0.75, 1.125)), ((0.0, 0.0), (0.0, 0.375))):
        e_p = oracle.grid_oracle_2d(cfg, OperatorSpec.generalized_toy(0.3, 0.3), x, y).value
        e_m = oracle.grid_oracle_2d(cfg, OperatorSpec.generalized_toy(-0.3, 0.3), (x[0], -x[1]), (y[0], -y[1])).value
        refl = max(refl, abs(e_p - e_m) / max(abs(e_p), 1e-300))
    # corr(k) - corr(0) shrinks with z2 and vanishes at z2 = 0
    h, k = 0.05, 0.4
    sk, s0 = OperatorSpec.generalized_toy(k, h), OperatorSpec.toy(2, h)
    scale = abs(oscint.corr_term(s0, (0.1, 0.0), (0.1, 0.0)))
    gaps = []
    for z2 in (1e-2, 1e-3, 1e-4, 1e-5, 0.0):
        gaps.append(abs(oscint.corr_term(sk, (0.1, z2), (0.1, 0.0)) - oscint.corr_term(s0, (0.1, z2), (0.1, 0.0))) / scale)
    shrinking = all(b <= a for a, b in zip(gaps[:-2], gaps[1:-1]))
    cont = gaps[-1]
    ok = ident <= 1e-8 and refl <= 1e-10 and shrinking and cont <= 1e-6 and gaps[-2] <= 1e-3
    detail = f"identity err={ident:.2e}, reflection rel={refl:.2e}, corr gap z2=1e-5: {gaps[-2]:.2e}, z2=0: {cont:.2e}"
    return _result(8, "generalized toy model", ok, detail, {"identity": ident, "reflection": refl, "gaps": gaps}, t0)


def crit_9():
    """Ray geometry residuals and the reachability trichotomy."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    e_max = tan_max = vert_max = 0.0
    for _ in range(100):
        xbar = np.array([rng.uniform(0.05, 1.0), rng.uniform(-1, 1)])
        xi2 = float(rng.uniform(-0.95, 0.95) * math.sqrt(2 * xbar[0]))
        br = rays.Branch.PLUS if rng.random() < 0.5 else rays.Branch.MINUS
        for t in rng.uniform(-3, 3, 5):
            e_max = max(e_max, abs(rays.energy(rays.trajectory(xbar, [xi2], br, t))))
        T = rays.tangency_time(xbar[0], xi2)
        st = rays.trajectory(xbar, [xi2], br, -br.sign * T)
        tan_max = max(tan_max, abs(st.x[0] - rays.caustic_gamma(xbar, st.x[1:])))
        vert_max = max(vert_max, abs(rays.vertex_on_ellipse(xbar, xi2, br)[1]))
    bad = 0
    spec = OperatorSpec.toy(2, 0.1)
    for _ in range(200):
        xbar = np.array([rng.uniform(0.05, 1.0), rng.uniform(-1, 1)])
        x = np.array([rng.uniform(-0.5, 1.0), rng.uniform(-1.5, 1.5)])
        reach = rays.reachability(xbar, x)
        real = len(rays.stationary_points(spec, x, xbar).real_points) > 0
        bad += (reach is rays.Reach.TWO_RAYS) != real
    ok = e_max <= 1e-12 and tan_max <= 1e-10 and vert_max <= 1e-10 and bad == 0
    detail = f"energy={e_max:.1e}, tangency={tan_max:.1e}, vertex={vert_max:.1e}, trichotomy mismatches={bad}/200"
    return _result(9, "ray geometry", ok, detail, {"energy": e_max, "tangency": tan_max, "vertex": vert_max, "mismatch": bad}, t0)


def crit_10(run_quick=True):
    """Synthetic injection, CSV determinism and the quick validation run."""
    t0 = time.perf_counter()
    spec = OperatorSpec.toy(2)

    def injected(s, x, y):
        return weyl_kernel(s, x, y).value + 3.7 * s.h ** (-4.0 / 3.0), 0.0

    _, f = _sweep(spec, (0.2, 0.1), (0.1, 0.0), reference=injected)
    inj = max(abs(f.p - 4.0 / 3.0), abs(f.C - 3.7))
    with tempfile.TemporaryDirectory() as tmp:
        texts = []
        for i in range(2):
            cfg = study.StudyConfig(
                spec, SWEEP_H[:3], tuple(study.random_pairs(3, 42, 0.5)), output=str(Path(tmp) / f"run{i}.csv")
            )
            study.run_study(cfg)
            texts.append(Path(cfg.output).read_bytes())
    same = texts[0] == texts[1]
    quick_ok, quick_s = True, math.nan
    if run_quick:
        q0 = time.perf_counter()
        env = dict(os.environ)
        proc = subprocess.run([sys.executable, "-m", "semikernel", "validate", "--quick"], capture_output=True, text=True, env=env)
        quick_s = time.perf_counter() - q0
        quick_ok = proc.returncode == 0 and quick_s < 180 and all(f" {n} " in proc.stdout for n in QUICK)
    ok = inj <= 1e-6 and same and quick_ok
    detail = f"injection err={inj:.1e}, csv identical={same}, validate --quick ok={quick_ok} in {quick_s:.0f}s"
    return _result(10, "harness integrity", ok, detail, {"injection": inj, "identical": same, "quick_seconds": quick_s}, t0)


CRITERIA = {i: globals()[f"crit_{i}"] for i in range(1, 11)}


def run(numbers=None):
    """Run the selected criteria (all by default) in order."""
    return [CRITERIA[n]() for n in (numbers or sorted(CRITERIA))]
