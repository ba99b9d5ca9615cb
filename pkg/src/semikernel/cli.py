"""Command-line interface: ``semikernel <command> [options]``.

Numeric commands print one JSON object per line.  Usage errors exit with
status 2; numeric failures exit with status 1 and a JSON diagnostic on
stderr.
"""
import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import acceptance, oracle, oscint, rays, study
from .errors import (
    AccuracyError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    FitError,
    StudyError,
)
from .model import CATALOG, OperatorSpec, zone_classify
from .weyl import weyl_kernel

_NUMERIC_ERRORS = (AccuracyError, ConfigurationError, ConvergenceError, DomainError, FitError, StudyError, OverflowError)


def _spec(args):
    if getattr(args, "potential", None):
        return OperatorSpec.from_catalog(args.potential, args.d, args.h, args.tau)
    if args.k:
        if args.d != 2:
            raise DomainError("the generalized toy model needs --d 2")
        return OperatorSpec.generalized_toy(args.k, args.h, args.tau)
    return OperatorSpec.toy(args.d, args.h, args.tau)


def _emit(obj):
    print(json.dumps(obj, sort_keys=True))


def _operator_flags(p, points=True):
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--d", type=int, default=2)
    if points:
        p.add_argument("--x", type=float, nargs="+", required=True)
        p.add_argument("--y", type=float, nargs="+", required=True)


def cmd_kernel(args):
    spec = _spec(args)
    if args.method == "airy":
        if args.mollify:
            kv = oracle.toy_kernel_mollified(spec, args.x, args.y, args.mollify)
        else:
            kv = oracle.toy_kernel(spec, args.x, args.y)
    else:
        L = args.box
        eps = args.mollify or 10 * spec.h / (2 * L)
        cfg = oracle.GridOracleConfig(((-L, L),) * spec.d, args.n, eps)
        fn = oracle.grid_oracle_1d if spec.d == 1 else oracle.grid_oracle_2d
        kv = fn(cfg, spec, args.x[0], args.y[0]) if spec.d == 1 else fn(cfg, spec, args.x, args.y)
    _emit({"value": kv.value, "est_err": kv.est_err, "method": kv.method})


def cmd_weyl(args):
    wv = weyl_kernel(_spec(args), args.x, args.y, args.route)
    _emit({"value": wv.value, "est_err": wv.est_err, "route": wv.route.value})


def cmd_corr(args):
    spec = _spec(args)
    if args.method == "diag":
        if args.x != args.y:
            raise DomainError("the diagonal Airy form needs x = y")
        _emit({"value": oscint.corr_diag(spec, args.x), "method": "diag"})
        return
    rep = oscint.corr_term(spec, args.x, args.y, method=args.method, report=True)
    _emit({"value": rep.value, "est_err": rep.est_err, "method": args.method, "contour": rep.contour})


def cmd_zone(args):
    print(zone_classify(_spec(args), args.x, args.y, args.eps).value)


def cmd_rays(args):
    states = [rays.trajectory(args.xbar, [args.xi2], args.branch, float(t)) for t in np.linspace(args.t0, args.t1, args.n)]
    print("t,x1,x2,xi1,xi2")
    for st in states:
        print(",".join(format(v, ".17g") for v in (st.t, *st.x, *st.xi)))


def cmd_study(args):
    cfg = study.StudyConfig.from_file(args.config)
    if args.output:
        cfg = replace(cfg, output=args.output)
    report = study.run_study(cfg)
    for f in report.fits:
        _emit(f.as_dict())


def cmd_validate(args):
    numbers = args.only or (list(acceptance.QUICK) if args.quick else None)
    failed = False
    for n in numbers or sorted(acceptance.CRITERIA):
        res = acceptance.CRITERIA[n]()
        print(res.line(), flush=True)
        failed |= res.status == "fail"
    return 1 if failed else 0


def build_parser():
    ap = argparse.ArgumentParser(prog="semikernel", description="Spectral projector kernels of toy Schroedinger operators.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="exact kernel by the Airy fiber or grid oracle")
    _operator_flags(p)
    p.add_argument("--method", choices=("airy", "grid"), default="airy")
    p.add_argument("--n", type=int, default=63, help="grid points per dimension")
    p.add_argument("--box", type=float, default=1.0, help="grid half-width L, box [-L, L]^d")
    p.add_argument("--mollify", type=float, default=None, help="energy smoothing width")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("weyl", help="Weyl kernel")
    _operator_flags(p)
    p.add_argument("--route", choices=("auto", "closed", "quadrature"), default="auto")
    p.add_argument("--potential", choices=sorted(CATALOG), default=None)
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("corr", help="Airy correction term (d = 2)")
    _operator_flags(p)
    p.add_argument("--method", choices=("contour", "quadrature", "diag"), default="contour")
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("zone", help="zone label of a pair")
    _operator_flags(p)
    p.add_argument("--eps", type=float, default=0.05)
    p.set_defaults(func=cmd_zone)

    p = sub.add_parser("rays", help="sample a ray as CSV")
    p.add_argument("--xbar", type=float, nargs=2, required=True)
    p.add_argument("--xi2", type=float, required=True, help="tangential momentum")
    p.add_argument("--branch", choices=("plus", "minus"), default="minus")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=1.0)
    p.add_argument("--n", type=int, default=11)
    p.set_defaults(func=cmd_rays)

    p = sub.add_parser("study", help="run an h-sweep from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None, help="CSV path (overrides the config)")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("validate", help="run the acceptance checks")
    p.add_argument("--quick", action="store_true", help=f"criteria {', '.join(map(str, acceptance.QUICK))} only")
    p.add_argument("--only", type=int, nargs="+", choices=sorted(acceptance.CRITERIA))
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "rays" and args.n < 2:
        ap.error("--n must be at least 2")
    try:
        code = args.func(args)
    except _NUMERIC_ERRORS as exc:
        diag = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        for key in ("value", "est_err"):
            v = getattr(exc, key, None)
            if isinstance(v, complex):
                v = [v.real, v.imag]
            if v is not None and not (isinstance(v, float) and math.isnan(v)):
                diag[key] = v
        print(json.dumps(diag), file=sys.stderr)
        return 1
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
