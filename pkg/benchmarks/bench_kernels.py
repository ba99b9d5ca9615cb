"""Compiled kernels against the numpy fallback.

Run ``python benchmarks/bench_kernels.py``.  Both backends are timed in
this process; the end-to-end row runs the fiber oracle in a child process
per backend, selected through ``SEMIKERNEL_PURE``.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from semikernel import _backend, _numeric

END_TO_END = (
    "import time\n"
    "from semikernel import oracle\n"
    "from semikernel.model import OperatorSpec\n"
    "s = OperatorSpec.toy(2, 0.02)\n"
    "t0 = time.perf_counter()\n"
    "for i in range(40):\n"
    "    oracle.toy_kernel(s, (0.01 * i, 0.1), (0.0, -0.05))\n"
    "print(time.perf_counter() - t0)\n"
)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def child_seconds(pure):
    env = dict(os.environ, SEMIKERNEL_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="array length per call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _backend.BACKEND != "compiled":
        sys.exit("compiled extension not importable; build with `pip install -e . --no-build-isolation`")
    c = _backend._compiled
    rng = np.random.default_rng(0)
    t_airy = rng.uniform(-30, 10, args.n)
    t_bes = rng.uniform(0, 60, args.n)
    a, b = rng.uniform(-8, 8, args.n), rng.uniform(-8, 8, args.n)
    lower = np.minimum(a, b) - rng.uniform(0, 4, args.n)
    cases = [
        ("airy", lambda: _numeric.airy(t_airy), lambda: c.airy(t_airy)),
        ("bessel_j01", lambda: _numeric.bessel_j01(t_bes), lambda: c.bessel_j01(t_bes)),
        ("airy_pair_tail", lambda: _numeric.airy_pair_tail(a, b, lower), lambda: c.airy_pair_tail(a, b, lower)),
    ]
    print(f"{'kernel':<16}{'numpy [ms]':>12}{'compiled [ms]':>15}{'speedup':>9}")
    for name, slow, fast in cases:
        ts, tf = best(slow, args.repeat), best(fast, args.repeat)
        print(f"{name:<16}{1e3 * ts:>12.2f}{1e3 * tf:>15.2f}{ts / tf:>9.2f}")
    ts, tf = child_seconds(True), child_seconds(False)
    print(f"{'toy_kernel x40':<16}{1e3 * ts:>12.2f}{1e3 * tf:>15.2f}{ts / tf:>9.2f}")


if __name__ == "__main__":
    main()
