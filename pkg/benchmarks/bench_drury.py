"""Time the compiled and pure-Python frame integrators on the same Evans evaluations.

Usage: python3 benchmarks/bench_drury.py [--repeat N]

Both backends integrate the plus and minus frames for a handful of spectral
values on the shear Lax profile (alpha = (1, 0), s = 1.8547); the printed
table gives the median wall time per evaluation and the largest relative
difference between the two backends' Evans values.
"""

from __future__ import annotations

import argparse
import importlib
import statistics
import time

import numpy as np

from viscoevans.equilibria import rh_solve, shock_type
from viscoevans.evans import EvansSystem, KatoContinuation, Side, initialize_at_infinity
from viscoevans.evans.frame import wedge
from viscoevans.model import ModelVariant, W0
from viscoevans.profile import compute_profile

LAMBDAS = (2.0, 1.5 + 1.0j, 0.3j, 0.01 + 0.5j, 1e-3j)


def build_system():
    alpha = np.array([1.0, 0.0])
    s = 1.8547
    pts = rh_solve(alpha, s * s, ModelVariant.SHEAR2D).points
    ap = min(pts, key=lambda p: abs(p[0] - 0.8))
    grid = compute_profile(shock_type(alpha, ap, s, W0, ModelVariant.SHEAR2D))
    return EvansSystem(ModelVariant.SHEAR2D, grid)


def evans_log(kern, sys, cont, lam):
    st = cont.state(lam)
    out = {}
    for side, z_from in ((Side.PLUS, sys.z_max), (Side.MINUS, -sys.z_min)):
        fr = initialize_at_infinity(sys, st, side, z_from)
        omega, logr, info = kern.drury(sys.code, sys.mus, sys.s, fr.lam, *sys.kernel_args(),
                                       fr.omega, fr.log_r, fr.z, 0.0, 1e-8, 1e-6, 0.05, 1e-8)
        out[side] = fr.__class__(np.asarray(omega), complex(logr), side, 0.0, fr.lam)
    return wedge(out[Side.PLUS], out[Side.MINUS])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = {"python": importlib.import_module("viscoevans.evans._kernels_py")}
    try:
        backends["compiled"] = importlib.import_module("viscoevans.evans._kernels")
    except ImportError:
        print("compiled extension not built; timing the pure-Python kernels only")

    sys_ = build_system()
    cont = KatoContinuation(sys_.limits)
    for lam in LAMBDAS:  # warm the basis cache so only integration is timed
        cont.state(lam)

    values, times = {}, {}
    for name, kern in backends.items():
        per = []
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            vals = [evans_log(kern, sys_, cont, lam) for lam in LAMBDAS]
            per.append((time.perf_counter() - t0) / len(LAMBDAS))
        values[name] = np.array(vals)
        times[name] = statistics.median(per)

    print(f"{'backend':<10} {'s/eval':>10} {'speedup':>8}")
    base = times["python"]
    for name, t in times.items():
        print(f"{name:<10} {t:>10.4f} {base / t:>8.1f}")
    if len(values) == 2:
        d = np.max(np.abs(np.exp(values["compiled"] - values["python"]) - 1))
        print(f"max relative difference in D: {d:.2e}")


if __name__ == "__main__":
    main()
