"""Compiled against pure-Python kernels on workloads of production size.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N] [--json PATH]``.
Each kernel is timed on identical inputs in both backends, and the
outputs are compared before any timing is reported.
"""
import argparse
import json
import platform
import sys
import timeit

import numpy as np

from lpbody import _pykernels
from lpbody.geometry import output_grid, _interpolator

try:
    from lpbody import _ckernels
except ImportError:
    _ckernels = None


def workloads(seed=0):
    rng = np.random.default_rng(seed)
    # one chunk of J-rule applications: 4 directions x 16384 nodes
    w = rng.random(16384)
    f = rng.standard_normal((4, 16384))
    # convexity probe on a 96-point circle profile
    theta = 2 * np.pi * np.arange(96) / 96
    rho = 1 + 0.1 * np.cos(3 * theta)
    # order-3 interpolation of a grid-16 body at 4096 query points
    grid = output_grid(2, 16)
    interp = _interpolator(2, 16)
    g = rng.standard_normal((4096, 4))
    U = (g[:, 0::2] + 1j * g[:, 1::2]) / np.linalg.norm(g, axis=1)[:, None]
    index, weight = interp.stencils(U)
    samples = rng.random(len(grid))
    return {
        "weighted_rowsum": (w, f),
        "chord_margin": (theta, rho),
        "stencil_contract": (samples, index, weight, interp.strides),
    }


def bench(repeat=5):
    if _ckernels is None:
        raise SystemExit("the compiled extension is not built; run pip install -e . --no-build-isolation")
    rows = []
    for name, args in workloads().items():
        py, c = getattr(_pykernels, name), getattr(_ckernels, name)
        a, b = np.asarray(py(*args)), np.asarray(c(*args))
        if not np.allclose(a, b, rtol=1e-13, atol=1e-15):
            raise SystemExit(f"{name}: backends disagree")
        number = 3
        tp = min(timeit.repeat(lambda: py(*args), number=number, repeat=repeat)) / number
        tc = min(timeit.repeat(lambda: c(*args), number=number, repeat=repeat)) / number
        rows.append({"kernel": name, "python_s": tp, "compiled_s": tc, "speedup": tp / tc})
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the results to this file")
    args = ap.parse_args(argv)
    rows = bench(args.repeat)
    print(f"{'kernel':<18s} {'python (ms)':>12s} {'compiled (ms)':>14s} {'speedup':>8s}")
    for r in rows:
        print(f"{r['kernel']:<18s} {1e3 * r['python_s']:12.3f} {1e3 * r['compiled_s']:14.3f} {r['speedup']:8.1f}")
    if args.json:
        meta = {"python": sys.version.split()[0], "numpy": np.__version__, "machine": platform.machine()}
        with open(args.json, "w") as fh:
            json.dump({"meta": meta, "results": rows}, fh, indent=2, sort_keys=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
