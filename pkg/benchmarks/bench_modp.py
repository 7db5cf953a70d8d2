"""Time the compiled GF(p) row reduction against the numpy fallback.

    python3 benchmarks/bench_modp.py [--repeat 3]

Runs both kernels on random dense matrices and on the quintic Jacobian
component J^3, checks that they return identical echelon forms, and prints
the best wall time of each.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from toricjac import linalg
from toricjac._modp_py import rref_mod as rref_python
from toricjac.jacobian import build_context
from toricjac.lattice import shifted_simplex
from toricjac.laurent import PolynomialSpec, realize

try:
    from toricjac._modp import rref_mod as rref_compiled
except ImportError:
    rref_compiled = None


def best_time(kernel, A, p, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        B = A.copy()
        start = time.perf_counter()
        pivots = kernel(B, p)
        best = min(best, time.perf_counter() - start)
        out = (B, pivots)
    return best, out


def workloads(rng):
    p = linalg.DEFAULT_PRIME
    yield "random 200x300", rng.integers(0, p, size=(200, 300), dtype=np.int64)
    yield "random 400x500", rng.integers(0, p, size=(400, 500), dtype=np.int64)
    P = shifted_simplex(3, 5)
    ctx = build_context(P, realize(PolynomialSpec.random(7), P), k_max=3, modulus=p)
    yield "quintic J^3 transposed", np.ascontiguousarray(ctx.dense(3).T)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if rref_compiled is None:
        print("compiled kernel not built; only the numpy fallback is available")
    p = linalg.DEFAULT_PRIME
    rng = np.random.default_rng(0)
    print(f"{'workload':<26}{'numpy (s)':>12}{'compiled (s)':>14}{'speedup':>10}")
    for name, A in workloads(rng):
        t_py, (B_py, piv_py) = best_time(rref_python, A, p, args.repeat)
        if rref_compiled is None:
            print(f"{name:<26}{t_py:>12.3f}{'-':>14}{'-':>10}")
            continue
        t_c, (B_c, piv_c) = best_time(rref_compiled, A, p, args.repeat)
        if list(piv_py) != list(piv_c) or not np.array_equal(B_py, B_c):
            raise SystemExit(f"{name}: kernels disagree")
        print(f"{name:<26}{t_py:>12.3f}{t_c:>14.3f}{t_py / t_c:>9.1f}x", flush=True)


if __name__ == "__main__":
    main()
