"""Timings: compiled vs pure-Python kernels, and the log algorithm vs the naive product.

    python3 benchmarks/bench.py [--max-b 8] [--repeat 3]

Kernel rows time the Phi_45 product with each backend forced; algorithm rows
time compute_product and naive_product on the same input.  Numbers are wall
time in seconds (best of --repeat).
"""

import argparse
import time

from borcherds import compute_product, load_builtin, naive_product
from borcherds import kernels


def best(fn, repeat):
    out = None
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def with_backend(name, fn):
    saved = kernels.mul_trunc, kernels.exp_graded
    kernels.mul_trunc, kernels.exp_graded = kernels.get_backend(name)
    try:
        return fn()
    finally:
        kernels.mul_trunc, kernels.exp_graded = saved


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--min-b", type=int, default=5)
    p.add_argument("--max-b", type=int, default=8)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--skip-naive", action="store_true")
    args = p.parse_args()
    F = load_builtin("phi45")

    print("kernels (compute_product on phi45)")
    print("%4s %10s %10s %8s" % ("B", "cython", "python", "speedup"))
    for B in range(args.min_b, args.max_b + 1):
        tc, rc = with_backend("cython", lambda: best(lambda: compute_product(F, B=B), args.repeat))
        tp, rp = with_backend("python", lambda: best(lambda: compute_product(F, B=B), args.repeat))
        assert rc.coefficients == rp.coefficients
        print("%4d %10.3f %10.3f %7.1fx" % (B, tc, tp, tp / tc))

    if args.skip_naive:
        return
    print("\nalgorithms (default backend %s)" % kernels.BACKEND)
    print("%4s %10s %10s %8s %6s" % ("B", "log", "naive", "ratio", "equal"))
    for B in range(args.min_b, args.max_b + 1):
        tl, rl = best(lambda: compute_product(F, B=B), args.repeat)
        tn, rn = best(lambda: naive_product(F, B=B), 1)
        print("%4d %10.3f %10.3f %7.1fx %6s"
              % (B, tl, tn, tn / tl, rl.coefficients == rn.coefficients))


if __name__ == "__main__":
    main()
