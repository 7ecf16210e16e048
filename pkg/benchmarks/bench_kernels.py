#!/usr/bin/env python3
"""Compare the compiled MPFR kernel with the pure-Python fallback.

Times a full dense eigensolve of T_n(g_{r,s}) with each backend, checks the
two results agree, and prints one line per (n, precision).  Also times the
B-matrix reduction for the same order, which is what makes the dense solve
unnecessary in the first place.

    python benchmarks/bench_kernels.py --n 32,64,96 --precision 256,512
"""
import argparse
import time

import gmpy2

from toeplitz_spectra import build_Tng, full_spectrum_g
from toeplitz_spectra._kernels import _qr_c, get_backend


def _ints(text):
    return [int(x) for x in text.split(",")]


def _best(fn, repeat):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, out


def _max_mismatch(a, b, prec):
    # nearest-neighbour distance: equal-modulus clusters make index pairing fragile
    with gmpy2.context(precision=prec):
        return max(min(abs(x - y) for y in b) for x in a)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=_ints, default=[32, 64])
    ap.add_argument("--r", type=int, default=1)
    ap.add_argument("--s", type=int, default=2)
    ap.add_argument("--precision", type=_ints, default=[256])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = ["python"] + (["c"] if _qr_c is not None else [])
    if _qr_c is None:
        print("compiled kernel not built; timing the Python fallback only")

    print(f"{'n':>5} {'bits':>5} {'python [s]':>11} {'c [s]':>9} {'speedup':>8} "
          f"{'mismatch':>10} {'reduction [s]':>14}")
    for n in args.n:
        A = build_Tng(n, args.r, args.s)
        for prec in args.precision:
            with gmpy2.context(precision=prec):
                flat = [gmpy2.mpc(x) for row in A for x in row]
            times, results = {}, {}
            for name in backends:
                kern = get_backend(name)
                times[name], results[name] = _best(lambda: kern.eigvals(flat, n, prec), args.repeat)
            red, _ = _best(lambda: full_spectrum_g(n, args.r, args.s, prec), args.repeat)
            if "c" in times:
                speedup = times["python"] / times["c"]
                mismatch = _max_mismatch(results["c"], results["python"], prec)
                print(f"{n:5d} {prec:5d} {times['python']:11.4f} {times['c']:9.4f} "
                      f"{speedup:7.2f}x {float(mismatch):10.2e} {red:14.5f}")
            else:
                print(f"{n:5d} {prec:5d} {times['python']:11.4f} {'-':>9} {'-':>8} "
                      f"{'-':>10} {red:14.5f}")


if __name__ == "__main__":
    main()
