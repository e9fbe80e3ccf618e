"""Time the compiled GF(2) kernel against the pure-Python one.

    python3 benchmarks/bench_gf2.py [--sizes 128 256 512 1024] [--repeat 3]

Rows are random int bitsets at density 1/2 (square matrices).  Both kernels
must agree on rank; the script exits 1 if they do not.
"""
import argparse
import random
import sys
import timeit

from dkh import _gf2_py

try:
    from dkh import _gf2
except ImportError:
    _gf2 = None


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[128, 256, 512, 1024])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _gf2 is None:
        print("compiled kernel not built; only the Python timings are shown")
    rng = random.Random(args.seed)
    print(f"{'n':>6} {'op':>5} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for n in args.sizes:
        rows = [rng.getrandbits(n) for _ in range(n)]
        for op in ("rank", "rref"):
            py = best(lambda: getattr(_gf2_py, op)(rows, n), args.repeat)
            if _gf2 is None:
                print(f"{n:>6} {op:>5} {py:10.4f} {'-':>11} {'-':>8}")
                continue
            if _gf2.rank(rows, n) != _gf2_py.rank(rows, n):
                print(f"rank mismatch at n={n}", file=sys.stderr)
                return 1
            cc = best(lambda: getattr(_gf2, op)(rows, n), args.repeat)
            print(f"{n:>6} {op:>5} {py:10.4f} {cc:11.4f} {py / cc:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
