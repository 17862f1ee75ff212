"""Compare the lattice-point kernels on the reference 7-fold.

Times plain counts and weighted sums of kQ for several k with each backend
and checks that every backend returns the same numbers.
"""

from __future__ import annotations

import argparse
import time

from chow_obstruct import _kernels
from chow_obstruct.jobfile import load_job
from chow_obstruct.toric_fan import _kernel_tables, dual_polytope


def _time(fn, repeat):
    fn()  # warm-up (numba compiles here)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser(description="Benchmark lattice-point counting backends")
    parser.add_argument("--input", default="nill-paffenholz-7fold")
    parser.add_argument("--kmax", type=int, default=3)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--with-python", action="store_true", help="also time the plain-Python walk")
    args = parser.parse_args()

    job = load_job(args.input)
    a, c, starts = _kernel_tables(dual_polytope(job.polytope))
    backends = ["numpy"]
    if _kernels.numba_available():
        backends.insert(0, "numba")
    if args.with_python:
        backends.append("python")

    print(f"bench_lattice input={args.input} dim={job.polytope.dim}")
    print(f"{'k':>3} {'backend':>8} {'count':>12} {'count_s':>10} {'weighted_s':>11}")
    for k in range(1, args.kmax + 1):
        reference = None
        for b in backends:
            t_count, n = _time(lambda: _kernels.count_points(a, c, starts, k, backend=b), args.repeat)
            t_weight, (m, sums) = _time(lambda: _kernels.weighted_sums(a, c, starts, k, backend=b),
                                        args.repeat)
            result = (n, m, list(sums))
            if reference is None:
                reference = result
            elif result != reference:
                raise SystemExit(f"backend {b} disagrees at k={k}: {result} vs {reference}")
            print(f"{k:>3} {b:>8} {n:>12} {t_count:>10.4f} {t_weight:>11.4f}")


if __name__ == "__main__":
    main()
