#!/usr/bin/env python3
"""Compare the compiled and pure-Python kernel backends.

Runs each hot kernel on both backends at the requested sizes and prints a
table with timings and speedups.  Results are checked for agreement while
benchmarking, so this doubles as a parity harness at scale.

Usage:
    python benchmarks/bench_kernels.py            # default sizes
    python benchmarks/bench_kernels.py --quick    # small sizes, CI-friendly
"""

import argparse
import time

import numpy as np

from resonator_lab._kernels import available_backends, get_backend
from resonator_lab.arith import primes_up_to


def _time(fn, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def _cases(quick):
    sieve_n = 10**6 if quick else 3 * 10**7
    smooth_x = 10**5 if quick else 10**7
    dlog_q = 99991 if quick else 9999991
    wt_n = 10**5 if quick else 10**6

    primes = primes_up_to(50)
    weights = np.full(len(primes), 0.9)
    prime_weight = np.zeros(wt_n + 1)
    for p in primes:
        prime_weight[p] = 0.9

    return [
        ("spf_sieve", f"n={sieve_n:.0e}", lambda k: k.spf_sieve(sieve_n)),
        ("dlog_table", f"q={dlog_q}", lambda k: k.dlog_table(dlog_q, 3, dlog_q - 1)),
        ("weight_table", f"n={wt_n:.0e}", lambda k: k.weight_table(wt_n, prime_weight)),
        (
            "smooth_enumerate",
            f"x={smooth_x:.0e}, y=50",
            lambda k: k.smooth_enumerate(smooth_x, primes),
        ),
        (
            "smooth_reduce",
            f"x={smooth_x:.0e}, y=50",
            lambda k: k.smooth_reduce(smooth_x, primes, weights),
        ),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="small sizes")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    if "cython" not in backends:
        print("compiled backend missing; build it with: pip install -e . --no-build-isolation")

    header = f"{'kernel':<18} {'size':<16} " + " ".join(f"{b:>10}" for b in backends)
    print(header + ("   speedup" if len(backends) > 1 else ""))
    print("-" * len(header))
    for name, size, call in _cases(args.quick):
        times = []
        results = []
        for backend in backends:
            kernel = get_backend(backend)
            elapsed, result = _time(lambda: call(kernel), repeats=args.repeats)
            times.append(elapsed)
            results.append(result)
        if len(results) == 2:
            a, b = results
            same = (
                all(np.array_equal(x, y) for x, y in zip(a, b))
                if isinstance(a, tuple)
                else np.array_equal(a, b)
            )
            assert same, f"backend mismatch in {name}"
        row = f"{name:<18} {size:<16} " + " ".join(f"{t:>9.4f}s" for t in times)
        if len(times) > 1:
            row += f"   {times[0] / times[-1]:>6.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
