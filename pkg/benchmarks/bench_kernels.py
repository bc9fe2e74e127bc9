"""Compare the numba and numpy theta evaluation kernels.

Run:  python benchmarks/bench_kernels.py [--repeat 5]

Sizes mirror the real workloads: small (L, T) with a handful of points
for interpolation and refactorization inner loops, and large point
batches for the determinant zero grids.
"""

import argparse
import time

import numpy as np

from twistlab._kernels import theta_eval_numba, theta_eval_numpy

CASES = [
    ("mu step, m=2", 4, 24, 16),
    ("fit batch, m=2 n=2", 8, 24, 28),
    ("zero grid 48x48, m=2", 4, 24, 2304),
    ("zero grid 48x48, m=3", 9, 20, 2304),
    ("zero grid 96x96, m=2", 4, 24, 9216),
]


def make_problem(rng, L, T, P):
    coeffs = rng.standard_normal((L, T)) + 1j * rng.standard_normal((L, T))
    ks = rng.integers(-8, 9, size=(L, T)).astype(np.float64)
    zs = rng.random(P) + 1j * rng.random(P)
    return np.ascontiguousarray(coeffs), np.ascontiguousarray(ks), np.ascontiguousarray(zs)


def bench(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    opts = parser.parse_args()
    rng = np.random.default_rng(0)
    if theta_eval_numba is None:
        print("numba path unavailable (not installed or TWISTLAB_JIT=0); timing numpy only")
    header = f"{'case':<24} {'L':>3} {'T':>3} {'P':>6} {'numpy':>10}"
    if theta_eval_numba is not None:
        header += f" {'numba':>10} {'speedup':>8}"
    print(header)
    for name, L, T, P in CASES:
        args = make_problem(rng, L, T, P)
        if theta_eval_numba is not None:
            theta_eval_numba(*args)  # compile outside the timer
            ref = theta_eval_numpy(*args)
            jit = theta_eval_numba(*args)
            assert np.allclose(ref, jit, rtol=1e-10, atol=1e-10)
        t_np = bench(theta_eval_numpy, args, opts.repeat)
        line = f"{name:<24} {L:>3} {T:>3} {P:>6} {t_np*1e3:>8.3f}ms"
        if theta_eval_numba is not None:
            t_nb = bench(theta_eval_numba, args, opts.repeat)
            line += f" {t_nb*1e3:>8.3f}ms {t_np/t_nb:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
