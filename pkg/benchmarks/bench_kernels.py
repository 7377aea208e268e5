"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 200]

Prints per-call times for the LU solve and modified Gram-Schmidt at
several sizes, then wall time for a full default 5-qubit training run
with each backend. numpy.linalg.solve is listed for reference.
"""
import argparse
import time
import timeit

import numpy as np

from cayleynet import _pykernels, linalg
from cayleynet.harness import builtin_config, generate_dataset
from cayleynet.model import train

try:
    from cayleynet import _ckernels
except ImportError:
    _ckernels = None


def _per_call(fn, repeat):
    return min(timeit.repeat(fn, number=repeat, repeat=3)) / repeat


def bench_kernels(sizes, repeat):
    rng = np.random.default_rng(0)
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':<10}{'N':>5}" + "".join(f"{name:>14}" for name, _ in backends)
          + f"{'numpy':>14}{'speedup':>10}")
    for n in sizes:
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) + n * np.eye(n)
        b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        times = []
        for _, k in backends:
            times.append(_per_call(lambda: k.lu_solve_inplace(a.copy(), b.copy(), 0.0), repeat))
        ref = _per_call(lambda: np.linalg.solve(a, b), repeat)
        speed = times[0] / times[-1] if len(times) > 1 else float("nan")
        print(f"{'lu_solve':<10}{n:>5}" + "".join(f"{t * 1e6:>12.1f}us" for t in times)
              + f"{ref * 1e6:>12.1f}us{speed:>9.1f}x")
        times = []
        for _, k in backends:
            times.append(_per_call(lambda: k.mgs_inplace(np.asfortranarray(a), 1e-12), repeat))
        speed = times[0] / times[-1] if len(times) > 1 else float("nan")
        print(f"{'mgs':<10}{n:>5}" + "".join(f"{t * 1e6:>12.1f}us" for t in times)
              + f"{'-':>14}{speed:>9.1f}x")


def bench_training():
    cfg = builtin_config("benchmark_5q")
    data = generate_dataset(cfg)
    for name, k in [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else []):
        saved = linalg.kernels
        linalg.kernels = k
        try:
            t0 = time.perf_counter()
            _, trace = train(data, cfg.train)
            dt = time.perf_counter() - t0
        finally:
            linalg.kernels = saved
        print(f"train benchmark_5q [{name:>6}]: {dt:6.2f}s  epochs={trace.epochs_run} "
              f"F={trace.last.fidelity:.6f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    args = parser.parse_args()
    if _ckernels is None:
        print("Cython kernels not built; only the fallback is timed")
    bench_kernels(args.sizes, args.repeat)
    print()
    bench_training()


if __name__ == "__main__":
    main()
