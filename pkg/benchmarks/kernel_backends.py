"""Compare the compiled scoring kernels against the pure-Python fallback.

Runs each hot kernel on the same random inputs with both backends and
reports per-call timings plus the speedup. Also times an end-to-end top-k
query with each backend by forcing the fallback via GEOSTREAM_PURE_PYTHON.

Usage: python3 benchmarks/kernel_backends.py [--calls N] [--seed S]
"""

import argparse
import random
import statistics
import subprocess
import sys
import time

from geostream import _pykernels

try:
    from geostream import _ckernels
except ImportError:
    _ckernels = None


def bench_kernel(fn, args_list, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for args in args_list:
            fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best / len(args_list)


def make_inputs(rng, calls):
    delta = 141.4213562373095
    inputs = {
        "visual_weight": [
            (rng.randrange(1, 10), rng.randrange(10, 200),
             rng.randrange(1, 500), 10_000, 0.5)
            for _ in range(calls)
        ],
        "spatial_cost": [
            (rng.uniform(0, 100), rng.uniform(0, 100),
             rng.uniform(0, 100), rng.uniform(0, 100), delta)
            for _ in range(calls)
        ],
        "rect_min_cost": [],
        "recency_cost": [
            (rng.uniform(0, 1e6), 2.0, 3600.0) for _ in range(calls)
        ],
        "relevance_cost": [],
        "combine": [
            (1 / 3, 1 / 3, 1 / 3, rng.random(), rng.random(), rng.random())
            for _ in range(calls)
        ],
    }
    for _ in range(calls):
        lat0, lat1 = sorted(rng.uniform(0, 100) for _ in range(2))
        lon0, lon1 = sorted(rng.uniform(0, 100) for _ in range(2))
        inputs["rect_min_cost"].append(
            (rng.uniform(0, 100), rng.uniform(0, 100), lat0, lon0, lat1, lon1, delta))
    for _ in range(calls):
        n = rng.randrange(1, 30)
        maxima = [rng.uniform(0.01, 0.9) for _ in range(n)]
        weights = [m * rng.random() for m in maxima]
        inputs["relevance_cost"].append((weights, maxima))
    return inputs


def bench_query(pure_python):
    """Time `geostream verify` in a subprocess with the chosen backend."""
    env = {"GEOSTREAM_PURE_PYTHON": "1"} if pure_python else {}
    import os

    full_env = dict(os.environ, **env)
    code = (
        "from geostream.verify import check_oracle_equivalence;"
        "from geostream.model import SpatialDomain;"
        "import time; d = SpatialDomain(0.0, 100.0, 0.0, 100.0);"
        "t0 = time.perf_counter();"
        "check_oracle_equivalence(7, 100, d);"
        "print(time.perf_counter() - t0)"
    )
    out = subprocess.run([sys.executable, "-c", code], env=full_env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--calls", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _ckernels is None:
        print("compiled backend not available; build the extension first")
        return 1

    rng = random.Random(args.seed)
    inputs = make_inputs(rng, args.calls)

    print(f"{args.calls} calls per kernel, best of 5 runs\n")
    print(f"{'kernel':<16} {'python ns':>10} {'cython ns':>10} {'speedup':>8}")
    for name, args_list in inputs.items():
        py = bench_kernel(getattr(_pykernels, name), args_list)
        cy = bench_kernel(getattr(_ckernels, name), args_list)
        print(f"{name:<16} {py * 1e9:>10.0f} {cy * 1e9:>10.0f} {py / cy:>7.2f}x")

    print("\nend-to-end: 100 random oracle-equivalence instances")
    t_py = bench_query(pure_python=True)
    t_cy = bench_query(pure_python=False)
    print(f"{'pure python':<16} {t_py:>8.2f} s")
    print(f"{'compiled':<16} {t_cy:>8.2f} s   ({t_py / t_cy:.2f}x)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
