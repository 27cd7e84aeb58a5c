"""Time the compiled word kernels against the interpreted fallback.

    python3 benchmarks/bench_kernels.py --n 10 --m 6 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rauzy import _pykernels

try:
    from rauzy import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(mod, n: int, m: int):
    mats = mod.level_matrices(n)
    codes = np.arange(3**n, dtype=np.int64)
    return {
        f"level_matrices(n={n})": lambda: mod.level_matrices(n),
        f"vertex_max(3^{n} words)": lambda: mod.vertex_max(mats),
        f"leading_runs(n={n})": lambda: mod.leading_runs(codes, n),
        f"classify_level(n={n}, m=3)": lambda: mod.classify_level(n, 3),
        f"successor_table(m={m})": lambda: mod.successor_table(m),
        f"state_codes(m={m})": lambda: mod.state_codes(m),
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10, help="word length for the level kernels")
    ap.add_argument("--m", type=int, default=6, help="depth for the state kernels")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not available; only the fallback can be timed")
    py = cases(_pykernels, args.n, args.m)
    cy = cases(_ckernels, args.n, args.m) if _ckernels is not None else {}
    print(f"{'kernel':<32}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, fn in py.items():
        tp = best_of(fn, args.repeat)
        if name in cy:
            tc = best_of(cy[name], args.repeat)
            print(f"{name:<32}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")
        else:
            print(f"{name:<32}{tp:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
