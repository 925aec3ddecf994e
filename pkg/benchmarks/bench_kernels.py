"""Compare the compiled and pure-Python kernel backends.

Run with ``python benchmarks/bench_kernels.py``. Each kernel is timed with
timeit on both backends and the outputs are checked for agreement.
"""

import argparse
import timeit

import numpy as np

from sagin import _kernels_py as python_backend

try:
    from sagin import _kernels as compiled_backend
except ImportError:
    compiled_backend = None


def cases(rng):
    f0 = rng.uniform(2e10, 1e12, 78)
    strength = rng.uniform(1e-3, 1.0, (78, 64))
    width = rng.uniform(1e8, 5e9, (78, 64))
    return {
        "mie_sums(x=12.6)": lambda b: b.mie_sums(12.6, 4.5 + 2.5j, 40),
        "mie_sums(x=1500)": lambda b: b.mie_sums(1500.0, 1.33 + 1e-4j, 1550),
        "vvw_line_sum(78 lines x 64 points)": lambda b: b.vvw_line_sum(3e11, f0, strength, width),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--number", type=int, default=200)
    args = parser.parse_args()
    if compiled_backend is None:
        print("compiled backend not built; timing the python backend only")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<38}{'python us':>12}{'compiled us':>14}{'speedup':>10}")
    for name, call in cases(rng).items():
        t_py = min(timeit.repeat(lambda: call(python_backend), repeat=args.repeat, number=args.number))
        t_py = 1e6 * t_py / args.number
        if compiled_backend is None:
            print(f"{name:<38}{t_py:>12.2f}{'-':>14}{'-':>10}")
            continue
        np.testing.assert_allclose(call(compiled_backend), call(python_backend), rtol=1e-10)
        t_c = min(timeit.repeat(lambda: call(compiled_backend), repeat=args.repeat, number=args.number))
        t_c = 1e6 * t_c / args.number
        print(f"{name:<38}{t_py:>12.2f}{t_c:>14.2f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
