"""Compare the compiled and pure-Python Fock-basis kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from indefmetric import _kernels_py

try:
    from indefmetric._ext import _kernels as compiled
except ImportError:
    compiled = None

CASES = [(4, 3), (28, 2), (28, 3), (108, 2)]


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if compiled is None:
        print("compiled core not built; only the fallback can be timed")
    print(f"{'slots':>5} {'n_max':>5} {'dim':>8} {'kernel':>22} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for n_slots, n_max in CASES:
        tuples, level = _kernels_py.enumerate_states(n_slots, n_max)
        for name in ("annihilation_entries", "rank_states"):
            py = getattr(_kernels_py, name)
            t_py = best(lambda: py(tuples, level, n_slots, n_max), args.repeat)
            if compiled is None:
                print(f"{n_slots:5d} {n_max:5d} {len(level):8d} {name:>22} {t_py:10.4f} {'-':>10} {'-':>8}")
                continue
            cy = getattr(compiled, name)
            a, b = py(tuples, level, n_slots, n_max), cy(tuples, level, n_slots, n_max)
            for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
                assert np.array_equal(np.asarray(x), np.asarray(y)), f"{name} backends disagree"
            t_cy = best(lambda: cy(tuples, level, n_slots, n_max), args.repeat)
            print(f"{n_slots:5d} {n_max:5d} {len(level):8d} {name:>22} {t_py:10.4f} {t_cy:10.4f} {t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
