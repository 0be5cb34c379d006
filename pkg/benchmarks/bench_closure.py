"""Closure filter of subalgebra enumeration: numba kernel vs numpy fallback.

    python benchmarks/bench_closure.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from selfsim import _kernels
from selfsim.lattice import LieLattice, example_family

CASES = [
    ("L_1, p=5, k=3", example_family(1, 5), 3),
    ("units, p=5, k=3", LieLattice.from_diagonal(1, 2, 3, 5, 20), 3),
    ("L_2, p=7, k=3", example_family(2, 7), 3),
    ("units, p=3, k=5", LieLattice.from_diagonal(1, 1, 1, 3, 20), 5),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable (or SELFSIM_DISABLE_NUMBA set); numpy timings only")
    print(f"{'case':<18}{'candidates':>12}{'closed':>9}{'numpy s':>10}{'numba s':>10}{'speedup':>9}")
    for name, L, k in CASES:
        c = _kernels.enumerate_candidates(L.prime, k)
        t_np, m_np = best_of(lambda: _kernels.closure_mask(c, L.tensor, L.prime, k, "numpy"), args.repeat)
        if _kernels.HAVE_NUMBA:
            _kernels.closure_mask(c[:1], L.tensor, L.prime, k, "numba")  # compile
            t_nb, m_nb = best_of(lambda: _kernels.closure_mask(c, L.tensor, L.prime, k, "numba"),
                                 args.repeat)
            assert np.array_equal(m_np, m_nb), name
            extra = f"{t_nb:>10.4f}{t_np / t_nb:>8.1f}x"
        else:
            extra = f"{'-':>10}{'-':>9}"
        print(f"{name:<18}{len(c):>12}{int(m_np.sum()):>9}{t_np:>10.4f}{extra}")


if __name__ == "__main__":
    main()
