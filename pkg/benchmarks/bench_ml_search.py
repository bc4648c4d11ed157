"""Compare the compiled and numpy exhaustive-search backends.

    python3 benchmarks/bench_ml_search.py [--instances 4096] [--repeat 5]

Both backends receive identical random problems of the sizes the simulator
produces; the script checks that they pick the same candidates and prints
microseconds per instance.
"""

import argparse
import time

import numpy as np

from ic_stbc import kernels
from ic_stbc.modulation import make_qam

CASES = [  # (label, rows, n_symbols, order)
    ("M=2 L=2 4QAM", 5, 2, 4),
    ("M=2 L=4 4QAM", 3, 4, 4),
    ("M=3 L=4 4QAM", 4, 4, 4),
    ("M=2 L=6 4QAM", 6, 6, 4),
    ("M=2 L=2 16QAM", 5, 2, 16),
]


def _problem(rng, instances, rows, n):
    R = (rng.standard_normal((instances, rows, n)) + 1j * rng.standard_normal((instances, rows, n))) / np.sqrt(2)
    b = (rng.standard_normal((instances, rows)) + 1j * rng.standard_normal((instances, rows))) / np.sqrt(2)
    return R, b


def _time(fn, args, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing numpy only")
    rng = np.random.default_rng(args.seed)
    print(f"{'case':<16}" + "".join(f"{name + ' us/inst':>18}" for name in backends) + f"{'speedup':>10}")
    for label, rows, n, order in CASES:
        pts = make_qam(order).points
        inst = max(64, args.instances // max(1, order**n // 256))
        R, b = _problem(rng, inst, rows, n)
        per = {}
        picks = {}
        for name, fn in backends.items():
            t, (idx, _) = _time(fn, (R, b, pts), args.repeat)
            per[name] = 1e6 * t / inst
            picks[name] = idx
        if len(picks) == 2:
            assert np.array_equal(picks["numpy"], picks["cython"]), f"backends disagree on {label}"
        speed = per["numpy"] / per["cython"] if "cython" in per else float("nan")
        print(f"{label:<16}" + "".join(f"{per[k]:>18.2f}" for k in backends) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
