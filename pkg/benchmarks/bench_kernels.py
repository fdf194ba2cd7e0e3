"""Compiled kernels vs the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--rows 5000] [--repeat 5]

Kernel rows call both implementations directly. The end-to-end row runs a full
clean in a child process per backend, switching with BAYESCLEAN_PURE.
"""

import argparse
import os
import random
import string
import subprocess
import sys
import timeit

import numpy as np

from bayesclean import _pure

try:
    from bayesclean import _core
except ImportError:
    _core = None

END_TO_END = """
import time
from bayesclean import BACKEND
from bayesclean.cleaner import Cleaner
from bayesclean.noise import NoiseSpec, inject
from bayesclean.synthetic import generate_cars
dirty, _ = inject(generate_cars({rows}, seed=0), NoiseSpec(0.01, seed=0))
best = float("inf")
for _ in range({repeat}):
    start = time.perf_counter()
    Cleaner(dirty).clean()
    best = min(best, time.perf_counter() - start)
print(BACKEND, best)
"""


def words(rng, k):
    return ["".join(rng.choices(string.ascii_letters, k=rng.randint(3, 12))) for _ in range(k)]


def kernel_cases(rows):
    rng = random.Random(0)
    pairs = list(zip(words(rng, 2000), words(rng, 2000)))
    domain = words(rng, 150)
    codes = np.ascontiguousarray(np.array([[rng.randrange(150) for _ in range(8)] for _ in range(rows)], dtype=np.int32))
    dist = [np.array([rng.randrange(6) for _ in range(150)], dtype=np.int32) for _ in range(8)]
    return {
        "levenshtein x2000": lambda m: [m.levenshtein(a, b) for a, b in pairs],
        "bounded_levenshtein x2000 (cap 4)": lambda m: [m.bounded_levenshtein(a, b, 4) for a, b in pairs],
        "distance_matrix 150 values": lambda m: m.distance_matrix(domain, 4),
        f"rows_within {rows} rows": lambda m: m.rows_within(codes, dist, 4),
    }


def end_to_end(rows, repeat, pure):
    env = dict(os.environ, BAYESCLEAN_PURE="1" if pure else "0")
    out = subprocess.run(
        [sys.executable, "-c", END_TO_END.format(rows=rows, repeat=repeat)],
        env=env, capture_output=True, text=True, check=True,
    ).stdout.split()
    return out[0], float(out[1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=5000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _core is None:
        sys.exit("compiled extension is not built; run pip install -e . --no-build-isolation")

    print(f"{'case':<36}{'cython s':>12}{'python s':>12}{'speedup':>10}")
    for name, fn in kernel_cases(args.rows).items():
        fast = min(timeit.repeat(lambda: fn(_core), number=1, repeat=args.repeat))
        slow = min(timeit.repeat(lambda: fn(_pure), number=1, repeat=args.repeat))
        print(f"{name:<36}{fast:>12.5f}{slow:>12.5f}{slow / fast:>9.1f}x")
    _, fast = end_to_end(args.rows, max(1, args.repeat // 2), pure=False)
    backend, slow = end_to_end(args.rows, max(1, args.repeat // 2), pure=True)
    assert backend == "python"
    print(f"{f'clean {args.rows} rows, tau=1%':<36}{fast:>12.3f}{slow:>12.3f}{slow / fast:>9.1f}x")


if __name__ == "__main__":
    main()
