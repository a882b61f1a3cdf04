"""Compare the compiled and pure-Python kernel backends.

Times each hot kernel directly through both implementations, then one full
``run_test`` call in a subprocess per backend (the backend is chosen at
import, so it needs a fresh interpreter).

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from tailgof import _kernels_py

try:
    from tailgof import _ckernels
except ImportError:
    _ckernels = None

END_TO_END = """
import time
from tailgof import TailCopulaFamily, kernels, run_test
from tailgof.datagen import gen_cauchy_quadrant
sample = gen_cauchy_quadrant(1500, seed=1)
fam = TailCopulaFamily("logistic", (0.5,))
run_test(sample, fam)
t = time.perf_counter()
for _ in range({repeat}):
    run_test(sample, fam)
print(kernels.BACKEND, (time.perf_counter() - t) / {repeat})
"""


def kernel_cases(rng):
    n, cells = 1500, 400
    ix, iy = rng.integers(0, cells, n), rng.integers(0, cells, n)
    vals = rng.normal(size=(n, 7))
    field = rng.normal(size=(200, 200))
    incr = rng.normal(size=(200, 200)) * 0.005
    return {
        "bin_cells (1500 atoms, 400x400, 7 columns)": lambda m: m.bin_cells(ix, iy, vals, cells, cells),
        "field_statistics (200x200)": lambda m: m.field_statistics(field, 0.005),
        "sheet_path_statistics (200x200)": lambda m: m.sheet_path_statistics(incr, 0.005),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the Python backend is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':45s} {'python (us)':>12s} {'cython (us)':>12s} {'speedup':>8s}")
    for name, fn in kernel_cases(rng).items():
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=args.repeat, repeat=3)) / args.repeat
        if _ckernels is None:
            print(f"{name:45s} {t_py * 1e6:12.1f} {'-':>12s} {'-':>8s}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=args.repeat, repeat=3)) / args.repeat
        print(f"{name:45s} {t_py * 1e6:12.1f} {t_c * 1e6:12.1f} {t_py / t_c:8.2f}")

    print("\nend to end: run_test, n=1500, k=250, default grid")
    code = END_TO_END.format(repeat=5)
    for pure in ("1", "0"):
        env = dict(os.environ, TAILGOF_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        backend, secs = out.stdout.split()
        print(f"  {backend:8s} {float(secs) * 1e3:8.1f} ms per test")


if __name__ == "__main__":
    main()
