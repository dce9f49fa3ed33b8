"""Time the numba kernels against their interpreted twins (``fn.py_func``).

    python benchmarks/bench_kernels.py [--repeat N]

With ENTANGLE_BOUNDARY_NUMBA=0 both columns run the interpreter.
"""

import argparse
import time

import numpy as np

from entangle_boundary import kernels
from entangle_boundary._accel import USE_NUMBA
from entangle_boundary.linalg import JACOBI_MAX_SWEEPS, JACOBI_REL_TOL, LOG_MEAN_SWITCH
from entangle_boundary.oracle import ALT_MAX, ALT_TOL
from entangle_boundary.states import random_density


def _best_of(fn, args, repeat):
    fn(*args)  # warm-up (compilation)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng):
    h = random_density(rng) - 0.25 * np.eye(4)
    starts = (rng.normal(size=(10, 2)) + 1j * rng.normal(size=(10, 2))).astype(np.complex128)
    gamma = np.sort(rng.uniform(1e-3, 1.0, size=4))[::-1].copy()
    return {
        "jacobi_hermitian 4x4": (kernels.jacobi_hermitian, (h, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)),
        "product_min_search": (kernels.product_min_search, (h, starts, ALT_TOL, ALT_MAX)),
        "log_mean_matrix": (kernels.log_mean_matrix, (gamma, LOG_MEAN_SWITCH)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    print(f"numba enabled: {USE_NUMBA}")
    print(f"{'kernel':<24}{'jit [us]':>12}{'python [us]':>14}{'speed-up':>10}")
    for name, (fn, fargs) in cases(np.random.default_rng(args.seed)).items():
        fast = _best_of(fn, fargs, args.repeat)
        slow = _best_of(fn.py_func, fargs, max(args.repeat // 10, 3))
        print(f"{name:<24}{fast * 1e6:>12.2f}{slow * 1e6:>14.2f}{slow / fast:>10.1f}")


if __name__ == "__main__":
    main()
