"""Compare the compiled kernels with the NumPy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-``repeat`` wall time per kernel and backend, the speed-up and the
largest disagreement between the two results.
"""
import argparse
import math
import timeit

import numpy as np

from wehrlng import _pykernels
from wehrlng.fock import FockDensityMatrix, StateFamilySpec, make_state

try:
    from wehrlng import _ckernels
except ImportError:
    _ckernels = None


def dense_state(dim, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, 4)) + 1j * rng.normal(size=(dim, 4))
    r = a @ a.conj().T
    return FockDensityMatrix.hermitian(r / np.trace(r).real).elements


def cases(n_points):
    rng = np.random.default_rng(1)
    re = np.ascontiguousarray(rng.uniform(-4, 4, n_points))
    im = np.ascontiguousarray(rng.uniform(-4, 4, n_points))
    rho_dense = np.ascontiguousarray(dense_state(40))
    rho_diag = np.ascontiguousarray(make_state(StateFamilySpec.pats(2, 0.6)).elements)
    logq = np.ascontiguousarray(np.log(rng.uniform(1e-20, 1.0, 20 * n_points)))
    w = np.ascontiguousarray(rng.uniform(0.0, 1.0, 20 * n_points))
    return {
        "q_from_matrix dense d=40": lambda k: k.q_from_matrix(re, im, rho_dense, False),
        f"q_from_matrix diag d={rho_diag.shape[0]}": lambda k: k.q_from_matrix(re, im, rho_diag, True),
        "neg_xlogx_sum": lambda k: k.neg_xlogx_sum(logq, w),
        "compensated_sum": lambda k: k.compensated_sum(w),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=50_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the NumPy fallback is available")
    print(f"{'kernel':32s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speed-up':>9s} {'max diff':>10s}")
    for name, fn in cases(args.points).items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:32s} {1e3 * t_py:11.2f}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        diff = np.max(np.abs(np.asarray(fn(_pykernels)) - np.asarray(fn(_ckernels))))
        print(f"{name:32s} {1e3 * t_py:11.2f} {1e3 * t_c:12.2f} {t_py / t_c:9.1f} {diff:10.1e}")


if __name__ == "__main__":
    main()
