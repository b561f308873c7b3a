"""Backend selection for the hot loops.

The compiled extension ``wehrlng._ckernels`` is used when importable; otherwise the
NumPy versions in ``wehrlng._pykernels`` are used. Set ``WEHRLNG_PURE_PYTHON=1`` to force
the fallback.
"""
import os
import warnings

import numpy as np

from . import _pykernels

BACKEND = "python"

if os.environ.get("WEHRLNG_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError as exc:  # pragma: no cover - depends on build environment
        warnings.warn(f"wehrlng: compiled kernels unavailable ({exc}); using NumPy fallback")
        _impl = _pykernels


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64).ravel()


def q_from_matrix(re, im, rho, diagonal=False):
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    return _impl.q_from_matrix(_f64(re), _f64(im), rho, bool(diagonal))


def neg_xlogx_sum(logq, weights):
    return float(_impl.neg_xlogx_sum(_f64(logq), _f64(weights)))


def compensated_sum(values):
    return float(_impl.compensated_sum(_f64(values)))


__all__ = ["BACKEND", "q_from_matrix", "neg_xlogx_sum", "compensated_sum"]
