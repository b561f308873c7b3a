"""Special functions used by the closed forms and the analytic Q catalog."""
import math

import numpy as np
from scipy import special as _sp

EULER_GAMMA = 0.57721566490153286060651209008240243


def digamma(x):
    """Digamma function.

    Integer arguments use the harmonic-sum form ``psi(m) = H_{m-1} - gamma`` so the
    closed-form Fock results stay exact in floating point; other arguments defer to
    :func:`scipy.special.digamma`.
    """
    if isinstance(x, (int, np.integer)) or (isinstance(x, float) and x.is_integer()):
        m = int(x)
        if m <= 0:
            raise ValueError(f"digamma is undefined at non-positive integer {m}")
        return math.fsum(1.0 / k for k in range(1, m)) - EULER_GAMMA
    if x <= 0:
        raise ValueError("digamma domain here is x > 0")
    return float(_sp.digamma(x))


def log_factorial(m):
    if m < 0:
        raise ValueError("log_factorial needs m >= 0")
    return math.lgamma(m + 1.0)


def bessel_i0_scaled(x):
    """``exp(-|x|) * I0(x)``, finite for any real ``x``."""
    return _sp.i0e(x)


def log_bessel_i0(x):
    x = np.abs(np.asarray(x, dtype=float))
    return np.log(_sp.i0e(x)) + x
