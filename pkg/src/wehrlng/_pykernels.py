"""NumPy implementations of the compiled kernels (same signatures and semantics)."""
import math

import numpy as np
from scipy.special import gammaln

LOG_TINY = math.log(1e-300)
_CHUNK = 4096


def q_from_matrix(re, im, rho, diagonal=False):
    """Husimi Q(alpha) = <alpha|rho|alpha> for a batch of points."""
    re = np.asarray(re, dtype=float)
    im = np.asarray(im, dtype=float)
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    n = np.arange(d)
    half_lgam = 0.5 * gammaln(n + 1.0)
    out = np.empty(re.shape[0])
    for start in range(0, re.shape[0], _CHUNK):
        x = re[start:start + _CHUNK, None]
        y = im[start:start + _CHUNK, None]
        u = x * x + y * y
        with np.errstate(divide="ignore", invalid="ignore"):
            logr = 0.5 * np.log(u)
            nlogr = np.where(n == 0, 0.0, n * logr)
        logmag = nlogr - half_lgam - 0.5 * u
        if diagonal:
            out[start:start + _CHUNK] = np.exp(2.0 * logmag) @ rho.diagonal().real
            continue
        phase = n * np.arctan2(y, x)
        c = np.exp(logmag + 1j * phase)
        out[start:start + _CHUNK] = np.einsum("im,im->i", c.conj(), c @ rho.T).real
    return out


def neg_xlogx_sum(logq, weights):
    """Exactly rounded sum of w * (-t log t) with t = exp(logq); t below 1e-300 contributes 0."""
    logq = np.asarray(logq, dtype=float)
    weights = np.asarray(weights, dtype=float)
    keep = logq >= LOG_TINY
    terms = -weights[keep] * np.exp(logq[keep]) * logq[keep]
    return math.fsum(terms.tolist())


def compensated_sum(values):
    return math.fsum(np.asarray(values, dtype=float).tolist())
