# cython: language_level=3
"""Compiled inner loops: matrix-backed Q evaluation and compensated entropy sums."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, sqrt, lgamma, floor, fabs, cos, sin, atan2

cnp.import_array()

cdef double LOG_TINY = -690.7755278982137  # log(1e-300)


def q_from_matrix(const double[::1] re, const double[::1] im,
                  const double complex[:, ::1] rho, bint diagonal=False):
    """Husimi Q(alpha) = <alpha|rho|alpha> for a batch of points."""
    cdef Py_ssize_t npts = re.shape[0]
    cdef Py_ssize_t d = rho.shape[0]
    cdef Py_ssize_t i, m, n, nstar
    cdef double x, y, u, s, acc, scale, f, tr, ti, rr, ri
    out = np.empty(npts, dtype=np.float64)
    cdef double[::1] q = out
    cdef double[::1] cr = np.empty(d, dtype=np.float64)
    cdef double[::1] ci = np.empty(d, dtype=np.float64)
    cdef double[::1] pop = np.empty(d, dtype=np.float64)
    cdef double[::1] inv_sqrt = np.empty(d + 1, dtype=np.float64)
    cdef double[::1] sqrt_n = np.empty(d + 1, dtype=np.float64)
    cdef double[::1] inv_n = np.empty(d + 1, dtype=np.float64)
    for n in range(1, d + 1):
        sqrt_n[n] = sqrt(<double> n)
        inv_sqrt[n] = 1.0 / sqrt_n[n]
        inv_n[n] = 1.0 / n
    if diagonal:
        for m in range(d):
            pop[m] = rho[m, m].real

    with nogil:
        for i in range(npts):
            x = re[i]
            y = im[i]
            u = x * x + y * y
            # anchor the recurrence at the largest |<n|alpha>| so nothing underflows first
            nstar = <Py_ssize_t> floor(u)
            if nstar > d - 1:
                nstar = d - 1
            s = 0.5 * nstar * log(u) - 0.5 * lgamma(nstar + 1.0) if nstar > 0 else 0.0
            acc = 0.0
            if diagonal:
                # only |<n|alpha>|^2 is needed: p_{n+1} = p_n u / (n + 1)
                f = 1.0
                acc = pop[nstar]
                for n in range(nstar + 1, d):
                    f = f * u * inv_n[n]
                    acc = acc + pop[n] * f
                if nstar > 0:
                    f = 1.0
                    rr = 1.0 / u
                    for n in range(nstar - 1, -1, -1):
                        f = f * (n + 1) * rr
                        acc = acc + pop[n] * f
            else:
                f = atan2(y, x) * nstar
                cr[nstar] = cos(f)
                ci[nstar] = sin(f)
                for n in range(nstar + 1, d):
                    cr[n] = (cr[n - 1] * x - ci[n - 1] * y) * inv_sqrt[n]
                    ci[n] = (cr[n - 1] * y + ci[n - 1] * x) * inv_sqrt[n]
                # dividing by alpha is multiplying by conj(alpha) / u
                rr = 1.0 / u if nstar > 0 else 0.0
                for n in range(nstar - 1, -1, -1):
                    f = sqrt_n[n + 1] * rr
                    cr[n] = (cr[n + 1] * x + ci[n + 1] * y) * f
                    ci[n] = (ci[n + 1] * x - cr[n + 1] * y) * f
                for m in range(d):
                    acc = acc + rho[m, m].real * (cr[m] * cr[m] + ci[m] * ci[m])
                    rr = 0.0
                    ri = 0.0
                    for n in range(m + 1, d):
                        tr = rho[m, n].real
                        ti = rho[m, n].imag
                        rr = rr + tr * cr[n] - ti * ci[n]
                        ri = ri + tr * ci[n] + ti * cr[n]
                    # Re(conj(c_m) * row)
                    acc = acc + 2.0 * (cr[m] * rr + ci[m] * ri)
            scale = 2.0 * s - u
            q[i] = acc * exp(scale) if scale > -745.0 else 0.0
    return out


def neg_xlogx_sum(const double[::1] logq, const double[::1] weights):
    """Compensated sum of w * (-t log t) with t = exp(logq); t below 1e-300 contributes 0."""
    cdef Py_ssize_t i, n = logq.shape[0]
    cdef double total = 0.0, comp = 0.0, term, tmp, L
    for i in range(n):
        L = logq[i]
        if L < LOG_TINY:
            continue
        term = -weights[i] * exp(L) * L
        tmp = total + term
        if fabs(total) >= fabs(term):
            comp += (total - tmp) + term
        else:
            comp += (term - tmp) + total
        total = tmp
    return total + comp


def compensated_sum(const double[::1] values):
    """Neumaier summation."""
    cdef Py_ssize_t i, n = values.shape[0]
    cdef double total = 0.0, comp = 0.0, tmp, v
    for i in range(n):
        v = values[i]
        tmp = total + v
        if fabs(total) >= fabs(v):
            comp += (total - tmp) + v
        else:
            comp += (v - tmp) + total
        total = tmp
    return total + comp
