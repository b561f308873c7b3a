"""s-ordered moments and cumulants of single-mode quasi-probabilities.

Tables are indexed by ``(p, q)`` for the moment ``<conj(alpha)^p alpha^q>_s``, i.e. the
expectation of the s-ordered product ``{a^dagger^p a^q}_s``. ``s = -1`` is the Q
function (anti-normal order), ``s = 0`` Wigner (symmetric), ``s = 1`` P (normal).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .fock import FockDensityMatrix, TruncationError, normal_moment

S_VALUES = (-1.0, 0.0, 1.0)


def _indices(order_cap):
    return [(p, q) for p in range(order_cap + 1) for q in range(order_cap + 1 - p)]


@dataclass(frozen=True)
class MomentTable:
    order_cap: int
    entries: dict
    s: float = -1.0

    def __post_init__(self):
        missing = [k for k in _indices(self.order_cap) if k not in self.entries]
        if missing:
            raise ValueError(f"moment table incomplete, missing {missing[:4]}")
        if abs(self.entries[(0, 0)] - 1.0) > 1e-12:
            raise ValueError("zeroth moment must be 1")
        scale = max(1.0, max(abs(v) for v in self.entries.values()))
        for (p, q), v in self.entries.items():
            if abs(self.entries[(q, p)] - np.conj(v)) > 1e-10 * scale:
                raise ValueError(f"entries ({p},{q}) and ({q},{p}) are not conjugate")

    def __getitem__(self, key):
        return self.entries[key]


@dataclass(frozen=True)
class CumulantTable:
    order_cap: int
    entries: dict
    s: float = -1.0

    def __getitem__(self, key):
        return self.entries[key]

    def max_abs(self, lo: int, hi: int | None = None) -> float:
        """Largest ``|gamma_{p,q}|`` with ``lo <= p + q <= hi``."""
        hi = self.order_cap if hi is None else hi
        vals = [abs(v) for (p, q), v in self.entries.items() if lo <= p + q <= hi]
        return max(vals) if vals else 0.0


def ordering_coefficient(p: int, q: int, k: int, s: float) -> float:
    """Weight of ``<a^dagger^{p-k} a^{q-k}>`` in ``<{a^dagger^p a^q}_s>``."""
    return factorial(k) * comb(p, k) * comb(q, k) * ((1.0 - s) / 2.0) ** k


def s_ordered_moments(rho: FockDensityMatrix, order_cap: int, s: float) -> MomentTable:
    """Moments of the s-ordered quasi-probability from exact normal-ordered traces.

    The state is renormalized by its trace so that the zeroth moment is exactly 1.
    """
    if not -1.0 <= s <= 1.0:
        raise ValueError("s must lie in [-1, 1]")
    if 2 * order_cap > rho.cutoff:
        raise TruncationError(f"order {order_cap} needs cutoff >= {2 * order_cap}")
    norm = {k: normal_moment(rho, *k) for k in _indices(order_cap)}
    trace = norm[(0, 0)].real
    table = {}
    for p, q in _indices(order_cap):
        acc = 0.0 + 0.0j
        for k in range(min(p, q) + 1):
            acc += ordering_coefficient(p, q, k, s) * norm[(p - k, q - k)]
        table[(p, q)] = acc / trace
    table[(0, 0)] = 1.0 + 0.0j
    return MomentTable(order_cap, table, s)


def moments_to_cumulants(table: MomentTable) -> CumulantTable:
    """Bivariate moment-to-cumulant recursion.

    For ``p >= 1``::

        M(p,q) = sum_{i<p, j<=q} C(p-1,i) C(q,j) gamma(p-i, q-j) M(i,j)

    and symmetrically in ``q`` when ``p = 0``; the ``(i, j) = (0, 0)`` term isolates
    ``gamma(p, q)``.
    """
    M = table.entries
    g = {(0, 0): 0.0 + 0.0j}
    for total in range(1, table.order_cap + 1):
        for p in range(total + 1):
            q = total - p
            acc = M[(p, q)]
            if p >= 1:
                for i in range(p):
                    for j in range(q + 1):
                        if i == 0 and j == 0:
                            continue
                        acc -= comb(p - 1, i) * comb(q, j) * g[(p - i, q - j)] * M[(i, j)]
            else:
                for j in range(1, q):
                    acc -= comb(q - 1, j) * g[(0, q - j)] * M[(0, j)]
            g[(p, q)] = acc
    return CumulantTable(table.order_cap, g, table.s)


def cumulants_to_moments(cum: CumulantTable) -> dict:
    """Inverse of :func:`moments_to_cumulants` (same recursion run forwards)."""
    g = cum.entries
    M = {(0, 0): 1.0 + 0.0j}
    for total in range(1, cum.order_cap + 1):
        for p in range(total + 1):
            q = total - p
            acc = 0.0 + 0.0j
            if p >= 1:
                for i in range(p):
                    for j in range(q + 1):
                        acc += comb(p - 1, i) * comb(q, j) * g[(p - i, q - j)] * M[(i, j)]
            else:
                for j in range(q):
                    acc += comb(q - 1, j) * g[(0, q - j)] * M[(0, j)]
            M[(p, q)] = acc
    return M


def cumulants(rho: FockDensityMatrix, order_cap: int = 4, s: float = -1.0) -> CumulantTable:
    return moments_to_cumulants(s_ordered_moments(rho, order_cap, s))


def s_invariance_report(rho: FockDensityMatrix, order_cap: int = 4, s_values=S_VALUES) -> float:
    """Largest change of any cumulant of order 3..K across ``s_values`` (reference ``s = -1``)."""
    if order_cap < 3:
        raise ValueError("need order_cap >= 3")
    ref = cumulants(rho, order_cap, -1.0)
    worst = 0.0
    for s in s_values:
        other = cumulants(rho, order_cap, s)
        for (p, q), v in ref.entries.items():
            if p + q >= 3:
                worst = max(worst, abs(other[(p, q)] - v))
    return worst


def second_order_shift(rho: FockDensityMatrix, s1: float, s2: float) -> dict:
    """``gamma_{p,q}(s1) - gamma_{p,q}(s2)`` for ``p + q = 2``.

    Only the ``(1, 1)`` entry moves, by ``(s2 - s1) / 2`` in this convention.
    """
    a, b = cumulants(rho, 2, s1), cumulants(rho, 2, s2)
    return {k: a[k] - b[k] for k in ((2, 0), (1, 1), (0, 2))}


def cumulant_indicator(rho: FockDensityMatrix, order_cap: int = 4) -> float:
    """``max |gamma_{p,q}|`` over ``3 <= p + q <= K`` (Q-function cumulants)."""
    if order_cap < 3:
        raise ValueError("need order_cap >= 3")
    return cumulants(rho, order_cap, -1.0).max_abs(3)
