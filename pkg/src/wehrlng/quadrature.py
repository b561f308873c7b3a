"""Quadrature configuration and the deterministic phase-space rules.

Single-mode integrals are written in polar form around a centre ``c`` with
``u = |alpha - c|^2``, so that ``(1/pi) d^2 alpha = du dphi / (2 pi)``. The ``u`` axis
uses composite Gauss-Legendre panels, geometrically graded towards ``u = 0`` where
``Q log Q`` can carry a ``u^m log u`` endpoint singularity; the angle uses the
periodic trapezoid rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels

LOG_TINY = math.log(1e-300)
_GRADING_LEVELS = 40
_MAX_PANELS = 20000


class ConvergenceError(RuntimeError):
    """A quadrature or Monte Carlo estimate missed its error target."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration settings.

    ``radial_nodes`` is the Gauss-Legendre order per radial panel and
    ``grid_nodes_per_axis`` the number of angular nodes of the 2D rule. ``radial_cut``
    fixes the upper limit in ``|alpha|``; ``None`` picks it from a tail bound.
    ``mc_target_err`` is the largest standard error the Monte Carlo engine accepts.
    """

    radial_nodes: int = 32
    radial_cut: float | None = None
    grid_nodes_per_axis: int = 64
    mc_samples: int = 1_000_000
    mc_seed: int = 0
    target_abs_err: float = 1e-9
    mc_target_err: float = 1e-2
    mc_batch: int = 1 << 16
    max_refine: int = 4
    workers: int = 1

    def __post_init__(self):
        for name in ("radial_nodes", "grid_nodes_per_axis", "mc_samples"):
            if getattr(self, name) < 16:
                raise ValueError(f"{name} must be >= 16")
        if self.target_abs_err < 1e-12:
            raise ValueError("target_abs_err must be >= 1e-12")
        if self.radial_cut is not None and self.radial_cut <= 0:
            raise ValueError("radial_cut must be positive")
        if not 0 <= self.mc_seed < 2 ** 64:
            raise ValueError("mc_seed must be a 64-bit unsigned integer")

    def refined(self) -> "QuadratureSpec":
        return replace(self, radial_nodes=2 * self.radial_nodes, grid_nodes_per_axis=2 * self.grid_nodes_per_axis)


def gauss_legendre_panels(breaks: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Gauss-Legendre over consecutive ``breaks``."""
    t, w = np.polynomial.legendre.leggauss(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + half * (t + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def graded_breaks(h: float, upper: float) -> np.ndarray:
    """Geometric grading ``h 2^-k`` near zero, then uniform panels of width ``h``."""
    geo = h * 2.0 ** -np.arange(_GRADING_LEVELS, 0, -1)
    n_uniform = max(1, int(math.ceil(upper / h)))
    if n_uniform > _MAX_PANELS:
        raise ConvergenceError(f"radial range needs {n_uniform} panels (limit {_MAX_PANELS})")
    uniform = h * np.arange(1, n_uniform + 1)
    return np.concatenate(([0.0], geo, uniform))


def _neg_xlogx_log(logq: np.ndarray) -> np.ndarray:
    """log of ``-Q log Q`` where ``Q < 1`` (``-inf`` where it vanishes)."""
    out = np.full(logq.shape, -np.inf)
    ok = (logq < 0) & (logq > -np.inf)
    out[ok] = logq[ok] + np.log(-logq[ok])
    return out


def tail_upper(log_q_ring, u_start: float, h: float, tol: float) -> tuple[float, float]:
    """Walk outwards until the entropy-density tail beyond ``U`` is below ``tol``.

    ``log_q_ring(u)`` returns log Q on the ring of squared radius ``u`` (array over
    angles). The tail is bounded by ``f(U) / a`` with ``a`` the local logarithmic decay
    rate of the largest ring value ``f``, valid once ``f`` is log-concave and decreasing.
    Returns ``(U, tail_bound)``.
    """
    u = max(u_start, h)
    for _ in range(_MAX_PANELS):
        f0 = float(np.max(_neg_xlogx_log(log_q_ring(u))))
        f1 = float(np.max(_neg_xlogx_log(log_q_ring(u + h))))
        if f0 == -np.inf or f0 < LOG_TINY:
            return u, 0.0
        if f1 < f0:
            rate = (f0 - f1) / h
            bound = math.exp(f0) / rate
            if bound < tol:
                return u, bound
        u += h
    raise ConvergenceError("could not bound the integrand tail")


@dataclass(frozen=True)
class PolarGrid:
    """Tensor grid for ``(1/pi) int f d^2 alpha`` around ``center``."""

    center: complex
    u: np.ndarray
    w_u: np.ndarray
    phi: np.ndarray
    tail_bound: float
    h: float
    upper: float

    def with_resolution(self, order: int, n_phi: int) -> "PolarGrid":
        """Same panels and cut, different Gauss-Legendre order / angular count."""
        u, w = gauss_legendre_panels(graded_breaks(self.h, self.upper), order)
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        return PolarGrid(self.center, u, w, phi, self.tail_bound, self.h, self.upper)

    @property
    def points(self) -> np.ndarray:
        r = np.sqrt(self.u)
        return self.center + r[:, None] * np.exp(1j * self.phi)[None, :]

    @property
    def weights(self) -> np.ndarray:
        return np.broadcast_to(self.w_u[:, None] / self.phi.size, (self.u.size, self.phi.size))


def panel_width(spread_u: float) -> float:
    """Uniform panel width for a distribution whose ``u`` scale is ``spread_u``."""
    return max(spread_u, 1.0) / 4.0


def polar_grid(log_q, center: complex, spread_u: float, quad: QuadratureSpec,
               n_phi: int | None = None, order: int | None = None, tol: float | None = None,
               h: float | None = None) -> PolarGrid:
    """Build the grid; ``log_q`` maps complex points (any shape) to log Q."""
    n_phi = n_phi or quad.grid_nodes_per_axis
    order = order or quad.radial_nodes
    tol = quad.target_abs_err / 10.0 if tol is None else tol
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    ring = np.exp(1j * phi)
    h = h or panel_width(spread_u)
    if quad.radial_cut is not None:
        upper, tail = quad.radial_cut ** 2, 0.0
    else:
        upper, tail = tail_upper(lambda u: log_q(center + math.sqrt(u) * ring), 2.0 * spread_u, h, tol)
    u, w = gauss_legendre_panels(graded_breaks(h, upper), order)
    return PolarGrid(complex(center), u, w, phi, tail, h, upper)


def entropy_on_grid(log_q, grid: PolarGrid) -> float:
    logq = log_q(grid.points)
    return kernels.neg_xlogx_sum(logq.ravel(), grid.weights.ravel())


def moments_on_grid(q_vals: np.ndarray, grid: PolarGrid, max_order: int) -> dict[tuple[int, int], complex]:
    """``<conj(alpha)^p alpha^q>`` for ``p + q <= max_order`` under ``d^2 alpha / pi``."""
    pts = grid.points.ravel()
    base = (grid.weights.ravel() * q_vals.ravel())
    out = {}
    for p in range(max_order + 1):
        for q in range(max_order + 1 - p):
            vals = base * np.conj(pts) ** p * pts ** q
            out[(p, q)] = complex(kernels.compensated_sum(vals.real), kernels.compensated_sum(vals.imag))
    return out
