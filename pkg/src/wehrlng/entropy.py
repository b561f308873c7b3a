"""Wehrl entropy ``H_W = -(1/pi^n) int Q log Q`` (nats).

Engines: ``radial`` for phase-symmetric single-mode models, ``grid2d`` (polar tensor
rule centred on the mean) for other single-mode models, ``mc4d`` (importance sampling
from the moment-matched Gaussian) for two-mode models, plus closed forms for Gaussian
and Fock Q functions.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .qfunc import FockQ, GaussianMomentSummary, GaussianQ, QFunctionModel, gaussian_fit
from .quadrature import ConvergenceError, QuadratureSpec, entropy_on_grid, panel_width, polar_grid
from .special import bessel_i0_scaled, digamma, log_factorial

__all__ = [
    "ConvergenceError",
    "MeasureReport",
    "QuadratureSpec",
    "bessel_i0_scaled",
    "digamma",
    "log_factorial",
    "wehrl",
    "wehrl_fock_closed",
    "wehrl_gaussian",
]

METHODS = ("closed_form", "radial", "grid2d", "mc4d")
MAX_GRID_NODES = 4_000_000


@dataclass(frozen=True)
class MeasureReport:
    value: float
    method: str
    est_error: float = 0.0
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not (math.isfinite(self.est_error) and self.est_error >= 0):
            raise ValueError("est_error must be finite and >= 0")
        if self.method == "closed_form" and self.est_error != 0:
            raise ValueError("closed-form results carry no numerical error")

    def __float__(self):
        return float(self.value)


def wehrl_gaussian(fit: GaussianMomentSummary) -> MeasureReport:
    """``n (1 + log 2) + (1/2) log det Sigma``; the mean does not enter."""
    sign, logdet = np.linalg.slogdet(fit.covariance)
    if sign <= 0:
        raise ValueError("covariance is not positive definite")
    value = fit.modes * (1.0 + math.log(2.0)) + 0.5 * logdet
    return MeasureReport(float(value), "closed_form", 0.0, {"modes": fit.modes})


def wehrl_fock_closed(m: int) -> float:
    """``1 + m + log m! - m psi(m+1)``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return 1.0 + m + log_factorial(m) - m * digamma(m + 1)


def _deterministic(model: QFunctionModel, quad: QuadratureSpec, method: str) -> MeasureReport:
    fit = gaussian_fit(model, quad)
    if method == "radial":
        center, n_phi = 0.0, 1
        spread = float(np.trace(fit.covariance)) + abs(fit.complex_mean[0]) ** 2
    else:
        center, n_phi = complex(fit.complex_mean[0]), quad.grid_nodes_per_axis
        spread = float(np.trace(fit.covariance))
    h = panel_width(spread)
    order = quad.radial_nodes
    est = math.inf
    grid = None
    for level in range(quad.max_refine + 1):
        if grid is None:
            grid = polar_grid(model.log_q, center, spread, quad, n_phi=n_phi, order=order, h=h)
        else:
            grid = grid.with_resolution(order, n_phi)
        value = entropy_on_grid(model.log_q, grid)
        err_r = abs(value - entropy_on_grid(model.log_q, grid.with_resolution(order // 2, n_phi)))
        err_a = 0.0
        if n_phi > 1:
            err_a = abs(value - entropy_on_grid(model.log_q, grid.with_resolution(order, n_phi // 2)))
        est = err_r + err_a + grid.tail_bound
        if est <= quad.target_abs_err:
            meta = {"nodes": int(grid.u.size * grid.phi.size), "upper_u": float(grid.upper), "refinements": level}
            return MeasureReport(float(value), method, float(est), meta)
        # refine only the axis that has not converged yet
        panels = grid.u.size // order
        budget = quad.target_abs_err / 2.0
        if err_r > budget or err_a <= budget:
            order *= 2
        if err_a > budget:
            n_phi *= 2
        if panels * order * n_phi > MAX_GRID_NODES:
            break
    raise ConvergenceError(f"{method} Wehrl estimate error {est:.3g} exceeds target {quad.target_abs_err:.3g}")


def _mc_batch(model, proposal, chol, mean, seed_seq, n):
    rng = np.random.Generator(np.random.Philox(seed_seq))
    x = mean + rng.standard_normal((n, mean.size)) @ chol.T
    alpha = x[:, 0::2] + 1j * x[:, 1::2]
    lq = model.log_q(alpha)
    lg = proposal.log_q(alpha)
    w = np.exp(lq - lg)
    y = np.where(w > 0, -w * np.where(np.isfinite(lq), lq, 0.0), 0.0)
    c = w - 1.0
    s = kernels.compensated_sum
    return (kernels.neg_xlogx_sum(lq, np.exp(-lg)), s(c), s(y * y), s(c * c), s(y * c))


def _wehrl_mc(model: QFunctionModel, quad: QuadratureSpec) -> MeasureReport:
    fit = gaussian_fit(model, quad)
    proposal = GaussianQ(fit)
    chol = np.linalg.cholesky(fit.covariance)
    n_total = quad.mc_samples
    sizes = [quad.mc_batch] * (n_total // quad.mc_batch)
    if n_total % quad.mc_batch:
        sizes.append(n_total % quad.mc_batch)
    seeds = np.random.SeedSequence(quad.mc_seed).spawn(len(sizes))
    args = [(model, proposal, chol, fit.mean, sq, n) for sq, n in zip(seeds, sizes)]
    if quad.workers > 1:
        with ThreadPoolExecutor(quad.workers) as pool:
            parts = list(pool.map(lambda a: _mc_batch(*a), args))
    else:
        parts = [_mc_batch(*a) for a in args]
    sy, sc, syy, scc, syc = (math.fsum(p[i] for p in parts) for i in range(5))
    n = float(n_total)
    ybar, cbar = sy / n, sc / n
    var_y = (syy - n * ybar * ybar) / (n - 1)
    var_c = (scc - n * cbar * cbar) / (n - 1)
    cov_yc = (syc - n * ybar * cbar) / (n - 1)
    # E[w] = 1 exactly, so w - 1 is a zero-mean control variate
    b = cov_yc / var_c if var_c > 0 else 0.0
    value = ybar - b * cbar
    resid = max(var_y - b * cov_yc, 0.0)
    stderr = math.sqrt(resid / n)
    meta = {"samples": n_total, "seed": quad.mc_seed, "control_coef": b, "plain_mean": ybar}
    if stderr > quad.mc_target_err:
        raise ConvergenceError(f"Monte Carlo standard error {stderr:.3g} exceeds {quad.mc_target_err:.3g}")
    return MeasureReport(value, "mc4d", stderr, meta)


def wehrl(model: QFunctionModel, quad: QuadratureSpec | None = None, method: str | None = None) -> MeasureReport:
    """Wehrl entropy of a Q model.

    Parameters
    ----------
    model : QFunctionModel
    quad : QuadratureSpec, optional
    method : {"radial", "grid2d", "mc4d", "closed_form"}, optional
        Force an engine. By default phase-symmetric single-mode models use ``radial``,
        other single-mode models ``grid2d`` and two-mode models ``mc4d``.
        ``closed_form`` is available for bare Fock and Gaussian models only.
    """
    quad = quad or QuadratureSpec()
    if method is None:
        if model.modes == 2:
            method = "mc4d"
        elif model.phase_symmetric:
            method = "radial"
        else:
            method = "grid2d"
    if method == "closed_form":
        if isinstance(model, FockQ):
            return MeasureReport(wehrl_fock_closed(model.m), "closed_form", 0.0, {"m": model.m})
        if isinstance(model, GaussianQ):
            return wehrl_gaussian(model.summary)
        raise ValueError(f"no closed form for {model.kind}")
    if method == "mc4d":
        if model.modes != 2:
            raise ValueError("mc4d is for two-mode models")
        return _wehrl_mc(model, quad)
    if model.modes != 1:
        raise ValueError(f"{method} handles single-mode models only")
    if method == "radial" and not model.phase_symmetric:
        raise ValueError("radial rule requires a phase-symmetric model")
    if method not in ("radial", "grid2d"):
        raise ValueError(f"unknown method {method!r}")
    return _deterministic(model, quad, method)
