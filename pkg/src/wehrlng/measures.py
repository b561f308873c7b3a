"""Non-Gaussianity measures: the Wehrl-entropy gap ``N``, the Hilbert-Schmidt measure
``delta1`` and the relative-entropy measure ``delta2``."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .entropy import MeasureReport, wehrl, wehrl_gaussian
from .fock import (
    FockDensityMatrix,
    StateFamilySpec,
    default_cutoff,
    hs_inner,
    thermal_matrix,
    von_neumann_entropy,
)
from .qfunc import GaussianMomentSummary, MatrixQ, QFunctionModel, gaussian_fit
from .quadrature import QuadratureSpec
from .special import digamma, log_factorial


class UnsupportedStateError(ValueError):
    """The Gaussian reference of the state is not a thermal state."""


@dataclass(frozen=True)
class GaussianReference:
    """Moment-matched Gaussian; ``thermal_nbar`` and ``matrix`` are set only when the
    reference is a thermal state (zero mean, isotropic single-mode covariance)."""

    summary: GaussianMomentSummary
    thermal_nbar: float | None = None
    matrix: FockDensityMatrix | None = None

    def __post_init__(self):
        if (self.thermal_nbar is None) != (self.matrix is None):
            raise ValueError("thermal_nbar and matrix must be given together")
        if self.thermal_nbar is not None:
            if abs(2.0 * self.summary.covariance[0, 0] - 1.0 - self.thermal_nbar) > 1e-10:
                raise ValueError("thermal_nbar inconsistent with the covariance")


def _thermal_cutoff(nbar: float, at_least: int) -> int:
    spec = StateFamilySpec.thermal(nbar / (nbar + 1.0))
    return max(default_cutoff(spec), at_least)


def gaussian_reference(state, quad: QuadratureSpec | None = None) -> GaussianReference:
    """Gaussian reference of a density matrix or a Q model."""
    model = MatrixQ(state) if isinstance(state, FockDensityMatrix) else state
    summary = gaussian_fit(model, quad)
    if summary.modes != 1 or not summary.is_thermal_like:
        return GaussianReference(summary)
    nbar = max(2.0 * summary.covariance[0, 0] - 1.0, 0.0)
    at_least = state.cutoff if isinstance(state, FockDensityMatrix) else 1
    tau = thermal_matrix(nbar, _thermal_cutoff(nbar, at_least))
    return GaussianReference(summary, nbar, tau)


def ng_fock_closed(m: int) -> float:
    """``log(m+1) - m - log m! + m psi(m+1)``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return math.log(m + 1.0) - m - log_factorial(m) + m * digamma(m + 1)


def ng_measure(state, quad: QuadratureSpec | None = None, method: str | None = None) -> MeasureReport:
    """``N = H_W(rho_G) - H_W(rho)``.

    The reference entropy is always the Gaussian closed form. Small negative values are
    clamped at ``-2 * est_error``; the unclamped value is kept in ``metadata["raw_value"]``.
    """
    model: QFunctionModel = MatrixQ(state) if isinstance(state, FockDensityMatrix) else state
    fit = gaussian_fit(model, quad)
    h_ref = wehrl_gaussian(fit).value
    h = wehrl(model, quad, method)
    raw = h_ref - h.value
    floor = -2.0 * h.est_error
    value = max(raw, floor)
    meta = dict(h.metadata, raw_value=raw, clamped=raw < floor, wehrl=h.value, wehrl_gaussian=h_ref)
    return MeasureReport(value, h.method, h.est_error, meta)


def _thermal_pair(rho: FockDensityMatrix):
    ref = gaussian_reference(rho)
    if ref.matrix is None:
        raise UnsupportedStateError(
            "delta1/delta2 are implemented only for states whose moment-matched Gaussian is "
            "thermal (zero mean, phase symmetric); displaced or squeezed references are out of scope"
        )
    tau = ref.matrix
    dim = max(rho.cutoff, tau.cutoff)
    return rho.padded(dim), tau.padded(dim), ref.thermal_nbar


def delta1(rho: FockDensityMatrix) -> MeasureReport:
    """Hilbert-Schmidt measure ``Tr[(rho - tau)^2] / (2 Tr rho^2)``."""
    r, tau, nbar = _thermal_pair(rho)
    p_rr = hs_inner(r, r)
    p_tt = hs_inner(tau, tau)
    p_rt = hs_inner(r, tau)
    value = (p_rr + p_tt - 2.0 * p_rt) / (2.0 * p_rr)
    return MeasureReport(value, "closed_form", 0.0, {"thermal_nbar": nbar, "purity": p_rr})


def thermal_entropy(nbar: float) -> float:
    """``(n+1) log(n+1) - n log n``."""
    if nbar < 0:
        raise ValueError("nbar must be >= 0")
    if nbar == 0:
        return 0.0
    return (nbar + 1.0) * math.log1p(nbar) - nbar * math.log(nbar)


def delta2(rho: FockDensityMatrix) -> MeasureReport:
    """Relative-entropy measure ``S(tau) - S(rho)``."""
    _, _, nbar = _thermal_pair(rho)
    s_tau = thermal_entropy(nbar)
    s_rho = von_neumann_entropy(rho)
    return MeasureReport(s_tau - s_rho, "closed_form", 0.0, {"thermal_nbar": nbar, "S_tau": s_tau, "S_rho": s_rho})
