"""Husimi Q-function models: analytic catalog, matrix-backed evaluation and the
shape-preserving transforms (scaling, displacement, rotation, passive mixing, tensor
products).

Conventions: ``alpha = (q + i p) / sqrt(2)`` and the measure is ``d^{2n} alpha / pi^n``.
Real coordinates are ordered ``(Re a1, Im a1, Re a2, Im a2)``. Single-mode models take
complex arrays of any shape; two-mode models take arrays of shape ``(..., 2)``.

Every model evaluates ``log Q`` directly so that the entropy integrands never
underflow; ``Q`` itself is ``exp(log_q)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .fock import FockDensityMatrix, StateFamilySpec, anti_normal_moment, make_state
from .quadrature import QuadratureSpec, moments_on_grid, polar_grid
from .special import log_bessel_i0

UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class GaussianMomentSummary:
    """Mean and covariance of a Q distribution in real coordinates."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).ravel()
        cov = np.array(self.covariance, dtype=float)
        if cov.shape != (mean.size, mean.size) or mean.size % 2:
            raise ValueError("mean must be a 2n-vector and covariance 2n x 2n")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12 * max(1.0, np.abs(cov).max())):
            raise ValueError("covariance is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.eigvalsh(cov).min() <= 0:
            raise ValueError("covariance is not positive definite")
        for k in range(mean.size // 2):
            block = cov[2 * k:2 * k + 2, 2 * k:2 * k + 2]
            if np.linalg.det(2.0 * block) < 1.0 - 1e-9:
                raise ValueError(f"mode {k} block violates det(2 Sigma) >= 1; not a Q-function covariance")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def modes(self) -> int:
        return self.mean.size // 2

    @property
    def complex_mean(self) -> np.ndarray:
        return self.mean[0::2] + 1j * self.mean[1::2]

    @property
    def is_thermal_like(self) -> bool:
        """Zero mean and an isotropic, uncorrelated covariance."""
        c = self.covariance
        return (
            np.allclose(self.mean, 0.0, atol=1e-12)
            and np.allclose(c, np.diag(np.diag(c)), atol=1e-12)
            and np.allclose(np.diag(c), c[0, 0], rtol=1e-12, atol=1e-12)
        )

    @classmethod
    def isotropic(cls, var: float, mean: complex = 0.0) -> "GaussianMomentSummary":
        mean = complex(mean)
        return cls(np.array([mean.real, mean.imag]), var * np.eye(2))

    @classmethod
    def from_complex_moments(cls, m1: complex, m11: float, m02: complex) -> "GaussianMomentSummary":
        """From ``<alpha>``, ``<|alpha|^2>`` and ``<alpha^2>`` (single mode)."""
        exx = 0.5 * (m11 + m02.real)
        eyy = 0.5 * (m11 - m02.real)
        exy = 0.5 * m02.imag
        mx, my = m1.real, m1.imag
        cov = np.array([[exx - mx * mx, exy - mx * my], [exy - mx * my, eyy - my * my]])
        return cls(np.array([mx, my]), cov)


def _as_points(alpha, modes):
    a = np.asarray(alpha, dtype=complex)
    if modes > 1 and (a.ndim == 0 or a.shape[-1] != modes):
        raise ValueError(f"expected points with trailing dimension {modes}")
    return a


class QFunctionModel:
    """Base class. Subclasses implement :meth:`log_q` and, when cheap, :meth:`exact_fit`."""

    modes = 1
    phase_symmetric = False
    kind = "abstract"

    def log_q(self, alpha) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, alpha):
        return np.exp(self.log_q(alpha))

    def exact_fit(self) -> GaussianMomentSummary | None:
        return None

    @property
    def backing_matrix(self) -> FockDensityMatrix | None:
        return None


def _log_u(u):
    with np.errstate(divide="ignore"):
        return np.log(u)


@dataclass(frozen=True, eq=False)
class FockQ(QFunctionModel):
    """``|alpha|^{2m} exp(-|alpha|^2) / m!``"""

    m: int
    kind = "analytic_fock"
    phase_symmetric = True

    def log_q(self, alpha):
        u = np.abs(np.asarray(alpha, dtype=complex)) ** 2
        lead = self.m * _log_u(u) if self.m else 0.0
        return lead - math.lgamma(self.m + 1.0) - u

    def exact_fit(self):
        return GaussianMomentSummary.isotropic(0.5 * (self.m + 1))


@dataclass(frozen=True, eq=False)
class PATSQ(QFunctionModel):
    """Photon-added thermal state: ``(1-x)^{m+1} |alpha|^{2m} exp(-(1-x)|alpha|^2) / m!``"""

    m: int
    x: float
    kind = "analytic_pats"
    phase_symmetric = True

    def log_q(self, alpha):
        u = np.abs(np.asarray(alpha, dtype=complex)) ** 2
        lead = self.m * _log_u(u) if self.m else 0.0
        return (self.m + 1) * math.log1p(-self.x) + lead - math.lgamma(self.m + 1.0) - (1.0 - self.x) * u

    def exact_fit(self):
        return GaussianMomentSummary.isotropic(0.5 * (self.m + 1) / (1.0 - self.x))


@dataclass(frozen=True, eq=False)
class PhaseAveragedQ(QFunctionModel):
    """``exp(-(|alpha|^2 + |beta|^2)) I0(2 |alpha| |beta|)``"""

    beta_abs: float
    kind = "analytic_phase_averaged"
    phase_symmetric = True

    def log_q(self, alpha):
        r = np.abs(np.asarray(alpha, dtype=complex))
        b = self.beta_abs
        return -(r - b) ** 2 + (log_bessel_i0(2.0 * r * b) - 2.0 * r * b)

    def exact_fit(self):
        return GaussianMomentSummary.isotropic(0.5 * (1.0 + self.beta_abs ** 2))


@dataclass(frozen=True, eq=False)
class GaussianQ(QFunctionModel):
    """Gaussian Q function with the given moments (any number of modes)."""

    summary: GaussianMomentSummary
    kind = "analytic_gaussian"

    @property
    def modes(self):
        return self.summary.modes

    @property
    def phase_symmetric(self):
        return self.modes == 1 and self.summary.is_thermal_like

    def log_q(self, alpha):
        a = _as_points(alpha, self.modes)
        if self.modes == 1:
            a = a[..., None]
        x = np.empty(a.shape[:-1] + (2 * self.modes,))
        x[..., 0::2] = a.real
        x[..., 1::2] = a.imag
        d = x - self.summary.mean
        prec = np.linalg.inv(self.summary.covariance)
        quad_form = np.einsum("...i,ij,...j->...", d, prec, d)
        _, logdet = np.linalg.slogdet(self.summary.covariance)
        return -0.5 * quad_form - self.modes * math.log(2.0) - 0.5 * logdet

    def exact_fit(self):
        return self.summary


@dataclass(frozen=True, eq=False)
class MatrixQ(QFunctionModel):
    """``<alpha|rho|alpha>`` from a truncated density matrix."""

    rho: FockDensityMatrix
    kind = "from_matrix"

    @property
    def phase_symmetric(self):
        return self.rho.is_diagonal

    @property
    def backing_matrix(self):
        return self.rho

    def log_q(self, alpha):
        a = np.asarray(alpha, dtype=complex)
        flat = a.ravel()
        q = kernels.q_from_matrix(flat.real, flat.imag, self.rho.elements, self.rho.is_diagonal)
        with np.errstate(divide="ignore"):
            out = np.where(q > 0, np.log(np.where(q > 0, q, 1.0)), -np.inf)
        return out.reshape(a.shape)

    def exact_fit(self):
        rho = self.rho
        m1 = anti_normal_moment(rho, 0, 1)
        m11 = anti_normal_moment(rho, 1, 1).real
        m02 = anti_normal_moment(rho, 0, 2)
        return GaussianMomentSummary.from_complex_moments(m1, m11, m02)


def _rotation_block(theta):
    """Real 2x2 action of ``alpha -> exp(-i theta) alpha``."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def real_representation(U: np.ndarray) -> np.ndarray:
    """Real ``2n x 2n`` matrix of ``alpha -> U alpha`` in (Re, Im) pairs."""
    n = U.shape[0]
    out = np.zeros((2 * n, 2 * n))
    for i in range(n):
        for j in range(n):
            a, b = U[i, j].real, U[i, j].imag
            out[2 * i:2 * i + 2, 2 * j:2 * j + 2] = [[a, -b], [b, a]]
    return out


def _transform_fit(inner: QFunctionModel, M: np.ndarray, shift: np.ndarray | None = None):
    fit = inner.exact_fit()
    if fit is None:
        return None
    mean = M @ fit.mean + (0.0 if shift is None else shift)
    return GaussianMomentSummary(mean, M @ fit.covariance @ M.T)


@dataclass(frozen=True, eq=False)
class Scaled(QFunctionModel):
    """``lambda^{2n} Q(lambda alpha)``"""

    lam: float
    inner: QFunctionModel
    kind = "scaled"

    @property
    def modes(self):
        return self.inner.modes

    @property
    def phase_symmetric(self):
        return self.inner.phase_symmetric

    def log_q(self, alpha):
        return 2 * self.modes * math.log(self.lam) + self.inner.log_q(self.lam * np.asarray(alpha, dtype=complex))

    def exact_fit(self):
        return _transform_fit(self.inner, np.eye(2 * self.modes) / self.lam)


@dataclass(frozen=True, eq=False)
class Displaced(QFunctionModel):
    """``Q(alpha - xi)``"""

    xi: np.ndarray
    inner: QFunctionModel
    kind = "displaced"

    @property
    def modes(self):
        return self.inner.modes

    def log_q(self, alpha):
        a = _as_points(alpha, self.modes)
        shift = self.xi if self.modes > 1 else self.xi[0]
        return self.inner.log_q(a - shift)

    def exact_fit(self):
        shift = np.empty(2 * self.modes)
        shift[0::2], shift[1::2] = self.xi.real, self.xi.imag
        return _transform_fit(self.inner, np.eye(2 * self.modes), shift)


@dataclass(frozen=True, eq=False)
class Rotated(QFunctionModel):
    """Phase rotation ``exp(-i theta n)`` of every mode: ``Q(exp(i theta) alpha)``."""

    theta: float
    inner: QFunctionModel
    kind = "rotated"

    @property
    def modes(self):
        return self.inner.modes

    @property
    def phase_symmetric(self):
        return self.inner.phase_symmetric

    def log_q(self, alpha):
        return self.inner.log_q(np.exp(1j * self.theta) * np.asarray(alpha, dtype=complex))

    def exact_fit(self):
        M = np.kron(np.eye(self.modes), _rotation_block(self.theta))
        return _transform_fit(self.inner, M)


@dataclass(frozen=True, eq=False)
class Product(QFunctionModel):
    """Tensor product of single-mode models."""

    factors: tuple
    kind = "product"

    @property
    def modes(self):
        return sum(f.modes for f in self.factors)

    def log_q(self, alpha):
        a = _as_points(alpha, self.modes)
        out = 0.0
        k = 0
        for f in self.factors:
            part = a[..., k] if f.modes == 1 else a[..., k:k + f.modes]
            out = out + f.log_q(part)
            k += f.modes
        return out

    def exact_fit(self):
        fits = [f.exact_fit() for f in self.factors]
        if any(f is None for f in fits):
            return None
        cov = np.zeros((2 * self.modes, 2 * self.modes))
        k = 0
        for f in fits:
            n = f.mean.size
            cov[k:k + n, k:k + n] = f.covariance
            k += n
        return GaussianMomentSummary(np.concatenate([f.mean for f in fits]), cov)


@dataclass(frozen=True, eq=False)
class LinearMixed(QFunctionModel):
    """Output of a passive linear system ``U``: ``Q_in(U^dagger alpha)``."""

    U: np.ndarray
    inner: QFunctionModel
    kind = "linear_mixed"

    @property
    def modes(self):
        return self.inner.modes

    def log_q(self, alpha):
        a = _as_points(alpha, self.modes)
        return self.inner.log_q(a @ self.U.conj())

    def exact_fit(self):
        return _transform_fit(self.inner, real_representation(self.U))


# --- constructors -------------------------------------------------------------


def fock_q(m: int) -> FockQ:
    return FockQ(int(m))


def pats_q(m: int, x: float) -> PATSQ:
    if not 0.0 <= x < 1.0:
        raise ValueError("x must lie in [0, 1)")
    return PATSQ(int(m), float(x))


def phase_averaged_q(beta_abs: float) -> PhaseAveragedQ:
    if beta_abs < 0:
        raise ValueError("beta_abs must be >= 0")
    return PhaseAveragedQ(float(beta_abs))


def gaussian_q(summary: GaussianMomentSummary) -> GaussianQ:
    return GaussianQ(summary)


def vacuum_q() -> GaussianQ:
    return GaussianQ(GaussianMomentSummary.isotropic(0.5))


def coherent_q(beta: complex) -> GaussianQ:
    return GaussianQ(GaussianMomentSummary.isotropic(0.5, complex(beta)))


def thermal_q(nbar: float) -> GaussianQ:
    return GaussianQ(GaussianMomentSummary.isotropic(0.5 * (nbar + 1.0)))


def from_matrix(rho: FockDensityMatrix) -> MatrixQ:
    return MatrixQ(rho)


def model_for(spec: StateFamilySpec) -> QFunctionModel:
    """Analytic Q model of a catalog state."""
    if spec.family == "fock":
        return fock_q(spec.m)
    if spec.family == "pats":
        return pats_q(spec.m, spec.x)
    if spec.family == "thermal":
        return thermal_q(spec.thermal_nbar)
    if spec.family == "phase_averaged_coherent":
        return phase_averaged_q(spec.beta_abs)
    return coherent_q(spec.beta)


def matrix_model_for(spec: StateFamilySpec, cutoff: int | None = None) -> MatrixQ:
    return MatrixQ(make_state(spec, cutoff))


def scale(model: QFunctionModel, lam: float) -> QFunctionModel:
    """Uniform phase-space scaling ``Q -> lambda^{2n} Q(lambda alpha)``; ``0 < lambda <= 1``."""
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"scale factor must satisfy 0 < lambda <= 1, got {lam}")
    if lam == 1.0:
        return model
    return Scaled(float(lam), model)


def displace(model: QFunctionModel, xi) -> Displaced:
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    if xi.size != model.modes:
        raise ValueError("displacement must have one entry per mode")
    return Displaced(xi, model)


def rotate(model: QFunctionModel, theta: float) -> Rotated:
    return Rotated(float(theta), model)


def product(*models: QFunctionModel) -> Product:
    if sum(m.modes for m in models) > 2:
        raise ValueError("only up to two modes are supported")
    return Product(tuple(models))


def beam_splitter(theta: float = math.pi / 4, phi: float = 0.0) -> np.ndarray:
    """``[[cos t, -e^{-i phi} sin t], [e^{i phi} sin t, cos t]]``; 50:50 by default."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -np.exp(-1j * phi) * s], [np.exp(1j * phi) * s, c]], dtype=complex)


def check_unitary(U) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise ValueError("only 2x2 passive transformations are supported")
    if np.abs(U.conj().T @ U - np.eye(2)).max() > UNITARY_TOL:
        raise ValueError("matrix is not unitary")
    return U


def linear_mix(U, model: QFunctionModel) -> LinearMixed:
    if model.modes != 2:
        raise ValueError("passive mixing acts on a two-mode model")
    return LinearMixed(check_unitary(U), model)


def beamsplit(a: QFunctionModel, b: QFunctionModel, U=None) -> LinearMixed:
    """Two single-mode inputs through the passive system ``U`` (50:50 by default)."""
    if a.modes != 1 or b.modes != 1:
        raise ValueError("beamsplit takes two single-mode models")
    U = beam_splitter() if U is None else U
    return linear_mix(U, Product((a, b)))


def q_eval(model: QFunctionModel, alpha):
    """Evaluate Q at one point or a batch of points."""
    out = model(alpha)
    return float(out) if np.ndim(out) == 0 else out


# --- moments -------------------------------------------------------------------


def _search_spread(model: QFunctionModel) -> float:
    """Crude squared-radius scale for models without exact moments."""
    phi = 2.0 * np.pi * np.arange(16) / 16
    u = 1.0
    while u < 1e6:
        if np.max(model.log_q(math.sqrt(u) * np.exp(1j * phi))) < -40.0:
            return u / 8.0
        u *= 2.0
    raise RuntimeError("could not locate the support of the Q function")


def quadrature_moments(model: QFunctionModel, max_order: int,
                       quad: QuadratureSpec | None = None) -> dict[tuple[int, int], complex]:
    """``<conj(alpha)^p alpha^q>`` (``p + q <= max_order``) of a single-mode model by 2D quadrature."""
    if model.modes != 1:
        raise ValueError("quadrature moments are implemented for single-mode models")
    quad = quad or QuadratureSpec(target_abs_err=1e-12)
    fit = model.exact_fit()
    spread = float(np.trace(fit.covariance)) + abs(fit.complex_mean[0]) ** 2 if fit else _search_spread(model)
    grid = polar_grid(model.log_q, 0.0, spread, quad)
    return moments_on_grid(np.exp(model.log_q(grid.points)), grid, max_order)


def gaussian_fit(model: QFunctionModel, quad: QuadratureSpec | None = None) -> GaussianMomentSummary:
    """Mean and covariance of Q; exact when the model knows them, else by quadrature."""
    fit = model.exact_fit()
    if fit is not None:
        return fit
    mom = quadrature_moments(model, 2, quad)
    return GaussianMomentSummary.from_complex_moments(mom[(0, 1)], mom[(1, 1)].real, mom[(0, 2)])
