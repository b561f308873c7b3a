"""Truncated Fock-basis density matrices for the single-mode state families.

Conventions: the basis is ``|0>, ..., |cutoff-1>``; ``a|n> = sqrt(n)|n-1>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps
from scipy.special import betainc, gammainc, gammaln

TAIL_TOL = 1e-10
MIN_CUTOFF = 32
PSD_TOL = 1e-10


class TruncationError(ValueError):
    """The requested cutoff cannot represent the state or operator to tolerance."""


class DomainError(ValueError):
    """A state parameter is outside its physical range."""


def _is_diagonal(a: np.ndarray) -> bool:
    return np.count_nonzero(a) == np.count_nonzero(np.diagonal(a))


@dataclass(frozen=True)
class FockDensityMatrix:
    """Density operator truncated to ``cutoff`` Fock levels.

    ``tail_mass`` is the analytic probability lying above the cutoff (0 when unknown
    or exactly zero). The stored array is made read-only.
    """

    elements: np.ndarray
    tail_mass: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        rho = np.array(self.elements, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 1:
            raise ValueError("density matrix must be square with cutoff >= 1")
        if not (_is_diagonal(rho) and not np.diagonal(rho).imag.any()) and not np.array_equal(rho, rho.conj().T):
            raise ValueError("density matrix is not exactly Hermitian")
        if self.tail_mass < 0:
            raise ValueError("tail_mass must be >= 0")
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > self.tail_mass + 1e-12:
            raise ValueError(f"trace {tr!r} is not 1 within tail mass {self.tail_mass:g}")
        lam_min = float(np.min(self._spectrum(rho)))
        if lam_min < -PSD_TOL:
            raise ValueError(f"density matrix not positive semidefinite (min eigenvalue {lam_min:g})")
        rho.setflags(write=False)
        object.__setattr__(self, "elements", rho)

    @staticmethod
    def _spectrum(rho):
        if _is_diagonal(rho):
            return np.sort(np.diagonal(rho).real)
        return np.linalg.eigvalsh(rho)

    @classmethod
    def hermitian(cls, elements, tail_mass=0.0, label=""):
        """Build from a numerically Hermitian array by exact symmetrization."""
        a = np.asarray(elements, dtype=np.complex128)
        return cls(0.5 * (a + a.conj().T), tail_mass, label)

    @property
    def cutoff(self) -> int:
        return self.elements.shape[0]

    @property
    def is_diagonal(self) -> bool:
        return _is_diagonal(self.elements)

    @property
    def populations(self) -> np.ndarray:
        return self.elements.diagonal().real.copy()

    def eigenvalues(self) -> np.ndarray:
        return self._spectrum(self.elements)

    def padded(self, cutoff: int) -> "FockDensityMatrix":
        """Embed into a larger basis (zeros in the new rows/columns)."""
        if cutoff < self.cutoff:
            raise TruncationError("cannot pad to a smaller cutoff")
        out = np.zeros((cutoff, cutoff), dtype=np.complex128)
        out[: self.cutoff, : self.cutoff] = self.elements
        return FockDensityMatrix(out, self.tail_mass, self.label)


@dataclass(frozen=True)
class StateFamilySpec:
    """One member of the catalog: ``fock``, ``thermal``, ``pats``,
    ``phase_averaged_coherent`` or ``coherent``."""

    family: str
    m: int = 0
    x: float = 0.0
    beta_abs: float = 0.0
    beta: complex = 0.0

    FAMILIES = ("fock", "thermal", "pats", "phase_averaged_coherent", "coherent")

    def __post_init__(self):
        if self.family not in self.FAMILIES:
            raise DomainError(f"unknown state family {self.family!r}")
        if self.m < 0 or int(self.m) != self.m:
            raise DomainError("photon number m must be a non-negative integer")
        if not 0.0 <= self.x < 1.0:
            raise DomainError(f"Boltzmann parameter x must lie in [0, 1), got {self.x}")
        if self.beta_abs < 0:
            raise DomainError("beta_abs must be >= 0")

    @classmethod
    def fock(cls, m):
        return cls("fock", m=m)

    @classmethod
    def thermal(cls, x):
        return cls("thermal", x=x)

    @classmethod
    def pats(cls, m, x):
        return cls("pats", m=m, x=x)

    @classmethod
    def phase_averaged(cls, beta_abs):
        return cls("phase_averaged_coherent", beta_abs=beta_abs)

    @classmethod
    def coherent(cls, beta):
        return cls("coherent", beta=complex(beta))

    @property
    def label(self) -> str:
        if self.family == "fock":
            return f"fock({self.m})"
        if self.family == "thermal":
            return f"thermal({self.x:g})"
        if self.family == "pats":
            return f"pats({self.m},{self.x:g})"
        if self.family == "phase_averaged_coherent":
            return f"phase_averaged({self.beta_abs:g})"
        return f"coherent({self.beta:g})"

    @property
    def thermal_nbar(self) -> float:
        """Mean photon number of the moment-matched Gaussian (all families are phase
        symmetric except ``coherent``)."""
        if self.family == "fock":
            return float(self.m)
        if self.family == "thermal":
            return self.x / (1.0 - self.x)
        if self.family == "pats":
            return (self.m + self.x) / (1.0 - self.x)
        if self.family == "phase_averaged_coherent":
            return self.beta_abs ** 2
        return 0.0


def _log_populations(spec: StateFamilySpec, k: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        if spec.family == "fock":
            return np.where(k == spec.m, 0.0, -np.inf)
        if spec.family in ("thermal", "pats"):
            m, x = (0 if spec.family == "thermal" else spec.m), spec.x
            j = k - m
            if x == 0.0:
                return np.where(j == 0, 0.0, -np.inf)
            out = np.full(k.shape, -np.inf)
            ok = j >= 0
            kk, jj = k[ok], j[ok]
            log_binom = gammaln(kk + 1.0) - gammaln(m + 1.0) - gammaln(jj + 1.0)
            out[ok] = (m + 1) * math.log1p(-x) + log_binom + jj * math.log(x)
            return out
        mu = spec.beta_abs ** 2 if spec.family == "phase_averaged_coherent" else abs(spec.beta) ** 2
        if mu == 0.0:
            return np.where(k == 0, 0.0, -np.inf)
        return k * math.log(mu) - mu - gammaln(k + 1.0)


def tail_mass(spec: StateFamilySpec, cutoff: int) -> float:
    """Probability of photon numbers ``>= cutoff``."""
    n = cutoff
    if spec.family == "fock":
        return 0.0 if spec.m < n else 1.0
    if spec.family in ("thermal", "pats"):
        m = 0 if spec.family == "thermal" else spec.m
        j = n - m  # number of "failures" of the negative binomial in k - m
        if j <= 0:
            return 1.0
        if spec.x == 0.0:
            return 0.0
        return float(betainc(j, m + 1, spec.x))
    mu = spec.beta_abs ** 2 if spec.family == "phase_averaged_coherent" else abs(spec.beta) ** 2
    if mu == 0.0:
        return 0.0
    return float(gammainc(n, mu))


def default_cutoff(spec: StateFamilySpec, tol: float = TAIL_TOL) -> int:
    """``max(32, smallest N with tail_mass(spec, N) < tol)``."""
    hi = 1
    while tail_mass(spec, hi) >= tol:
        hi *= 2
    lo = hi // 2  # tail(lo) >= tol unless lo == 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_mass(spec, mid) < tol:
            hi = mid
        else:
            lo = mid
    return max(MIN_CUTOFF, hi)


def make_state(spec: StateFamilySpec, cutoff: int | None = None) -> FockDensityMatrix:
    """Density matrix of a catalog state.

    Raises :class:`TruncationError` if ``cutoff`` leaves more than ``1e-10`` of
    probability outside the basis.
    """
    if cutoff is None:
        cutoff = default_cutoff(spec)
    if cutoff < 1:
        raise TruncationError("cutoff must be >= 1")
    tail = tail_mass(spec, cutoff)
    if tail >= TAIL_TOL:
        raise TruncationError(
            f"cutoff {cutoff} leaves tail mass {tail:.3g} >= {TAIL_TOL:g} for {spec.label}; "
            f"use cutoff >= {default_cutoff(spec)}"
        )
    k = np.arange(cutoff)
    if spec.family == "coherent":
        beta = spec.beta
        logmag = np.where(k == 0, 0.0, k * math.log(abs(beta)) if beta != 0 else -np.inf)
        logmag = logmag - 0.5 * gammaln(k + 1.0) - 0.5 * abs(beta) ** 2
        vec = np.exp(logmag) * np.exp(1j * k * np.angle(beta))
        rho = np.outer(vec, vec.conj())
        return FockDensityMatrix.hermitian(rho, tail, spec.label)
    pops = np.exp(_log_populations(spec, k))
    return FockDensityMatrix(np.diag(pops).astype(np.complex128), tail, spec.label)


def thermal_matrix(nbar: float, cutoff: int | None = None) -> FockDensityMatrix:
    x = nbar / (nbar + 1.0)
    return make_state(StateFamilySpec.thermal(x), cutoff)


def annihilation(cutoff: int) -> sps.csr_matrix:
    return sps.diags(np.sqrt(np.arange(1, cutoff, dtype=float)), 1, format="csr", dtype=np.complex128)


def _power(op, k, dim):
    out = sps.identity(dim, format="csr", dtype=np.complex128)
    for _ in range(k):
        out = out @ op
    return out


def _trace_with(rho: np.ndarray, op: sps.spmatrix) -> complex:
    # Tr(rho op) = sum_ij rho_ij op_ji
    return complex(op.multiply(rho.T).sum())


def anti_normal_moment(rho: FockDensityMatrix, p: int, q: int) -> complex:
    """``Tr(rho a^q a^dagger^p)``, the Q-function moment ``<conj(alpha)^p alpha^q>``.

    The state is embedded in a basis ``p`` levels larger so the creation operators act
    without truncation.
    """
    if p < 0 or q < 0:
        raise ValueError("moment orders must be non-negative")
    if 2 * (p + q) > rho.cutoff:
        raise TruncationError(f"moment order {p + q} too high for cutoff {rho.cutoff}")
    dim = rho.cutoff + p
    a = annihilation(dim)
    op = _power(a, q, dim) @ _power(a.getH(), p, dim)
    big = np.zeros((dim, dim), dtype=np.complex128)
    big[: rho.cutoff, : rho.cutoff] = rho.elements
    return _trace_with(big, op)


def normal_moment(rho: FockDensityMatrix, p: int, q: int) -> complex:
    """``Tr(rho a^dagger^p a^q)``; exact on the truncated basis."""
    if p < 0 or q < 0:
        raise ValueError("moment orders must be non-negative")
    if 2 * (p + q) > rho.cutoff:
        raise TruncationError(f"moment order {p + q} too high for cutoff {rho.cutoff}")
    a = annihilation(rho.cutoff)
    op = _power(a.getH(), p, rho.cutoff) @ _power(a, q, rho.cutoff)
    return _trace_with(rho.elements, op)


def von_neumann_entropy(rho: FockDensityMatrix) -> float:
    lam = rho.eigenvalues()
    if lam.min() < -PSD_TOL or lam.max() > 1.0 + PSD_TOL:
        raise ValueError("eigenvalues outside [0, 1] beyond tolerance")
    lam = np.clip(lam, 0.0, 1.0)
    lam = lam[lam > 0.0]
    return float(-np.sum(lam * np.log(lam)))


def hs_inner(rho: FockDensityMatrix, sigma: FockDensityMatrix) -> float:
    """Hilbert-Schmidt inner product ``Tr(rho sigma)``."""
    if rho.cutoff != sigma.cutoff:
        raise TruncationError(f"cutoff mismatch: {rho.cutoff} vs {sigma.cutoff}")
    if rho.is_diagonal or sigma.is_diagonal:
        val = np.dot(rho.elements.diagonal(), sigma.elements.diagonal())
    else:
        val = np.einsum("ij,ji->", rho.elements, sigma.elements)
    if abs(val.imag) > 1e-12:
        raise ValueError("Tr(rho sigma) has a non-negligible imaginary part")
    return float(val.real)


def rotate_state(rho: FockDensityMatrix, theta: float) -> FockDensityMatrix:
    """Apply ``exp(-i theta n)``: ``rho_mn -> exp(-i theta (m - n)) rho_mn``."""
    k = np.arange(rho.cutoff)
    phase = np.exp(-1j * theta * (k[:, None] - k[None, :]))
    return FockDensityMatrix.hermitian(rho.elements * phase, rho.tail_mass, rho.label)


def phase_average(rho: FockDensityMatrix) -> FockDensityMatrix:
    """Uniform average over all phase rotations (drops the off-diagonal part)."""
    return FockDensityMatrix(np.diag(rho.elements.diagonal().real).astype(np.complex128), rho.tail_mass, rho.label)
