import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wehrlng.fock import StateFamilySpec, anti_normal_moment, make_state, rotate_state
from wehrlng.qfunc import (
    GaussianMomentSummary,
    beam_splitter,
    beamsplit,
    check_unitary,
    coherent_q,
    displace,
    fock_q,
    from_matrix,
    gaussian_fit,
    matrix_model_for,
    model_for,
    pats_q,
    phase_averaged_q,
    product,
    quadrature_moments,
    rotate,
    scale,
    thermal_q,
    vacuum_q,
)

RNG = np.random.default_rng(20240611)
POINTS = (RNG.uniform(-4, 4, 10_000) + 1j * RNG.uniform(-4, 4, 10_000))

CATALOG = [
    StateFamilySpec.fock(0),
    StateFamilySpec.fock(2),
    StateFamilySpec.fock(7),
    StateFamilySpec.thermal(0.5),
    StateFamilySpec.coherent(0.6 + 0.4j),
    StateFamilySpec.pats(1, 0.3),
    StateFamilySpec.pats(3, 0.7),
    StateFamilySpec.phase_averaged(1.5),
]


def fock_q_direct(m, alpha):
    u = np.abs(alpha) ** 2
    return np.exp(-u) * u ** m / math.factorial(m)


@pytest.mark.parametrize("spec", CATALOG, ids=lambda s: s.label)
def test_analytic_matches_matrix(spec):
    a = model_for(spec)(POINTS)
    b = matrix_model_for(spec)(POINTS)
    np.testing.assert_allclose(a, b, atol=1e-10)


@pytest.mark.parametrize("spec", CATALOG, ids=lambda s: s.label)
def test_q_bounded(spec):
    q = model_for(spec)(POINTS)
    assert np.all(q >= 0) and np.all(q <= 1 + 1e-15)


def test_fock_direct_formula():
    for m in (0, 1, 4):
        np.testing.assert_allclose(fock_q(m)(POINTS), fock_q_direct(m, POINTS), rtol=1e-12, atol=1e-300)


@given(st.integers(0, 6), st.floats(0.0, 0.95))
@settings(max_examples=25, deadline=None)
def test_pats_is_scaled_fock(m, x):
    lam = math.sqrt(1 - x)
    direct = lam ** 2 * fock_q_direct(m, lam * POINTS)
    np.testing.assert_allclose(pats_q(m, x)(POINTS), direct, rtol=1e-11, atol=1e-300)
    if x > 0:
        np.testing.assert_allclose(scale(fock_q(m), lam)(POINTS), direct, rtol=1e-11, atol=1e-300)


@pytest.mark.parametrize("spec", CATALOG, ids=lambda s: s.label)
def test_normalization_and_low_moments(spec):
    mom = quadrature_moments(model_for(spec), 2)
    assert mom[(0, 0)].real == pytest.approx(1.0, abs=1e-10)
    rho = make_state(spec)
    assert mom[(1, 1)] == pytest.approx(anti_normal_moment(rho, 1, 1), abs=1e-8)


def test_rotation_matches_state_rotation():
    rho = make_state(StateFamilySpec.coherent(1.0 - 0.3j))
    theta = 0.7
    a = rotate(from_matrix(rho), theta)(POINTS)
    b = from_matrix(rotate_state(rho, theta))(POINTS)
    np.testing.assert_allclose(a, b, atol=1e-13)


def test_displacement_moves_coherent_state():
    np.testing.assert_allclose(displace(vacuum_q(), 0.6 + 0.4j)(POINTS), coherent_q(0.6 + 0.4j)(POINTS), atol=1e-15)


def test_wrappers_commute():
    base = pats_q(1, 0.3)
    a = rotate(scale(base, 0.6), 1.1)
    b = scale(rotate(base, 1.1), 0.6)
    np.testing.assert_allclose(a(POINTS), b(POINTS), atol=1e-15)
    # rotation of a phase-symmetric model is a no-op
    np.testing.assert_allclose(rotate(base, 1.1)(POINTS), base(POINTS), atol=1e-15)


def test_exact_fit_follows_transforms():
    base = fock_q(2)
    moved = displace(rotate(scale(base, 0.5), 0.3), 1 + 0.5j)
    fit = moved.exact_fit()
    np.testing.assert_allclose(fit.covariance, np.eye(2) * 1.5 / 0.25, atol=1e-12)
    assert fit.complex_mean[0] == pytest.approx(1 + 0.5j)
    mom = quadrature_moments(moved, 2)
    assert mom[(0, 1)] == pytest.approx(1 + 0.5j, abs=1e-9)


def test_gaussian_fit_by_quadrature_matches_exact():
    rho = make_state(StateFamilySpec.pats(2, 0.4))
    fit = gaussian_fit(from_matrix(rho))
    exact = pats_q(2, 0.4).exact_fit()
    np.testing.assert_allclose(fit.covariance, exact.covariance, atol=1e-8)


def test_summary_rejects_unphysical_covariance():
    with pytest.raises(ValueError):
        GaussianMomentSummary(np.zeros(2), np.eye(2) * 0.2)
    with pytest.raises(ValueError):
        GaussianMomentSummary(np.zeros(2), np.array([[1.0, 0.2], [0.1, 1.0]]))


def test_product_and_beam_splitter():
    a, b = fock_q(1), pats_q(1, 0.4)
    pts = POINTS[:500].reshape(-1, 2)
    prod = product(a, b)
    np.testing.assert_allclose(prod(pts), a(pts[:, 0]) * b(pts[:, 1]), rtol=1e-13, atol=1e-300)
    U = beam_splitter()
    check_unitary(U)
    bs = beamsplit(a, b)
    inv = pts @ U.conj()
    np.testing.assert_allclose(bs(pts), prod(inv), rtol=1e-13, atol=1e-300)
    fit = bs.exact_fit()
    assert fit.modes == 2
    fit2 = beamsplit(thermal_q(1.0), vacuum_q()).exact_fit()
    # per-quadrature variances (nbar + 1)/2 = 1 and 1/2 average to 3/4
    np.testing.assert_allclose(np.diag(fit2.covariance), [0.75, 0.75, 0.75, 0.75], atol=1e-15)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        scale(fock_q(1), 1.5)
    with pytest.raises(ValueError):
        check_unitary(np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        pats_q(1, 1.0)
    with pytest.raises(ValueError):
        product(fock_q(1), fock_q(1), fock_q(1))


def test_phase_averaged_zero_is_vacuum():
    np.testing.assert_allclose(phase_averaged_q(0.0)(POINTS), vacuum_q()(POINTS), atol=1e-15)
