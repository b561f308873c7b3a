import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import comb

from wehrlng.fock import (
    DomainError,
    FockDensityMatrix,
    StateFamilySpec,
    TruncationError,
    anti_normal_moment,
    default_cutoff,
    hs_inner,
    make_state,
    normal_moment,
    phase_average,
    rotate_state,
    tail_mass,
    thermal_matrix,
    von_neumann_entropy,
)


def brute_pats(m, x, n):
    """Photon-added thermal populations by direct normalization of a^dag^m rho_th a^m."""
    p = np.zeros(n)
    for j in range(m, n):
        p[j] = comb(j, m, exact=True) * x ** (j - m)
    return p * (1 - x) ** (m + 1)


def test_pats_populations_small_case():
    rho = make_state(StateFamilySpec.pats(1, 0.5), 40)
    np.testing.assert_allclose(rho.populations[:4], [0.0, 0.25, 0.25, 0.1875], atol=1e-15)


@given(st.integers(0, 4), st.floats(0.0, 0.8))
@settings(max_examples=30, deadline=None)
def test_pats_matches_brute_force(m, x):
    spec = StateFamilySpec.pats(m, x)
    rho = make_state(spec)
    np.testing.assert_allclose(rho.populations, brute_pats(m, x, rho.cutoff), atol=1e-13)
    assert rho.tail_mass < 1e-10


def test_thermal_is_pats_zero():
    a = make_state(StateFamilySpec.thermal(0.4), 60)
    b = make_state(StateFamilySpec.pats(0, 0.4), 60)
    np.testing.assert_allclose(a.elements, b.elements, atol=1e-16)


def test_tail_mass_matches_sum():
    spec = StateFamilySpec.pats(2, 0.6)
    full = make_state(spec, 400).populations
    for n in (10, 30, 60):
        assert tail_mass(spec, n) == pytest.approx(full[n:].sum(), rel=1e-9, abs=1e-300)


def test_default_cutoff_values():
    assert default_cutoff(StateFamilySpec.fock(50)) == 51
    assert default_cutoff(StateFamilySpec.fock(3)) == 32
    n = default_cutoff(StateFamilySpec.thermal(0.5))
    spec = StateFamilySpec.thermal(0.5)
    assert tail_mass(spec, n) < 1e-10 <= tail_mass(spec, n - 1) or n == 32


def test_truncation_error():
    with pytest.raises(TruncationError):
        make_state(StateFamilySpec.thermal(0.9), 20)


@pytest.mark.parametrize("bad", [dict(family="fock", m=-1), dict(family="pats", m=1, x=1.0), dict(family="nope")])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        StateFamilySpec(**bad)


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        FockDensityMatrix(np.diag([0.5, 0.4]))
    with pytest.raises(ValueError):
        FockDensityMatrix(np.array([[0.5, 0.6], [0.6, 0.5]]))
    with pytest.raises(ValueError):
        FockDensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    rho = make_state(StateFamilySpec.fock(2), 8)
    assert not rho.elements.flags.writeable


def test_coherent_state_poisson():
    beta = 0.6 + 0.4j
    rho = make_state(StateFamilySpec.coherent(beta))
    n = np.arange(rho.cutoff)
    mu = abs(beta) ** 2
    pois = np.exp(-mu + n * math.log(mu) - np.array([math.lgamma(k + 1) for k in n]))
    np.testing.assert_allclose(rho.populations, pois, atol=1e-15)
    assert normal_moment(rho, 0, 1) == pytest.approx(beta, abs=1e-12)
    assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-10)


def test_moments_of_fock_state():
    rho = make_state(StateFamilySpec.fock(3), 32)
    assert normal_moment(rho, 1, 1) == pytest.approx(3.0)
    assert anti_normal_moment(rho, 1, 1) == pytest.approx(4.0)
    assert anti_normal_moment(rho, 2, 2) == pytest.approx(20.0)
    assert abs(anti_normal_moment(rho, 1, 0)) < 1e-15


def test_moment_order_guard():
    rho = make_state(StateFamilySpec.fock(1), 32)
    with pytest.raises(TruncationError):
        anti_normal_moment(rho, 10, 8)


def test_thermal_entropy_and_purity():
    nbar = 1.5
    s = (nbar + 1) * math.log1p(nbar) - nbar * math.log(nbar)
    # the default cutoff drops 1e-10 of mass, which shifts the entropy by ~1e-9
    assert von_neumann_entropy(thermal_matrix(nbar)) == pytest.approx(s, abs=1e-8)
    tau = thermal_matrix(nbar, 200)
    assert von_neumann_entropy(tau) == pytest.approx(s, abs=1e-12)
    assert hs_inner(tau, tau) == pytest.approx(1.0 / (2 * nbar + 1), abs=1e-10)


def test_rotation_and_phase_average():
    rho = make_state(StateFamilySpec.coherent(1.0 + 0.0j))
    r = rotate_state(rho, math.pi / 2)
    assert normal_moment(r, 0, 1) == pytest.approx(-1j, abs=1e-12)
    avg = phase_average(rho)
    assert avg.is_diagonal
    np.testing.assert_allclose(avg.populations, rho.populations)


def test_phase_averaged_family_matches_average():
    spec = StateFamilySpec.phase_averaged(1.2)
    a = make_state(spec)
    b = phase_average(make_state(StateFamilySpec.coherent(1.2), a.cutoff))
    np.testing.assert_allclose(a.elements, b.elements, atol=1e-15)
