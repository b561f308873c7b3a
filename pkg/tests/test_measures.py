import math

import numpy as np
import pytest

from wehrlng.fock import StateFamilySpec, make_state
from wehrlng.measures import (
    UnsupportedStateError,
    delta1,
    delta2,
    gaussian_reference,
    ng_fock_closed,
    ng_measure,
    thermal_entropy,
)
from wehrlng.qfunc import coherent_q, displace, fock_q, pats_q, phase_averaged_q, scale, thermal_q
from wehrlng.quadrature import QuadratureSpec

X_GRID = [0.1 * i for i in range(10)]


def test_fock_closed_values():
    assert ng_fock_closed(0) == 0.0
    assert ng_fock_closed(1) == pytest.approx(math.log(2) - 0.5772156649015329, abs=1e-15)
    # large-m behaviour: 1/2 log m + 1/2 - 1/2 log(2 pi) + O(1/m)
    m = 2000
    assert ng_fock_closed(m) == pytest.approx(0.5 * math.log(m) + 0.5 - 0.5 * math.log(2 * math.pi), abs=1e-3)


def test_fock_curve_increasing():
    vals = [ng_measure(fock_q(m)).value for m in range(21)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    for m, v in enumerate(vals):
        assert v == pytest.approx(ng_fock_closed(m), abs=1e-8)


@pytest.mark.parametrize("model", [thermal_q(0.0), thermal_q(2.5), coherent_q(1 - 2j)], ids=["vac", "th", "coh"])
def test_gaussian_states_score_zero(model):
    rep = ng_measure(model)
    assert abs(rep.value) < 1e-8
    assert rep.metadata["raw_value"] >= -2 * rep.est_error - 1e-15


def test_pats_flat_in_temperature():
    for m in (1, 2):
        vals = [ng_measure(pats_q(m, x)).value for x in X_GRID]
        assert np.ptp(vals) < 1e-9


def test_ng_invariant_under_transforms():
    base = ng_measure(pats_q(2, 0.4)).value
    moved = displace(scale(pats_q(2, 0.4), 0.7), -0.3 + 1.2j)
    assert ng_measure(moved).value == pytest.approx(base, abs=1e-8)


def test_matrix_input():
    rho = make_state(StateFamilySpec.pats(1, 0.6))
    assert ng_measure(rho).value == pytest.approx(ng_fock_closed(1), abs=1e-8)


def test_phase_averaged_curve_monotone():
    vals = [ng_measure(phase_averaged_q(math.sqrt(b))).value for b in np.arange(0, 5.01, 0.25)]
    assert abs(vals[0]) < 1e-8
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_delta1_fock_values():
    # delta1(fock m) = (1 + P - 2 p_m) / 2 with thermal purity P = 1/(2m+1)
    for m in (1, 2, 5):
        nb = float(m)
        pm = nb ** m / (nb + 1) ** (m + 1)
        expect = (1 + 1 / (2 * nb + 1) - 2 * pm) / 2
        assert delta1(make_state(StateFamilySpec.fock(m))).value == pytest.approx(expect, abs=1e-10)
    assert delta1(make_state(StateFamilySpec.fock(1))).value == pytest.approx(5 / 12, abs=1e-12)


def test_delta_measures_vanish_on_thermal():
    tau = make_state(StateFamilySpec.thermal(0.4))
    assert delta1(tau).value == pytest.approx(0.0, abs=1e-9)
    assert delta2(tau).value == pytest.approx(0.0, abs=1e-8)


def test_delta2_fock():
    assert delta2(make_state(StateFamilySpec.fock(1))).value == pytest.approx(2 * math.log(2), abs=1e-12)
    for m in range(6):
        assert delta2(make_state(StateFamilySpec.fock(m))).value == pytest.approx(thermal_entropy(m), abs=1e-12)


def test_delta_curves_vary_with_temperature():
    d1 = [delta1(make_state(StateFamilySpec.pats(1, x))).value for x in X_GRID]
    d2 = [delta2(make_state(StateFamilySpec.pats(1, x))).value for x in X_GRID]
    assert np.ptp(d1) > 0.1 and np.ptp(d2) > 0.1
    assert all(v > 0 for v in d1 + d2)


def test_reference_is_thermal_for_phase_symmetric_states():
    ref = gaussian_reference(make_state(StateFamilySpec.pats(2, 0.5)))
    # the truncated tail (mass 1e-10) carries most of the missing photon number
    assert ref.thermal_nbar == pytest.approx((2 + 0.5) / 0.5, abs=1e-8)
    assert ref.matrix is not None


def test_displaced_state_unsupported_for_delta():
    rho = make_state(StateFamilySpec.coherent(0.5 + 0.5j))
    with pytest.raises(UnsupportedStateError):
        delta1(rho)
    assert gaussian_reference(rho).thermal_nbar is None


def test_thermal_entropy_limits():
    assert thermal_entropy(0.0) == 0.0
    assert thermal_entropy(1.0) == pytest.approx(2 * math.log(2))
    with pytest.raises(ValueError):
        thermal_entropy(-1.0)


def test_small_negative_values_are_clamped():
    rep = ng_measure(thermal_q(1.0), QuadratureSpec(target_abs_err=1e-6))
    assert rep.value >= -2 * rep.est_error
