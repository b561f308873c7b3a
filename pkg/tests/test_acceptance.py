"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line with the measured numbers and
then asserts at the stated tolerance. Run with ``pytest -v tests/test_acceptance.py`` or
directly as a script for the summary lines only.
"""
import math
import time

import numpy as np
import pytest

from wehrlng import suites
from wehrlng.cumulants import cumulants, s_invariance_report
from wehrlng.entropy import wehrl, wehrl_fock_closed
from wehrlng.fock import StateFamilySpec, anti_normal_moment, default_cutoff, make_state
from wehrlng.measures import delta1, delta2, ng_fock_closed, ng_measure, thermal_entropy
from wehrlng.qfunc import beamsplit, fock_q, model_for, pats_q, phase_averaged_q, product, quadrature_moments, vacuum_q
from wehrlng.quadrature import QuadratureSpec

T0 = time.perf_counter()
X_GRID = [round(0.1 * i, 1) for i in range(10)]
RADIAL = QuadratureSpec()


def report(capsys, n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def criterion_1():
    errs = [abs(wehrl(fock_q(m), RADIAL, "radial").value - wehrl_fock_closed(m)) for m in range(16)]
    vac = abs(wehrl(fock_q(0), RADIAL, "radial").value - 1.0)
    ok = max(errs) < 1e-7 and vac < 1e-9
    return ok, f"max |H - closed| over m=0..15 = {max(errs):.2e} (tol 1e-7); |H(vacuum) - 1| = {vac:.2e} (tol 1e-9)"


def criterion_2():
    vals = [ng_measure(fock_q(m), RADIAL).value for m in range(16)]
    err = max(abs(v - ng_fock_closed(m)) for m, v in enumerate(vals))
    m1 = abs(vals[1] - 0.115931)
    curve = [ng_measure(fock_q(m), RADIAL).value for m in range(51)]
    increasing = all(b > a for a, b in zip(curve, curve[1:]))
    rel50 = abs(curve[50] - math.log(51)) / math.log(51)
    parts = {
        "closed-form match": err < 1e-6,
        "m=1 value": m1 < 1e-6,
        "strictly increasing to m=50": increasing,
        "within 10% of ln(m+1) at m=50": rel50 < 0.10,
    }
    detail = (
        f"max |N - closed| m=0..15 = {err:.2e}; N(1) = {vals[1]:.7f}; N(50) = {curve[50]:.5f} "
        f"vs ln 51 = {math.log(51):.5f} (rel. gap {rel50:.1%}); "
        + ", ".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in parts.items())
    )
    return all(parts.values()), detail


def criterion_3():
    worst_sd, worst_dev = 0.0, 0.0
    for m in (1, 2, 3):
        vals = np.array([ng_measure(pats_q(m, x), RADIAL).value for x in X_GRID])
        worst_sd = max(worst_sd, float(np.std(vals)))
        worst_dev = max(worst_dev, float(np.max(np.abs(vals - ng_fock_closed(m)))))
    ok = worst_sd < 1e-5 and worst_dev < 1e-5
    return ok, f"max stddev over x = {worst_sd:.2e}; max |N - N_fock| = {worst_dev:.2e} (tol 1e-5)"


def _pats_rho(x, m=1):
    spec = StateFamilySpec.pats(m, x)
    return make_state(spec, default_cutoff(spec))


def criterion_4():
    d_f1 = abs(delta1(make_state(StateFamilySpec.fock(1))).value - 5.0 / 12.0)
    d_f50 = delta1(make_state(StateFamilySpec.fock(50))).value
    curve = [delta1(_pats_rho(x)).value for x in X_GRID]
    spread = max(curve) - min(curve)
    ok = d_f1 < 1e-10 and abs(d_f50 - 0.5) < 0.02 and spread > 0.01
    return ok, f"|delta1(fock 1) - 5/12| = {d_f1:.2e}; delta1(fock 50) = {d_f50:.5f}; spread over x = {spread:.4f}"


def criterion_5():
    d_f1 = abs(delta2(make_state(StateFamilySpec.fock(1))).value - 2.0 * math.log(2.0))
    curve = [delta2(_pats_rho(x)).value for x in X_GRID]
    spread = max(curve) - min(curve)
    blind = max(abs(delta2(make_state(StateFamilySpec.fock(m))).value - thermal_entropy(m)) for m in range(11))
    ok = d_f1 < 1e-10 and spread > 0.01 and blind < 1e-12
    return ok, f"|delta2(fock 1) - 2 ln 2| = {d_f1:.2e}; spread over x = {spread:.4f}; max |delta2 - S(tau)| pure = {blind:.2e}"


def criterion_6():
    cols, rows = suites.invariance_suite(RADIAL, include_two_mode=False)
    ix = {c: i for i, c in enumerate(cols)}
    dh = max(r[ix["dH_dev"]] for r in rows if r[ix["transform"]] == "scale")
    dn = max(r[ix["N_dev"]] for r in rows)
    ok = dh < 2e-6 and dn < 2e-6
    return ok, f"{len(rows)} rows; max |dH + 2 ln lam| = {dh:.2e}; max |dN| = {dn:.2e} (tol 2e-6)"


def _tight(spec):
    return make_state(spec, default_cutoff(spec, 1e-25))


def criterion_7():
    inv = s_invariance_report(_tight(StateFamilySpec.pats(1, 0.3)), 4)
    gauss = [StateFamilySpec.fock(0), StateFamilySpec.coherent(0.6 + 0.4j), StateFamilySpec.thermal(0.5), StateFamilySpec.thermal(0.8)]
    g = max(cumulants(_tight(s), 4, sv).max_abs(3) for s in gauss for sv in (-1.0, 0.0, 1.0))
    ok = inv < 1e-8 and g < 1e-10
    return ok, f"s-invariance pats(1,0.3) = {inv:.2e} (tol 1e-8); max Gaussian |gamma_3..4| = {g:.2e} (tol 1e-10)"


def criterion_8():
    quad = QuadratureSpec(mc_samples=1_000_000, mc_seed=7)
    n1 = ng_measure(fock_q(1), quad).value
    tens = ng_measure(product(fock_q(1), fock_q(1)), quad)
    bs = ng_measure(beamsplit(pats_q(1, 0.4), vacuum_q()), quad)
    e1, e2 = abs(tens.value - 2 * n1), abs(bs.value - n1)
    ok = e1 < 1e-2 and e2 < 1e-2
    return ok, f"|N(f1 x f1) - 2N(f1)| = {e1:.2e} (se {tens.est_error:.1e}); |N(BS) - N(f1)| = {e2:.2e} (se {bs.est_error:.1e})"


def criterion_9():
    b2 = [0.5 * i for i in range(11)]
    vals = [ng_measure(phase_averaged_q(math.sqrt(b)), RADIAL).value for b in b2]
    inc = all(b > a for a, b in zip(vals, vals[1:]))
    ok = abs(vals[0]) < 1e-8 and inc
    return ok, f"N(0) = {vals[0]:.2e}; strictly increasing: {inc}; N(|beta|^2=5) = {vals[-1]:.5f}"


CATALOG = [
    StateFamilySpec.fock(0),
    StateFamilySpec.fock(1),
    StateFamilySpec.fock(3),
    StateFamilySpec.thermal(0.5),
    StateFamilySpec.coherent(0.6 + 0.4j),
    StateFamilySpec.pats(1, 0.3),
    StateFamilySpec.pats(2, 0.6),
    StateFamilySpec.phase_averaged(1.0),
]


def criterion_10():
    worst = 0.0
    for spec in CATALOG:
        rho = make_state(spec, max(default_cutoff(spec), 8))
        mom = quadrature_moments(model_for(spec), 4)
        for (p, q), v in mom.items():
            worst = max(worst, abs(v - anti_normal_moment(rho, p, q)))
    elapsed = time.perf_counter() - T0
    ok = worst < 1e-6 and elapsed < 300
    return ok, f"max |quadrature - operator| moment = {worst:.2e} (tol 1e-6); acceptance runtime {elapsed:.1f} s (limit 300 s)"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    report(capsys, n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    for i, fn in enumerate(CRITERIA, 1):
        report(None, i, *fn())
