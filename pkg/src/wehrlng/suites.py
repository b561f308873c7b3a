"""Parameter sweeps and property suites behind the command-line front end.

Each function returns ``(columns, rows)``; rows are tuples in grid order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor


from .cumulants import cumulant_indicator, s_invariance_report, second_order_shift
from .entropy import wehrl
from .fock import StateFamilySpec, default_cutoff, make_state
from .measures import delta1, delta2, ng_measure
from .qfunc import (
    beamsplit,
    coherent_q,
    displace,
    fock_q,
    pats_q,
    phase_averaged_q,
    product,
    rotate,
    scale,
    thermal_q,
    vacuum_q,
)
from .quadrature import QuadratureSpec

SCALES = (0.5, 0.8)
DISPLACEMENT = 1.0 + 0.5j
ROTATION = math.pi / 3


def parse_grid(text: str) -> list[float]:
    """``"start:stop:step"`` (stop inclusive) or a comma-separated list."""
    if ":" not in text:
        vals = [float(v) for v in text.split(",") if v.strip()]
        if not vals:
            raise ValueError("empty grid")
        return vals
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError("grid step must be > 0")
    if stop < start:
        raise ValueError("grid stop must be >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def _map(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def fock_curve(m_max: int, quad: QuadratureSpec, workers: int = 1):
    def row(m):
        rep = ng_measure(fock_q(m), quad)
        return (m, rep.value, rep.est_error)

    return ("m", "N", "abs_err"), _map(row, range(m_max + 1), workers)


def _cutoff_for(spec, cutoff):
    return cutoff if cutoff is not None else default_cutoff(spec)


def pats_flatness(m: int, xs, quad: QuadratureSpec, cutoff: int | None = None, workers: int = 1):
    def row(x):
        spec = StateFamilySpec.pats(m, x)
        rho = make_state(spec, _cutoff_for(spec, cutoff))
        return (x, ng_measure(pats_q(m, x), quad).value, delta1(rho).value, delta2(rho).value)

    return ("x", "N", "delta1", "delta2"), _map(row, xs, workers)


def delta_curves(m: int, xs, cutoff: int | None = None, workers: int = 1):
    def row(x):
        spec = StateFamilySpec.pats(m, x)
        rho = make_state(spec, _cutoff_for(spec, cutoff))
        return (x, delta1(rho).value, delta2(rho).value)

    return ("x", "delta1", "delta2"), _map(row, xs, workers)


def phase_averaged_curve(beta2s, quad: QuadratureSpec, workers: int = 1):
    def row(b2):
        rep = ng_measure(phase_averaged_q(math.sqrt(b2)), quad)
        return (b2, rep.value, rep.est_error)

    return ("beta2", "N", "abs_err"), _map(row, beta2s, workers)


def catalog_models():
    """Single-mode analytic models used by the invariance suite."""
    return [
        ("vacuum", vacuum_q()),
        ("coherent(0.6+0.4j)", coherent_q(0.6 + 0.4j)),
        ("thermal(nbar=1)", thermal_q(1.0)),
        ("fock(1)", fock_q(1)),
        ("fock(3)", fock_q(3)),
        ("pats(1,0.3)", pats_q(1, 0.3)),
        ("pats(2,0.6)", pats_q(2, 0.6)),
        ("phase_averaged(1)", phase_averaged_q(1.0)),
    ]


INVARIANCE_COLUMNS = (
    "state", "transform", "parameter", "H_before", "H_after", "expected_dH", "dH_dev",
    "N_before", "N_after", "N_dev", "est_error",
)


def _pair_row(label, transform, param, base, moved, expected_dh, quad):
    nb, na = ng_measure(base, quad), ng_measure(moved, quad)
    hb, ha = nb.metadata["wehrl"], na.metadata["wehrl"]
    return (
        label, transform, param, hb, ha, expected_dh, abs(ha - hb - expected_dh),
        nb.value, na.value, abs(na.value - nb.value), nb.est_error + na.est_error,
    )


def invariance_suite(quad: QuadratureSpec, include_two_mode: bool = True, workers: int = 1):
    """Scaling, displacement and rotation checks on the catalog, plus the two-mode
    tensor-additivity, Gaussian-ancilla and beam-splitter checks (Monte Carlo)."""
    jobs = []
    for label, model in catalog_models():
        for lam in SCALES:
            jobs.append((label, "scale", f"{lam:g}", model, scale(model, lam), -2.0 * math.log(lam)))
        jobs.append((label, "displace", f"{DISPLACEMENT}", model, displace(model, DISPLACEMENT), 0.0))
        jobs.append((label, "rotate", f"{ROTATION:.17g}", model, rotate(model, ROTATION), 0.0))
    rows = _map(lambda j: _pair_row(*j, quad), jobs, workers)
    if include_two_mode:
        rows.extend(two_mode_rows(quad))
    return INVARIANCE_COLUMNS, rows


def two_mode_rows(quad: QuadratureSpec):
    f1, p1 = fock_q(1), pats_q(1, 0.3)
    cases = [
        ("fock(1)|fock(1)", "tensor", [f1, f1], product(f1, f1)),
        ("fock(1)|pats(1,0.3)", "tensor", [f1, p1], product(f1, p1)),
        ("pats(1,0.3)|thermal(nbar=1)", "tensor", [p1, thermal_q(1.0)], product(p1, thermal_q(1.0))),
        ("pats(1,0.4)|vacuum", "beamsplit", [pats_q(1, 0.4), vacuum_q()], beamsplit(pats_q(1, 0.4), vacuum_q())),
        ("fock(1)|vacuum", "beamsplit", [f1, vacuum_q()], beamsplit(f1, vacuum_q())),
    ]
    rows = []
    for label, transform, parts, joint in cases:
        singles = [ng_measure(p, quad) for p in parts]
        hb = math.fsum(s.metadata["wehrl"] for s in singles)
        nb = math.fsum(s.value for s in singles)
        rep = ng_measure(joint, quad)
        ha = rep.metadata["wehrl"]
        est = rep.est_error + sum(s.est_error for s in singles)
        rows.append((label, transform, "50:50" if transform == "beamsplit" else "",
                     hb, ha, 0.0, abs(ha - hb), nb, rep.value, abs(rep.value - nb), est))
    return rows


def cumulant_check(order_cap: int = 4):
    states = [
        StateFamilySpec.fock(0),
        StateFamilySpec.coherent(0.6 + 0.4j),
        StateFamilySpec.thermal(0.5),
        StateFamilySpec.fock(1),
        StateFamilySpec.fock(2),
        StateFamilySpec.pats(1, 0.3),
        StateFamilySpec.pats(2, 0.6),
        StateFamilySpec.phase_averaged(1.0),
    ]
    rows = []
    for spec in states:
        # tighter tail than the default so truncation stays below the 1e-10 cumulant checks
        rho = make_state(spec, max(default_cutoff(spec, 1e-25), 2 * order_cap))
        shift = second_order_shift(rho, -1.0, 1.0)[(1, 1)].real
        rows.append((spec.label, order_cap, s_invariance_report(rho, order_cap), cumulant_indicator(rho, order_cap), shift))
    return ("state", "K", "s_invariance", "indicator", "gamma11_shift"), rows


def wehrl_table(models, quad: QuadratureSpec):
    return [(label, wehrl(m, quad).value) for label, m in models]


__all__ = [
    "parse_grid",
    "fock_curve",
    "pats_flatness",
    "delta_curves",
    "phase_averaged_curve",
    "invariance_suite",
    "two_mode_rows",
    "cumulant_check",
    "catalog_models",
]
