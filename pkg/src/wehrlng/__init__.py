"""Wehrl-entropy non-Gaussianity of oscillator states.

Quick start::

    >>> from wehrlng import fock_q, pats_q, ng_measure, ng_fock_closed
    >>> round(ng_measure(pats_q(1, 0.5)).value, 6) == round(ng_fock_closed(1), 6)
    True
"""
from .cumulants import (
    CumulantTable,
    MomentTable,
    cumulant_indicator,
    cumulants,
    moments_to_cumulants,
    s_invariance_report,
    s_ordered_moments,
    second_order_shift,
)
from .entropy import MeasureReport, wehrl, wehrl_fock_closed, wehrl_gaussian
from .fock import (
    DomainError,
    FockDensityMatrix,
    StateFamilySpec,
    TruncationError,
    anti_normal_moment,
    hs_inner,
    make_state,
    normal_moment,
    rotate_state,
    von_neumann_entropy,
)
from .kernels import BACKEND
from .measures import (
    GaussianReference,
    UnsupportedStateError,
    delta1,
    delta2,
    gaussian_reference,
    ng_fock_closed,
    ng_measure,
)
from .qfunc import (
    GaussianMomentSummary,
    QFunctionModel,
    beam_splitter,
    beamsplit,
    coherent_q,
    displace,
    fock_q,
    from_matrix,
    gaussian_fit,
    gaussian_q,
    model_for,
    pats_q,
    phase_averaged_q,
    product,
    q_eval,
    rotate,
    scale,
    thermal_q,
    vacuum_q,
)
from .quadrature import ConvergenceError, QuadratureSpec

__version__ = "0.1.0"
