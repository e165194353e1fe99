"""Continuous thermomajorization: deciding, constructing and auditing Markovian thermal processes
on finite energy distributions."""

from .core import (
    LorenzCurve,
    ThermalContext,
    all_gamma_orderings,
    as_dist,
    curve_height,
    gamma_ordering,
    gibbs_distribution,
    has_ordering,
    lorenz_curve,
    thermomajorizes,
)
from .dynamics import (
    EPS_FULL,
    GeneratorSchedule,
    Segment,
    Trajectory,
    generator_matrix,
    integrate_populations,
    schedule_from_protocol,
)
from .entropy import (
    AuditReport,
    MonotoneSpec,
    Violation,
    audit_trajectory,
    default_monotones,
    h_divergence,
    relative_entropy_alpha,
    sigma_a,
    step_complete_check,
)
from .protocol import NotSynthesizableError, common_ordering, full_protocol, within_ordering_protocol
from .thermalization import ElementaryStep, Protocol, apply_protocol, compose_lambda, elementary_step, step_matrix
from .verifier import (
    Decision,
    ReachableSet,
    canonical_sequences,
    check_continuous,
    query_reachable,
    reachable_set,
    theorem4_direct,
)

__version__ = "0.1.0"
