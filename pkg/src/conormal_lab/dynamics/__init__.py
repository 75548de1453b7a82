"""Returns to SN*H, recurrence, stable/unstable splitting and volume growth."""

from .returns import (
    ReturnEvent,
    first_return,
    poincare_fraction,
    recurrence_flags,
    recurrence_fraction,
    recurrence_ladder,
    return_orbit,
    return_times,
)
from .splitting import SplittingReport, classify_splitting, line_angle, stable_subspaces
from .volume import (
    flow_submanifold,
    integrability_report,
    jacobian_factors,
    orthogonality_defect,
    volume_growth,
)

__all__ = [
    "ReturnEvent",
    "SplittingReport",
    "classify_splitting",
    "first_return",
    "flow_submanifold",
    "integrability_report",
    "jacobian_factors",
    "line_angle",
    "orthogonality_defect",
    "poincare_fraction",
    "recurrence_flags",
    "recurrence_fraction",
    "recurrence_ladder",
    "return_orbit",
    "return_times",
    "stable_subspaces",
    "volume_growth",
]
