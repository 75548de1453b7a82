"""Box-counting dimension of boundary sets and the admissibility test for ``A``."""

from .boxdim import (
    Admissibility,
    BoundarySet,
    BoxCountingDimension,
    BoxDimension,
    admissible,
    box_counts,
    box_dimension,
    cantor_points,
)

__all__ = [
    "Admissibility",
    "BoundarySet",
    "BoxCountingDimension",
    "BoxDimension",
    "admissible",
    "box_counts",
    "box_dimension",
    "cantor_points",
]
