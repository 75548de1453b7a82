"""Submanifolds, their unit conormal bundles and flowout measures."""

from .flowout import (
    CellPartition,
    flowout_measure,
    hp_r,
    in_tube,
    in_tube_states,
    r_H,
    snh_distance,
    tube_minima,
)
from .samples import WeightedSampleSet, liouville_samples, point_measure, sample_rng, sample_snh
from .submanifolds import (
    Curve,
    Equator,
    GeodesicCircle,
    HorocycleSegment,
    HyperbolicGeodesicSegment,
    LatitudeCircle,
    ParametricCurve,
    Point,
    Submanifold,
    TorusCircle,
    TorusGeodesic,
    submanifold_from_config,
)

__all__ = [
    "CellPartition",
    "Curve",
    "Equator",
    "GeodesicCircle",
    "HorocycleSegment",
    "HyperbolicGeodesicSegment",
    "LatitudeCircle",
    "ParametricCurve",
    "Point",
    "Submanifold",
    "TorusCircle",
    "TorusGeodesic",
    "WeightedSampleSet",
    "flowout_measure",
    "hp_r",
    "in_tube",
    "in_tube_states",
    "liouville_samples",
    "point_measure",
    "r_H",
    "sample_rng",
    "sample_snh",
    "snh_distance",
    "submanifold_from_config",
    "tube_minima",
]
