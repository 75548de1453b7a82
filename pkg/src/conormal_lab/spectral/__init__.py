"""Explicit eigenfunctions, their averages over submanifolds and exponent fits."""

from .averages import AverageResult, average, average_result, normal_average, parameter_intervals
from .legendre import legendre, sectoral_constant
from .modes import (
    EigenMode,
    SphereSectoral,
    SphereZonal,
    TorusPlaneWave,
    mode_from_config,
    plane_wave_family,
    sectoral_family,
    zonal_family,
)
from .scaling import PowerLawFit, ScalingReport, fit_power_law, sweep_and_fit, sweep_table, write_sweep_csv

__all__ = [
    "AverageResult",
    "EigenMode",
    "PowerLawFit",
    "ScalingReport",
    "SphereSectoral",
    "SphereZonal",
    "TorusPlaneWave",
    "average",
    "average_result",
    "fit_power_law",
    "legendre",
    "mode_from_config",
    "normal_average",
    "parameter_intervals",
    "plane_wave_family",
    "sectoral_constant",
    "sectoral_family",
    "sweep_and_fit",
    "sweep_table",
    "write_sweep_csv",
    "zonal_family",
]
