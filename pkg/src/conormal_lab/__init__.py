"""Numerical laboratory for conormal dynamics and eigenfunction averages."""

__version__ = "0.1.0"
