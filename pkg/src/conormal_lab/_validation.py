"""Input validation helpers shared across modules."""

from numbers import Integral, Real

import numpy as np

from .exceptions import ConfigInvalid


def as_float_array(values, *, ndim=None, name="array"):
    arr = np.asarray(values, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_rows(values, width, *, name="array"):
    """Coerce to a 2-D float array with `width` columns (a single row is promoted)."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != width:
        raise ValueError(f"{name} must have shape (N, {width}), got {arr.shape}")
    return arr


def check_positive(value, name, *, allow_zero=False):
    if not isinstance(value, Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    if allow_zero and value < 0 or not allow_zero and value <= 0:
        bound = ">= 0" if allow_zero else "> 0"
        raise ValueError(f"{name} must be {bound}, got {value}")
    return float(value)


def check_count(value, name, *, minimum=1):
    if not isinstance(value, Integral) or isinstance(value, bool):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def require(mapping, key, where):
    """Fetch a mandatory config field, naming it in the error when absent."""
    if not isinstance(mapping, dict) or key not in mapping:
        raise ConfigInvalid(f"missing required field '{key}' in {where}")
    return mapping[key]


def wrap_angle(theta):
    """Map angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), 2 * np.pi)


def angle_between(u, v):
    """Angle between unit vectors along the last axis, accurate near 0 and pi."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    s = np.linalg.norm(u - v, axis=-1)
    c = np.linalg.norm(u + v, axis=-1)
    return 2.0 * np.arctan2(s, c)
