"""Minkowski dimension by counting occupied dyadic boxes.

Boxes of side ``2^-j`` are anchored at the origin; a point on the upper
face of the unit cube belongs to the last box so the closed cube is
covered exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import check_count
from ..exceptions import ScaleLadderTooShort

MIN_LADDER = 4
DEFAULT_MARGIN = 0.03


def cantor_points(depth):
    """Endpoints of the ``2^depth`` intervals of the middle-thirds construction."""
    depth = check_count(depth, "depth", minimum=0)
    left = np.zeros(1)
    for level in range(1, depth + 1):
        left = np.concatenate([left, left + 2.0 * 3.0**-level])
    width = 3.0**-depth
    return np.sort(np.concatenate([left, left + width]))


@dataclass
class BoundarySet:
    """A point cloud in ``[0, 1]^d`` standing for the boundary of a parameter set.

    ``resolution`` is the finest scale the cloud represents faithfully
    (0 for finite sets).
    """

    points: np.ndarray
    generator: str = "custom"
    resolution: float = 0.0

    def __post_init__(self):
        P = np.asarray(self.points, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        if P.ndim != 2 or len(P) == 0:
            raise ValueError("a boundary set needs at least one point")
        if np.any(P < 0) or np.any(P > 1) or not np.all(np.isfinite(P)):
            raise ValueError("boundary points must lie in the closed unit cube")
        self.points = P

    @property
    def dim(self):
        return self.points.shape[1]

    @classmethod
    def endpoints(cls, intervals, dim=1):
        """Endpoints of a finite union of parameter intervals (first coordinate)."""
        ends = np.unique(np.asarray(intervals, dtype=float).ravel())
        P = np.zeros((len(ends), dim))
        P[:, 0] = ends
        return cls(P, "endpoints", 0.0)

    @classmethod
    def cantor(cls, depth=12):
        return cls(cantor_points(depth)[:, None], f"cantor:{int(depth)}", 3.0**-depth)

    @classmethod
    def segment(cls, dim=2, resolution=2.0**-14, offset=0.5):
        """The segment ``[0, 1] x {offset}^(dim-1)`` sampled at ``resolution``."""
        t = np.linspace(0.0, 1.0, int(np.ceil(1.0 / resolution)) + 1)
        P = np.full((len(t), dim), float(offset))
        P[:, 0] = t
        return cls(P, "segment", float(resolution))

    def union(self, other):
        if other.dim != self.dim:
            raise ValueError("boundary sets of different dimensions")
        return BoundarySet(np.vstack([self.points, other.points]), "custom",
                           max(self.resolution, other.resolution))

    def to_csv(self, path):
        np.savetxt(path, self.points, delimiter=",", fmt="%.17g")

    @classmethod
    def from_csv(cls, path, resolution=0.0):
        return cls(np.loadtxt(path, delimiter=",", ndmin=2), "custom", resolution)


def box_counts(points, scales):
    """Number of occupied dyadic boxes of side ``2^-j`` for each ``j`` in ``scales``."""
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    out = []
    for j in scales:
        j = int(j)
        if j * P.shape[1] > 62:
            raise ValueError("box index overflows 64 bits at this scale")
        n = 2**j
        idx = np.minimum(np.floor(P * n).astype(np.int64), n - 1)
        # one linear index per box
        flat = idx @ (n ** np.arange(P.shape[1], dtype=np.int64))
        out.append(len(np.unique(flat)))
    return np.array(out)


@dataclass(frozen=True)
class BoxDimension:
    estimate: float
    r2: float
    scales: np.ndarray
    counts: np.ndarray

    def as_dict(self):
        return {"estimate": self.estimate, "r2": self.r2, "scales": self.scales.tolist(),
                "counts": self.counts.tolist()}


class BoxCountingDimension(BaseEstimator):
    """Slope of ``log N(2^-j)`` against ``j log 2`` over ``j_min..j_max``."""

    def __init__(self, j_min=2, j_max=10):
        self.j_min = j_min
        self.j_max = j_max

    def fit(self, B, y=None):
        if not isinstance(B, BoundarySet):
            B = BoundarySet(B)
        j_min, j_max = int(self.j_min), int(self.j_max)
        if j_max - j_min < MIN_LADDER:
            raise ScaleLadderTooShort(f"need j_max - j_min >= {MIN_LADDER}, got {j_max - j_min}")
        if B.resolution > 2.0**-j_max:
            raise ScaleLadderTooShort(
                f"point cloud resolves {B.resolution:.3g}, coarser than the finest box 2^-{j_max}")
        scales = np.arange(j_min, j_max + 1)
        counts = box_counts(B.points, scales)
        x, y = scales * np.log(2.0), np.log(counts)
        slope, intercept = np.polyfit(x, y, 1)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        ss_res = float(np.sum((y - slope * x - intercept) ** 2))
        self.estimate_ = float(slope)
        self.r2_ = 1.0 if ss_tot <= 1e-28 else float(np.clip(1.0 - ss_res / ss_tot, 0.0, 1.0))
        self.scales_, self.counts_ = scales, counts
        return self

    def transform(self, B):
        """Box counts of ``B`` at the fitted scales."""
        check_is_fitted(self, "scales_")
        P = B.points if isinstance(B, BoundarySet) else np.asarray(B, dtype=float)
        return box_counts(P, self.scales_)

    def result(self):
        check_is_fitted(self, "estimate_")
        return BoxDimension(self.estimate_, self.r2_, self.scales_, self.counts_)


def box_dimension(B, j_min=2, j_max=10):
    return BoxCountingDimension(j_min, j_max).fit(B).result()


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    slack: float
    estimate: float
    threshold: float

    def as_dict(self):
        return {"admissible": self.admissible, "slack": self.slack, "estimate": self.estimate,
                "threshold": self.threshold}


def admissible(B, n, k, margin=DEFAULT_MARGIN, **ladder):
    """Whether ``dim_box(B) + margin < n - k - 1/2``; ``B`` may be a set or an estimate."""
    est = float(B) if isinstance(B, (int, float, np.floating)) else box_dimension(B, **ladder).estimate
    threshold = n - k - 0.5
    return Admissibility(bool(est + margin < threshold), float(threshold - est), est, float(threshold))
