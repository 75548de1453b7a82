"""Unit round sphere ``S^n`` embedded in ``R^(n+1)``."""

import numpy as np

from .._validation import angle_between
from ..exceptions import InvalidPhasePoint
from .base import COSPHERE_TOL, ManifoldModel, _raise_cut

EMBED_TOL = 1e-12
ANTIPODAL_TOL = 1e-9


def transport(V, A, B):
    """Parallel transport of tangent vectors ``V`` at ``A`` to ``B`` along great circles."""
    denom = 1.0 + np.sum(A * B, axis=1)
    safe = np.where(np.abs(denom) < ANTIPODAL_TOL, 1.0, denom)
    coef = np.sum(V * B, axis=1) / safe
    return V - coef[:, None] * (A + B), np.abs(denom) < ANTIPODAL_TOL


class RoundSphere(ManifoldModel):
    kind = "sphere"
    curvature = 1

    def __init__(self, dim=2):
        if int(dim) < 2:
            raise ValueError("sphere dimension must be >= 2")
        self.dim = int(dim)
        self.coord_dim = self.dim + 1

    def __repr__(self):
        return f"RoundSphere(dim={self.dim})"

    def to_config(self):
        return {"kind": "sphere", "dim": self.dim}

    def check_states(self, X, XI):
        if not np.all(np.abs(np.sum(X * X, axis=1) - 1.0) <= EMBED_TOL):
            raise InvalidPhasePoint("sphere point is not on the unit sphere")
        if not np.all(np.abs(np.linalg.norm(XI, axis=1) - 1.0) <= COSPHERE_TOL):
            raise InvalidPhasePoint("|xi| is not 1")
        if not np.all(np.abs(np.sum(X * XI, axis=1)) <= COSPHERE_TOL):
            raise InvalidPhasePoint("xi is not tangent to the sphere")

    def normalize_states(self, X, XI):
        X = X / np.linalg.norm(X, axis=1, keepdims=True)
        XI = XI - np.sum(XI * X, axis=1, keepdims=True) * X
        return X, XI / np.linalg.norm(XI, axis=1, keepdims=True)

    def flow_states(self, X, XI, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 1:
            t = t[:, None]
        c, s = np.cos(t), np.sin(t)
        return X * c + XI * s, XI * c - X * s

    def base_distance(self, X, Y):
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        return angle_between(X, Y)

    def sasaki_states(self, X1, XI1, X2, XI2, *, strict=False):
        d_base = self.base_distance(X1, X2)
        moved, cut = transport(XI2, X2, X1)
        if strict:
            _raise_cut(cut & (d_base > ANTIPODAL_TOL), "sphere Sasaki distance")
        norm = np.linalg.norm(moved, axis=1, keepdims=True)
        moved = moved / np.where(norm == 0, 1.0, norm)
        d_fib = np.where(cut, 0.0, angle_between(XI1, moved))
        return np.hypot(d_base, d_fib)

    def jacobi_coords(self, X, XI, dX, dXI):
        if self.dim != 2:
            raise NotImplementedError("Jacobi coordinates are implemented for surfaces")
        e = np.cross(X, XI)
        return np.sum(dX * e, axis=1), np.sum(dXI * e, axis=1)

    def flow_component(self, X, XI, dX):
        return np.sum(dX * XI, axis=1)

    def normal_frame(self, X, XI):
        return np.cross(X, XI)
