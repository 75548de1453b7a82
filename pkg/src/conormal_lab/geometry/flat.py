"""Flat torus ``R^n / Z^n``."""

import numpy as np

from .._validation import angle_between
from ..exceptions import InvalidPhasePoint
from .base import COSPHERE_TOL, ManifoldModel


def wrap_unit(d):
    """Representative of ``d`` modulo 1 in ``[-1/2, 1/2)``."""
    return d - np.floor(d + 0.5)


class FlatTorus(ManifoldModel):
    kind = "torus"
    curvature = 0

    def __init__(self, dim=2):
        if int(dim) < 2:
            raise ValueError("torus dimension must be >= 2")
        self.dim = int(dim)
        self.coord_dim = self.dim

    def __repr__(self):
        return f"FlatTorus(dim={self.dim})"

    def to_config(self):
        return {"kind": "torus", "dim": self.dim}

    def check_states(self, X, XI):
        norms = np.linalg.norm(XI, axis=1)
        if not np.all(np.abs(norms - 1.0) <= COSPHERE_TOL):
            raise InvalidPhasePoint(f"|xi| = {norms.tolist()} is not 1")
        if np.any(X < 0) or np.any(X >= 1) or not np.all(np.isfinite(X)):
            raise InvalidPhasePoint("torus coordinates must lie in [0, 1)")

    def normalize_states(self, X, XI):
        X = np.mod(X, 1.0)
        X[X >= 1.0] = 0.0
        return X, XI

    def flow_states(self, X, XI, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 1:
            t = t[:, None]
        Xt = np.mod(X + t * XI, 1.0)
        Xt[Xt >= 1.0] = 0.0
        return Xt, np.broadcast_to(XI, Xt.shape).copy()

    def base_distance(self, X, Y):
        return np.linalg.norm(wrap_unit(np.asarray(X) - np.asarray(Y)), axis=-1)

    def sasaki_states(self, X1, XI1, X2, XI2, *, strict=False):
        # parallel transport is the identity, so there is no cut-locus ambiguity
        d_base = self.base_distance(X1, X2)
        d_fib = angle_between(XI1, XI2)
        return np.hypot(d_base, d_fib)

    def jacobi_coords(self, X, XI, dX, dXI):
        if self.dim != 2:
            raise NotImplementedError("Jacobi coordinates are implemented for surfaces")
        e = np.stack([-XI[:, 1], XI[:, 0]], axis=1)
        return np.sum(dX * e, axis=1), np.sum(dXI * e, axis=1)

    def flow_component(self, X, XI, dX):
        return np.sum(dX * XI, axis=1)

    def normal_frame(self, XI):
        """Unit vector rotating ``xi`` by +90 degrees (surfaces only)."""
        return np.stack([-XI[:, 1], XI[:, 0]], axis=1)
