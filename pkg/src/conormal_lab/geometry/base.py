"""Phase points, Jacobi data and the model-geometry interface."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..exceptions import CutLocus, InvalidPhasePoint

COSPHERE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """A unit cosphere element ``(x, xi)``.

    Coordinates depend on the model: torus points live in ``[0, 1)^n``,
    sphere points in ``R^(n+1)`` and hyperbolic points are ``(Re z, Im z)``
    in the upper half-plane with ``xi`` the unit direction in the
    orthonormal frame ``(y dx, y dy)``.
    """

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.array(self.x, dtype=float))
        object.__setattr__(self, "xi", np.array(self.xi, dtype=float))

    def __repr__(self):
        return f"PhasePoint(x={self.x.tolist()}, xi={self.xi.tolist()})"


@dataclass(frozen=True, eq=False)
class TangentPerturbation:
    """Normal Jacobi data along a geodesic: ``J`` (horizontal) and ``J'`` (vertical).

    Both components are expressed in a parallel orthonormal frame of the
    normal bundle of the geodesic, so they have length ``n - 1``.
    """

    horizontal: np.ndarray
    vertical: np.ndarray

    def __post_init__(self):
        h = np.atleast_1d(np.array(self.horizontal, dtype=float))
        v = np.atleast_1d(np.array(self.vertical, dtype=float))
        if h.shape != v.shape or h.ndim != 1:
            raise ValueError("horizontal and vertical parts must be 1-D of equal length")
        object.__setattr__(self, "horizontal", h)
        object.__setattr__(self, "vertical", v)

    @property
    def norm(self):
        return float(np.sqrt(np.sum(self.horizontal**2) + np.sum(self.vertical**2)))

    def as_vector(self):
        return np.concatenate([self.horizontal, self.vertical])


def jacobi_propagator(curvature, t):
    """Fundamental solution of ``J'' + K J = 0``.

    Returns ``(a, b, c, d)`` with ``J(t) = a J + b J'`` and
    ``J'(t) = c J + d J'``; broadcasts over ``t``.
    """
    t = np.asarray(t, dtype=float)
    if curvature == 0:
        one = np.ones_like(t)
        return one, t, np.zeros_like(t), one
    if curvature > 0:
        c, s = np.cos(t), np.sin(t)
        return c, s, -s, c
    ch, sh = np.cosh(t), np.sinh(t)
    return ch, sh, sh, ch


class ManifoldModel(ABC):
    """A constant-curvature model with an exact geodesic flow.

    Subclasses implement vectorised kernels acting on row arrays
    ``X`` (N, d) and ``XI`` (N, d); the scalar methods wrap them.
    """

    kind: str
    dim: int
    curvature: int
    coord_dim: int

    # -- vectorised kernels -------------------------------------------------
    @abstractmethod
    def flow_states(self, X, XI, t):
        """Geodesic flow for arclength time ``t`` (scalar or per-row)."""

    @abstractmethod
    def base_distance(self, X, Y):
        """Row-wise geodesic distance between base points."""

    @abstractmethod
    def sasaki_states(self, X1, XI1, X2, XI2, *, strict=False):
        """Row-wise ``sqrt(d_base^2 + d_fiber^2)``.

        With ``strict=False`` cut-locus pairs get fiber distance 0 instead of
        raising; their base distance is then at least the injectivity radius.
        """

    @abstractmethod
    def check_states(self, X, XI):
        """Raise :class:`InvalidPhasePoint` if any row violates the invariants."""

    @abstractmethod
    def normalize_states(self, X, XI):
        """Reduce coordinates to canonical form (torus mod 1, hyperbolic domain)."""

    @abstractmethod
    def jacobi_coords(self, X, XI, dX, dXI):
        """Split a tangent vector ``(dX, dXI)`` of ``S*M`` into normal Jacobi data.

        Only implemented for surfaces; returns ``(J, J')`` arrays of shape (N,).
        """

    @abstractmethod
    def flow_component(self, X, XI, dX):
        """Sasaki inner product of ``(dX, dXI)`` with the unit flow generator."""

    # -- scalar API -----------------------------------------------------------
    def validate(self, rho):
        if not isinstance(rho, PhasePoint):
            raise InvalidPhasePoint(f"expected PhasePoint, got {type(rho).__name__}")
        if rho.x.shape != (self.coord_dim,) or rho.xi.shape != (self.coord_dim,):
            raise InvalidPhasePoint(
                f"{self.kind} phase points need {self.coord_dim} coordinates, "
                f"got x{rho.x.shape}, xi{rho.xi.shape}"
            )
        self.check_states(rho.x[None], rho.xi[None])
        return rho

    def phase_point(self, x, xi):
        """Build a validated phase point in canonical coordinates."""
        X, XI = self.normalize_states(np.asarray(x, float)[None], np.asarray(xi, float)[None])
        rho = PhasePoint(X[0], XI[0])
        return self.validate(rho)

    def flow(self, rho, t):
        """Exact geodesic flow ``G^t(rho)`` in arclength time."""
        self.validate(rho)
        X, XI = self.flow_states(rho.x[None], rho.xi[None], float(t))
        return PhasePoint(X[0], XI[0])

    def distance(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return float(self.base_distance(x[None], y[None])[0])

    def sasaki_distance(self, rho1, rho2):
        """Distance in the Sasaki metric (fiber angle after parallel transport).

        Raises :class:`CutLocus` when the minimising geodesic is not unique.
        """
        self.validate(rho1)
        self.validate(rho2)
        d = self.sasaki_states(rho1.x[None], rho1.xi[None], rho2.x[None], rho2.xi[None], strict=True)
        return float(d[0])

    def dflow(self, rho, v, t):
        """Differential of the flow acting on normal Jacobi data."""
        self.validate(rho)
        if not isinstance(v, TangentPerturbation):
            v = TangentPerturbation(*v)
        if v.horizontal.shape != (self.dim - 1,):
            raise ValueError(f"Jacobi data must have length {self.dim - 1}")
        a, b, c, d = jacobi_propagator(self.curvature, float(t))
        J, Jp = v.horizontal, v.vertical
        return TangentPerturbation(a * J + b * Jp, c * J + d * Jp)

    def propagator_matrix(self, t):
        """2x2 block acting on ``(J, J')`` for each normal direction."""
        a, b, c, d = jacobi_propagator(self.curvature, float(t))
        return np.array([[a, b], [c, d]], dtype=float)

    def to_config(self):
        raise NotImplementedError


def _raise_cut(mask, what):
    if np.any(mask):
        raise CutLocus(f"{what}: minimising geodesic is not unique")
