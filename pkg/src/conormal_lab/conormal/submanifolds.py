"""Closed submanifolds of the model surfaces and their unit conormal bundles.

Every kind is parametrised by ``u`` in ``[0, 1]`` (curves) or by nothing
(points).  A conormal direction is addressed by a fiber coordinate: the
sign ``+1 / -1`` for curves and an angle for points.  For curves the ``+1``
conormal is the unit tangent rotated by -90 degrees, so for a circle
traversed counter-clockwise it points outward.

The shape of ``SN*H`` at a conormal ``rho`` is summarised by the signed
curvature ``kappa = <nabla_T nu, T>``: in normal Jacobi coordinates the
tangent line of ``SN*H`` is ``span{(1, kappa)}``.  For a point the tangent
line is the vertical ``span{(0, 1)}``.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from functools import cached_property
from math import gcd

import numpy as np

from .._scan import golden_refine
from .._validation import as_rows, check_positive, wrap_angle
from ..exceptions import ConfigInvalid, DegenerateImmersion, ModelMismatch
from ..geometry.flat import FlatTorus, wrap_unit
from ..geometry.hyperbolic import (
    HyperbolicSurface,
    fiber_angle,
    frames_from_states,
    geodesic_frames,
    hyperbolic_distance,
    mobius,
    polar_rotation,
    rotation_frame,
    states_from_frames,
)
from ..geometry.sphere import RoundSphere, transport

FD_STEP = 1e-5
IMMERSION_TOL = 1e-10
GRID_NODES = 512


def _gl_nodes(panels=64, order=8):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    return (0.5 * (b - a) * x + 0.5 * (a + b)).ravel(), (0.5 * (b - a) * w).ravel()


def _rot_minus(V):
    return np.stack([V[:, 1], -V[:, 0]], axis=1)


class Submanifold(ABC):
    """A closed embedded submanifold ``H`` of a surface model."""

    kind: str
    codim: int

    def __init__(self, model):
        if model.dim != 2:
            raise NotImplementedError("submanifolds are implemented on surfaces")
        self.model = model

    @property
    def param_dim(self):
        return self.model.dim - self.codim

    @property
    def fiber_volume(self):
        # Vol(S^0) = 2 (two conormal directions), Vol(S^1) = 2 pi
        return 2.0 if self.codim == 1 else 2.0 * np.pi

    @property
    @abstractmethod
    def measure(self):
        """``sigma_H(H)``: length of a curve, 1 for a point."""

    @property
    def total_mass(self):
        return self.measure * self.fiber_volume

    @abstractmethod
    def conormal_states(self, u, fiber):
        """Conormal phase points ``(X, XI)`` in canonical coordinates."""

    @abstractmethod
    def snh_distance(self, X, XI):
        """Sasaki distance to ``SN*H`` with the nearest ``(u, fiber)``.

        Exact for distances below 1; larger values are upper bounds.
        """

    @abstractmethod
    def foot(self, X, *, exact=True):
        """Nearest parameter ``u`` and distance ``r_H`` for base points ``X``."""

    @abstractmethod
    def sample_params(self, n, rng):
        """Stratified ``(u, fiber)`` draws for the product measure on ``SN*H``."""

    @abstractmethod
    def tangent_jacobi(self, u, fiber, *, normalized=True):
        """Tangent frames of ``SN*H`` in Jacobi coordinates, shape (N, m, 2).

        With ``normalized=False`` the frame is the Fermi one: unit speed
        along ``H`` for curves and unit speed in the fiber for points.
        """

    @abstractmethod
    def tangent_states(self, u, fiber):
        """Tangent vectors of ``SN*H`` as state derivatives ``(dX, dXI)``, Fermi-normalised."""

    def r_H(self, x):
        """Distance from a single base point to ``H``."""
        X = as_rows(x, self.model.coord_dim, name="x")
        return float(self.foot(X)[1][0])

    def cell_measure(self, u_edges):
        """``sigma_H`` of each parameter bin ``[u_edges[i], u_edges[i+1]]``."""
        return np.diff(np.asarray(u_edges, dtype=float)) * self.measure

    def to_config(self):
        raise NotImplementedError


# -- points ------------------------------------------------------------------

class Point(Submanifold):
    """A single point; ``SN*H`` is the whole unit circle over it."""

    kind = "point"
    codim = 2

    def __init__(self, model, x):
        super().__init__(model)
        x = np.asarray(x, dtype=float)
        if isinstance(model, RoundSphere):
            x = x / np.linalg.norm(x)
        X, _ = model.normalize_states(x[None], self._any_direction(x)[None])
        self.x = X[0]
        self._basis = self._tangent_basis(self.x)

    def _any_direction(self, x):
        if isinstance(self.model, RoundSphere):
            return self._tangent_basis(x)[0]
        return np.array([1.0, 0.0])

    def _tangent_basis(self, x):
        if isinstance(self.model, RoundSphere):
            axis = np.eye(3)[np.argmin(np.abs(x))]
            e1 = axis - np.dot(axis, x) * x
            e1 /= np.linalg.norm(e1)
            return e1, np.cross(x, e1)
        return np.array([1.0, 0.0]), np.array([0.0, 1.0])

    def __repr__(self):
        return f"Point({self.x.tolist()})"

    def to_config(self):
        return {"kind": "point", "x": self.x.tolist()}

    @property
    def measure(self):
        return 1.0

    def conormal_states(self, u, fiber):
        fiber = np.atleast_1d(np.asarray(fiber, dtype=float))
        e1, e2 = self._basis
        XI = np.cos(fiber)[:, None] * e1 + np.sin(fiber)[:, None] * e2
        X = np.broadcast_to(self.x, XI.shape).copy()
        return X, XI

    def foot(self, X, *, exact=True):
        X = np.asarray(X, dtype=float)
        Y = np.broadcast_to(self.x, X.shape)
        if isinstance(self.model, HyperbolicSurface) and not exact:
            d = _near_point_distance(self.model, X, Y)
        else:
            d = self.model.base_distance(X, Y)
        return np.zeros(len(X)), d

    def fiber_of(self, X, XI):
        """Angle of ``xi`` after transport to the point, in the point's basis."""
        e1, e2 = self._basis
        if isinstance(self.model, RoundSphere):
            Y = np.broadcast_to(self.x, X.shape)
            V, _ = transport(XI, X, Y)
        elif isinstance(self.model, HyperbolicSurface):
            G = self.model.reduce_frames(frames_from_states(X, XI))
            P = frames_from_states(self.x[None], e2[None])[0]
            lifts = self.model.near_lifts
            cand = mobius(lifts[None] @ P, 1j)
            best = np.argmin(hyperbolic_distance(mobius(G, 1j)[:, None], cand), axis=1)
            M = np.linalg.inv(lifts[best] @ P) @ G
            V = _transported_direction(M)
            return wrap_angle(V)
        else:
            V = XI
        return np.arctan2(V @ e2, V @ e1)

    def snh_distance(self, X, XI):
        u, d = self.foot(X, exact=False)
        return d, u, self.fiber_of(X, XI)

    def sample_params(self, n, rng):
        fiber = 2.0 * np.pi * (np.arange(n) + rng.random(n)) / n - np.pi
        return np.zeros(n), fiber

    def tangent_jacobi(self, u, fiber, *, normalized=True):
        n = len(np.atleast_1d(fiber))
        out = np.zeros((n, 1, 2))
        out[:, 0, 1] = 1.0
        return out

    def tangent_states(self, u, fiber):
        fiber = np.atleast_1d(np.asarray(fiber, dtype=float))
        e1, e2 = self._basis
        dXI = -np.sin(fiber)[:, None] * e1 + np.cos(fiber)[:, None] * e2
        return np.zeros_like(dXI), dXI


def _near_point_distance(model, X, Y):
    z1 = model.reduce_points(X[:, 0] + 1j * X[:, 1])
    z2 = model.reduce_points(Y[:, 0] + 1j * Y[:, 1])
    return model._nearest_lift(z1, z2, model.near_lifts)[1]


def _transported_direction(M):
    """Direction angle at ``i`` of the frame ``M`` moved back along the joining radius."""
    # rotation k(a) by a on directions has polar angle -a/2; upward is pi/2
    return 0.5 * np.pi - 2.0 * polar_rotation(M)


# -- curves ------------------------------------------------------------------

class Curve(Submanifold):
    """Base for one-dimensional ``H``: fiber coordinate is the sign ``+1/-1``."""

    codim = 1
    closed = True

    @abstractmethod
    def lifted(self, u):
        """Lifted base points, unit tangents (frame coordinates) and speeds at ``u``."""

    @abstractmethod
    def signed_curvature(self, u, fiber):
        """``<nabla_T nu, T>`` for the conormal ``nu`` selected by ``fiber``."""

    def _check_immersion(self, speed):
        if np.any(~np.isfinite(speed)) or np.any(speed < IMMERSION_TOL):
            raise DegenerateImmersion(f"|gamma'| = {float(np.min(speed)):.3g} at a quadrature node")

    @cached_property
    def measure(self):
        u, w = _gl_nodes()
        speed = self.lifted(u)[2]
        self._check_immersion(speed)
        return float(np.sum(w * speed))

    def cell_measure(self, u_edges):
        u_edges = np.asarray(u_edges, dtype=float)
        x, w = np.polynomial.legendre.leggauss(16)
        a, b = u_edges[:-1, None], u_edges[1:, None]
        nodes = 0.5 * (b - a) * x + 0.5 * (a + b)
        speed = self.lifted(nodes.ravel())[2].reshape(nodes.shape)
        return np.sum(0.5 * (b - a) * w * speed, axis=1)

    def lifted_states(self, u, fiber):
        P, T, _ = self.lifted(np.atleast_1d(np.asarray(u, dtype=float)))
        fiber = np.sign(np.broadcast_to(np.asarray(fiber, dtype=float), (len(P),)))
        if isinstance(self.model, RoundSphere):
            nu = np.cross(T, P)
        else:
            nu = _rot_minus(T)
        return P, fiber[:, None] * nu

    def conormal_states(self, u, fiber):
        P, XI = self.lifted_states(u, fiber)
        return self.model.normalize_states(P.copy(), XI.copy())

    def tangent_jacobi(self, u, fiber, *, normalized=True):
        kappa = self.signed_curvature(u, fiber)
        out = np.ones((len(kappa), 1, 2))
        out[:, 0, 1] = kappa
        if normalized:
            out /= np.sqrt(1.0 + kappa**2)[:, None, None]
        return out

    def tangent_states(self, u, fiber, *, step=1e-6):
        """Central differences of the lifted conormal states, per unit arclength."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        lo = u - step if self.closed else np.maximum(u - step, 0.0)
        hi = u + step if self.closed else np.minimum(u + step, 1.0)
        Xa, XIa = self.lifted_states(hi, fiber)
        Xb, XIb = self.lifted_states(lo, fiber)
        speed = self.lifted(u)[2]
        scale = ((hi - lo) * speed)[:, None]
        return (Xa - Xb) / scale, (XIa - XIb) / scale

    def sample_params(self, n, rng):
        v = (np.arange(n) + rng.random(n)) / n
        u = self._arclength_inverse(v)
        sign = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        return u, sign

    def _arclength_inverse(self, v):
        return v

    def snh_distance(self, X, XI):
        u, r = self.foot(X, exact=False)
        best = np.full(len(X), np.inf)
        sign = np.ones(len(X))
        for s in (1.0, -1.0):
            Xc, XIc = self.conormal_states(u, s)
            d = self.model.sasaki_states(X, XI, Xc, XIc)
            better = d < best
            best = np.where(better, d, best)
            sign = np.where(better, s, sign)
        return best, u, sign

    def _grid_foot(self, X):
        """Numeric nearest-point search: dense grid then golden-section."""
        m = GRID_NODES
        nodes = np.arange(m) / m if self.closed else np.linspace(0.0, 1.0, m)
        P = self.lifted(nodes)[0]
        D = np.empty((len(X), m))
        for j in range(m):
            D[:, j] = self._point_distance(X, np.broadcast_to(P[j], X.shape))
        k = np.argmin(D, axis=1)
        h = 1.0 / m
        lo, hi = nodes[k] - h, nodes[k] + h
        if not self.closed:
            lo, hi = np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)

        def fun(idx, u):
            uu = np.mod(u, 1.0) if self.closed else np.clip(u, 0.0, 1.0)
            return self._point_distance(X[idx], self.lifted(uu)[0])

        u, d = golden_refine(fun, lo, hi, tol=1e-12)
        u = np.mod(u, 1.0) if self.closed else np.clip(u, 0.0, 1.0)
        return u, d

    def _point_distance(self, X, P):
        if isinstance(self.model, HyperbolicSurface):
            P = np.asarray(P, dtype=float)
            return _near_point_distance(self.model, X, P)
        return self.model.base_distance(X, P)


class ParametricCurve(Curve):
    """A curve given by a vectorised map ``u -> points`` in model coordinates.

    ``derivative`` and ``second_derivative`` may be supplied; otherwise
    central differences with step ``1e-5`` are used.
    """

    kind = "parametric"

    def __repr__(self):
        return f"ParametricCurve({getattr(self.func, '__name__', 'func')}, closed={self.closed})"

    def __init__(self, model, func, *, closed=True, derivative=None, second_derivative=None):
        super().__init__(model)
        self.func = func
        self.closed = bool(closed)
        self.derivative = derivative
        self.second_derivative = second_derivative

    def _eval(self, u):
        P = np.asarray(self.func(np.asarray(u, dtype=float)), dtype=float)
        if P.ndim == 1:
            P = P[None]
        return P

    def _d1(self, u):
        if self.derivative is not None:
            return np.atleast_2d(np.asarray(self.derivative(u), dtype=float))
        return (self._eval(u + FD_STEP) - self._eval(u - FD_STEP)) / (2.0 * FD_STEP)

    def _d2(self, u):
        if self.second_derivative is not None:
            return np.atleast_2d(np.asarray(self.second_derivative(u), dtype=float))
        return (self._eval(u + FD_STEP) - 2.0 * self._eval(u) + self._eval(u - FD_STEP)) / FD_STEP**2

    def lifted(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        P = self._eval(u)
        V = self._d1(u)
        if isinstance(self.model, RoundSphere):
            V = V - np.sum(V * P, axis=1, keepdims=True) * P
        norm = np.linalg.norm(V, axis=1)
        speed = norm / P[:, 1] if isinstance(self.model, HyperbolicSurface) else norm
        self._check_immersion(speed)
        return P, V / norm[:, None], speed

    def signed_curvature(self, u, fiber):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        P, nu = self.lifted_states(u, fiber)
        V, A = self._d1(u), self._d2(u)
        if isinstance(self.model, RoundSphere):
            V = V - np.sum(V * P, axis=1, keepdims=True) * P
        v2 = np.sum(V * V, axis=1)
        k = -np.sum(A * nu, axis=1) / v2
        if isinstance(self.model, HyperbolicSurface):
            # conformal factor 1/y: k_g = y (k_euclid - d_n log(1/y))
            k = k * P[:, 1] - nu[:, 1]
        return k

    @cached_property
    def _arclength_table(self):
        u = np.linspace(0.0, 1.0, 4097)
        speed = self.lifted(u)[2]
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(u))])
        return u, cum / cum[-1]

    def _arclength_inverse(self, v):
        u, s = self._arclength_table
        return np.interp(v, s, u)

    def foot(self, X, *, exact=True):
        return self._grid_foot(np.asarray(X, dtype=float))


# -- sphere curves -------------------------------------------------------------

class LatitudeCircle(Curve):
    """Circle at polar angle ``psi0`` on ``S^2``; ``+1`` conormal points away from the north pole."""

    kind = "latitude"

    def __init__(self, model, psi0):
        if not isinstance(model, RoundSphere):
            raise ModelMismatch("latitude circles live on the sphere")
        super().__init__(model)
        psi0 = float(psi0)
        if not 0.0 < psi0 < np.pi:
            raise ValueError("polar angle must lie in (0, pi)")
        self.psi0 = psi0

    def __repr__(self):
        return f"LatitudeCircle(psi0={self.psi0})"

    def to_config(self):
        return {"kind": "latitude", "psi0": self.psi0}

    @property
    def measure(self):
        return 2.0 * np.pi * np.sin(self.psi0)

    def lifted(self, u):
        phi = 2.0 * np.pi * np.atleast_1d(np.asarray(u, dtype=float))
        s, c = np.sin(self.psi0), np.cos(self.psi0)
        P = np.stack([s * np.cos(phi), s * np.sin(phi), np.full_like(phi, c)], axis=1)
        T = np.stack([-np.sin(phi), np.cos(phi), np.zeros_like(phi)], axis=1)
        return P, T, np.full(len(phi), 2.0 * np.pi * s)

    def signed_curvature(self, u, fiber):
        fiber = np.broadcast_to(np.asarray(fiber, dtype=float), np.shape(np.atleast_1d(u)))
        return np.sign(fiber) / np.tan(self.psi0)

    def foot(self, X, *, exact=True):
        X = np.asarray(X, dtype=float)
        u = np.mod(np.arctan2(X[:, 1], X[:, 0]) / (2.0 * np.pi), 1.0)
        psi = np.arctan2(np.hypot(X[:, 0], X[:, 1]), X[:, 2])
        return u, np.abs(psi - self.psi0)


class Equator(LatitudeCircle):
    kind = "equator"

    def __init__(self, model):
        super().__init__(model, np.pi / 2)

    def __repr__(self):
        return "Equator()"

    def to_config(self):
        return {"kind": "equator"}

    @property
    def measure(self):
        return 2.0 * np.pi

    def signed_curvature(self, u, fiber):
        return np.zeros(np.shape(np.atleast_1d(u)))


# -- torus curves --------------------------------------------------------------

def _bezout(p, q):
    """Integers ``(a, b)`` with ``a q - b p = 1`` for coprime ``(p, q)``."""
    def egcd(x, y):
        if y == 0:
            return x, 1, 0
        g, s, t = egcd(y, x % y)
        return g, t, s - (x // y) * t
    g, s, t = egcd(q, p)
    # s q + t p = g = +-1
    return s * g, -t * g


class TorusGeodesic(Curve):
    """Closed geodesic ``x0 + u v (mod 1)`` for a primitive lattice vector ``v``."""

    kind = "torus_geodesic"

    def __init__(self, model, direction=(0, 1), offset=(0.0, 0.0)):
        if not isinstance(model, FlatTorus):
            raise ModelMismatch("torus geodesics live on the flat torus")
        super().__init__(model)
        p, q = (int(round(c)) for c in direction)
        if (p, q) == (0, 0) or gcd(abs(p), abs(q)) != 1:
            raise ValueError("direction must be a primitive nonzero lattice vector")
        self.direction = np.array([p, q], dtype=float)
        self.offset = np.mod(np.asarray(offset, dtype=float), 1.0)
        self._len = float(np.hypot(p, q))
        self._normal = np.array([q, -p], dtype=float) / self._len
        self._bez = _bezout(p, q)

    def __repr__(self):
        return f"TorusGeodesic(direction={self.direction.astype(int).tolist()}, offset={self.offset.tolist()})"

    def to_config(self):
        return {"kind": "torus_geodesic", "direction": self.direction.astype(int).tolist(),
                "offset": self.offset.tolist()}

    @property
    def measure(self):
        return self._len

    def lifted(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        P = self.offset + u[:, None] * self.direction
        T = np.broadcast_to(self.direction / self._len, P.shape).copy()
        return P, T, np.full(len(u), self._len)

    def signed_curvature(self, u, fiber):
        return np.zeros(np.shape(np.atleast_1d(u)))

    def foot(self, X, *, exact=True):
        delta = np.asarray(X, dtype=float) - self.offset
        spacing = 1.0 / self._len
        o = delta @ self._normal
        ow = o - spacing * np.floor(o / spacing + 0.5)
        foot = delta - ow[:, None] * self._normal
        j = np.round(self._len * (foot @ self._normal)).astype(np.int64)
        lattice = j[:, None] * np.array(self._bez, dtype=float)
        u = np.mod((foot - lattice) @ self.direction / self._len**2, 1.0)
        return u, np.abs(ow)


class TorusCircle(Curve):
    """Round circle of radius ``r < 1/2`` on the flat torus, traversed counter-clockwise."""

    kind = "torus_circle"

    def __init__(self, model, center=(0.5, 0.5), radius=0.25):
        if not isinstance(model, FlatTorus):
            raise ModelMismatch("torus circles live on the flat torus")
        super().__init__(model)
        radius = check_positive(float(radius), "radius")
        if radius >= 0.5:
            raise ValueError("radius must be below 1/2 for an embedded circle")
        self.center = np.mod(np.asarray(center, dtype=float), 1.0)
        self.radius = radius

    def __repr__(self):
        return f"TorusCircle(center={self.center.tolist()}, radius={self.radius})"

    def to_config(self):
        return {"kind": "torus_circle", "center": self.center.tolist(), "radius": self.radius}

    @property
    def measure(self):
        return 2.0 * np.pi * self.radius

    def lifted(self, u):
        phi = 2.0 * np.pi * np.atleast_1d(np.asarray(u, dtype=float))
        R = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        T = np.stack([-np.sin(phi), np.cos(phi)], axis=1)
        return self.center + self.radius * R, T, np.full(len(phi), 2.0 * np.pi * self.radius)

    def signed_curvature(self, u, fiber):
        fiber = np.broadcast_to(np.asarray(fiber, dtype=float), np.shape(np.atleast_1d(u)))
        return np.sign(fiber) / self.radius

    def foot(self, X, *, exact=True):
        delta = wrap_unit(np.asarray(X, dtype=float) - self.center)
        best_r = np.full(len(delta), np.inf)
        best_u = np.zeros(len(delta))
        for sx in (-1, 0, 1):
            for sy in (-1, 0, 1):
                d = delta + np.array([sx, sy])
                rho = np.hypot(d[:, 0], d[:, 1])
                r = np.abs(rho - self.radius)
                u = np.mod(np.arctan2(d[:, 1], d[:, 0]) / (2.0 * np.pi), 1.0)
                better = r < best_r
                best_r = np.where(better, r, best_r)
                best_u = np.where(better, u, best_u)
        return best_u, best_r


# -- hyperbolic curves ---------------------------------------------------------

class _FrameCurve(Curve):
    """Curve ``H = g0 . C`` with ``C`` a canonical curve through or around ``i``.

    Subclasses provide the canonical conormal frames (``+1`` side) and the
    canonical nearest-point map; lifts to the surface are handled here.
    """

    placement: np.ndarray
    extent: float

    @abstractmethod
    def canonical_frames(self, u):
        """Frames of the ``+1`` conormal at parameter ``u`` in canonical position."""

    @abstractmethod
    def canonical_foot(self, w):
        """Nearest parameter and distance to the canonical curve for complex points ``w``."""

    def lifted(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        F = self.placement @ self.canonical_frames(u)
        X, NU = states_from_frames(F)
        T = np.stack([-NU[:, 1], NU[:, 0]], axis=1)
        return X, T, np.full(len(u), self.measure)

    def _lifts(self, reach):
        if self.model.is_plane:
            return np.eye(2)[None]
        c = mobius(self.placement, 1j)
        offset = float(hyperbolic_distance(c, 1j))
        R = self.model.covering_radius
        ball = self.model.group_ball(offset + reach * R + self.extent + (1.0 if reach == 1 else 0.0))
        dist = hyperbolic_distance(mobius(ball, c), 1j)
        return ball[dist <= reach * R + self.extent + (1.0 if reach == 1 else 0.0)]

    @cached_property
    def near_lifts(self):
        # lifts meeting the unit neighbourhood of the fundamental domain
        return self._lifts(1)

    @cached_property
    def exact_lifts(self):
        # the nearest lift lies within the domain diameter of a reduced point
        return self._lifts(3)

    def _best_lift(self, G, lifts):
        place = lifts @ self.placement
        z = mobius(G, 1j)
        w = mobius(np.linalg.inv(place)[None], z[:, None])
        u, r = self.canonical_foot(w)
        best = np.argmin(r, axis=1)
        rows = np.arange(len(G))
        return place[best], u[rows, best], r[rows, best]

    def foot(self, X, *, exact=True):
        X = np.asarray(X, dtype=float)
        G = frames_from_states(X, np.tile([0.0, 1.0], (len(X), 1)))
        G = self.model.reduce_frames(G)
        lifts = self.exact_lifts if exact else self.near_lifts
        _, u, r = self._best_lift(G, lifts)
        return u, r

    def snh_distance(self, X, XI):
        G = self.model.reduce_frames(frames_from_states(X, XI))
        place, u, r = self._best_lift(G, self.near_lifts)
        M = np.linalg.inv(place @ self.canonical_frames(u)) @ G
        plus = fiber_angle(M)
        minus = np.pi - plus
        sign = np.where(plus <= minus, 1.0, -1.0)
        return np.hypot(r, np.minimum(plus, minus)), u, sign


class GeodesicCircle(_FrameCurve):
    """Hyperbolic circle of radius ``r`` about ``center``; ``+1`` is the outward conormal."""

    kind = "geodesic_circle"

    def __init__(self, model, center=(0.0, 1.0), radius=0.5):
        if not isinstance(model, HyperbolicSurface):
            raise ModelMismatch("geodesic circles are implemented on hyperbolic models")
        super().__init__(model)
        self.radius = check_positive(float(radius), "radius")
        self.center = np.asarray(center, dtype=float)
        self.placement = frames_from_states(self.center[None], np.array([[0.0, 1.0]]))[0]
        self.extent = self.radius

    def __repr__(self):
        return f"GeodesicCircle(center={self.center.tolist()}, radius={self.radius})"

    def to_config(self):
        return {"kind": "geodesic_circle", "center": self.center.tolist(), "radius": self.radius}

    @property
    def measure(self):
        return 2.0 * np.pi * np.sinh(self.radius)

    def canonical_frames(self, u):
        return rotation_frame(2.0 * np.pi * np.asarray(u, dtype=float)) @ geodesic_frames(self.radius)

    def canonical_foot(self, w):
        disk = (w - 1j) / (w + 1j)
        u = np.mod(np.angle(disk) / (2.0 * np.pi), 1.0)
        return u, np.abs(hyperbolic_distance(w, 1j) - self.radius)

    def signed_curvature(self, u, fiber):
        fiber = np.broadcast_to(np.asarray(fiber, dtype=float), np.shape(np.atleast_1d(u)))
        return np.sign(fiber) / np.tanh(self.radius)


class HorocycleSegment(_FrameCurve):
    """Arc ``{x + i y0 : a <= x <= b}`` of a horocycle centred at infinity.

    The ``+1`` conormal points downward (away from the horocycle's centre),
    where orbits spread like ``e^t``; the ``-1`` side is the stable one.
    """

    kind = "horocycle"
    closed = False
    stable_sign = -1.0

    def __init__(self, model, height=1.0, x_range=(-0.5, 0.5)):
        if not isinstance(model, HyperbolicSurface):
            raise ModelMismatch("horocycles are implemented on hyperbolic models")
        super().__init__(model)
        self.height = check_positive(float(height), "height")
        a, b = (float(v) for v in x_range)
        if not b > a:
            raise ValueError("horocycle x_range must be increasing")
        self.x_range = (a, b)
        s = np.sqrt(self.height)
        self.placement = np.array([[s, 0.0], [0.0, 1.0 / s]])
        self._a, self._b = a / self.height, b / self.height
        ends = np.array([self._a, self._b]) + 1j
        self.extent = float(np.max(hyperbolic_distance(ends, 1j)))

    def __repr__(self):
        return f"HorocycleSegment(height={self.height}, x_range={self.x_range})"

    def to_config(self):
        return {"kind": "horocycle", "height": self.height, "x_range": list(self.x_range)}

    @property
    def measure(self):
        return self._b - self._a

    def canonical_frames(self, u):
        x = self._a + (self._b - self._a) * np.asarray(u, dtype=float)
        N = np.zeros(x.shape + (2, 2))
        N[..., 0, 0] = N[..., 1, 1] = 1.0
        N[..., 0, 1] = x
        return N @ rotation_frame(np.pi)

    def canonical_foot(self, w):
        xc = np.clip(w.real, self._a, self._b)
        u = (xc - self._a) / (self._b - self._a)
        return u, hyperbolic_distance(w, xc + 1j)

    def signed_curvature(self, u, fiber):
        fiber = np.broadcast_to(np.asarray(fiber, dtype=float), np.shape(np.atleast_1d(u)))
        return np.sign(fiber) * 1.0


class HyperbolicGeodesicSegment(_FrameCurve):
    """Geodesic segment of given length from ``start`` in direction ``angle``.

    The ``+1`` conormal is the direction rotated by -90 degrees.  With
    ``closed=True`` the segment is a closed geodesic (its length is a
    period of the flow on the surface).
    """

    kind = "geodesic_segment"

    def __init__(self, model, start=(0.0, 1.0), angle=np.pi / 2, length=1.0, *, closed=False):
        if not isinstance(model, HyperbolicSurface):
            raise ModelMismatch("geodesic segments are implemented on hyperbolic models")
        super().__init__(model)
        self.start = np.asarray(start, dtype=float)
        self.angle = float(angle)
        self.length = check_positive(float(length), "length")
        self.closed = bool(closed)
        direction = np.array([[np.cos(self.angle), np.sin(self.angle)]])
        self.placement = frames_from_states(self.start[None], direction)[0]
        self.extent = self.length

    @classmethod
    def closed_axis(cls, model, index=0):
        """The closed geodesic along the axis of a hyperbolic generator."""
        g = model.generators[index]
        tr = abs(np.trace(g))
        length = 2.0 * np.arccosh(tr / 2.0)
        vals, vecs = np.linalg.eig(g)
        order = np.argsort(-np.abs(vals))
        P = vecs[:, order].real
        P = P / np.sqrt(abs(np.linalg.det(P)))
        if np.linalg.det(P) < 0:
            P[:, 1] *= -1
        # P maps the imaginary axis (fixed points infinity, 0) to the axis of g
        X, XI = states_from_frames(P[None])
        return cls(model, start=X[0], angle=float(np.arctan2(XI[0, 1], XI[0, 0])),
                   length=length, closed=True)

    def __repr__(self):
        return f"HyperbolicGeodesicSegment(start={self.start.tolist()}, angle={self.angle}, length={self.length})"

    def to_config(self):
        return {"kind": "geodesic_segment", "start": self.start.tolist(), "angle": self.angle,
                "length": self.length, "closed": self.closed}

    @property
    def measure(self):
        return self.length

    def canonical_frames(self, u):
        s = self.length * np.asarray(u, dtype=float)
        return geodesic_frames(s) @ rotation_frame(-0.5 * np.pi)

    def canonical_foot(self, w):
        s = np.clip(np.log(np.abs(w)), 0.0, self.length)
        return s / self.length, hyperbolic_distance(w, 1j * np.exp(s))

    def signed_curvature(self, u, fiber):
        return np.zeros(np.shape(np.atleast_1d(u)))


# -- config ----------------------------------------------------------------------

def submanifold_from_config(model, block):
    """Build ``H`` from a config block such as ``{"kind": "equator"}``."""
    if not isinstance(block, dict) or "kind" not in block:
        raise ConfigInvalid("missing required field 'kind' in H")
    kind = block["kind"]
    args = {k: v for k, v in block.items() if k != "kind"}
    builders = {
        "point": lambda: Point(model, args["x"]),
        "equator": lambda: Equator(model),
        "latitude": lambda: LatitudeCircle(model, args["psi0"]),
        "torus_geodesic": lambda: TorusGeodesic(model, args.get("direction", (0, 1)),
                                                args.get("offset", (0.0, 0.0))),
        "torus_circle": lambda: TorusCircle(model, args.get("center", (0.5, 0.5)),
                                            args.get("radius", 0.25)),
        "geodesic_circle": lambda: GeodesicCircle(model, args.get("center", (0.0, 1.0)),
                                                  args.get("radius", 0.5)),
        "horocycle": lambda: HorocycleSegment(model, args.get("height", 1.0),
                                              args.get("x_range", (-0.5, 0.5))),
        "geodesic_segment": lambda: HyperbolicGeodesicSegment(
            model, args.get("start", (0.0, 1.0)), args.get("angle", np.pi / 2),
            args.get("length", 1.0), closed=bool(args.get("closed", False))),
        "closed_geodesic": lambda: HyperbolicGeodesicSegment.closed_axis(model, int(args.get("generator", 0))),
    }
    if kind not in builders:
        raise ConfigInvalid(f"unknown submanifold kind '{kind}'")
    try:
        return builders[kind]()
    except KeyError as exc:
        raise ConfigInvalid(f"missing required field '{exc.args[0]}' in H") from exc
    except (ModelMismatch, ValueError, TypeError) as exc:
        raise ConfigInvalid(f"invalid H block: {exc}") from exc


__all__ = [
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
    "submanifold_from_config",
]
