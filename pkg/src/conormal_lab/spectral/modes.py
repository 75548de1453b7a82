"""Explicit Laplace eigenfunctions with ``-h^2 Delta phi = phi``.

``h = 1 / sqrt(lambda)`` for the Laplace eigenvalue ``lambda``: ``4 pi^2 |m|^2``
for plane waves on the unit torus and ``l (l + 1)`` on the unit sphere.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from .._validation import as_rows, check_count
from ..exceptions import ModelMismatch
from ..geometry.flat import FlatTorus
from ..geometry.sphere import RoundSphere
from .legendre import legendre, sectoral_constant

NORM_TOL = 1e-8
# finite-difference step for the residual, as a fraction of h
RESIDUAL_STEP = 0.05


def _tangent_projection(X, V):
    return V - np.sum(V * X, axis=1, keepdims=True) * X


def _orthonormal_pair(axis):
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    e1 = np.cross(a, np.eye(3)[np.argmin(np.abs(a))])
    e1 /= np.linalg.norm(e1)
    return a, e1, np.cross(a, e1)


class EigenMode(ABC):
    """An L2-normalised eigenfunction on a model surface."""

    model_kind: type

    def __init__(self, model):
        if not isinstance(model, self.model_kind):
            raise ModelMismatch(f"{type(self).__name__} lives on {self.model_kind.__name__}, not {model!r}")
        self.model = model

    @property
    @abstractmethod
    def h(self):
        """Semiclassical parameter ``1 / sqrt(eigenvalue)``."""

    @property
    @abstractmethod
    def sup_norm(self):
        """``max |phi|`` over the model."""

    @abstractmethod
    def _values(self, X):
        ...

    @abstractmethod
    def _gradient(self, X):
        ...

    @abstractmethod
    def l2_norm(self):
        """``||phi||_{L^2}`` by a quadrature that is exact for the mode."""

    def _points(self, X):
        width = self.model.coord_dim
        try:
            return as_rows(X, width, name="x")
        except ValueError as exc:
            raise ModelMismatch(str(exc)) from None

    def eval(self, X):
        X = self._points(X)
        return self._values(X)

    def __call__(self, X):
        return self.eval(X)

    def gradient(self, X):
        """Riemannian gradient in model coordinates (complex, one row per point)."""
        return self._gradient(self._points(X))

    def _check_norm(self):
        err = abs(self.l2_norm() - 1.0)
        if err > NORM_TOL:
            raise ValueError(f"{self!r} is not normalised (error {err:.2e})")

    def laplacian(self, X, step=None):
        """Fourth-order finite-difference Laplacian (independent of the eigen-relation)."""
        X = self._points(X)
        delta = RESIDUAL_STEP * self.h if step is None else float(step)
        f = self._extension
        total = -30.0 * f(X) * X.shape[1]
        for j in range(X.shape[1]):
            e = np.zeros(X.shape[1])
            e[j] = delta
            total = total + 16.0 * (f(X + e) + f(X - e)) - (f(X + 2 * e) + f(X - 2 * e))
        return total / (12.0 * delta**2)

    def helmholtz_residual(self, X, step=None):
        """``|(-h^2 Delta - 1) phi|`` pointwise, with the Laplacian by finite differences."""
        X = self._points(X)
        return np.abs(-self.h**2 * self.laplacian(X, step) - self.eval(X))

    def _extension(self, X):
        return self._values(X)


class TorusPlaneWave(EigenMode):
    """``exp(2 pi i <m, x>)`` on the unit torus."""

    model_kind = FlatTorus

    def __init__(self, model, m):
        super().__init__(model)
        m = np.asarray(m)
        if m.shape != (model.dim,) or not np.all(m == np.round(m)):
            raise ValueError(f"lattice vector must be {model.dim} integers")
        self.m = m.astype(int)
        if not np.any(self.m):
            raise ValueError("lattice vector must be nonzero")
        self._check_norm()

    def __repr__(self):
        return f"TorusPlaneWave(m={tuple(int(v) for v in self.m)})"

    @property
    def h(self):
        return 1.0 / (2.0 * np.pi * np.linalg.norm(self.m))

    @property
    def frequency(self):
        return self.m

    @property
    def sup_norm(self):
        return 1.0

    def _values(self, X):
        return np.exp(2j * np.pi * (X @ self.m))

    def _gradient(self, X):
        return 2j * np.pi * self._values(X)[:, None] * self.m[None, :]

    def l2_norm(self):
        # trapezoid rule on a grid finer than the band limit is exact
        g = 2 * int(np.max(np.abs(self.m))) + 2
        axes = [np.arange(g) / g] * self.model.dim
        grid = np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=1)
        return float(np.sqrt(np.mean(np.abs(self._values(grid)) ** 2)))


class _SphereMode(EigenMode):
    model_kind = RoundSphere

    def __init__(self, model, l, axis):
        super().__init__(model)
        if model.dim != 2:
            raise ModelMismatch("sphere modes are implemented on S^2")
        self.l = check_count(l, "l")
        self.axis, self.e1, self.e2 = _orthonormal_pair(axis)
        self._check_norm()

    @property
    def h(self):
        return 1.0 / np.sqrt(self.l * (self.l + 1))

    def _extension(self, X):
        # degree-zero homogeneous extension: its ambient Laplacian on |x| = 1
        # is the Laplace-Beltrami operator
        return self._values(X / np.linalg.norm(X, axis=1, keepdims=True))


class SphereZonal(_SphereMode):
    """``sqrt((2l + 1) / 4 pi) P_l(<x, axis>)``."""

    def __init__(self, model, l, axis=(0.0, 0.0, 1.0)):
        super().__init__(model, l, axis)

    def __repr__(self):
        return f"SphereZonal(l={self.l}, axis={tuple(np.round(self.axis, 12))})"

    @property
    def constant(self):
        return np.sqrt((2 * self.l + 1) / (4.0 * np.pi))

    @property
    def sup_norm(self):
        return self.constant

    def _values(self, X):
        return self.constant * legendre(self.l, X @ self.axis)[0] + 0j

    def _gradient(self, X):
        dp = legendre(self.l, X @ self.axis)[1]
        return (self.constant * dp)[:, None] * _tangent_projection(X, np.broadcast_to(self.axis, X.shape)) + 0j

    def l2_norm(self):
        t, w = np.polynomial.legendre.leggauss(self.l + 2)
        p = legendre(self.l, t)[0]
        return float(np.sqrt(2.0 * np.pi * self.constant**2 * np.sum(w * p**2)))


class SphereSectoral(_SphereMode):
    """``c_l (<x, e1> + i <x, e2>)^l``: modulus ``Pbar_l^l(cos theta)``, phase ``e^{i l phi}``."""

    def __init__(self, model, l, axis=(0.0, 0.0, 1.0)):
        super().__init__(model, l, axis)

    def __repr__(self):
        return f"SphereSectoral(l={self.l}, axis={tuple(np.round(self.axis, 12))})"

    @property
    def constant(self):
        return sectoral_constant(self.l)

    @property
    def sup_norm(self):
        return self.constant

    def _w(self, X):
        return X @ self.e1 + 1j * (X @ self.e2)

    def _values(self, X):
        return self.constant * self._w(X) ** self.l

    def _gradient(self, X):
        coef = self.constant * self.l * self._w(X) ** (self.l - 1)
        E = np.broadcast_to(self.e1 + 1j * self.e2, X.shape)
        proj = E - np.sum(E * X, axis=1, keepdims=True) * X
        return coef[:, None] * proj

    def l2_norm(self):
        t, w = np.polynomial.legendre.leggauss(self.l + 2)
        return float(np.sqrt(2.0 * np.pi * self.constant**2 * np.sum(w * (1.0 - t**2) ** self.l)))


def plane_wave_family(model, frequencies, direction=(1, 0)):
    """Plane waves ``m = k * direction`` for each integer ``k``."""
    d = np.asarray(direction, dtype=int)
    return [TorusPlaneWave(model, int(k) * d) for k in frequencies]


def zonal_family(model, degrees, axis=(0.0, 0.0, 1.0)):
    return [SphereZonal(model, int(l), axis) for l in degrees]


def sectoral_family(model, degrees, axis=(0.0, 0.0, 1.0)):
    return [SphereSectoral(model, int(l), axis) for l in degrees]


def mode_from_config(model, block):
    """``{"kind": "plane_wave", "m": [..]}``, ``{"kind": "zonal"|"sectoral", "l": .., "axis": ..}``."""
    from .._validation import require
    from ..exceptions import ConfigInvalid

    kind = require(block, "kind", "mode")
    try:
        if kind == "plane_wave":
            return TorusPlaneWave(model, require(block, "m", "mode"))
        if kind == "zonal":
            return SphereZonal(model, int(require(block, "l", "mode")), block.get("axis", (0, 0, 1)))
        if kind == "sectoral":
            return SphereSectoral(model, int(require(block, "l", "mode")), block.get("axis", (0, 0, 1)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid(f"invalid mode block: {exc}") from exc
    raise ConfigInvalid(f"unknown mode kind '{kind}'")
