"""Defect-measure pairings of plane-wave families and a cell estimate of the limit measure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls
from scipy.stats import qmc
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import check_count
from ..conormal.samples import WeightedSampleSet
from ..exceptions import ModelMismatch
from ..spectral.modes import TorusPlaneWave
from .quantization import Symbol, min_grid, quantize_apply, torus_grid

DROP_MASS = 1e-10


@dataclass(frozen=True)
class PairingResult:
    h: np.ndarray
    values: np.ndarray
    limit: complex


def _family(modes):
    modes = list(modes)
    if not modes or not all(isinstance(m, TorusPlaneWave) for m in modes):
        raise ModelMismatch("defect pairings are computed for torus plane-wave families")
    return modes


def richardson_limit(h, values):
    """Limit at ``h -> 0`` assuming ``v(h) = L + c h``, from the two smallest ``h``."""
    h = np.asarray(h, dtype=float)
    v = np.asarray(values, dtype=complex)
    if len(h) < 2:
        return complex(v[-1])
    order = np.argsort(h)
    h1, h2 = h[order[0]], h[order[1]]
    v1, v2 = v[order[0]], v[order[1]]
    return complex((v1 * h2 - v2 * h1) / (h2 - h1))


def pairing(a, mode, G=None):
    """``<Op_h(a) phi, phi>`` on the grid (trapezoid, exact for band-limited integrands)."""
    G = min_grid(mode.h) if G is None else int(G)
    X = torus_grid(G, mode.model.dim)
    phi = mode.eval(X.reshape(-1, mode.model.dim)).reshape(X.shape[:-1])
    return complex(np.mean(quantize_apply(a, mode.h, phi, G) * np.conj(phi)))


def defect_pairing(a, modes, G=None):
    """Pairings along a family and their Richardson limit."""
    modes = _family(modes)
    if G is None:
        G = max(min_grid(m.h) for m in modes)
    vals = np.array([pairing(a, m, G) for m in modes])
    h = np.array([m.h for m in modes])
    return PairingResult(h, vals, richardson_limit(h, vals))


def _radial_bump(r, lo=0.5, hi=1.5):
    """Smooth bump on ``(lo, hi)`` equal to 1 at the midpoint."""
    c, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    z = (np.asarray(r, dtype=float) - c) / half
    out = np.zeros_like(z)
    inside = np.abs(z) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - z[inside] ** 2))
    return out


class DefectMeasureEstimator(BaseEstimator):
    """Nonnegative cell masses on ``S*T^2`` matching pairings against a symbol basis.

    The basis is ``e^{2 pi i <q, x>} vM_j(arg xi) bump(|xi|)`` for
    ``|q_i| <= q_max`` and ``n_angles`` von Mises bumps; cells are an
    ``n_x x n_x`` grid in ``x`` times ``n_angles`` directions, anchored at
    the origin and at angle 0.
    """

    def __init__(self, q_max=2, n_angles=16, n_x=None, kappa=8.0, grid=None):
        self.q_max = q_max
        self.n_angles = n_angles
        self.n_x = n_x
        self.kappa = kappa
        self.grid = grid

    def _angles(self):
        return 2.0 * np.pi * np.arange(self.n_angles) / self.n_angles

    def _qs(self):
        r = np.arange(-self.q_max, self.q_max + 1)
        return np.stack(np.meshgrid(r, r, indexing="ij"), axis=-1).reshape(-1, 2)

    def basis(self):
        """The basis symbols in a fixed order (q major, angle minor)."""
        out = []
        for q in self._qs():
            for th in self._angles():
                out.append(self._basis_symbol(q, th))
        return out

    def _fiber_factor(self, theta):
        kappa = self.kappa

        def g(xi):
            ang = np.arctan2(xi[..., 1], xi[..., 0])
            vm = np.exp(kappa * (np.cos(ang - theta) - 1.0))
            return vm * _radial_bump(np.linalg.norm(xi, axis=-1))

        return g

    def _basis_symbol(self, q, theta):
        fx = lambda x, q=q: np.exp(2j * np.pi * (x @ q))
        return Symbol.product(fx, self._fiber_factor(theta), xi_radius=1.5, bound=1.0,
                              name=f"q={tuple(q)},theta={theta:.3f}")

    def basis_pairings(self, modes, G):
        """Pairings of every basis symbol with every mode, shape ``(basis, modes)``.

        ``Op_h(f(x) g(xi)) = f Op_h(g)``, so one Fourier multiplier per
        direction and mode serves all ``x`` factors.
        """
        qs = self._qs()
        X = torus_grid(G, 2)
        E = np.exp(2j * np.pi * (X @ qs.T))                     # G x G x q
        out = np.empty((len(qs), self.n_angles, len(modes)), dtype=complex)
        for i, mode in enumerate(modes):
            phi = mode.eval(X.reshape(-1, 2)).reshape(G, G)
            for j, th in enumerate(self._angles()):
                g = Symbol.fiber(self._fiber_factor(th), xi_radius=1.5)
                V = quantize_apply(g, mode.h, phi, G) * np.conj(phi)
                out[:, j, i] = np.tensordot(V, E, axes=([0, 1], [0, 1])) / V.size
        return out.reshape(-1, len(modes))

    def cell_centers(self):
        n_x = self.n_x or 2 * self.q_max + 1
        c = (np.arange(n_x) + 0.5) / n_x
        xx, yy, th = np.meshgrid(c, c, self._angles(), indexing="ij")
        return np.stack([xx.ravel(), yy.ravel()], axis=1), th.ravel()

    def _design(self, X, theta):
        qs, angles = self._qs(), self._angles()
        F = np.exp(2j * np.pi * (X @ qs.T))                               # cells x q
        V = np.exp(self.kappa * (np.cos(theta[:, None] - angles[None]) - 1.0))  # cells x angle
        return (F[:, :, None] * V[:, None, :]).reshape(len(X), -1).T      # basis x cells

    def fit(self, modes, y=None):
        modes = _family(modes)
        if modes[0].model.dim != 2:
            raise ModelMismatch("the estimator is implemented on T^2")
        check_count(self.n_angles, "n_angles")
        self.model_ = modes[0].model
        G = self.grid or max(min_grid(m.h) for m in modes)
        h = np.array([m.h for m in modes])
        self.pairings_ = np.array([richardson_limit(h, row) for row in self.basis_pairings(modes, G)])
        X, theta = self.cell_centers()
        D = self._design(X, theta)
        A = np.vstack([D.real, D.imag])
        b = np.concatenate([self.pairings_.real, self.pairings_.imag])
        mass, resid = nnls(A, b, maxiter=50 * A.shape[1])
        keep = mass >= DROP_MASS
        self.cell_x_, self.cell_theta_, self.cell_mass_ = X[keep], theta[keep], mass[keep]
        self.residual_ = float(resid)
        self.n_x_ = self.n_x or 2 * self.q_max + 1
        return self

    def integrate(self, a):
        """``int a dmu`` for the estimated measure."""
        check_is_fitted(self, "cell_mass_")
        xi = np.stack([np.cos(self.cell_theta_), np.sin(self.cell_theta_)], axis=1)
        return complex(np.sum(self.cell_mass_ * a(self.cell_x_, xi)))

    def to_samples(self, N=100_000, seed=0):
        """Resample to ``N`` phase points: Latin-hypercube ``x`` inside each cell, cell direction."""
        check_is_fitted(self, "cell_mass_")
        N = check_count(N, "N")
        k = len(self.cell_mass_)
        per = max(1, N // k)
        width = 1.0 / self.n_x_
        X, XI, W = [], [], []
        for j in range(k):
            pts = qmc.LatinHypercube(d=2, seed=np.random.default_rng([int(seed), 3, j])).random(per)
            lo = self.cell_x_[j] - 0.5 * width
            X.append(np.mod(lo + width * pts, 1.0))
            XI.append(np.tile([np.cos(self.cell_theta_[j]), np.sin(self.cell_theta_[j])], (per, 1)))
            W.append(np.full(per, self.cell_mass_[j] / per))
        X, XI, W = np.concatenate(X), np.concatenate(XI), np.concatenate(W)
        X, XI = self.model_.normalize_states(X, XI)
        return WeightedSampleSet(self.model_, X, XI, W, "mu", meta={"defect_cells": k, "seed": int(seed)})


def estimate_defect_measure(modes, N=100_000, seed=0, **kw):
    return DefectMeasureEstimator(**kw).fit(modes).to_samples(N, seed)


__all__ = ["DefectMeasureEstimator", "PairingResult", "defect_pairing", "estimate_defect_measure",
           "pairing", "richardson_limit"]
