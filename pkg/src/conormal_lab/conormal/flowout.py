"""Distance to ``H``, the Hamiltonian derivative of ``r_H``, flowout tubes
and the flowout measure ``mu_H``.

Flows are parametrised by arclength.  The Hamiltonian ``p = |xi|^2 - 1``
moves at speed 2, so a Hamiltonian time window ``|t| <= t0`` is the
arclength window ``|s| <= 2 t0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._scan import scan_minima
from .._validation import check_count, check_positive
from ..exceptions import EmptyPartition, NotConormal
from .samples import WeightedSampleSet

HAMILTONIAN_SPEED = 2.0
CONORMAL_TOL = 1e-6


def r_H(H, x):
    """Geodesic distance from the base point ``x`` to ``H``."""
    return H.r_H(x)


def snh_distance(H, rho):
    """Sasaki distance from a phase point to ``SN*H``."""
    H.model.validate(rho)
    d, _, _ = H.snh_distance(rho.x[None], rho.xi[None])
    return float(d[0])


def hp_r(H, rho, *, offsets=(1e-3, 5e-4)):
    """``|H_p r_H|`` at a conormal: one-sided quotients with Richardson extrapolation.

    ``r_H`` has a corner on ``H``, so the quotients are taken separately on
    each side of ``t = 0`` and their magnitudes averaged.
    """
    model = H.model
    model.validate(rho)
    if snh_distance(H, rho) > CONORMAL_TOL:
        raise NotConormal("phase point is not within 1e-6 of SN*H")
    big, small = (float(o) for o in offsets)
    t = np.array([big, small, -big, -small])
    X, _ = model.flow_states(np.repeat(rho.x[None], 4, 0), np.repeat(rho.xi[None], 4, 0),
                             HAMILTONIAN_SPEED * t)
    r = H.foot(X)[1]
    r0 = H.foot(rho.x[None])[1][0]
    q = (r - r0) / np.abs(t)
    ratio = big / small
    # first-order error in the step: D(small) + (D(small) - D(big)) / (ratio - 1)
    fwd = q[1] + (q[1] - q[0]) / (ratio - 1.0)
    bwd = q[3] + (q[3] - q[2]) / (ratio - 1.0)
    return float(0.5 * (abs(fwd) + abs(bwd)))


def _snh_dist_fn(H):
    def dist(X, XI, rows):
        return H.snh_distance(X, XI)[0]
    return dist


def tube_minima(H, X, XI, s_max, eps, *, ds=None):
    """Close approaches to ``SN*H`` along orbits for ``|s| <= s_max``.

    A single forward scan over ``[-s_max, s_max]`` so that ``s = 0`` is an
    interior grid point; returned times are relative to the input states.
    """
    ds = eps / 4.0 if ds is None else ds
    X0, XI0 = H.model.flow_states(X, XI, -s_max)
    m = scan_minima(H.model, X0, XI0, _snh_dist_fn(H), s_max=2.0 * s_max, ds=ds, threshold=eps)
    m.s = m.s - s_max
    return m


def in_tube_states(H, X, XI, T, eps):
    """Row-wise membership of the eps-thickened flowout tube ``Lambda_{H,T}``."""
    check_positive(eps, "eps")
    check_positive(T, "T", allow_zero=True)
    X = np.asarray(X, dtype=float)
    XI = np.asarray(XI, dtype=float)
    d0 = H.snh_distance(X, XI)[0]
    hit = d0 < eps
    if T == 0:
        return hit
    m = tube_minima(H, X, XI, T, eps)
    hit |= m.grid_min < eps
    hit[m.row] = True
    return hit


def in_tube(H, rho, T, eps):
    """Whether ``G^{-s}(rho)`` comes within ``eps`` of ``SN*H`` for some ``|s| <= T``."""
    H.model.validate(rho)
    return bool(in_tube_states(H, rho.x[None], rho.xi[None], float(T), float(eps))[0])


@dataclass
class CellPartition:
    """Product cells of ``SN*H``: uniform parameter bins times fiber bins.

    For curves the fiber bins are the two conormal signs (index 0 is ``+1``);
    for points they are uniform angular bins starting at ``-pi``.
    """

    H: object
    n_u: int = 64
    n_fiber: int | None = None

    def __post_init__(self):
        if self.n_fiber is None:
            self.n_fiber = 2 if self.H.codim == 1 else 16
        if not isinstance(self.n_u, (int, np.integer)) or not isinstance(self.n_fiber, (int, np.integer)):
            raise EmptyPartition("cell counts must be integers")
        if self.n_u < 1 or self.n_fiber < 1:
            raise EmptyPartition("partition needs at least one cell")
        if self.H.codim == 1 and self.n_fiber != 2:
            raise EmptyPartition("a curve has exactly two conormal fiber cells")
        if self.H.codim == 2:
            self.n_u = 1

    @property
    def shape(self):
        return (self.n_u, self.n_fiber)

    @property
    def size(self):
        return self.n_u * self.n_fiber

    @property
    def u_edges(self):
        return np.linspace(0.0, 1.0, self.n_u + 1)

    def centers(self):
        """``(u, fiber)`` at each cell centre, flattened row-major."""
        u = (np.arange(self.n_u) + 0.5) / self.n_u
        if self.H.codim == 1:
            f = np.array([1.0, -1.0])
        else:
            f = -np.pi + 2.0 * np.pi * (np.arange(self.n_fiber) + 0.5) / self.n_fiber
        uu, ff = np.meshgrid(u, f, indexing="ij")
        return uu.ravel(), ff.ravel()

    def index(self, u, fiber):
        iu = np.clip(np.floor(np.asarray(u) * self.n_u).astype(int), 0, self.n_u - 1)
        if self.H.codim == 1:
            jf = np.where(np.asarray(fiber) > 0, 0, 1)
        else:
            a = np.mod(np.asarray(fiber) + np.pi, 2.0 * np.pi)
            jf = np.clip(np.floor(a / (2.0 * np.pi) * self.n_fiber).astype(int), 0, self.n_fiber - 1)
        return iu * self.n_fiber + jf

    def cell_measure(self):
        """``sigma_SN*H`` of every cell, flattened like :meth:`centers`."""
        base = self.H.cell_measure(self.u_edges)
        fib = 1.0 if self.H.codim == 1 else 2.0 * np.pi / self.n_fiber
        return np.repeat(base * fib, self.n_fiber)


def flowout_measure(mu, H, t0, partition=None, *, eps=0.02, ds=None, chunk=20_000):
    """Cell masses of ``mu_H(A) = mu(tube of A over |t| <= t0) / (2 t0)``.

    A sample of ``mu`` is in the tube of a cell when its orbit has a close
    approach to ``SN*H`` (Sasaki distance below ``eps``) at arclength
    ``|s| <= 2 t0`` whose nearest conormal lies in the cell.  Returns a
    sample set with the cell masses placed at cell centres; the raw masses
    are in ``meta["cell_mass"]`` with shape ``partition.shape``.
    """
    t0 = check_positive(t0, "t0")
    check_positive(eps, "eps")
    if partition is None:
        partition = CellPartition(H)
    if not isinstance(partition, CellPartition) or partition.size == 0:
        raise EmptyPartition("flowout_measure needs a non-empty CellPartition")
    if not isinstance(mu, WeightedSampleSet):
        raise TypeError("mu must be a WeightedSampleSet")
    window = HAMILTONIAN_SPEED * t0
    ds = eps / 4.0 if ds is None else ds
    mass = np.zeros(partition.size)
    n = len(mu)
    check_count(chunk, "chunk")
    for start in range(0, n, chunk):
        X = mu.X[start:start + chunk]
        XI = mu.XI[start:start + chunk]
        w = mu.weights[start:start + chunk]
        # scan a little past the window so minima near its edge are bracketed
        m = tube_minima(H, X, XI, window + 2.0 * ds, eps, ds=ds)
        ok = np.abs(m.s) <= window
        r, s = m.row[ok], m.s[ok]
        if r.size:
            Xs, XIs = H.model.flow_states(X[r], XI[r], s)
            _, u, fib = H.snh_distance(Xs, XIs)
            # each sample counts once per cell it reaches
            pairs = np.unique(np.stack([r, partition.index(u, fib)], axis=1), axis=0)
            np.add.at(mass, pairs[:, 1], w[pairs[:, 0]])
    mass /= 2.0 * t0
    u, fib = partition.centers()
    Xc, XIc = H.conormal_states(u, fib)
    return WeightedSampleSet(
        H.model, Xc, XIc, mass, "mu_H", u, fib,
        {"t0": t0, "eps": eps, "cell_mass": mass.reshape(partition.shape),
         "cell_measure": partition.cell_measure().reshape(partition.shape)},
    )
