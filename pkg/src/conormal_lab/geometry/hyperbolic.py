"""Compact hyperbolic surfaces ``Gamma \\ H^2`` and the hyperbolic plane.

Unit tangent vectors are identified with frames ``g`` in ``SL(2, R)``:
the base point is ``g . i`` and the direction is the image of the upward
unit vector at ``i``.  The geodesic flow is right multiplication by
``diag(e^{t/2}, e^{-t/2})``; the group acts on the left.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .._validation import wrap_angle
from ..exceptions import GroupReductionFailed, InvalidPhasePoint
from .base import COSPHERE_TOL, ManifoldModel, _raise_cut

DET_TOL = 1e-12
MAX_REDUCTION_STEPS = 10_000
FLOW_CHUNK = 0.5
TIE_TOL = 1e-9


# -- SL(2, R) helpers --------------------------------------------------------

def frames_from_states(X, XI):
    """Frames for base points ``X = (x, y)`` and unit directions ``XI``."""
    x, y = X[:, 0], X[:, 1]
    theta = np.arctan2(XI[:, 1], XI[:, 0])
    phi = 0.5 * (theta - 0.5 * np.pi)
    sy = np.sqrt(y)
    c, s = np.cos(phi), np.sin(phi)
    G = np.empty((len(x), 2, 2))
    # [[sy, x/sy], [0, 1/sy]] @ [[c, s], [-s, c]]
    G[:, 0, 0] = sy * c - x / sy * s
    G[:, 0, 1] = sy * s + x / sy * c
    G[:, 1, 0] = -s / sy
    G[:, 1, 1] = c / sy
    return G


def states_from_frames(G):
    a, b, c, d = G[:, 0, 0], G[:, 0, 1], G[:, 1, 0], G[:, 1, 1]
    den = c * 1j + d
    z = (a * 1j + b) / den
    direction = 1j / den**2
    theta = np.angle(direction)
    X = np.stack([z.real, z.imag], axis=1)
    XI = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return X, XI


def mobius(G, z):
    """Apply frames to complex points; broadcasts ``G[..., 2, 2]`` against ``z[...]``."""
    return (G[..., 0, 0] * z + G[..., 0, 1]) / (G[..., 1, 0] * z + G[..., 1, 1])


def hyperbolic_distance(z, w):
    """Upper half-plane distance, accurate for nearby points."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return 2.0 * np.arcsinh(np.abs(z - w) / (2.0 * np.sqrt(z.imag * w.imag)))


def _spread_to_i(z):
    # monotone in d(z, i); cheaper than the distance itself
    return np.abs(z - 1j) ** 2 / z.imag


def geodesic_frames(t):
    t = np.asarray(t, dtype=float)
    A = np.zeros(t.shape + (2, 2))
    A[..., 0, 0] = np.exp(0.5 * t)
    A[..., 1, 1] = np.exp(-0.5 * t)
    return A


def rotation_frame(angle):
    """Frame at ``i`` whose direction is rotated by ``angle`` from upward."""
    phi = 0.5 * np.asarray(angle, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    K = np.empty(phi.shape + (2, 2))
    K[..., 0, 0] = c
    K[..., 0, 1] = s
    K[..., 1, 0] = -s
    K[..., 1, 1] = c
    return K


def polar_decomposition(M):
    """Write ``M = k(phi) a(r) k(beta)`` (KAK) for frames ``M``.

    Returns ``(r, phi, beta)`` where the base point ``M . i`` lies at distance
    ``r`` from ``i`` in direction ``phi`` (rotation angle from upward) and the
    frame direction differs from the outward radial direction by ``beta``.
    """
    U, S, Vt = np.linalg.svd(M)
    flip = np.linalg.det(U) < 0
    U[flip, :, 1] *= -1
    Vt[flip, 1, :] *= -1
    r = 2.0 * np.log(S[:, 0])
    # k(phi) as built by rotation_frame has entries [[c, s], [-s, c]], c = cos(phi/2)
    phi = 2.0 * np.arctan2(U[:, 0, 1], U[:, 0, 0])
    beta = 2.0 * np.arctan2(Vt[:, 0, 1], Vt[:, 0, 0])
    return r, wrap_angle(phi), wrap_angle(beta)


def bolza_generators():
    """Side pairings of the regular octagon for the Bolza surface, in ``SL(2, R)``."""
    alpha = 1.0 + np.sqrt(2.0)
    beta = np.sqrt(alpha**2 - 1.0)
    cayley = np.array([[1.0, -1j], [1.0, 1j]])
    cayley_inv = np.linalg.inv(cayley)
    gens = []
    for k in range(4):
        w = np.exp(1j * k * np.pi / 4)
        disk = np.array([[alpha, beta * w], [beta * np.conj(w), alpha]])
        real = cayley_inv @ disk @ cayley
        assert np.max(np.abs(real.imag)) < 1e-12
        gens.append(real.real)
    return gens


def _normalize_sign(G):
    a, c = G[:, 0, 0], G[:, 1, 0]
    sign = np.where(np.abs(a) > 1e-9, np.sign(a), np.sign(c))
    return G * sign[:, None, None]


class HyperbolicSurface(ManifoldModel):
    """Quotient of the upper half-plane by a cocompact Fuchsian group.

    An empty generator list gives the hyperbolic plane itself (no reduction).
    Generators must be side pairings of the Dirichlet domain centred at ``i``
    for the greedy fundamental-domain reduction to be correct.
    """

    kind = "hyperbolic"
    curvature = -1
    dim = 2
    coord_dim = 2

    def __init__(self, generators=(), *, name=None):
        mats = []
        for g in generators:
            m = np.asarray(g, dtype=float).reshape(2, 2)
            if abs(np.linalg.det(m) - 1.0) > DET_TOL:
                raise ValueError(f"generator {m.tolist()} does not have determinant 1")
            mats.append(m)
        self.generators = mats
        self.name = name
        if mats:
            allg = mats + [np.linalg.inv(m) for m in mats]
            self._gens = np.stack(allg)
        else:
            self._gens = np.zeros((0, 2, 2))

    @classmethod
    def bolza(cls):
        return cls(bolza_generators(), name="bolza")

    @classmethod
    def plane(cls):
        return cls((), name="plane")

    @property
    def is_plane(self):
        return len(self.generators) == 0

    def __repr__(self):
        if self.name:
            return f"HyperbolicSurface({self.name!r})"
        return f"HyperbolicSurface(<{len(self.generators)} generators>)"

    def to_config(self):
        if self.name == "bolza":
            return {"kind": "hyperbolic", "preset": "bolza"}
        return {"kind": "hyperbolic", "generators": [g.ravel().tolist() for g in self.generators]}

    # -- fundamental domain --------------------------------------------------
    @cached_property
    def covering_radius(self):
        """Largest distance from ``i`` to a point of the Dirichlet domain."""
        if self.is_plane:
            return np.inf
        if self.name == "bolza":
            return float(np.arccosh(3.0 + 2.0 * np.sqrt(2.0)))
        rng = np.random.default_rng(0)
        angles = rng.uniform(0, 2 * np.pi, 4000)
        radii = rng.uniform(0, 8.0, 4000)
        G = rotation_frame(angles) @ geodesic_frames(radii)
        z = mobius(self.reduce_frames(G), 1j)
        return float(1.05 * hyperbolic_distance(z, 1j).max())

    def reduce_frames(self, G):
        """Greedy Dirichlet reduction: left-multiply by side pairings while it helps."""
        if self.is_plane:
            return G
        G = np.array(G, dtype=float)
        active = np.arange(len(G))
        for _ in range(MAX_REDUCTION_STEPS):
            if active.size == 0:
                return G
            Ga = G[active]
            z = mobius(Ga, 1j)
            cur = _spread_to_i(z)
            cand = mobius(self._gens[None, :, :, :], z[:, None])
            spread = _spread_to_i(cand)
            best = np.argmin(spread, axis=1)
            bval = spread[np.arange(len(active)), best]
            improve = bval < cur * (1.0 - 1e-13) - 1e-15
            idx = active[improve]
            G[idx] = self._gens[best[improve]] @ G[idx]
            active = idx
        raise GroupReductionFailed(f"reduction did not terminate in {MAX_REDUCTION_STEPS} steps")

    def reduce_points(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_plane:
            return z
        G = np.zeros(z.shape + (2, 2))
        G[..., 0, 0] = np.sqrt(z.imag)
        G[..., 0, 1] = z.real / np.sqrt(z.imag)
        G[..., 1, 1] = 1.0 / np.sqrt(z.imag)
        return mobius(self.reduce_frames(G.reshape(-1, 2, 2)), 1j).reshape(z.shape)

    def group_ball(self, radius):
        """Group elements ``g`` with ``d(i, g i) <= radius`` (identity first)."""
        key = round(float(radius), 6)
        cache = self.__dict__.setdefault("_ball_cache", {})
        if key in cache:
            return cache[key]
        if self.is_plane:
            cache[key] = np.eye(2)[None]
            return cache[key]
        # a geodesic segment of length L only crosses tiles whose centres are
        # within L + covering radius of i, and adjacent tiles differ by a generator
        prune = radius + self.covering_radius
        ident = np.eye(2)[None]
        seen = {tuple(np.round(ident[0].ravel() * 1e6).astype(np.int64))}
        kept = [ident]
        frontier = ident
        while len(frontier):
            new = (frontier[:, None] @ self._gens[None]).reshape(-1, 2, 2)
            new = _normalize_sign(new)
            d = hyperbolic_distance(mobius(new, 1j), 1j)
            new = new[d <= prune]
            keys = np.round(new.reshape(-1, 4) * 1e6).astype(np.int64)
            fresh = []
            for i, k in enumerate(map(tuple, keys)):
                if k not in seen:
                    seen.add(k)
                    fresh.append(i)
            frontier = new[fresh]
            kept.append(frontier)
        allg = np.concatenate(kept)
        d = hyperbolic_distance(mobius(allg, 1j), 1j)
        order = np.argsort(d, kind="stable")
        allg = allg[order][d[order] <= radius]
        cache[key] = allg
        return allg

    @cached_property
    def exact_lifts(self):
        # for z, w in the domain the minimising lift g w has d(i, g i) <= 4R
        return self.group_ball(4.0 * self.covering_radius) if not self.is_plane else np.eye(2)[None]

    @cached_property
    def near_lifts(self):
        # exact whenever the surface distance is below 1
        return self.group_ball(2.0 * self.covering_radius + 1.0) if not self.is_plane else np.eye(2)[None]

    # -- ManifoldModel kernels ----------------------------------------------
    def check_states(self, X, XI):
        if np.any(X[:, 1] <= 0) or not np.all(np.isfinite(X)):
            raise InvalidPhasePoint("hyperbolic base points must have Im z > 0")
        if not np.all(np.abs(np.linalg.norm(XI, axis=1) - 1.0) <= COSPHERE_TOL):
            raise InvalidPhasePoint("|xi| is not 1")

    def normalize_states(self, X, XI):
        XI = XI / np.linalg.norm(XI, axis=1, keepdims=True)
        if self.is_plane:
            return X, XI
        return states_from_frames(self.reduce_frames(frames_from_states(X, XI)))

    def frame(self, rho):
        self.validate(rho)
        return frames_from_states(rho.x[None], rho.xi[None])[0]

    def from_frame(self, g):
        g = np.asarray(g, dtype=float).reshape(2, 2)
        det = np.linalg.det(g)
        if abs(det - 1.0) > DET_TOL:
            raise InvalidPhasePoint(f"frame determinant {det} is not 1")
        X, XI = states_from_frames(self.reduce_frames(g[None]))
        from .base import PhasePoint

        return PhasePoint(X[0], XI[0])

    def flow_frames(self, G, t):
        t = np.broadcast_to(np.asarray(t, dtype=float), (len(G),))
        tmax = float(np.max(np.abs(t))) if len(t) else 0.0
        nchunk = max(1, int(np.ceil(tmax / FLOW_CHUNK)))
        step = geodesic_frames(t / nchunk)
        G = np.array(G, dtype=float)
        for _ in range(nchunk):
            G = self.reduce_frames(G @ step)
            G /= np.sqrt(np.linalg.det(G))[:, None, None]
        return G

    def flow_states(self, X, XI, t):
        G = self.flow_frames(frames_from_states(X, XI), t)
        return states_from_frames(G)

    def _nearest_lift(self, z1, z2, lifts, strict=False):
        cand = mobius(lifts[None], z2[:, None])
        d = hyperbolic_distance(z1[:, None], cand)
        best = np.argmin(d, axis=1)
        dbest = d[np.arange(len(z1)), best]
        if strict and lifts.shape[0] > 1:
            d2 = np.partition(d, 1, axis=1)[:, 1]
            _raise_cut((d2 - dbest < TIE_TOL) & (dbest > TIE_TOL), "hyperbolic distance")
        return best, dbest

    def base_distance(self, X, Y):
        z1 = self.reduce_points(X[:, 0] + 1j * X[:, 1])
        z2 = self.reduce_points(Y[:, 0] + 1j * Y[:, 1])
        lifts = self.exact_lifts
        out = np.empty(len(z1))
        chunk = max(1, 200_000 // len(lifts))
        for s in range(0, len(z1), chunk):
            out[s:s + chunk] = self._nearest_lift(z1[s:s + chunk], z2[s:s + chunk], lifts)[1]
        return out

    def sasaki_states(self, X1, XI1, X2, XI2, *, strict=False):
        G1 = self.reduce_frames(frames_from_states(X1, XI1))
        G2 = self.reduce_frames(frames_from_states(X2, XI2))
        lifts = self.exact_lifts if strict else self.near_lifts
        out = np.empty(len(G1))
        chunk = max(1, 200_000 // len(lifts))
        for s in range(0, len(G1), chunk):
            g1, g2 = G1[s:s + chunk], G2[s:s + chunk]
            best, dbest = self._nearest_lift(mobius(g1, 1j), mobius(g2, 1j), lifts, strict)
            M = np.linalg.inv(g1) @ lifts[best] @ g2
            out[s:s + chunk] = np.hypot(dbest, fiber_angle(M))
        return out

    def jacobi_coords(self, X, XI, dX, dXI):
        y = X[:, 1]
        dtheta = XI[:, 0] * dXI[:, 1] - XI[:, 1] * dXI[:, 0]
        J = (-XI[:, 1] * dX[:, 0] + XI[:, 0] * dX[:, 1]) / y
        return J, dtheta + dX[:, 0] / y

    def flow_component(self, X, XI, dX):
        return np.sum(dX * XI, axis=1) / X[:, 1]


def polar_rotation(M):
    """Angle ``alpha`` of the rotation factor ``[[cos, -sin], [sin, cos]]`` of ``M``.

    For ``det M > 0`` both polar decompositions share it, and it is
    proportional to ``M + det(M) M^{-T}``.
    """
    return np.arctan2(M[..., 1, 0] - M[..., 0, 1], M[..., 0, 0] + M[..., 1, 1])


def fiber_angle(M):
    """Angle left over after removing the transvection part of ``M``.

    ``M = T k`` with ``T`` a transvection through ``i`` and ``k`` a rotation;
    the rotation angle of ``k`` on directions is the angle between the two
    frames after parallel transport along the joining geodesic.
    """
    return np.abs(wrap_angle(2.0 * polar_rotation(M)))
