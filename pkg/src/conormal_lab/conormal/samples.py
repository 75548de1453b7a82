"""Weighted empirical measures on ``S*M`` and sampling of ``SN*H``."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .._validation import check_count
from ..exceptions import ConormalLabError
from ..geometry.base import PhasePoint
from ..geometry.flat import FlatTorus
from ..geometry.sphere import RoundSphere

MASS_TOL = 1e-12
PROVENANCES = ("sigma_snh", "mu", "mu_H")


def sample_rng(seed, stream=0):
    """Generator for a named stream of a seeded experiment."""
    return np.random.default_rng([int(seed), int(stream)])


@dataclass
class WeightedSampleSet:
    """Phase points with nonnegative weights, stored as row arrays.

    ``u`` and ``fiber`` record the ``SN*H`` coordinates of each sample when
    they are known (samples of ``sigma_SN*H`` or flowout cells).
    """

    model: object
    X: np.ndarray
    XI: np.ndarray
    weights: np.ndarray
    provenance: str = "mu"
    u: np.ndarray | None = None
    fiber: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.XI = np.asarray(self.XI, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        if not (len(self.X) == len(self.XI) == len(self.weights)):
            raise ValueError("X, XI and weights must have the same length")
        if np.any(self.weights < 0) or not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite and nonnegative")
        if len(self.X):
            self.model.check_states(self.X, self.XI)

    def __len__(self):
        return len(self.weights)

    @property
    def total_mass(self):
        return float(np.sum(self.weights))

    @property
    def samples(self):
        return [(PhasePoint(x, xi), float(w)) for x, xi, w in zip(self.X, self.XI, self.weights)]

    def subset(self, mask):
        take = lambda a: None if a is None else a[mask]
        return WeightedSampleSet(self.model, self.X[mask], self.XI[mask], self.weights[mask],
                                 self.provenance, take(self.u), take(self.fiber), dict(self.meta))

    def to_csv(self, path):
        """Columns ``x0.., xi0.., weight`` with 17 significant digits."""
        d = self.X.shape[1] if self.X.ndim == 2 else self.model.coord_dim
        header = [f"x{i}" for i in range(d)] + [f"xi{i}" for i in range(d)] + ["weight"]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for x, xi, w in zip(self.X, self.XI, self.weights):
                writer.writerow([f"{v:.17g}" for v in (*x, *xi, w)])

    @classmethod
    def from_csv(cls, model, path, provenance="mu"):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        d = (data.shape[1] - 1) // 2
        return cls(model, data[:, :d], data[:, d:2 * d], data[:, -1], provenance)


def sample_snh(H, N, seed=0):
    """Stratified samples of ``sigma_SN*H`` with equal weights ``total / N``.

    Curve base points are stratified in arclength and carry a random
    conormal sign; point fibers are stratified in angle.
    """
    N = check_count(N, "N")
    rng = sample_rng(seed, 1)
    u, fiber = H.sample_params(N, rng)
    X, XI = H.conormal_states(u, fiber)
    total = H.total_mass
    w = np.full(N, total / N)
    return WeightedSampleSet(H.model, X, XI, w, "sigma_snh", u, fiber,
                             {"H": repr(H), "N": N, "seed": int(seed)})


def liouville_samples(model, N, seed=0, *, normalized=True):
    """Samples of the Liouville measure on ``S*M`` for a surface model."""
    N = check_count(N, "N")
    rng = sample_rng(seed, 2)
    theta = rng.uniform(-np.pi, np.pi, N)
    if isinstance(model, FlatTorus) and model.dim == 2:
        X = rng.random((N, 2))
        XI = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        volume = 2.0 * np.pi
    elif isinstance(model, RoundSphere) and model.dim == 2:
        X = rng.normal(size=(N, 3))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        a = np.cross(X, np.eye(3)[np.argmin(np.abs(X), axis=1)])
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        b = np.cross(X, a)
        XI = np.cos(theta)[:, None] * a + np.sin(theta)[:, None] * b
        volume = 8.0 * np.pi**2
    else:
        raise ConormalLabError(f"no Liouville sampler for {model!r}")
    X, XI = model.normalize_states(X, XI)
    total = 1.0 if normalized else volume
    return WeightedSampleSet(model, X, XI, np.full(len(X), total / len(X)), "mu",
                             meta={"liouville": True, "seed": int(seed)})


def point_measure(model, x, xi, mass=1.0):
    X, XI = model.normalize_states(np.asarray(x, float)[None], np.asarray(xi, float)[None])
    return WeightedSampleSet(model, X, XI, np.array([float(mass)]), "mu")
