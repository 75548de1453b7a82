"""Stable and unstable lines, and the split/mixed classification of ``SN*H``.

On a surface of curvature -1 the normal Jacobi data ``(J, J')`` split into
the stable line ``E_- = span{(1, -1)}`` (contracted like ``e^{-t}`` forward)
and the unstable line ``E_+ = span{(1, 1)}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._validation import check_positive
from ..conormal.flowout import CONORMAL_TOL
from ..exceptions import NotAnosov, NotConormal
from ..geometry.base import TangentPerturbation
from ..geometry.hyperbolic import HyperbolicSurface

POWER_ITERATIONS = 60


@dataclass(frozen=True)
class SplittingReport:
    """Dimensions of ``N_pm = T(SN*H) cap E_pm`` and the resulting set memberships."""

    m_plus: int
    m_minus: int
    in_mixed: bool
    in_split: bool
    residual: float

    @property
    def in_A(self):
        return self.in_mixed and self.in_split

    @property
    def in_N(self):
        return self.in_mixed or self.in_split

    def as_dict(self):
        return {"m_plus": self.m_plus, "m_minus": self.m_minus, "in_mixed": self.in_mixed,
                "in_split": self.in_split, "in_A": self.in_A, "in_N": self.in_N,
                "residual": self.residual}


def _require_anosov(model):
    if not isinstance(model, HyperbolicSurface):
        raise NotAnosov(f"{model!r} has no stable/unstable splitting")


def _dominant(model, rho, t, v0):
    v = np.asarray(v0, dtype=float)
    v = v / np.linalg.norm(v)
    for _ in range(POWER_ITERATIONS):
        w = model.dflow(rho, TangentPerturbation(v[:1], v[1:]), t)
        new = w.as_vector() / w.norm
        if new @ v < 0:
            new = -new
        done = np.linalg.norm(new - v) < 1e-15
        v = new
        if done:
            break
    return v


def stable_subspaces(model, rho, T_horizon=12.0):
    """Unit vectors spanning ``(E_plus, E_minus)`` in Jacobi coordinates.

    ``E_minus`` is the direction most contracted forward in time, obtained by
    power iteration of the backward propagator; ``E_plus`` symmetrically.
    """
    _require_anosov(model)
    check_positive(T_horizon, "T_horizon")
    if T_horizon < 5:
        raise ValueError("T_horizon must be at least 5")
    model.validate(rho)
    # start away from both lines so neither iteration begins on an eigenvector
    start = np.array([1.0, 0.3])
    e_plus = _dominant(model, rho, T_horizon, start)
    e_minus = _dominant(model, rho, -T_horizon, start)
    # fix the sign convention: first component positive
    e_plus = e_plus * np.sign(e_plus[0])
    e_minus = e_minus * np.sign(e_minus[0])
    return e_plus, e_minus


def line_angle(a, b):
    """Angle between the lines spanned by ``a`` and ``b`` (in ``[0, pi/2]``)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))
    s = abs(a[0] * b[1] - a[1] * b[0]) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.arctan2(s, c))


def classify_splitting(H, rho, tol=1e-4, *, T_horizon=12.0):
    """Intersect ``T_rho(SN*H)`` with ``E_pm`` and classify ``rho``.

    For a surface ``T(SN*H)`` is a line, so ``rho`` is split exactly when the
    line equals one of ``E_pm`` and is never mixed.
    """
    model = H.model
    _require_anosov(model)
    model.validate(rho)
    d, u, fiber = H.snh_distance(rho.x[None], rho.xi[None])
    if d[0] > CONORMAL_TOL:
        raise NotConormal(f"phase point is {float(d[0]):.3g} away from SN*H")
    e_plus, e_minus = stable_subspaces(model, rho, T_horizon)
    frame = H.tangent_jacobi(u, fiber)[0]
    m_plus = m_minus = 0
    residual = np.inf
    for v in frame:
        ap, am = line_angle(v, e_plus), line_angle(v, e_minus)
        residual = min(residual, ap, am)
        m_plus += int(ap < tol)
        m_minus += int(am < tol)
    dim = len(frame)
    in_split = m_plus + m_minus == dim
    in_mixed = m_plus > 0 and m_minus > 0
    return SplittingReport(m_plus, m_minus, bool(in_mixed), bool(in_split), float(residual))
