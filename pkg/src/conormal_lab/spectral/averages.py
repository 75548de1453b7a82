"""Quadrature of ``int_A w phi dsigma_H`` and of the normal-derivative average.

Composite Gauss-Legendre with 16 nodes per panel and one panel per unit
of (parameter length x 1/h), at least two panels per interval.  The
rule is then doubled until two successive results agree to ``rtol``
relative to ``int_A |w phi| dsigma_H``, or to roundoff level against the
a-priori size ``int_A |w| dsigma_H sup |phi|`` (which covers integrands
that vanish identically, such as odd zonal modes on the equator).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..conormal.submanifolds import Curve, Point
from ..exceptions import ModelMismatch, NotHypersurface, QuadratureNotConverged

ORDER = 16
RTOL = 1e-8
MAX_DOUBLINGS = 5
ROUNDOFF = 1e-13


@dataclass(frozen=True)
class AverageResult:
    """``scale`` is ``int |w phi|``; ``bound`` is ``int |w| sup |phi|``."""

    value: complex
    scale: float
    nodes: int
    bound: float = 0.0


def parameter_intervals(A):
    """Normalise ``A`` (``None``, one pair or a list of pairs) to sorted intervals in ``[0, 1]``."""
    if A is None:
        return [(0.0, 1.0)]
    arr = np.asarray(A, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("A must be a pair (a, b) or a list of pairs")
    if np.any(arr[:, 0] >= arr[:, 1]) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("intervals of A must satisfy 0 <= a < b <= 1")
    arr = arr[np.argsort(arr[:, 0])]
    if np.any(arr[1:, 0] < arr[:-1, 1]):
        raise ValueError("intervals of A must not overlap")
    return [tuple(r) for r in arr]


def _weight_values(w, u):
    if w is None:
        return np.ones(len(u))
    if callable(w):
        return np.broadcast_to(np.asarray(w(u), dtype=complex), (len(u),))
    return np.full(len(u), complex(w))


def _panel_rule(intervals, panels):
    x, wts = np.polynomial.legendre.leggauss(ORDER)
    nodes, weights = [], []
    for (a, b), n in zip(intervals, panels):
        edges = np.linspace(a, b, n + 1)
        lo, hi = edges[:-1, None], edges[1:, None]
        nodes.append((0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel())
        weights.append((0.5 * (hi - lo) * wts).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def _check_pair(H, mode):
    if mode.model is not H.model and type(mode.model) is not type(H.model):
        raise ModelMismatch(f"{mode!r} and {H!r} live on different models")


def _integrand(H, mode, u, w, normal):
    P, T, speed = H.lifted(u)
    H._check_immersion(speed)
    if normal:
        _, nu = H.lifted_states(u, 1.0)
        f = mode.h * np.sum(mode.gradient(P) * nu, axis=1)
    else:
        f = mode.eval(P)
    return _weight_values(w, u) * f, speed


def average_result(H, A, w, mode, *, normal=False, rtol=RTOL, max_doublings=MAX_DOUBLINGS):
    """Like :func:`average` but also returns the L1 scale and the node count used."""
    _check_pair(H, mode)
    if isinstance(H, Point):
        if normal:
            raise NotHypersurface("the normal derivative needs a codimension-one H")
        wv = _weight_values(w, np.zeros(1))[0]
        val = wv * mode.eval(H.x[None])[0]
        return AverageResult(complex(val), float(abs(val)), 1, float(abs(wv) * mode.sup_norm))
    if not isinstance(H, Curve):
        raise NotHypersurface(f"{H!r} is not supported")
    intervals = parameter_intervals(A)
    base = [max(2, int(np.ceil((b - a) / mode.h))) for a, b in intervals]
    prev = None
    for k in range(max_doublings + 1):
        u, q = _panel_rule(intervals, [n * 2**k for n in base])
        f, speed = _integrand(H, mode, u, w, normal)
        value = complex(np.sum(q * speed * f))
        scale = float(np.sum(q * speed * np.abs(f)))
        bound = float(np.sum(q * speed * np.abs(_weight_values(w, u)))) * mode.sup_norm
        if prev is not None and abs(value - prev) <= max(rtol * max(abs(value), scale), ROUNDOFF * bound):
            return AverageResult(value, scale, len(u), bound)
        prev = value
    raise QuadratureNotConverged(
        f"average over {H!r} did not converge after {max_doublings} doublings")


def average(H, A, w, mode, **kw):
    """``int_A w phi dsigma_H`` (for a point ``H``: ``w phi(x)``)."""
    return average_result(H, A, w, mode, **kw).value


def normal_average(H, A, w, mode, **kw):
    """``int_A w h d_nu phi dsigma_H`` with ``nu`` the ``+1`` conormal of ``H``."""
    if getattr(H, "codim", None) != 1:
        raise NotHypersurface("the normal derivative needs a codimension-one H")
    return average_result(H, A, w, mode, normal=True, **kw).value
