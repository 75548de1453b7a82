"""Return times and return maps on ``SN*H``, loop and recurrence surrogates.

Exact returns to the measure-zero set ``SN*H`` are replaced by close
approaches: local minima of the Sasaki distance to ``SN*H`` below ``eps``,
found on a time grid of step ``eps / 4`` and refined to ``1e-10`` in time.
All times are arclength.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._scan import scan_minima
from .._validation import check_count, check_positive
from ..conormal.flowout import CONORMAL_TOL
from ..conormal.samples import liouville_samples, sample_snh
from ..exceptions import NotConormal
from ..geometry.base import PhasePoint


@dataclass(frozen=True)
class ReturnEvent:
    """A close approach of an orbit to ``SN*H``.

    ``t`` is the (signed) time from the starting point, ``rho_out`` the
    phase point on the orbit at that time and ``miss_distance`` its Sasaki
    distance to ``SN*H``.
    """

    t: float
    rho_out: PhasePoint
    miss_distance: float


def _snh_dist(H):
    return lambda X, XI, rows: H.snh_distance(X, XI)[0]


def _check_on_snh(H, X, XI):
    d = H.snh_distance(X, XI)[0]
    if np.any(d > CONORMAL_TOL):
        raise NotConormal(f"starting point is {float(np.max(d)):.3g} away from SN*H")


def return_times(H, X, XI, T_max, eps, *, direction=1.0, k_max=None):
    """Per-row lists of ``(t, miss)`` close approaches within ``|t| <= T_max``.

    Successive events must be more than ``eps`` apart in time, and the first
    one must occur after time ``eps``.
    """
    m = scan_minima(H.model, X, XI, _snh_dist(H), s_max=T_max, ds=eps / 4.0,
                    threshold=eps, s_min=eps, direction=direction)
    out = [[] for _ in range(len(X))]
    order = np.lexsort((np.abs(m.s), m.row))
    for i in order:
        row = out[m.row[i]]
        t = float(m.s[i])
        if row and abs(t) <= abs(row[-1][0]) + eps:
            continue
        if k_max is not None and len(row) >= k_max:
            continue
        row.append((t, float(m.value[i])))
    return out


def return_orbit(H, rho, k_max, T_max, eps, *, direction=1.0):
    """The first ``k_max`` return events within total time ``T_max``.

    ``direction=-1`` runs the reversed flow; event times are then negative.
    Events come from one continuous scan of the orbit, so cumulative times
    are exact rather than accumulated from approximate restarts.
    """
    model = H.model
    model.validate(rho)
    k_max = check_count(k_max, "k_max")
    check_positive(T_max, "T_max")
    check_positive(eps, "eps")
    X, XI = rho.x[None], rho.xi[None]
    _check_on_snh(H, X, XI)
    events = return_times(H, X, XI, T_max, eps, direction=direction, k_max=k_max)[0]
    if not events:
        return []
    t = np.array([e[0] for e in events])
    Xo, XIo = model.flow_states(np.repeat(X, len(t), 0), np.repeat(XI, len(t), 0), t)
    return [ReturnEvent(float(ti), PhasePoint(x, xi), miss)
            for ti, x, xi, (_, miss) in zip(t, Xo, XIo, events)]


def first_return(H, rho, T_max, eps):
    """First return event after time ``eps``, or ``None``."""
    events = return_orbit(H, rho, 1, T_max, eps)
    return events[0] if events else None


def recurrence_flags(H, samples, T, eps_levels):
    """Boolean array (levels, N): forward and backward returns near the start.

    One scan at the finest time step serves every level; an event counts at
    level ``eps`` when its miss distance and its Sasaki distance to the
    starting point are both below ``eps``.
    """
    eps_levels = np.asarray(sorted({float(e) for e in eps_levels}, reverse=True))
    X, XI = samples.X, samples.XI
    model = H.model
    flags = np.ones((len(eps_levels), len(X)), dtype=bool)
    for direction in (1.0, -1.0):
        m = scan_minima(model, X, XI, _snh_dist(H), s_max=T, ds=eps_levels[-1] / 4.0,
                        threshold=eps_levels[0], s_min=eps_levels[-1], direction=direction)
        hit = np.zeros_like(flags)
        if m.row.size:
            Xo, XIo = model.flow_states(X[m.row], XI[m.row], m.s)
            back = model.sasaki_states(Xo, XIo, X[m.row], XI[m.row])
            for j, e in enumerate(eps_levels):
                ok = (m.value < e) & (back < e) & (np.abs(m.s) > e)
                hit[j, m.row[ok]] = True
        flags &= hit
    return eps_levels, flags


def recurrence_ladder(H, N, T, eps_levels, seed=0):
    """``sigma_SN*H``-weighted recurrent fractions for several ``eps`` (largest first)."""
    samples = sample_snh(H, N, seed)
    levels, flags = recurrence_flags(H, samples, float(T), eps_levels)
    w = samples.weights
    # same summation order on both sides, so a fully recurrent set gives exactly 1
    return levels, np.array([np.sum(w * f) for f in flags]) / np.sum(w)


def recurrence_fraction(H, N, T, eps, seed=0):
    """Weighted fraction of ``(eps, T)``-recurrent samples of ``SN*H``."""
    check_positive(eps, "eps")
    check_positive(T, "T")
    return float(recurrence_ladder(H, N, T, [eps], seed)[1][0])


def poincare_fraction(model, N, T, eps, seed=0, samples=None):
    """Fraction of Liouville samples whose orbit returns within ``eps`` of its start.

    Only returns after time ``2 eps`` count, so the start itself is excluded.
    """
    if samples is None:
        samples = liouville_samples(model, N, seed)
    X0, XI0 = samples.X, samples.XI

    def dist(X, XI, rows):
        return model.sasaki_states(X, XI, X0[rows], XI0[rows])

    m = scan_minima(model, X0, XI0, dist, s_max=float(T), ds=eps / 4.0, threshold=eps,
                    s_min=2.0 * eps, stop_on_hit=True)
    hit = np.zeros(len(X0), dtype=bool)
    hit[m.row] = True
    # rows retired on a grid value below eps count even without a refined minimum
    hit |= m.stopped
    w = samples.weights
    return float(np.sum(w[hit]) / np.sum(w))


__all__ = [
    "ReturnEvent",
    "first_return",
    "poincare_fraction",
    "recurrence_flags",
    "recurrence_fraction",
    "recurrence_ladder",
    "return_orbit",
    "return_times",
]
