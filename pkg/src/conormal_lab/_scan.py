"""Vectorised detection of close approaches along geodesic orbits.

An orbit ``s -> G^s(rho)`` is stepped on a uniform arclength grid; every
interior local minimum of a distance function below a threshold is
bracketed by its two grid neighbours and refined by golden-section search
using exact flows from the starting point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
BLOCK_ROWS = 4096
BLOCK_SPAN = 0.25


@dataclass
class Minima:
    """Refined local minima: parallel arrays, one entry per event."""

    row: np.ndarray
    s: np.ndarray
    value: np.ndarray
    grid_min: np.ndarray | None = None
    stopped: np.ndarray | None = None

    def for_row(self, i):
        sel = self.row == i
        order = np.argsort(np.abs(self.s[sel]), kind="stable")
        return self.s[sel][order], self.value[sel][order]


def golden_refine(fun, lo, hi, *, tol=1e-10, max_iter=200):
    """Vectorised golden-section minimisation of ``fun(idx, s)`` on brackets."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    idx = np.arange(len(lo))
    if len(lo) == 0:
        return lo, lo.copy()
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1 = fun(idx, x1)
    f2 = fun(idx, x2)
    for _ in range(max_iter):
        if np.max(hi - lo) <= tol:
            break
        left = f1 <= f2
        # left: minimum in [lo, x2]; right: in [x1, hi]
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        nx1 = np.where(left, hi - GOLDEN * (hi - lo), x2)
        nx2 = np.where(left, x1, lo + GOLDEN * (hi - lo))
        nf1 = np.where(left, 0.0, f2)
        nf2 = np.where(left, f1, 0.0)
        need = np.where(left, nx1, nx2)
        fnew = fun(idx, need)
        f1 = np.where(left, fnew, nf1)
        f2 = np.where(left, nf2, fnew)
        x1, x2 = nx1, nx2
    s = 0.5 * (lo + hi)
    return s, fun(idx, s)


def scan_minima(model, X, XI, dist, *, s_max, ds, threshold, s_min=0.0,
                direction=1.0, slack=1.5, stop_on_hit=False):
    """Find local minima of ``dist`` along the orbits of ``(X, XI)``.

    Parameters
    ----------
    model : ManifoldModel
    X, XI : arrays (N, d)
        Starting states.
    dist : callable ``(X, XI, rows) -> distances``
        ``rows`` are the orbit indices the states belong to.
    s_max : float
        Scan ``s`` in ``[0, s_max]`` (times ``direction``).
    ds : float
        Grid step.
    threshold : float
        Keep refined minima with value below this.
    s_min : float
        Discard minima at ``|s| <= s_min``.
    stop_on_hit : bool
        Retire a row once a grid value below ``threshold`` is seen at
        ``|s| > s_min`` (enough when only the existence of an event matters).
    """
    n = len(X)
    nsteps = int(np.ceil(s_max / ds))
    step = direction * s_max / nsteps
    # evaluate blocks of grid times at once when there are few rows
    block = int(max(1, min(BLOCK_ROWS // max(n, 1), BLOCK_SPAN / ds, nsteps)))
    offsets = step * np.arange(1, block + 1)
    cur_X, cur_XI = X.copy(), XI.copy()
    d0 = dist(cur_X, cur_XI, np.arange(n))
    hist = np.stack([np.full(n, np.inf), d0], axis=1)  # last two grid values
    grid_min = d0.copy()
    cand_rows, cand_k = [], []
    alive = np.ones(n, dtype=bool)
    k0 = 0
    while k0 < nsteps:
        sel = np.flatnonzero(alive)
        if sel.size == 0:
            break
        b = min(block, nsteps - k0)
        m = sel.size
        Xr = np.repeat(cur_X[sel], b, axis=0)
        XIr = np.repeat(cur_XI[sel], b, axis=0)
        Xb, XIb = model.flow_states(Xr, XIr, np.tile(offsets[:b], m))
        D = dist(Xb, XIb, np.repeat(sel, b)).reshape(m, b)
        cur_X[sel] = Xb.reshape(m, b, -1)[:, -1]
        cur_XI[sel] = XIb.reshape(m, b, -1)[:, -1]
        grid_min[sel] = np.minimum(grid_min[sel], D.min(axis=1))
        full = np.concatenate([hist[sel], D], axis=1)
        mid = full[:, 1:-1]
        is_min = (mid <= full[:, :-2]) & (mid < full[:, 2:]) & (mid < slack * threshold)
        r, c = np.nonzero(is_min)
        # column c of mid is grid index k0 + c (index 0 of full is k0 - 1)
        kk = k0 + c
        ok = kk >= 1
        if np.any(ok):
            cand_rows.append(sel[r[ok]])
            cand_k.append(kk[ok])
        hist[sel] = full[:, -2:]
        if stop_on_hit:
            ks = k0 + 1 + np.arange(b)
            late = np.abs(ks * step) > s_min
            hit = np.any((D < threshold) & late[None, :], axis=1)
            alive[sel[hit]] = False
        k0 += b
    if not cand_rows:
        empty = np.zeros(0)
        return Minima(empty.astype(int), empty, empty, grid_min, ~alive)
    crow = np.concatenate(cand_rows)
    ck = np.concatenate(cand_k)
    lo = (ck - 1) * step
    hi = (ck + 1) * step
    lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)

    def fun(idx, s):
        r = crow[idx]
        Xs, XIs = model.flow_states(X[r], XI[r], s)
        return dist(Xs, XIs, r)

    s, val = golden_refine(fun, lo, hi)
    keep = (val < threshold) & (np.abs(s) > s_min)
    return Minima(crow[keep], s[keep], val[keep], grid_min, ~alive)
