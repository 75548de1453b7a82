"""Legendre polynomials by three-term recurrence."""

from __future__ import annotations

import numpy as np


def legendre(l, t):
    """``(P_l(t), P_l'(t))`` by the Bonnet recurrence.

    The derivative uses ``P'_{n+1} = P'_{n-1} + (2n + 1) P_n``, which stays
    finite at ``t = +-1``.
    """
    t = np.asarray(t, dtype=float)
    l = int(l)
    if l < 0:
        raise ValueError("degree must be nonnegative")
    p_prev, p = np.ones_like(t), t.copy()
    d_prev, d = np.zeros_like(t), np.ones_like(t)
    if l == 0:
        return p_prev, d_prev
    for n in range(1, l):
        p_next = ((2 * n + 1) * t * p - n * p_prev) / (n + 1)
        d_next = d_prev + (2 * n + 1) * p
        p_prev, p = p, p_next
        d_prev, d = d, d_next
    return p, d


def sectoral_constant(l):
    """``c_l`` with ``Pbar_l^l(cos theta) = c_l sin^l theta`` (orthonormal on ``S^2``).

    Diagonal recurrence ``c_m = c_{m-1} sqrt((2m + 1) / (2m))`` from
    ``c_0 = 1 / sqrt(4 pi)``.
    """
    c = 1.0 / np.sqrt(4.0 * np.pi)
    for m in range(1, int(l) + 1):
        c *= np.sqrt((2 * m + 1) / (2 * m))
    return c
