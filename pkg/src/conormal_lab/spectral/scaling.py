"""Power-law fits ``|value| ~ C h^alpha`` over families of eigenmodes."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import AllValuesZero, ScaleLadderTooShort
from .averages import average_result

MIN_SCALES = 4
# a value is a parity zero when it is this small relative to int |w| sup |phi|
ZERO_TOL = 1e-10


@dataclass
class ScalingReport:
    alpha: float
    intercept: float
    r_squared: float
    residuals: np.ndarray
    h: np.ndarray
    n_dropped: int = 0
    table: list = field(default_factory=list)

    def as_dict(self):
        return {"alpha": self.alpha, "intercept": self.intercept, "r2": self.r_squared,
                "n_dropped": self.n_dropped}


def _check_ladder(h):
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or len(h) < MIN_SCALES:
        raise ScaleLadderTooShort(f"need at least {MIN_SCALES} scales, got {h.size}")
    if np.any(h <= 0) or np.any(np.diff(h) >= 0):
        raise ScaleLadderTooShort("frequencies must be strictly increasing (h strictly decreasing)")
    return h


class PowerLawFit(BaseEstimator, RegressorMixin):
    """Least-squares line through ``(log h, log |y|)``.

    Entries with ``|y| <= zero_tol * scale`` (``scale`` defaults to
    ``max |y|``) are dropped before fitting and counted in ``n_dropped_``.
    """

    def __init__(self, zero_tol=1e-14, min_scales=MIN_SCALES):
        self.zero_tol = zero_tol
        self.min_scales = min_scales

    def fit(self, h, y, scale=None):
        h = np.asarray(h, dtype=float).ravel()
        y = np.abs(np.asarray(y)).astype(float).ravel()
        if len(h) != len(y):
            raise ValueError("h and y must have equal length")
        if len(h) < self.min_scales:
            raise ScaleLadderTooShort(f"need at least {self.min_scales} scales, got {len(h)}")
        scale = np.max(y) if scale is None else np.abs(np.asarray(scale, dtype=float))
        keep = (y > self.zero_tol * scale) & (y > 0)
        self.n_dropped_ = int(np.sum(~keep))
        if not np.any(keep):
            raise AllValuesZero("every value vanished: faster than any power of h")
        if keep.sum() < 2:
            raise ScaleLadderTooShort("fewer than two nonzero values to fit")
        x, z = np.log(h[keep]), np.log(y[keep])
        slope, intercept = np.polyfit(x, z, 1)
        resid = z - (slope * x + intercept)
        ss_tot = float(np.sum((z - z.mean()) ** 2))
        ss_res = float(np.sum(resid**2))
        r2 = 1.0 if ss_tot <= 1e-28 else 1.0 - ss_res / ss_tot
        self.alpha_ = float(slope)
        self.intercept_ = float(intercept)
        self.r_squared_ = float(np.clip(r2, 0.0, 1.0))
        self.residuals_ = resid
        self.h_ = h[keep]
        self.mask_ = keep
        return self

    def predict(self, h):
        check_is_fitted(self, "alpha_")
        return np.exp(self.intercept_) * np.asarray(h, dtype=float) ** self.alpha_

    def score(self, h, y, sample_weight=None):
        check_is_fitted(self, "alpha_")
        return self.r_squared_ if sample_weight is None else super().score(h, y, sample_weight)

    def report(self, table=None):
        check_is_fitted(self, "alpha_")
        return ScalingReport(self.alpha_, self.intercept_, self.r_squared_, self.residuals_,
                             self.h_, self.n_dropped_, table or [])


def fit_power_law(h, values, scale=None, zero_tol=1e-14):
    return PowerLawFit(zero_tol=zero_tol).fit(h, values, scale).report()


def sweep_table(H, A, w, modes, use_normal=False, quantity=None):
    """One row per mode: ``h, re, im, abs, nodes`` (plus the a-priori size ``bound``).

    ``quantity`` is ``"average"``, ``"normal"`` or ``"combined"``
    (``|average| + |normal average|``); ``use_normal=True`` selects ``"normal"``.
    """
    quantity = quantity or ("normal" if use_normal else "average")
    if quantity not in ("average", "normal", "combined"):
        raise ValueError("quantity must be 'average', 'normal' or 'combined'")
    rows = []
    for mode in modes:
        if quantity == "combined":
            a = average_result(H, A, w, mode)
            b = average_result(H, A, w, mode, normal=True)
            val = complex(abs(a.value) + abs(b.value))
            bound, nodes = a.bound, a.nodes + b.nodes
        else:
            r = average_result(H, A, w, mode, normal=quantity == "normal")
            val, bound, nodes = r.value, r.bound, r.nodes
        rows.append({"h": float(mode.h), "re": val.real, "im": val.imag, "abs": abs(val),
                     "nodes": int(nodes), "bound": bound})
    return rows


def sweep_and_fit(H, A, w, modes, use_normal=False, *, quantity=None):
    """Fit the exponent of ``|value|`` against ``h`` over a mode family."""
    modes = list(modes)
    _check_ladder([m.h for m in modes])
    rows = sweep_table(H, A, w, modes, use_normal, quantity)
    h = np.array([r["h"] for r in rows])
    v = np.array([r["abs"] for r in rows])
    scale = np.array([r["bound"] for r in rows])
    return PowerLawFit(zero_tol=ZERO_TOL).fit(h, v, scale).report(rows)


def write_sweep_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "re", "im", "abs", "nodes"])
        for r in rows:
            writer.writerow([f"{r['h']:.17g}", f"{r['re']:.17g}", f"{r['im']:.17g}",
                             f"{r['abs']:.17g}", r["nodes"]])
