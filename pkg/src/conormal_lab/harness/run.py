"""Dispatch of validated experiment configs to the library, JSON and CSV outputs."""

from __future__ import annotations

import csv
import json
import os
import time

import numpy as np

from .. import __version__
from .._validation import require
from ..conormal import CellPartition, sample_snh, submanifold_from_config
from ..dynamics import (
    classify_splitting,
    integrability_report,
    jacobian_factors,
    poincare_fraction,
    recurrence_flags,
    return_times,
)
from ..exceptions import AllValuesZero, ConfigInvalid
from ..fractal import BoundarySet, admissible, box_dimension
from ..geometry import PRESETS, model_from_config
from ..semiclassical import DefectMeasureEstimator, bound_check
from ..spectral import (
    plane_wave_family,
    sectoral_family,
    sweep_and_fit,
    sweep_table,
    zonal_family,
)
from .config import ExperimentConfig, validate_config
from .suites import acceptance_suite


def jsonable(obj):
    """Recursively convert numpy scalars/arrays and complex numbers for ``json``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps(obj):
    return json.dumps(jsonable(obj), sort_keys=True, indent=2)


class Table:
    def __init__(self, header, rows):
        self.header = list(header)
        self.rows = [list(r) for r in rows]

    def write(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.header)
            for row in self.rows:
                writer.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return "nan" if np.isnan(v) else f"{float(v):.17g}"
    return v


def _build(cfg):
    model = model_from_config(cfg.model)
    H = submanifold_from_config(model, cfg.H) if cfg.H is not None else None
    return model, H


def _levels(p):
    if "eps_ladder" in p:
        return [float(e) for e in p["eps_ladder"]]
    return [float(p.get("eps", 0.05))]


def _run_flow(cfg):
    model, _ = _build(cfg)
    p = cfg.params
    rho = model.phase_point(require(p, "x", "params"), require(p, "xi", "params"))
    out = model.flow(rho, float(require(p, "t", "params")))
    return {"x": out.x, "xi": out.xi, "t": float(p["t"])}, {}


def _run_return_stats(cfg):
    model, H = _build(cfg)
    p = cfg.params
    N, T = int(p.get("N", 1000)), float(p.get("T", 20.0))
    if H is None:
        eps = float(p.get("eps", 0.05))
        frac = poincare_fraction(model, N, T, eps, cfg.seed)
        return {"poincare_fraction": frac, "N": N, "T": T, "eps": eps}, {}
    S = sample_snh(H, N, cfg.seed)
    levels, flags = recurrence_flags(H, S, T, _levels(p))
    w = S.weights
    fractions = np.array([np.sum(w * f) for f in flags]) / np.sum(w)
    first = return_times(H, S.X, S.XI, T, levels[-1], k_max=1)
    t_first = [row[0][0] if row else np.nan for row in first]
    rows = zip(S.u, S.fiber, w, t_first, flags[-1])
    table = Table(["u", "fiber", "weight", "first_return_t", "recurrent"], rows)
    payload = {"eps_levels": levels, "recurrent_fraction": fractions, "N": N, "T": T,
               "first_return_fraction": float(np.mean(np.isfinite(t_first)))}
    return payload, {"return_stats": table}


def _run_splitting(cfg):
    _, H = _build(cfg)
    p = cfg.params
    S = sample_snh(H, int(p.get("N", 50)), cfg.seed)
    tol = float(p.get("tol", 1e-4))
    reps = [classify_splitting(H, rho, tol) for rho, _ in S.samples]
    rows = [(u, f, w, r.m_plus, r.m_minus, r.in_split, r.in_mixed)
            for u, f, w, r in zip(S.u, S.fiber, S.weights, reps)]
    table = Table(["u", "fiber", "weight", "m_plus", "m_minus", "in_split", "in_mixed"], rows)
    n = len(reps)
    payload = {"N": n, "fraction_split": sum(r.in_split for r in reps) / n,
               "fraction_mixed": sum(r.in_mixed for r in reps) / n,
               "fraction_A": sum(r.in_A for r in reps) / n,
               "fraction_N": sum(r.in_N for r in reps) / n}
    return payload, {"splitting": table}


def _select(H, S, p):
    if "A" in p:
        from ..spectral import parameter_intervals
        keep = np.zeros(len(S), dtype=bool)
        for a, b in parameter_intervals(p["A"]):
            keep |= (S.u >= a) & (S.u <= b)
        S = S.subset(keep)
    fib = p.get("fiber")
    if fib == "stable":
        fib = getattr(H, "stable_sign", None)
        if fib is None:
            raise ConfigInvalid("'fiber': 'stable' needs a horocycle H")
    if fib is not None and H.codim == 1:
        S = S.subset(S.fiber == float(np.sign(fib)))
    if len(S) == 0:
        raise ConfigInvalid("the selection A is empty")
    return S


def _run_volgrowth(cfg):
    _, H = _build(cfg)
    p = cfg.params
    S = _select(H, sample_snh(H, int(p.get("N", 200)), cfg.seed), p)
    rep = integrability_report(H, S, float(p.get("T_max", 20.0)), float(p.get("quad_step", 0.01)))
    times = [float(t) for t in p.get("times", [1.0, 2.0, 5.0])]
    cols = [jacobian_factors(H, S, t) for t in times]
    rows = [(u, f, w, *c) for u, f, w, *c in zip(S.u, S.fiber, S.weights, *cols)]
    table = Table(["u", "fiber", "weight"] + [f"det_J_{t:g}" for t in times], rows)
    return rep, {"volgrowth": table}


def _family(model, p):
    fam = p.get("family", "plane_wave")
    freqs = require(p, "frequencies", "params")
    if fam == "plane_wave":
        return plane_wave_family(model, freqs, p.get("direction", (1, 0)))
    if fam == "zonal":
        return zonal_family(model, freqs, p.get("axis", (0.0, 0.0, 1.0)))
    if fam == "sectoral":
        return sectoral_family(model, freqs, p.get("axis", (0.0, 0.0, 1.0)))
    raise ConfigInvalid(f"unknown mode family '{fam}'")


def _run_average_sweep(cfg):
    model, H = _build(cfg)
    p = cfg.params
    modes = _family(model, p)
    use_normal = bool(p.get("use_normal", False))
    try:
        rep = sweep_and_fit(H, p.get("A"), p.get("w"), modes, use_normal)
        payload, table = rep.as_dict(), rep.table
    except AllValuesZero:
        # decay faster than any power: a result, not a failure
        table = sweep_table(H, p.get("A"), p.get("w"), modes, use_normal)
        payload = {"alpha": None, "intercept": None, "r2": None, "n_dropped": len(table),
                   "all_values_zero": True}
    rows = [(r["h"], r["re"], r["im"], r["abs"], r["nodes"]) for r in table]
    return payload, {"average_sweep": Table(["h", "re", "im", "abs", "nodes"], rows)}


def _run_defect(cfg):
    model, _ = _build(cfg)
    est = DefectMeasureEstimator().fit(_family(model, cfg.params))
    rows = list(zip(est.cell_x_[:, 0], est.cell_x_[:, 1], est.cell_theta_, est.cell_mass_))
    payload = {"cells": [dict(zip(("x0", "x1", "theta", "mass"), r)) for r in rows],
               "total_mass": float(est.cell_mass_.sum()), "residual": est.residual_}
    return payload, {"defect": Table(["x0", "x1", "theta", "mass"], rows)}


def _run_bound_check(cfg):
    model, H = _build(cfg)
    p = cfg.params
    part = CellPartition(H, int(p.get("n_u", 64)))
    rep = bound_check(H, p.get("A"), p.get("w"), _family(model, p), part, float(p.get("t0", 0.2)),
                      N=int(p.get("N", 100_000)), seed=cfg.seed, strict=bool(p.get("strict", False)))
    cells = rep.cells
    keys = ["u", "fiber", "mass", "measure", "density", "hp_r"]
    rows = [[c[k] if c[k] is not None else np.nan for k in keys] for c in cells]
    return rep.as_dict(), {"bound_check": Table(keys, rows)}


def _boundary(p):
    g = p.get("generator", {"kind": "cantor", "depth": int(p.get("depth", 12))})
    kind = require(g, "kind", "generator")
    if kind == "cantor":
        return BoundarySet.cantor(int(g.get("depth", p.get("depth", 12))))
    if kind == "endpoints":
        return BoundarySet.endpoints(require(g, "intervals", "generator"), int(g.get("dim", 1)))
    if kind == "segment":
        return BoundarySet.segment(int(g.get("dim", 2)))
    if kind == "csv":
        return BoundarySet.from_csv(require(g, "path", "generator"), float(g.get("resolution", 0.0)))
    raise ConfigInvalid(f"unknown boundary generator '{kind}'")


def _run_boxdim(cfg):
    p = cfg.params
    B = _boundary(p)
    est = box_dimension(B, int(p.get("j_min", 2)), int(p.get("j_max", 10)))
    adm = admissible(est.estimate, int(p.get("n", 2)), int(p.get("k", 1)), float(p.get("margin", 0.03)))
    payload = {"estimate": est.estimate, "r2": est.r2, "admissible": adm.admissible,
               "slack": adm.slack, "threshold": adm.threshold}
    table = Table(["j", "count"], zip(est.scales, est.counts))
    return payload, {"boxdim": table}


def _run_acceptance(cfg):
    ledger = acceptance_suite(cfg.params["suite"])
    # timings vary between runs, so they stay out of the table
    rows = [(c["quantity"], c["value"], c["target"], c["tol"], c["passed"])
            for c in ledger["checks"] if c["quantity"] != "runtime_s"]
    return ledger, {"acceptance": Table(["quantity", "value", "target", "tol", "passed"], rows)}


RUNNERS = {
    "flow": _run_flow,
    "return-stats": _run_return_stats,
    "splitting": _run_splitting,
    "volgrowth": _run_volgrowth,
    "average-sweep": _run_average_sweep,
    "defect": _run_defect,
    "bound-check": _run_bound_check,
    "boxdim": _run_boxdim,
    "acceptance": _run_acceptance,
}


def run(config, out_dir=None):
    """Run one experiment; returns the report dict and writes files when ``out_dir`` is set.

    Files: ``report.json`` and one CSV per table.  The payload and the CSV
    bytes depend only on the config (including its seed).
    """
    cfg = config if isinstance(config, ExperimentConfig) else validate_config(config)
    start = time.perf_counter()
    payload, tables = RUNNERS[cfg.kind](cfg)
    report = {"config": cfg.to_dict(), "payload": jsonable(payload), "version": __version__,
              "seed": cfg.seed, "wall_time": time.perf_counter() - start,
              "tables": sorted(f"{name}.csv" for name in tables)}
    out_dir = out_dir or cfg.output.get("dir")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        for name, table in tables.items():
            table.write(os.path.join(out_dir, f"{name}.csv"))
        with open(os.path.join(out_dir, "report.json"), "w") as fh:
            fh.write(dumps(report) + "\n")
    return report


def presets():
    return {
        "models": sorted(PRESETS),
        "H": {
            "point": {"kind": "point", "x": [0.0, 0.0, 1.0]},
            "equator": {"kind": "equator"},
            "latitude": {"kind": "latitude", "psi0": 0.6},
            "torus_geodesic": {"kind": "torus_geodesic", "direction": [0, 1]},
            "torus_circle": {"kind": "torus_circle", "center": [0.5, 0.5], "radius": 0.25},
            "geodesic_circle": {"kind": "geodesic_circle", "center": [0.0, 1.0], "radius": 0.5},
            "horocycle": {"kind": "horocycle", "height": 1.0, "x_range": [-0.5, 0.5]},
            "geodesic_segment": {"kind": "geodesic_segment", "start": [0.0, 1.0], "angle": 1.5707963267948966,
                                 "length": 1.0},
            "closed_geodesic": {"kind": "closed_geodesic", "generator": 0},
        },
    }
