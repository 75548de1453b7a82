"""Packaged acceptance experiments with stored tolerances.

Each suite returns a list of checks ``{quantity, value, target, tol,
passed}``; :func:`acceptance_suite` wraps them into a ledger with timing.
"""

from __future__ import annotations

import time

import numpy as np

from ..conormal import (
    CellPartition,
    Equator,
    GeodesicCircle,
    HorocycleSegment,
    HyperbolicGeodesicSegment,
    Point,
    TorusCircle,
    TorusGeodesic,
    sample_rng,
    sample_snh,
)
from ..dynamics import (
    classify_splitting,
    first_return,
    flow_submanifold,
    integrability_report,
    poincare_fraction,
    recurrence_ladder,
    stable_subspaces,
)
from ..exceptions import UnknownSuite
from ..fractal import BoundarySet, admissible, box_dimension
from ..geometry import FlatTorus, HyperbolicSurface, RoundSphere, TangentPerturbation
from ..geometry.base import PhasePoint
from ..semiclassical import DefectMeasureEstimator, bound_check
from ..spectral import plane_wave_family, sweep_and_fit, zonal_family
from ..dynamics.splitting import line_angle

SWEEP = (8, 16, 32, 64)


def _close(name, value, target, tol):
    value = float(value)
    return {"quantity": name, "value": value, "target": float(target), "tol": float(tol),
            "passed": bool(abs(value - target) <= tol)}


def _at_most(name, value, bound):
    return {"quantity": name, "value": float(value), "target": f"<= {bound}", "tol": 0.0,
            "passed": bool(value <= bound)}


def _at_least(name, value, bound):
    return {"quantity": name, "value": float(value), "target": f">= {bound}", "tol": 0.0,
            "passed": bool(value >= bound)}


def _is(name, value, expected):
    return {"quantity": name, "value": value, "target": expected, "tol": 0.0,
            "passed": value == expected}


def _timed(checks, start, limit, name="runtime_s"):
    checks.append(_at_most(name, time.perf_counter() - start, limit))
    return checks


def sphere_saturation():
    start = time.perf_counter()
    S = RoundSphere(2)
    modes = zonal_family(S, SWEEP)
    pole = sweep_and_fit(Point(S, [0.0, 0.0, 1.0]), None, None, modes)
    equator = sweep_and_fit(Equator(S), None, None, modes)
    checks = [_close("alpha_pole", pole.alpha, -0.5, 0.05),
              _close("alpha_equator_even", equator.alpha, 0.0, 0.05)]
    return _timed(checks, start, 10.0)


def torus_dichotomy():
    start = time.perf_counter()
    T = FlatTorus(2)
    modes = plane_wave_family(T, SWEEP)
    line = TorusGeodesic(T, (0, 1))
    geo = sweep_and_fit(line, None, None, modes)
    values = np.array([r["abs"] for r in geo.table])
    circ = sweep_and_fit(TorusCircle(T, (0.5, 0.5), 0.25), None, None, modes)
    checks = [_at_most("max_abs_average_minus_1_geodesic", np.max(np.abs(values - 1.0)), 1e-6),
              _close("alpha_geodesic", geo.alpha, 0.0, 1e-6),
              _close("alpha_circle", circ.alpha, 0.5, 0.05)]
    return _timed(checks, start, 10.0)


def bound_check_planewave(N=100_000, seed=0):
    start = time.perf_counter()
    T = FlatTorus(2)
    modes = plane_wave_family(T, SWEEP)
    H = TorusGeodesic(T, (0, 1))
    est = DefectMeasureEstimator().fit(modes)
    mu = est.to_samples(N, seed)
    base = bound_check(H, None, None, modes, CellPartition(H, 64), 0.2, mu=mu)
    half = bound_check(H, None, None, modes, CellPartition(H, 64), 0.1, mu=mu)
    fine = bound_check(H, None, None, modes, CellPartition(H, 128), 0.2, mu=mu)
    dens = np.array([c["density"] for c in base.cells]).reshape(-1, 2)
    checks = [_close("mu_H_mass", base.mu_H_mass, 2.0, 1e-3),
              _close("density_plus_mean", dens[:, 0].mean(), 2.0, 1e-3),
              _at_most("density_plus_max_deviation", np.max(np.abs(dens[:, 0] - 2.0)), 0.01),
              _close("density_minus_max", dens[:, 1].max(), 0.0, 0.0),
              _close("ratio_max", base.ratio_max, 1.0, 0.01),
              _close("ratio_max_half_t0", half.ratio_max, 1.0, 0.01),
              _close("ratio_max_double_cells", fine.ratio_max, 1.0, 0.01)]
    return _timed(checks, start, 60.0)


def _bolza_points(n, seed):
    B = HyperbolicSurface.bolza()
    rng = sample_rng(seed, 4)
    th = rng.uniform(-np.pi, np.pi, n)
    X = np.tile([0.0, 1.0], (n, 1))
    XI = np.stack([np.cos(th), np.sin(th)], axis=1)
    X, XI = B.normalize_states(X, XI)
    X, XI = B.flow_states(X, XI, rng.uniform(0.0, 6.0, n))
    return B, [PhasePoint(x, xi) for x, xi in zip(X, XI)]


def anosov_splitting(n=100, seed=0):
    start = time.perf_counter()
    B, points = _bolza_points(n, seed)
    e_stable = np.array([1.0, -1.0]) / np.sqrt(2.0)
    e_unstable = np.array([1.0, 1.0]) / np.sqrt(2.0)
    worst_angle = worst_ratio = 0.0
    ts = np.arange(1, 11, dtype=float)
    for rho in points:
        ep, em = stable_subspaces(B, rho)
        worst_angle = max(worst_angle, line_angle(ep, e_unstable), line_angle(em, e_stable))
        for t in ts:
            v = B.dflow(rho, TangentPerturbation(em[:1], em[1:]), t)
            worst_ratio = max(worst_ratio, abs(v.norm * np.exp(t) - 1.0))
    checks = [_at_most("max_line_angle_rad", worst_angle, 1e-6),
              _at_most("max_rel_contraction_error", worst_ratio, 1e-6)]
    return _timed(checks, start, 120.0)


def splitting_classification(n=50, seed=0):
    start = time.perf_counter()
    B = HyperbolicSurface.bolza()
    cases = {
        "horocycle": HorocycleSegment(B),
        "closed_geodesic": HyperbolicGeodesicSegment.closed_axis(B, 0),
        "geodesic_circle": GeodesicCircle(B, (0.0, 1.0), 0.5),
    }
    checks = []
    for name, H in cases.items():
        S = sample_snh(H, n, seed)
        agree = 0
        flags = []
        for (rho, _), u, fib in zip(S.samples, S.u, S.fiber):
            rep = classify_splitting(H, rho)
            kappa = float(H.signed_curvature(np.array([u]), np.array([fib]))[0])
            predicted_split = abs(abs(kappa) - 1.0) < 1e-8
            agree += int(rep.in_split == predicted_split and not rep.in_mixed
                         and (rep.m_plus + rep.m_minus == (1 if predicted_split else 0)))
            flags.append((rep.in_split, rep.in_mixed, rep.m_plus + rep.m_minus))
        checks.append(_close(f"agreement_{name}", agree / n, 1.0, 0.0))
        if name == "horocycle":
            checks.append(_is("horocycle_all_split_not_mixed", all(f[0] and not f[1] for f in flags), True))
        else:
            checks.append(_is(f"{name}_m_pm_zero", all(f[2] == 0 for f in flags), True))
    return _timed(checks, start, 120.0)


def volume_integrability(seed=0):
    start = time.perf_counter()
    B = HyperbolicSurface.bolza()
    hor = HorocycleSegment(B)
    A = sample_snh(hor, 200, seed)
    A = A.subset(A.fiber == hor.stable_sign)
    rep = integrability_report(hor, A, 20.0, 0.01)
    target = A.total_mass * (1.0 - np.exp(-20.0))
    S = RoundSphere(2)
    pole = Point(S, [0.0, 0.0, 1.0])
    P = sample_snh(pole, 64, seed)
    rep2 = integrability_report(pole, P, 2.0 * np.pi, 0.01)
    checks = [_close("horocycle_integral_rel", rep["integral"] / target, 1.0, 0.01),
              _is("horocycle_verdict", rep["verdict"], "recurrent-measure-zero certified (forward)"),
              _close("sphere_point_integral", rep2["integral"] / P.total_mass, 4.0, 0.04),
              _is("sphere_point_verdict", rep2["verdict"], "not certified")]
    return _timed(checks, start, 60.0)


def recurrence_ladders(N=2000, T=20.0, seed=0):
    start = time.perf_counter()
    levels = [0.1, 0.05, 0.025]
    S, Tor, B = RoundSphere(2), FlatTorus(2), HyperbolicSurface.bolza()
    _, eq = recurrence_ladder(Equator(S), N, T, levels, seed)
    _, geo = recurrence_ladder(TorusGeodesic(Tor, (0, 1)), N, T, levels, seed)
    _, circ = recurrence_ladder(GeodesicCircle(B, (0.0, 1.0), 0.5), N, T, levels, seed)
    checks = [_close("equator_ladder_min", eq.min(), 1.0, 0.0),
              _close("torus_geodesic_ladder_min", geo.min(), 1.0, 0.0),
              _is("bolza_circle_ladder_nonincreasing", bool(np.all(np.diff(circ) <= 0)), True),
              _is("bolza_circle_ladder_strictly_decreasing", bool(np.all(np.diff(circ) < 0)), True),
              _at_most("bolza_finest_over_coarsest", circ[-1] / circ[0], 0.5)]
    checks[-1]["ladder"] = circ.tolist()
    return _timed(checks, start, 300.0)


def exact_returns():
    start = time.perf_counter()
    T, S = FlatTorus(2), RoundSphere(2)
    line = TorusGeodesic(T, (0, 1))
    ev = first_return(line, T.phase_point([0.0, 0.3], [1.0, 0.0]), 2.0, 1e-3)
    pole = Point(S, [0.0, 0.0, 1.0])
    ev2 = first_return(pole, S.phase_point([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]), 7.0, 1e-3)
    X = flow_submanifold(pole, np.pi / 2, 200)
    checks = [_close("torus_first_return_t", ev.t, 1.0, 1e-8),
              _at_most("torus_miss", ev.miss_distance, 1e-8),
              _close("sphere_point_first_return_t", ev2.t, 2 * np.pi, 1e-6),
              _at_most("sphere_point_flowout_off_equator", np.max(np.abs(X[:, 2])), 1e-9)]
    return _timed(checks, start, 60.0)


def box_dimension_suite():
    start = time.perf_counter()
    # deep ladder: the ternary set's dyadic counts only settle below 2^-10
    cantor = BoundarySet.cantor(20)
    est = box_dimension(cantor, 10, 20).estimate
    ends = BoundarySet.endpoints([0.0, 1.0])
    ends2 = BoundarySet.endpoints([[0.1, 0.3], [0.55, 0.9]])
    e1 = box_dimension(ends).estimate
    e2 = box_dimension(ends2).estimate
    seg = BoundarySet.segment(2)
    checks = [_close("cantor_estimate", est, np.log(2) / np.log(3), 0.02),
              _close("endpoints_estimate", e1, 0.0, 0.02),
              _close("four_endpoints_estimate", e2, 0.0, 0.02),
              _is("endpoints_admissible_2_1", admissible(e1, 2, 1).admissible, True),
              _is("cantor_rejected_2_1", admissible(est, 2, 1).admissible, False),
              _is("segment_rejected_2_1", admissible(seg, 2, 1).admissible, False)]
    return _timed(checks, start, 30.0)


def poincare_recurrence(N=2000, T=200.0, eps=0.05, seed=0):
    start = time.perf_counter()
    frac = poincare_fraction(FlatTorus(2), N, T, eps, seed)
    return _timed([_at_least("torus_poincare_fraction", frac, 0.99)], start, 120.0)


SUITES = {
    "sphere-saturation": sphere_saturation,
    "torus-dichotomy": torus_dichotomy,
    "bound-check-planewave": bound_check_planewave,
    "anosov-splitting": anosov_splitting,
    "splitting-classification": splitting_classification,
    "volume-integrability": volume_integrability,
    "recurrence-ladders": recurrence_ladders,
    "exact-returns": exact_returns,
    "box-dimension": box_dimension_suite,
    "poincare-recurrence": poincare_recurrence,
}


def acceptance_suite(name):
    """Run a registered suite and return its ledger ``{suite, passed, checks, wall_time}``."""
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite '{name}'; registered: {sorted(SUITES)}")
    start = time.perf_counter()
    checks = SUITES[name]()
    failures = [f"{c['quantity']}: got {c['value']}, expected {c['target']} (tol {c['tol']})"
                for c in checks if not c["passed"]]
    return {"suite": name, "passed": not failures, "checks": checks, "failures": failures,
            "wall_time": time.perf_counter() - start}

