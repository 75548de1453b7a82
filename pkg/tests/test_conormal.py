import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conormal_lab.conormal import (
    CellPartition,
    Equator,
    GeodesicCircle,
    HorocycleSegment,
    HyperbolicGeodesicSegment,
    LatitudeCircle,
    ParametricCurve,
    Point,
    TorusCircle,
    TorusGeodesic,
    WeightedSampleSet,
    flowout_measure,
    hp_r,
    in_tube,
    liouville_samples,
    point_measure,
    r_H,
    sample_snh,
    submanifold_from_config,
)
from conormal_lab.exceptions import ConfigInvalid, DegenerateImmersion, EmptyPartition, NotConormal
from conormal_lab.geometry import FlatTorus, HyperbolicSurface, RoundSphere

T2 = FlatTorus(2)
S2 = RoundSphere(2)
BOLZA = HyperbolicSurface.bolza()


def _wavy(u):
    return np.stack([0.5 + 0.2 * np.cos(2 * np.pi * u),
                     0.5 + 0.1 * np.sin(2 * np.pi * u) + 0.05 * np.sin(6 * np.pi * u)], axis=1)


ALL_KINDS = {
    "sphere_point": Point(S2, [0.0, 0.0, 1.0]),
    "torus_point": Point(T2, [0.3, 0.6]),
    "equator": Equator(S2),
    "latitude": LatitudeCircle(S2, 1.0),
    "torus_geodesic": TorusGeodesic(T2, (0, 1)),
    "torus_slanted_geodesic": TorusGeodesic(T2, (1, 2)),
    "torus_circle": TorusCircle(T2, (0.5, 0.5), 0.25),
    "parametric": ParametricCurve(T2, _wavy),
    "geodesic_circle": GeodesicCircle(BOLZA, (0.0, 1.0), 0.5),
    "horocycle": HorocycleSegment(BOLZA),
    "geodesic_segment": HyperbolicGeodesicSegment(BOLZA, (0.0, 1.0), 0.3, 0.8),
    "closed_geodesic": HyperbolicGeodesicSegment.closed_axis(BOLZA, 0),
}


def test_sample_snh_equator_mass():
    for N in (1, 7, 100):
        assert sample_snh(Equator(S2), N, 0).total_mass == pytest.approx(4 * np.pi, rel=1e-12)


def test_sample_snh_point_mass():
    S = sample_snh(Point(S2, [0.0, 0.0, 1.0]), 50, 3)
    assert S.total_mass == pytest.approx(2 * np.pi, rel=1e-12)


def test_sample_snh_torus_line():
    S = sample_snh(TorusGeodesic(T2, (0, 1)), 4, 0)
    assert len(S) == 4
    np.testing.assert_allclose(S.weights, 0.5)
    assert S.total_mass == pytest.approx(2.0, rel=1e-12)


def test_weighted_set_invariants():
    S = sample_snh(TorusCircle(T2), 33, 1)
    assert abs(S.total_mass - np.sum(S.weights)) < 1e-12
    S.model.check_states(S.X, S.XI)


@pytest.mark.parametrize("name", sorted(ALL_KINDS))
def test_mass_invariant_under_N_and_seed(name):
    H = ALL_KINDS[name]
    ref = sample_snh(H, 10, 0).total_mass
    for N, seed in ((1, 0), (257, 0), (64, 9)):
        assert abs(sample_snh(H, N, seed).total_mass / ref - 1.0) < 1e-6


def test_weighted_set_csv_roundtrip(tmp_path):
    S = sample_snh(Equator(S2), 20, 2)
    path = tmp_path / "s.csv"
    S.to_csv(path)
    R = WeightedSampleSet.from_csv(S2, path)
    np.testing.assert_array_equal(R.X, S.X)
    np.testing.assert_array_equal(R.weights, S.weights)


def test_degenerate_immersion():
    still = ParametricCurve(T2, lambda u: np.tile([0.5, 0.5], (np.size(u), 1)))
    with pytest.raises(DegenerateImmersion):
        sample_snh(still, 10, 0)


def test_r_H_examples():
    assert r_H(Equator(S2), [0.0, 0.0, 1.0]) == pytest.approx(np.pi / 2, abs=1e-8)
    assert r_H(TorusGeodesic(T2, (0, 1)), [0.3, 0.7]) == pytest.approx(0.3, abs=1e-8)
    assert r_H(Point(S2, [0.0, 0.0, 1.0]), [1.0, 0.0, 0.0]) == pytest.approx(np.pi / 2, abs=1e-8)


def test_r_H_torus_circle_and_latitude():
    assert r_H(TorusCircle(T2, (0.5, 0.5), 0.25), [0.5, 0.9]) == pytest.approx(0.15, abs=1e-8)
    x = [np.sin(0.4), 0.0, np.cos(0.4)]
    assert r_H(LatitudeCircle(S2, 1.0), x) == pytest.approx(0.6, abs=1e-8)


def _torus_points(seed, n):
    return np.random.default_rng(seed).random((n, 2))


@pytest.mark.parametrize("name", ["torus_circle", "parametric", "torus_slanted_geodesic"])
def test_r_H_triangle(name):
    H = ALL_KINDS[name]
    X, Y = _torus_points(0, 1000), _torus_points(1, 1000)
    gap = np.abs(H.foot(X)[1] - H.foot(Y)[1])
    assert np.all(gap <= T2.base_distance(X, Y) + 1e-8)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_r_H_lipschitz_circle(a, b, c, d):
    H = ALL_KINDS["torus_circle"]
    x, y = np.array([[a, b]]) % 1.0, np.array([[c, d]]) % 1.0
    assert abs(r_H(H, x[0]) - r_H(H, y[0])) <= T2.distance(x[0], y[0]) + 1e-8


def test_hp_r_examples():
    line = TorusGeodesic(T2, (0, 1))
    assert hp_r(line, T2.phase_point([0.0, 0.3], [1.0, 0.0])) == pytest.approx(2.0, abs=1e-5)
    rho = S2.phase_point([1.0, 0.0, 0.0], [0.0, 0.0, 1.0])
    assert hp_r(Equator(S2), rho) == pytest.approx(2.0, abs=1e-5)
    with pytest.raises(NotConormal):
        hp_r(line, T2.phase_point([0.0, 0.3], [0.0, 1.0]))


@pytest.mark.parametrize("name", sorted(ALL_KINDS))
def test_hp_r_is_two_everywhere(name):
    H = ALL_KINDS[name]
    S = sample_snh(H, 12, 4)
    values = [hp_r(H, rho) for rho, _ in S.samples]
    assert np.max(np.abs(np.array(values) - 2.0)) < 1e-4


def test_in_tube_examples():
    line = TorusGeodesic(T2, (0, 1))
    on = T2.phase_point([0.0, 0.4], [-1.0, 0.0])
    assert in_tube(line, on, 0.0, 1e-3)
    assert in_tube(line, on, 3.0, 1e-3)
    rho = T2.phase_point([0.5, 0.0], [1.0, 0.0])
    assert not in_tube(line, rho, 0.3, 1e-3)
    assert in_tube(line, rho, 0.6, 1e-3)
    tangent = T2.phase_point([0.5, 0.0], [0.0, 1.0])
    for T in (0.5, 2.0, 10.0):
        assert not in_tube(line, tangent, T, 1e-3)


def _plane_wave_mu(n1=250, n2=64):
    # Lebesgue in x on a midpoint grid, direction fixed at (1, 0)
    g1, g2 = np.meshgrid((np.arange(n1) + 0.5) / n1, (np.arange(n2) + 0.5) / n2, indexing="ij")
    x = np.stack([g1.ravel(), g2.ravel()], axis=1)
    xi = np.tile([1.0, 0.0], (len(x), 1))
    return WeightedSampleSet(T2, x, xi, np.full(len(x), 1.0 / len(x)), "mu")


def test_flowout_plane_wave():
    line = TorusGeodesic(T2, (0, 1))
    part = CellPartition(line, 64)
    out = flowout_measure(_plane_wave_mu(), line, 0.2, part)
    cells = out.meta["cell_mass"]
    assert out.provenance == "mu_H"
    assert out.total_mass == pytest.approx(2.0, abs=1e-3)
    assert np.all(cells[:, 1] == 0.0)
    np.testing.assert_allclose(cells[:, 0], 2.0 / 64, rtol=1e-9)
    half = flowout_measure(_plane_wave_mu(), line, 0.1, part).meta["cell_mass"]
    assert np.max(np.abs(half[:, 0] / cells[:, 0] - 1.0)) < 0.05


def test_flowout_missing_orbit():
    line = TorusGeodesic(T2, (0, 1))
    mu = point_measure(T2, [0.5, 0.0], [0.0, 1.0])
    out = flowout_measure(mu, line, 0.2, CellPartition(line, 8))
    assert np.all(out.meta["cell_mass"] == 0.0)


def _liouville_tube_oracle(mu, t0, eps):
    # a straight line crosses {x1 = 0} within arclength 2 t0 iff the wrapped
    # distance is at most 2 t0 |cos theta|; at the crossing the Sasaki
    # distance to the conormal bundle is the angle to the nearer normal
    d = np.minimum(mu.X[:, 0], 1.0 - mu.X[:, 0])
    theta = np.arctan2(mu.XI[:, 1], mu.XI[:, 0])
    angle = np.minimum(np.abs(theta), np.pi - np.abs(theta))
    inside = (d <= 2.0 * t0 * np.abs(np.cos(theta))) & (angle < eps)
    return np.sum(mu.weights[inside]) / (2.0 * t0)


def test_flowout_liouville():
    line = TorusGeodesic(T2, (0, 1))
    mu = liouville_samples(T2, 200_000, 0)
    # coarse cells so that Monte Carlo noise stays below the 5% stability budget
    part = CellPartition(line, 2)
    base = flowout_measure(mu, line, 0.2, part, eps=0.1)
    assert base.total_mass == pytest.approx(_liouville_tube_oracle(mu, 0.2, 0.1), rel=0.02)
    cells = base.meta["cell_mass"]
    # both conormal sides see the same flux
    sides = cells.sum(axis=0)
    assert abs(sides[0] / sides[1] - 1.0) < 0.05
    half = flowout_measure(mu, line, 0.1, part, eps=0.1).meta["cell_mass"]
    assert np.max(np.abs(half / cells - 1.0)) < 0.05


def test_flowout_liouville_vanishes_with_eps():
    # Liouville does not charge the flowout of SN*H: the thickened mass is O(eps)
    line = TorusGeodesic(T2, (0, 1))
    mu = liouville_samples(T2, 50_000, 1)
    m = [flowout_measure(mu, line, 0.2, CellPartition(line, 1), eps=e).total_mass for e in (0.1, 0.05)]
    assert m[1] < 0.6 * m[0]
    assert m[0] == pytest.approx(4 * 0.1 / np.pi, rel=0.1)


def test_empty_partition():
    line = TorusGeodesic(T2, (0, 1))
    with pytest.raises(EmptyPartition):
        CellPartition(line, 0)
    with pytest.raises(EmptyPartition):
        flowout_measure(_plane_wave_mu(4, 4), line, 0.2, partition="nope")


def test_submanifold_from_config():
    assert isinstance(submanifold_from_config(S2, {"kind": "equator"}), Equator)
    H = submanifold_from_config(T2, {"kind": "torus_circle", "radius": 0.2})
    assert H.radius == 0.2
    with pytest.raises(ConfigInvalid):
        submanifold_from_config(S2, {"kind": "latitude"})
    with pytest.raises(ConfigInvalid):
        submanifold_from_config(S2, {"kind": "blob"})
