import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone

from conormal_lab.conormal import Equator, LatitudeCircle, Point, TorusCircle, TorusGeodesic
from conormal_lab.exceptions import (
    AllValuesZero,
    ModelMismatch,
    NotHypersurface,
    QuadratureNotConverged,
    ScaleLadderTooShort,
)
from conormal_lab.geometry import FlatTorus, RoundSphere
from conormal_lab.spectral import (
    PowerLawFit,
    SphereSectoral,
    SphereZonal,
    TorusPlaneWave,
    average,
    average_result,
    fit_power_law,
    legendre,
    normal_average,
    plane_wave_family,
    sectoral_family,
    sweep_and_fit,
    sweep_table,
    write_sweep_csv,
    zonal_family,
)

T2 = FlatTorus(2)
S2 = RoundSphere(2)
SWEEP = (8, 16, 32, 64)
LINE = TorusGeodesic(T2, (0, 1))
CIRCLE = TorusCircle(T2, (0.5, 0.5), 0.25)


def _sphere_points(n, seed):
    X = np.random.default_rng(seed).normal(size=(n, 3))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


# -- modes ---------------------------------------------------------------------

def test_eval_examples(frozen):
    assert SphereZonal(S2, 10).eval([0.0, 0.0, 1.0]) == pytest.approx(frozen["zonal_pole_l10"], abs=1e-12)
    assert TorusPlaneWave(T2, (3, 0)).eval([1 / 6, 0.9]) == pytest.approx(-1.0, abs=1e-12)
    z = SphereZonal(S2, 2).eval([1.0, 0.0, 0.0])
    assert z == pytest.approx(-0.31540, abs=1e-5)
    assert z == pytest.approx(frozen["zonal_equator_l2"], abs=1e-14)


def test_legendre_matches_reference(frozen):
    t = np.array(frozen["legendre_t"])
    for l, ref in frozen["legendre"].items():
        np.testing.assert_allclose(legendre(int(l), t)[0], ref, atol=1e-13)


def test_legendre_derivative():
    t = np.linspace(-0.9, 0.9, 7)
    for l in (1, 4, 11):
        d = (legendre(l, t + 1e-6)[0] - legendre(l, t - 1e-6)[0]) / 2e-6
        np.testing.assert_allclose(legendre(l, t)[1], d, atol=1e-6 * l**2)


def test_sectoral_modulus_matches_reference(frozen):
    X = np.array(frozen["sectoral_points"])
    for l, ref in frozen["sectoral"].items():
        np.testing.assert_allclose(np.abs(SphereSectoral(S2, int(l)).eval(X)), ref["abs"], rtol=1e-12)


@pytest.mark.parametrize("mode", [SphereZonal(S2, 5), SphereZonal(S2, 12, axis=(1.0, 1.0, 0.0)),
                                  SphereSectoral(S2, 4), SphereSectoral(S2, 9, axis=(0.0, 1.0, 0.0))])
def test_sphere_modes_unit_l2(mode):
    # independent product rule: Gauss-Legendre in cos(polar), trapezoid in azimuth
    c, wc = np.polynomial.legendre.leggauss(60)
    phi = np.linspace(0.0, 2 * np.pi, 120, endpoint=False)
    cc, pp = np.meshgrid(c, phi, indexing="ij")
    s = np.sqrt(1 - cc**2)
    X = np.stack([s * np.cos(pp), s * np.sin(pp), cc], axis=-1).reshape(-1, 3)
    vals = np.abs(mode.eval(X)).reshape(cc.shape) ** 2
    total = np.sum(wc[:, None] * vals) * (2 * np.pi / len(phi))
    assert total == pytest.approx(1.0, abs=1e-8)
    assert mode.l2_norm() == pytest.approx(1.0, abs=1e-8)


def test_plane_wave_unit_l2():
    g = (np.arange(64) + 0.5) / 64
    X = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    assert np.mean(np.abs(TorusPlaneWave(T2, (3, -5)).eval(X)) ** 2) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("l", [2, 10, 64])
def test_sphere_helmholtz(l):
    X = _sphere_points(100, l)
    assert np.max(SphereZonal(S2, l).helmholtz_residual(X)) < 1e-6
    assert np.max(SphereSectoral(S2, l).helmholtz_residual(X)) < 1e-6


def test_plane_wave_helmholtz():
    X = np.random.default_rng(0).random((100, 2))
    m = TorusPlaneWave(T2, (64, 3))
    assert m.h == pytest.approx(1 / (2 * np.pi * np.hypot(64, 3)))
    assert np.max(m.helmholtz_residual(X)) < 1e-6


def test_mode_model_mismatch():
    with pytest.raises(ModelMismatch):
        SphereZonal(S2, 3).eval([0.5, 0.5])
    with pytest.raises(ModelMismatch):
        TorusPlaneWave(T2, (1, 0)).eval([0.0, 0.0, 1.0])
    with pytest.raises((ModelMismatch, ValueError)):
        TorusPlaneWave(S2, (1, 0))
    with pytest.raises(ModelMismatch):
        average(Equator(S2), None, None, TorusPlaneWave(T2, (1, 0)))


# -- averages ------------------------------------------------------------------

def test_average_examples(frozen):
    assert average(LINE, None, None, TorusPlaneWave(T2, (5, 0))) == pytest.approx(1.0, abs=1e-10)
    eq = average(Equator(S2), None, None, SphereZonal(S2, 2))
    assert abs(eq) == pytest.approx(abs(frozen["equator_average_l2"]), abs=1e-10)
    circ = average(CIRCLE, None, None, TorusPlaneWave(T2, (10, 0)))
    assert abs(circ) == pytest.approx(abs(frozen["circle_average_bessel"]["10"]), abs=1e-10)


@pytest.mark.parametrize("m", [8, 10, 16, 32, 64])
def test_circle_average_against_adaptive_quadrature(frozen, m):
    re, im = frozen["circle_average_quad"][str(m)]
    v = average(CIRCLE, None, None, TorusPlaneWave(T2, (m, 0)))
    assert abs(v - complex(re, im)) < 1e-9


def test_average_subinterval_and_weight():
    wave = TorusPlaneWave(T2, (0, 1))
    a = average(LINE, (0.0, 0.25), None, wave)
    assert a == pytest.approx((np.exp(0.5j * np.pi) - 1) / (2j * np.pi), abs=1e-12)
    b = average(LINE, None, lambda u: u, wave)
    assert b == pytest.approx(1 / (2j * np.pi), abs=1e-12)
    c = average(LINE, [(0.0, 0.25), (0.25, 1.0)], None, wave)
    assert abs(c) < 1e-12


def test_point_average_is_value():
    x = [0.0, 0.6, 0.8]
    mode = SphereZonal(S2, 7)
    assert average(Point(S2, x), None, 3.0, mode) == pytest.approx(3.0 * mode.eval(x), rel=1e-14)


def test_normal_average_examples():
    assert normal_average(LINE, None, None, TorusPlaneWave(T2, (5, 0))) == pytest.approx(1j, abs=1e-10)
    assert abs(normal_average(LINE, None, None, TorusPlaneWave(T2, (0, 5)))) < 1e-12
    assert abs(normal_average(Equator(S2), None, None, SphereZonal(S2, 2))) < 1e-10


def test_normal_average_needs_hypersurface():
    with pytest.raises(NotHypersurface):
        normal_average(Point(S2, [0.0, 0.0, 1.0]), None, None, SphereZonal(S2, 2))


def test_quadrature_not_converged():
    with pytest.raises(QuadratureNotConverged):
        average_result(CIRCLE, None, None, TorusPlaneWave(T2, (10, 0)), max_doublings=0)


@pytest.mark.parametrize("H,mode", [(CIRCLE, TorusPlaneWave(T2, (64, 0))),
                                    (LatitudeCircle(S2, 1.0), SphereZonal(S2, 64)),
                                    (Equator(S2), SphereSectoral(S2, 64, axis=(1.0, 0.0, 0.0))),
                                    (LINE, TorusPlaneWave(T2, (3, 64)))])
def test_node_doubling_converged(H, mode):
    r = average_result(H, None, None, mode)
    # one more doubling should move the answer by less than the contract
    finer = average_result(H, None, None, mode, rtol=1e-12)
    assert finer.nodes >= r.nodes
    assert abs(finer.value - r.value) <= 1e-8 * max(abs(finer.value), r.scale) + 1e-13 * r.bound


# -- sweeps and fits -----------------------------------------------------------

def test_fit_synthetic_half_power():
    h = np.array([1.0, 0.5, 0.25, 0.125])
    rep = fit_power_law(h, 3.0 * h**0.5)
    assert rep.alpha == pytest.approx(0.5, abs=1e-12)
    assert rep.r_squared == pytest.approx(1.0, abs=1e-12)


@given(st.floats(-2, 2), st.floats(0.1, 10),
       st.lists(st.floats(-0.2, 0.2), min_size=5, max_size=5))
def test_fit_r2_in_unit_interval(alpha, c, noise):
    h = 2.0 ** -np.arange(5, dtype=float)
    y = c * h**alpha * np.exp(noise)
    rep = fit_power_law(h, y)
    assert 0.0 <= rep.r_squared <= 1.0
    if max(noise) == min(noise):
        assert rep.alpha == pytest.approx(alpha, abs=1e-9)


def test_power_law_estimator_api():
    h = np.array([0.1, 0.05, 0.025, 0.0125])
    est = PowerLawFit().fit(h, 2 * h**-0.5)
    np.testing.assert_allclose(est.predict(h), 2 * h**-0.5, rtol=1e-10)
    assert est.score(h, 2 * h**-0.5) == pytest.approx(1.0)
    assert clone(est).get_params() == est.get_params()
    with pytest.raises(ScaleLadderTooShort):
        PowerLawFit().fit(h[:3], h[:3])


def test_sweep_examples(frozen):
    pole = sweep_and_fit(Point(S2, [0.0, 0.0, 1.0]), None, None, zonal_family(S2, SWEEP))
    assert pole.alpha == pytest.approx(-0.5, abs=0.05)
    assert pole.alpha == pytest.approx(frozen["zonal_pole_alpha"], abs=1e-6)
    line = sweep_and_fit(LINE, None, None, plane_wave_family(T2, SWEEP))
    assert abs(line.alpha) < 1e-10
    np.testing.assert_allclose([r["abs"] for r in line.table], 1.0, atol=1e-10)
    eq = sweep_and_fit(Equator(S2), None, None, zonal_family(S2, SWEEP))
    assert eq.alpha == pytest.approx(frozen["zonal_equator_alpha"], abs=1e-6)
    circ = sweep_and_fit(CIRCLE, None, None, plane_wave_family(T2, SWEEP))
    assert circ.alpha == pytest.approx(frozen["circle_alpha"], abs=1e-6)


def test_odd_zonal_equator_dropped():
    rep = sweep_and_fit(Equator(S2), None, None, zonal_family(S2, (8, 9, 16, 17, 32, 33)))
    assert rep.n_dropped == 3
    assert rep.alpha == pytest.approx(0.0, abs=0.05)


def test_all_values_zero():
    with pytest.raises(AllValuesZero):
        sweep_and_fit(Equator(S2), None, None, zonal_family(S2, (9, 17, 33, 65)))
    with pytest.raises(AllValuesZero):
        sweep_and_fit(LINE, None, None, plane_wave_family(T2, SWEEP, direction=(0, 1)))


def test_sweep_ladder_checks():
    with pytest.raises(ScaleLadderTooShort):
        sweep_and_fit(LINE, None, None, plane_wave_family(T2, (8, 16, 32)))
    with pytest.raises(ScaleLadderTooShort):
        sweep_and_fit(LINE, None, None, plane_wave_family(T2, (8, 32, 16, 64)))


REGRESSION = [
    (Point(S2, [0.0, 0.0, 1.0]), zonal_family(S2, SWEEP), 2),
    (Point(S2, [1.0, 0.0, 0.0]), sectoral_family(S2, SWEEP), 2),
    (Equator(S2), zonal_family(S2, SWEEP), 1),
    # zonal and sectoral modes about the x axis cross the equator transversally
    (Equator(S2), zonal_family(S2, SWEEP, axis=(1.0, 0.0, 0.0)), 1),
    (Equator(S2), sectoral_family(S2, SWEEP, axis=(1.0, 0.0, 0.0)), 1),
    (LINE, plane_wave_family(T2, SWEEP), 1),
    (CIRCLE, plane_wave_family(T2, SWEEP), 1),
    (TorusCircle(T2, (0.2, 0.3), 0.1), plane_wave_family(T2, SWEEP, direction=(1, 1)), 1),
]


@pytest.mark.parametrize("case", range(len(REGRESSION)))
def test_universal_bound(case):
    H, modes, k = REGRESSION[case]
    assert sweep_and_fit(H, None, None, modes).alpha >= (1 - k) / 2 - 0.05


def test_dichotomy_consistency():
    for H, modes in [(CIRCLE, plane_wave_family(T2, SWEEP)),
                     (TorusCircle(T2, (0.2, 0.3), 0.1), plane_wave_family(T2, SWEEP, direction=(1, 1)))]:
        assert sweep_and_fit(H, None, None, modes).alpha >= 0.4
    recurrent = [(LINE, plane_wave_family(T2, SWEEP), 1), (Equator(S2), zonal_family(S2, SWEEP), 1),
                 (Point(S2, [0.0, 0.0, 1.0]), zonal_family(S2, SWEEP), 2)]
    for H, modes, k in recurrent:
        assert sweep_and_fit(H, None, None, modes).alpha == pytest.approx((1 - k) / 2, abs=0.05)


@pytest.mark.parametrize("H,modes", [(LINE, plane_wave_family(T2, SWEEP)),
                                     (CIRCLE, plane_wave_family(T2, SWEEP)),
                                     (Equator(S2), zonal_family(S2, SWEEP))])
def test_combined_normal_floor(H, modes):
    rep = sweep_and_fit(H, None, None, modes, quantity="combined")
    assert rep.alpha >= -0.05
    normal = sweep_and_fit(LINE, None, None, plane_wave_family(T2, SWEEP), use_normal=True)
    assert abs(normal.alpha) < 1e-10


def test_sweep_csv_deterministic(tmp_path):
    rows = sweep_table(CIRCLE, None, None, plane_wave_family(T2, SWEEP))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_sweep_csv(rows, a)
    write_sweep_csv(sweep_table(CIRCLE, None, None, plane_wave_family(T2, SWEEP)), b)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "h,re,im,abs,nodes"
