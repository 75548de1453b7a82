import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone

from conormal_lab.conormal import CellPartition, TorusGeodesic
from conormal_lab.exceptions import GridTooCoarse, ModelMismatch, SingularOnly
from conormal_lab.geometry import FlatTorus, RoundSphere
from conormal_lab.semiclassical import (
    DefectMeasureEstimator,
    Symbol,
    bound_check,
    defect_pairing,
    min_grid,
    pairing,
    quantize_apply,
    richardson_limit,
    torus_grid,
)
from conormal_lab.spectral import TorusPlaneWave, plane_wave_family, zonal_family

T2 = FlatTorus(2)
SWEEP = (8, 16, 32, 64)
LINE = TorusGeodesic(T2, (0, 1))


def g(xi):
    """A smooth fiber symbol, not symmetric in the angle."""
    return np.exp(-np.sum((xi - np.array([0.9, 0.2])) ** 2, axis=-1)) * (1.0 + 0.3 * xi[..., 1])


def _exp_grid(m, G):
    X = torus_grid(G, 2)
    return X, np.exp(2j * np.pi * (X @ np.asarray(m, dtype=float)))


@pytest.fixture(scope="module")
def fitted():
    return DefectMeasureEstimator().fit(plane_wave_family(T2, SWEEP))


# -- quantization -----------------------------------------------------------------

def test_fourier_multiplier_exact():
    m = np.array([5, -3])
    h = 1 / (2 * np.pi * np.linalg.norm(m))
    G = min_grid(h)
    _, u = _exp_grid(m, G)
    out = quantize_apply(Symbol.fiber(g), h, u, G)
    np.testing.assert_allclose(out, g(m / np.linalg.norm(m)) * u, atol=1e-12)


def test_identity_symbol():
    h = 1 / (2 * np.pi * 7)
    u = np.random.default_rng(0).normal(size=(32, 32)) + 0j
    np.testing.assert_allclose(quantize_apply(Symbol.constant(1.0), h, u), u, atol=1e-13)


@pytest.mark.parametrize("product", [True, False])
def test_x_dependent_symbol(product):
    m = np.array([6, 0])
    h = 1 / (2 * np.pi * 6)
    G = min_grid(h)
    X, u = _exp_grid(m, G)
    fx = lambda x: np.cos(2 * np.pi * x[..., 0])
    a = Symbol.product(fx, g) if product else Symbol(lambda x, xi: fx(x) * g(xi))
    out = quantize_apply(a, h, u, G)
    np.testing.assert_allclose(out, fx(X) * g(np.array([1.0, 0.0])) * u, atol=1e-12)


def test_generic_symbol_on_mixture():
    # Op(a) sum c_j e_j = sum c_j a(x, 2 pi h m_j) e_j for any symbol
    h = 1 / (2 * np.pi * 5)
    G = min_grid(h)
    ms = [np.array([5, 0]), np.array([-3, 4]), np.array([1, 1])]
    cs = [1.0, 0.5j, -0.25]
    X = torus_grid(G, 2)
    a = Symbol(lambda x, xi: (1 + 0.5 * np.sin(2 * np.pi * x[..., 1])) * g(xi) + xi[..., 0] * x[..., 0])
    u = sum(c * np.exp(2j * np.pi * (X @ m)) for c, m in zip(cs, ms))
    ref = sum(c * a(X, np.broadcast_to(2 * np.pi * h * m, X.shape)) * np.exp(2j * np.pi * (X @ m))
              for c, m in zip(cs, ms))
    np.testing.assert_allclose(quantize_apply(a, h, u, G), ref, atol=1e-12)


def test_grid_too_coarse():
    h = 1 / (2 * np.pi * 20)
    with pytest.raises(GridTooCoarse):
        quantize_apply(Symbol.fiber(g), h, np.ones((32, 32)))
    with pytest.raises(GridTooCoarse):
        quantize_apply(Symbol.fiber(g), 0.1, np.ones((24, 24)))
    assert min_grid(h) == 128


@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_quantization_linear_and_bounded(seed, a, b):
    rng = np.random.default_rng(seed)
    h = 1 / (2 * np.pi * 6)
    u = rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32))
    v = rng.normal(size=(32, 32))
    sym = Symbol.fiber(lambda xi: np.cos(3 * xi[..., 0]) * np.exp(-np.sum(xi**2, axis=-1)), bound=1.0)
    Ou, Ov = quantize_apply(sym, h, u), quantize_apply(sym, h, v)
    Ow = quantize_apply(sym, h, a * u + b * v)
    np.testing.assert_allclose(Ow, a * Ou + b * Ov, atol=1e-10 * (1 + abs(a) + abs(b)) * np.abs(u).max())
    assert np.linalg.norm(Ou) <= (1.0 + 1e-6) * np.linalg.norm(u)


def test_symbol_bound_enforced():
    sym = Symbol.fiber(lambda xi: 2.0 + 0 * xi[..., 0], bound=1.0)
    with pytest.raises(ValueError):
        quantize_apply(sym, 0.1, np.ones((16, 16)))


# -- pairings ----------------------------------------------------------------------

def test_pairing_examples():
    modes = plane_wave_family(T2, SWEEP)
    res = defect_pairing(Symbol.fiber(g), modes)
    np.testing.assert_allclose(res.values, g(np.array([1.0, 0.0])), atol=1e-12)
    assert res.limit == pytest.approx(g(np.array([1.0, 0.0])), abs=1e-12)
    cos = Symbol.product(lambda x: np.cos(2 * np.pi * x[..., 0]), g)
    assert np.max(np.abs(defect_pairing(cos, modes).values)) < 1e-12
    two = Symbol.product(lambda x: 2 + np.sin(2 * np.pi * x[..., 1]), g)
    np.testing.assert_allclose(defect_pairing(two, modes).values, 2 * g(np.array([1.0, 0.0])), atol=1e-12)


def test_pairing_matches_symbol_integral():
    # int a(x, (1, 0)) dx by a tensor Gauss rule, independent of the grid
    a = lambda x, xi: (1.5 + np.cos(2 * np.pi * x[..., 1]) ** 2) * g(xi)
    t, w = np.polynomial.legendre.leggauss(40)
    t, w = 0.5 * (t + 1), 0.5 * w
    xx = np.stack(np.meshgrid(t, t, indexing="ij"), axis=-1)
    ref = np.sum(np.outer(w, w) * a(xx, np.array([1.0, 0.0])))
    val = pairing(Symbol(a), TorusPlaneWave(T2, (16, 0)))
    assert val == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("m", [(8, 0), (3, 4), (-5, 12), (0, 7)])
def test_pairing_real_for_real_fiber_symbols(m):
    sym = Symbol.fiber(lambda xi: xi[..., 0] ** 2 - 0.4 * xi[..., 1] + np.exp(-np.sum(xi**2, axis=-1)))
    assert abs(pairing(sym, TorusPlaneWave(T2, m)).imag) < 1e-10


def test_pairing_requires_plane_waves():
    with pytest.raises(ModelMismatch):
        defect_pairing(Symbol.fiber(g), zonal_family(RoundSphere(2), SWEEP))


def test_richardson_limit():
    h = np.array([0.4, 0.2, 0.1, 0.05])
    assert richardson_limit(h, 3.0 + 2.0 * h) == pytest.approx(3.0, abs=1e-12)


# -- defect measure estimation -------------------------------------------------------

def test_estimator_plane_wave_measure(fitted):
    assert np.sum(fitted.cell_mass_) == pytest.approx(1.0, abs=1e-6)
    k = np.isclose(np.cos(fitted.cell_theta_), 1.0)
    assert np.sum(fitted.cell_mass_[k]) == pytest.approx(1.0, abs=1e-6)
    assert np.all(fitted.cell_mass_ >= 1e-10)
    assert clone(fitted).get_params() == fitted.get_params()


def test_estimator_samples_deterministic(fitted):
    a = fitted.to_samples(5000, 3)
    b = fitted.to_samples(5000, 3)
    np.testing.assert_array_equal(a.X, b.X)
    assert a.total_mass == pytest.approx(np.sum(fitted.cell_mass_), rel=1e-12)
    assert not np.array_equal(a.X, fitted.to_samples(5000, 4).X)


TEST_SYMBOLS = [
    lambda x, xi: np.exp(4 * (np.cos(np.arctan2(xi[..., 1], xi[..., 0]) - 0.2) - 1)) + 0 * x[..., 0],
    lambda x, xi: (2 + np.sin(2 * np.pi * x[..., 1])) * g(xi),
    lambda x, xi: (1.2 + np.cos(2 * np.pi * x[..., 0])) * (1 + xi[..., 0]) / 2,
]


@pytest.mark.parametrize("direction", [(1, 0), (1, 1)])
def test_weak_star_consistency(direction):
    modes = plane_wave_family(T2, SWEEP, direction=direction)
    est = DefectMeasureEstimator().fit(modes)
    for a in TEST_SYMBOLS:
        direct = defect_pairing(Symbol(a), modes[-1:]).values[-1]
        assert abs(est.integrate(a) - direct) <= 0.02 * abs(direct)


# -- bound check -------------------------------------------------------------------

def test_bound_check_plane_wave(fitted):
    mu = fitted.to_samples(20_000, 0)
    rep = bound_check(LINE, None, None, plane_wave_family(T2, SWEEP), CellPartition(LINE, 16), 0.2, mu=mu)
    np.testing.assert_allclose(rep.lhs, 1.0, atol=1e-10)
    assert rep.rhs == pytest.approx(1.0, abs=0.01)
    assert rep.ratio_max == pytest.approx(1.0, abs=0.01)
    assert rep.mu_H_mass == pytest.approx(2.0, abs=0.01)
    dens = np.array([c["density"] for c in rep.cells]).reshape(-1, 2)
    np.testing.assert_allclose(dens[:, 0], 2.0, atol=0.05)
    assert np.all(dens[:, 1] == 0.0)
    assert not rep.singular and not rep.lhs_zero
    d = rep.as_dict()
    assert set(d) >= {"lhs", "rhs", "ratio_max", "cells"}


def test_bound_check_weighted_subarc(fitted):
    mu = fitted.to_samples(20_000, 0)
    w = lambda u: 1.0 + 0.5 * np.sin(2 * np.pi * u)
    rep = bound_check(LINE, (0.1, 0.6), w, plane_wave_family(T2, SWEEP), CellPartition(LINE, 20), 0.2, mu=mu)
    t, q = np.polynomial.legendre.leggauss(30)
    u = 0.35 + 0.25 * t
    exact = 0.25 * np.sum(q * w(u))
    np.testing.assert_allclose(rep.lhs, exact, rtol=1e-10)
    assert rep.rhs == pytest.approx(exact, rel=0.01)
    assert rep.ratio_max == pytest.approx(1.0, abs=0.01)


def test_bound_check_floor_stable(fitted):
    modes = plane_wave_family(T2, SWEEP)
    mu = fitted.to_samples(20_000, 0)
    base = bound_check(LINE, None, None, modes, CellPartition(LINE, 16), 0.2, mu=mu).ratio_max
    cells = bound_check(LINE, None, None, modes, CellPartition(LINE, 32), 0.2, mu=mu).ratio_max
    fine = DefectMeasureEstimator(grid=2 * min_grid(modes[-1].h)).fit(modes)
    grid = bound_check(LINE, None, None, modes, CellPartition(LINE, 16), 0.2,
                       mu=fine.to_samples(20_000, 0)).ratio_max
    for r in (cells, grid):
        assert abs(r / base - 1.0) < 0.1


def test_bound_check_tangent_waves():
    modes = plane_wave_family(T2, SWEEP, direction=(0, 1))
    est = DefectMeasureEstimator().fit(modes)
    rep = bound_check(LINE, None, None, modes, CellPartition(LINE, 8), 0.2, estimator=est, N=5000)
    assert rep.lhs_zero and rep.singular
    assert max(rep.lhs) < 1e-10
    with pytest.raises(SingularOnly):
        bound_check(LINE, None, None, modes, CellPartition(LINE, 8), 0.2, estimator=est, N=5000, strict=True)


def test_bound_check_zero_weight(fitted):
    mu = fitted.to_samples(5000, 0)
    rep = bound_check(LINE, None, 0.0, plane_wave_family(T2, SWEEP), CellPartition(LINE, 8), 0.2, mu=mu)
    assert rep.rhs == 0.0 and rep.lhs_zero and rep.ratio_max is None


def test_bound_check_needs_torus():
    from conormal_lab.conormal import Equator

    with pytest.raises(ModelMismatch):
        bound_check(Equator(RoundSphere(2)), None, None, plane_wave_family(T2, SWEEP))
