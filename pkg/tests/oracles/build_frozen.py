"""Regenerate ``frozen.json``: reference values computed without the package.

Only numpy and scipy are used here, by routes that differ from the
library's (scipy special functions, adaptive quadrature, interval
arithmetic).  Run from the repository root:

    python3 tests/oracles/build_frozen.py
"""

import json
import os

import numpy as np
from scipy import integrate, special

OUT = os.path.join(os.path.dirname(__file__), "frozen.json")


def legendre_table():
    t = np.linspace(-1.0, 1.0, 9)
    return {str(l): special.eval_legendre(l, t).tolist() for l in (0, 1, 2, 5, 37, 64)}, t.tolist()


def sectoral_values():
    rng = np.random.default_rng(12345)
    X = rng.normal(size=(6, 3))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    theta = np.arccos(X[:, 2])
    phi = np.arctan2(X[:, 1], X[:, 0])
    out = {}
    for l in (1, 3, 7, 20):
        y = special.sph_harm_y(l, l, theta, phi)
        out[str(l)] = {"abs": np.abs(y).tolist()}
    return X.tolist(), out


def circle_average(m, r=0.25, center=(0.5, 0.5)):
    """``int e^{2 pi i m x_1}`` over the circle by adaptive quadrature."""
    def f(th, part):
        x = center[0] + r * np.cos(th)
        v = np.exp(2j * np.pi * m * x) * r
        return v.real if part == 0 else v.imag
    re = integrate.quad(f, 0, 2 * np.pi, args=(0,), limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    im = integrate.quad(f, 0, 2 * np.pi, args=(1,), limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    return re, im


def cantor_box_counts(depth, js):
    """Exact count of dyadic boxes meeting the depth-``depth`` Cantor intervals."""
    lefts = [0]
    for _ in range(depth):
        lefts = [3 * a for a in lefts] + [3 * a + 2 for a in lefts]
    # interval [a, a + 1] / 3^depth in integer units
    scale = 3**depth
    counts = []
    for j in js:
        n = 2**j
        boxes = set()
        for a in lefts:
            lo = (a * n) // scale
            hi = min(((a + 1) * n) // scale, n - 1)
            boxes.update(range(lo, hi + 1))
        counts.append(len(boxes))
    return counts


def main():
    leg, leg_t = legendre_table()
    sect_x, sect = sectoral_values()
    circle = {str(m): circle_average(m) for m in (8, 10, 16, 32, 64)}
    bessel = {str(m): float(2 * np.pi * 0.25 * special.j0(2 * np.pi * m * 0.25)) for m in (8, 10, 16, 32, 64)}
    h = np.array([1 / (2 * np.pi * m) for m in (8, 16, 32, 64)])
    v = np.abs([bessel[str(m)] for m in (8, 16, 32, 64)])
    circle_alpha = float(np.polyfit(np.log(h), np.log(v), 1)[0])
    ls = np.array([8, 16, 32, 64])
    hz = 1 / np.sqrt(ls * (ls + 1))
    pole = np.sqrt((2 * ls + 1) / (4 * np.pi))
    eq = 2 * np.pi * pole * np.abs(special.eval_legendre(ls, 0.0))
    frozen = {
        "zonal_pole_l10": float(np.sqrt(21 / (4 * np.pi)) * special.eval_legendre(10, 1.0)),
        "zonal_equator_l2": float(np.sqrt(5 / (4 * np.pi)) * special.eval_legendre(2, 0.0)),
        "equator_average_l2": float(2 * np.pi * np.sqrt(5 / (4 * np.pi)) * special.eval_legendre(2, 0.0)),
        "legendre": leg,
        "legendre_t": leg_t,
        "sectoral_points": sect_x,
        "sectoral": sect,
        "circle_average_quad": circle,
        "circle_average_bessel": bessel,
        "circle_alpha": circle_alpha,
        "zonal_pole_alpha": float(np.polyfit(np.log(hz), np.log(pole), 1)[0]),
        "zonal_equator_alpha": float(np.polyfit(np.log(hz), np.log(eq), 1)[0]),
        "cantor_counts_depth12_j2_10": cantor_box_counts(12, range(2, 11)),
        "sphere_point_abs_sin_integral": float(integrate.quad(lambda t: abs(np.sin(t)), 0, 2 * np.pi,
                                                              points=[np.pi])[0]),
        "horocycle_stable_integral_per_mass": float(integrate.quad(lambda t: np.exp(-t), 0, 20)[0]),
        "liouville_flux_plus_per_t0": float(integrate.quad(lambda th: max(np.cos(th), 0.0), -np.pi, np.pi)[0]
                                            / (2 * np.pi) * 2),
    }
    with open(OUT, "w") as fh:
        json.dump(frozen, fh, indent=1, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
