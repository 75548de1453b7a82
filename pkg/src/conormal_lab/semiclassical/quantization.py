"""Standard (left) quantization on the unit torus.

``Op_h(a) u(x) = sum_m a(x, 2 pi h m) u_hat(m) e^{2 pi i <m, x>}``, with
``u_hat`` the discrete Fourier coefficients of ``u`` on a uniform grid.
Symbols are sampled at the exact lattice frequencies, so there is no
interpolation in ``xi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import GridTooCoarse

# points per wavelength of the |xi| = 1 oscillation
POINTS_PER_WAVE = 4
# Fourier coefficients below this fraction of the largest are roundoff
COEFF_TOL = 1e-14


@dataclass(frozen=True)
class Symbol:
    """A symbol ``a(x, xi)`` evaluated with broadcasting over trailing axis ``n``.

    ``xi_radius`` bounds the ``xi``-support; ``bound`` is a declared bound
    on ``|a|`` that is checked wherever the symbol is sampled.
    """

    func: object
    xi_radius: float = np.inf
    bound: float | None = None
    x_dependent: bool = True
    name: str = "a"
    factors: tuple | None = None

    def __call__(self, x, xi):
        val = np.asarray(self.func(x, xi), dtype=complex)
        if self.bound is not None and np.any(np.abs(val) > self.bound * (1 + 1e-12)):
            raise ValueError(f"symbol {self.name} exceeds its declared bound {self.bound}")
        return val

    @classmethod
    def fiber(cls, g, xi_radius=np.inf, bound=None, name="g"):
        """A symbol depending on ``xi`` only."""
        return cls(lambda x, xi: g(xi), xi_radius, bound, False, name)

    @classmethod
    def product(cls, fx, g, xi_radius=np.inf, bound=None, name="f*g"):
        """``a(x, xi) = fx(x) g(xi)``; quantized as multiplication after a Fourier multiplier."""
        return cls(lambda x, xi: fx(x) * g(xi), xi_radius, bound, True, name, ((fx, g),))

    @classmethod
    def constant(cls, c=1.0):
        return cls(lambda x, xi: np.full(np.shape(xi)[:-1], complex(c)), np.inf, abs(c), False, "const")


def min_grid(h):
    """Smallest admissible power-of-two grid for semiclassical parameter ``h``."""
    need = POINTS_PER_WAVE * int(np.ceil(1.0 / (2.0 * np.pi * h) - 1e-9))
    return int(2 ** int(np.ceil(np.log2(max(need, 8)))))


def check_grid(G, h):
    G = int(G)
    if G < 2 or G & (G - 1):
        raise GridTooCoarse(f"grid size {G} is not a power of two")
    if G < min_grid(h):
        raise GridTooCoarse(f"grid size {G} under-resolves h = {h:.3g}; need at least {min_grid(h)}")
    return G


def torus_grid(G, n=2):
    axes = [np.arange(G) / G] * n
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def lattice(G, n=2):
    """Integer frequencies matching ``np.fft.fftn`` ordering, shape ``(G,)*n + (n,)``."""
    k = np.fft.fftfreq(G, 1.0 / G).round().astype(int)
    return np.stack(np.meshgrid(*[k] * n, indexing="ij"), axis=-1)


def quantize_apply(a, h, u, G=None):
    """Apply ``Op_h(a)`` to grid values ``u`` of shape ``(G,)*n``."""
    u = np.asarray(u, dtype=complex)
    n = u.ndim
    G = u.shape[0] if G is None else int(G)
    if u.shape != (G,) * n:
        raise ValueError(f"u must have shape {(G,) * n}")
    check_grid(G, h)
    coef = np.fft.fftn(u) / u.size
    M = lattice(G, n)
    xi = 2.0 * np.pi * h * M
    inside = np.linalg.norm(xi, axis=-1) <= a.xi_radius
    if not a.x_dependent:
        mult = np.where(inside, a(np.zeros_like(xi), xi), 0.0)
        return np.fft.ifftn(mult * coef) * u.size
    X = torus_grid(G, n)
    if a.factors is not None:
        out = np.zeros(u.shape, dtype=complex)
        for fx, g in a.factors:
            mult = np.where(inside, np.asarray(g(xi), dtype=complex), 0.0)
            out += np.asarray(fx(X), dtype=complex) * np.fft.ifftn(mult * coef) * u.size
        return out
    big = np.abs(coef) > COEFF_TOL * np.max(np.abs(coef)) if np.any(coef) else np.zeros_like(inside)
    keep = np.argwhere(inside & big)
    out = np.zeros(u.shape, dtype=complex)
    # fixed lexicographic order of the retained frequencies
    for mj, cj in zip(M[tuple(keep.T)], coef[tuple(keep.T)]):
        xi_j = np.broadcast_to(2.0 * np.pi * h * mj, X.shape)
        out += cj * a(X, xi_j) * np.exp(2j * np.pi * (X @ mj))
    return out
