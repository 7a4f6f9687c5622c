"""Independent reference computations used by the tests.

None of these route through the code under test beyond sampling helpers.
"""

from __future__ import annotations

import numpy as np


def fd4_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central difference along axis 0 at interior points 2..G-3."""
    v = np.asarray(values)
    return (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12.0 * h)


def fd4_momentum_residual(values: np.ndarray, h: float, lam: complex) -> float:
    """``|(1 / i 2 pi) f' - lam f| / |f|`` on interior points."""
    d = fd4_derivative(values, h) / (2j * np.pi)
    f = np.asarray(values)[2:-2]
    return float(np.linalg.norm(d - lam * f) / np.linalg.norm(f))


def eigenvalue_multiset_distance(a, b) -> float:
    """Max distance after greedily matching two complex multisets of equal size."""
    a, b = list(np.asarray(a, dtype=complex)), list(np.asarray(b, dtype=complex))
    assert len(a) == len(b)
    worst = 0.0
    for x in a:
        k = int(np.argmin([abs(x - y) for y in b]))
        worst = max(worst, abs(x - b.pop(k)))
    return worst


def random_samples(rng, grid_size: int, dim: int) -> np.ndarray:
    out = rng.standard_normal((grid_size, dim)) + 1j * rng.standard_normal((grid_size, dim))
    return out / np.sqrt(np.sum(np.abs(out) ** 2) / grid_size)


def periodic_momentum_residual(values: np.ndarray, L: float, lam: complex) -> float:
    """Same residual with an FFT derivative; valid only for L-periodic samples."""
    v = np.asarray(values)
    G = v.shape[0]
    k = np.fft.fftfreq(G, L / G)
    d = np.fft.ifft(k[:, None] * np.fft.fft(v, axis=0), axis=0)
    return float(np.linalg.norm(d - lam * v) / np.linalg.norm(v))
