"""Interval arithmetic modulo the period ``L = beta - alpha`` and the unit phase map.

Every real ``r`` splits uniquely as ``r = frac + winding * L`` with
``alpha <= frac < beta``; the unitary group and the spectral code both live on
this decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "IntervalConfig",
    "PhaseDecomposition",
    "UNIT_INTERVAL",
    "SEAM_TOL",
    "decompose",
    "unit_phase",
    "canonical_phase",
    "circular_distance",
]

#: Relative distance to the upper endpoint below which a value snaps to the seam.
SEAM_TOL = 1e-12

_QUARTER_TURNS = np.array([1.0 + 0.0j, 0.0 + 1.0j, -1.0 + 0.0j, 0.0 - 1.0j])


@dataclass(frozen=True)
class IntervalConfig:
    """The interval ``[alpha, beta]`` carrying the momentum operator."""

    alpha: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not a < b:
            raise ValueError(f"interval requires alpha < beta, got [{a}, {b}]")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def length(self) -> float:
        return self.beta - self.alpha

    def grid(self, grid_size: int) -> np.ndarray:
        """Half-open uniform grid ``alpha + i * L / G``, ``i = 0..G-1``."""
        return self.alpha + np.arange(grid_size) * (self.length / grid_size)

    def as_list(self) -> list[float]:
        return [self.alpha, self.beta]


UNIT_INTERVAL = IntervalConfig(0.0, 1.0)


@dataclass(frozen=True)
class PhaseDecomposition:
    frac: float
    winding: int

    def reconstruct(self, interval: IntervalConfig) -> float:
        return self.frac + self.winding * interval.length


def _require_finite(r) -> float:
    r = float(r)
    if not math.isfinite(r):
        raise ValueError(f"expected a finite real number, got {r}")
    return r


def decompose(r: float, interval: IntervalConfig = UNIT_INTERVAL) -> PhaseDecomposition:
    """Split ``r`` into ``frac`` in ``[alpha, beta)`` and an integer winding.

    Examples
    --------
    >>> decompose(2.3)
    PhaseDecomposition(frac=0.2999999999999998, winding=2)
    >>> decompose(4.5, IntervalConfig(1.0, 3.0))
    PhaseDecomposition(frac=2.5, winding=1)
    """
    r = _require_finite(r)
    length = interval.length
    winding = math.floor((r - interval.alpha) / length)
    frac = r - winding * length
    if frac >= interval.beta - SEAM_TOL * length:
        frac = interval.alpha
        winding += 1
    elif frac < interval.alpha:
        # floor() landed one winding too high after rounding
        if interval.alpha - frac <= SEAM_TOL * length:
            frac = interval.alpha
        else:
            winding -= 1
            frac = r - winding * length
    return PhaseDecomposition(frac=frac, winding=int(winding))


def canonical_phase(r, tol: float = SEAM_TOL):
    """Reduce phases to ``[0, 1)``; values within ``tol`` of 1 map to 0.

    Works elementwise on arrays.
    """
    arr = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("phases must be finite")
    out = np.mod(arr, 1.0)
    out = np.where(out >= 1.0 - tol, 0.0, out)
    if np.ndim(r) == 0:
        return float(out)
    return out


def circular_distance(a, b):
    """Distance between phases on the circle ``R / Z``."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), 1.0)
    return np.minimum(d, 1.0 - d)


def unit_phase(r):
    """``e(r) = exp(2 pi i r)``; exact at quarter turns. Elementwise on arrays."""
    arr = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("unit_phase requires finite input")
    t = np.mod(arr, 1.0)
    k4 = 4.0 * t
    quarter = np.rint(k4)
    exact = k4 == quarter
    out = np.where(
        exact,
        _QUARTER_TURNS[np.mod(quarter, 4).astype(int)],
        np.exp(2j * np.pi * t),
    )
    if np.ndim(r) == 0:
        return complex(out)
    return out
