"""The quarter Cantor measure, its exponential spectrum, and fractal joint spectra.

The measure ``mu`` is the self-similar probability measure on base-4
expansions ``sum d_k 4^-k`` with ``d_k`` in a two-element digit set, giving
mass ``2^-n`` to each level-``n`` interval of length ``4^-n``.  With the
default digits ``{0, 2}`` the exponentials ``e_lam``, ``lam`` in
``{sum d_k 4^k : d_k in {0, 1}}``, are orthonormal in ``L^2(mu)``.

Its Fourier transform ``mu_hat(t) = int e(-t y) dmu(y)`` is the infinite product
``prod_k (e(-d0 t 4^-k) + e(-d1 t 4^-k)) / 2``, truncated at ``depth`` factors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .commuting_pairs import JointSpectrum, is_diagonal, spectrum_from_points
from .errors import ValidationError
from .phase_arith import canonical_phase, unit_phase

__all__ = [
    "DEFAULT_DIGITS",
    "SPECTRUM_DIGITS",
    "CantorLevel",
    "LambdaSet",
    "GramReport",
    "lambda_set",
    "cantor_fourier",
    "gram_matrix",
    "check_commuting_fractal",
    "joint_spectrum_fractal",
    "joint_gram",
]

DEFAULT_DIGITS = (0, 2)
SPECTRUM_DIGITS = (0, 1)
MAX_LAMBDA_LEVEL = 12


def _check_digits(digits) -> tuple[int, int]:
    digits = tuple(int(d) for d in digits)
    if len(digits) != 2 or digits[0] == digits[1] or not all(0 <= d <= 3 for d in digits):
        raise ValidationError(f"need two distinct base-4 digits, got {digits}")
    return digits


@dataclass(frozen=True, eq=False)
class CantorLevel:
    """Level-``n`` approximant: ``2^n`` intervals of length ``4^-n`` and mass ``2^-n``."""

    level: int
    digits: tuple[int, int] = DEFAULT_DIGITS

    def __post_init__(self):
        if not 1 <= int(self.level) <= 20:
            raise ValidationError(f"level must be in [1, 20], got {self.level}")
        object.__setattr__(self, "level", int(self.level))
        object.__setattr__(self, "digits", _check_digits(self.digits))

    @property
    def interval_length(self) -> float:
        return 4.0 ** -self.level

    @property
    def mass_per_interval(self) -> float:
        return 2.0 ** -self.level

    @property
    def intervals(self) -> np.ndarray:
        """Sorted left endpoints."""
        left = np.zeros(1)
        for k in range(1, self.level + 1):
            step = np.array(self.digits, dtype=float) * 4.0 ** -k
            left = (left[:, None] + step[None, :]).ravel()
        return np.sort(left)

    @property
    def total_mass(self) -> float:
        return len(self.intervals) * self.mass_per_interval

    def midpoint_fourier(self, t) -> np.ndarray | complex:
        """``sum_I mass * e(-t * midpoint(I))``, the midpoint rule for ``mu_hat``."""
        mid = self.intervals + 0.5 * self.interval_length
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        vals = self.mass_per_interval * np.exp(-2j * np.pi * t_arr[:, None] * mid[None, :]).sum(axis=1)
        return complex(vals[0]) if np.ndim(t) == 0 else vals


@dataclass(frozen=True)
class LambdaSet:
    level: int
    values: np.ndarray

    def __len__(self):
        return len(self.values)


def lambda_set(n: int) -> LambdaSet:
    """``{sum_{k<n} d_k 4^k : d_k in {0, 1}}``, sorted.

    >>> lambda_set(2).values.tolist()
    [0, 1, 4, 5]
    """
    if not 1 <= int(n) <= MAX_LAMBDA_LEVEL:
        raise ValidationError(f"level must be in [1, {MAX_LAMBDA_LEVEL}], got {n}")
    n = int(n)
    powers = 4 ** np.arange(n, dtype=np.int64)
    values = sorted(int(np.dot(bits, powers)) for bits in itertools.product(SPECTRUM_DIGITS, repeat=n))
    return LambdaSet(n, np.array(values, dtype=np.int64))


def cantor_fourier(t, depth: int = 40, digits=DEFAULT_DIGITS):
    """Depth-truncated product for ``mu_hat(t)``. Elementwise on arrays."""
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    d0, d1 = _check_digits(digits)
    t_arr = np.asarray(t, dtype=float)
    out = np.ones(t_arr.shape, dtype=complex)
    for k in range(1, depth + 1):
        s = t_arr * 4.0 ** -k
        out *= 0.5 * (unit_phase(-d0 * s) + unit_phase(-d1 * s))
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class GramReport:
    matrix: np.ndarray
    max_defect: float
    depth: int
    level: int | None

    def to_dict(self) -> dict:
        return {"n": self.level, "depth": self.depth, "max_defect": self.max_defect}


def gram_matrix(lambdas, depth: int = 40, digits=DEFAULT_DIGITS) -> GramReport:
    """``G[j, k] = mu_hat(lam_k - lam_j)`` and its max-norm distance from the identity."""
    if isinstance(lambdas, LambdaSet):
        level, values = lambdas.level, lambdas.values
        if depth < 4 * level:
            raise ValidationError(f"depth {depth} < 4 * level {level}; vanishing factors would be missed")
    else:
        level, values = None, np.asarray(lambdas)
    diff = values[None, :].astype(float) - values[:, None].astype(float)
    G = cantor_fourier(diff, depth, digits)
    G = np.atleast_2d(G)
    defect = float(np.max(np.abs(G - np.eye(len(values)))))
    return GramReport(G, defect, int(depth), level)


def check_commuting_fractal(U, level: int, tol: float = 1e-9) -> np.ndarray | None:
    """``gamma(lam)`` when ``U`` is diagonal on ``{e_lam}``, else ``None``."""
    mat = np.asarray(getattr(U, "matrix", U), dtype=complex)
    size = 2 ** int(level)
    if mat.shape != (size, size):
        raise ValidationError(f"operator shape {mat.shape} does not match 2^{level} = {size}")
    if not is_diagonal(mat, tol):
        return None
    return canonical_phase(np.angle(np.diag(mat)) / (2.0 * np.pi))


def joint_spectrum_fractal(gamma, lambdas: LambdaSet, m_range: tuple[int, int]) -> JointSpectrum:
    """Points ``(gamma(lam) + m, lam)`` over the level-``n`` spectrum."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != lambdas.values.shape:
        raise ValidationError(f"gamma has {gamma.size} entries, lambda set has {len(lambdas)}")
    if np.any((gamma < 0.0) | (gamma >= 1.0)):
        raise ValidationError("gamma values must lie in [0, 1)")
    m0, m1 = (int(v) for v in m_range)
    if m0 > m1:
        raise ValidationError("empty index range")
    m = np.arange(m0, m1 + 1)
    xs = (gamma[None, :] + m[:, None]).ravel()
    ys = np.broadcast_to(lambdas.values.astype(float)[None, :], (len(m), len(gamma))).ravel()
    return spectrum_from_points(np.column_stack([xs, ys]), None)


def joint_gram(gamma, lambdas: LambdaSet, m_range: tuple[int, int], depth: int = 40, digits=DEFAULT_DIGITS) -> GramReport:
    """Gram matrix of ``e_{gamma(lam) + m} (x) e_lam`` under Lebesgue on ``[0, 1]`` times ``mu``.

    Entry ``[j, k]`` is the inner product of function ``j`` with function ``k``,
    conjugate-linear in the first slot.  The ``x`` integral is evaluated in
    closed form, ``int_0^1 e(D x) dx = e(D / 2) sinc(D)``.
    """
    gamma = np.asarray(gamma, dtype=float)
    m0, m1 = (int(v) for v in m_range)
    m = np.arange(m0, m1 + 1)
    freq_x = (gamma[None, :] + m[:, None]).ravel()
    freq_y = np.tile(lambdas.values.astype(float), len(m))
    dx = freq_x[None, :] - freq_x[:, None]
    dy = freq_y[None, :] - freq_y[:, None]
    x_factor = unit_phase(dx / 2.0) * np.sinc(dx)
    G = x_factor * cantor_fourier(-dy, depth, digits)
    defect = float(np.max(np.abs(G - np.eye(len(freq_x)))))
    return GramReport(G, defect, int(depth), lambdas.level)
