"""The momentum operator ``P_V = (1 / i 2 pi) d/dx`` with boundary condition ``f(beta) = V f(alpha)``.

Functions are sampled on the half-open grid ``x_i = alpha + i L / G`` with
values in the truncated Fourier space ``C^(2N+1)``.  Two independent routes to
the resolvent are provided:

* :func:`resolvent_greens` integrates the Green's function against a local
  interpolant of the samples; it touches ``V`` only through a linear solve.
* :func:`resolvent_spectral` expands the samples in the eigenfunctions
  ``e((lambda_j + m) x / L) h_j`` built from the eigendecomposition of ``V``.

Discrete inner products use the rectangle weight ``L / G``.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .boundary_unitary import BoundaryUnitary, FourierTruncation, SpectralModel, eigendecompose
from .errors import ConvergenceWarning, NumericalError, ValidationError
from .phase_arith import IntervalConfig, canonical_phase, decompose, unit_phase

__all__ = [
    "GridFunction",
    "MomentumSpectrum",
    "Band",
    "BandContribution",
    "SpectralProjectionResult",
    "evolve",
    "spectrum",
    "eigenfunction",
    "x_derivative",
    "momentum_residual",
    "spectral_coefficients",
    "synthesize",
    "band_limited_function",
    "resolvent_spectral",
    "resolvent_greens",
    "greens_branch_coefficients",
    "greens_kernel",
    "spectral_projection",
    "stone_projection",
    "band_partition",
    "bands_shift_consistent",
    "max_threads",
]

TWO_PI_I = 2j * np.pi
GRID_MULTIPLE_TOL = 1e-9
SPECTRUM_MERGE_TOL = 1e-10
CONDITION_LIMIT = 1e12

# 4-point Gauss-Legendre rule on [0, 1]
_GL_T, _GL_W = np.polynomial.legendre.leggauss(4)
_GL_T = 0.5 * (_GL_T + 1.0)
_GL_W = 0.5 * _GL_W


def max_threads() -> int:
    """Worker cap from ``MOMENTA_THREADS`` (default 1)."""
    raw = os.environ.get("MOMENTA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class GridFunction:
    """An ``H``-valued function sampled on the half-open grid of ``[alpha, beta)``.

    ``values[i]`` holds the Fourier coefficients of ``f(x_i)``.
    """

    interval: IntervalConfig
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 2:
            raise ValidationError(f"grid function needs shape (G >= 2, 2N+1), got {v.shape}")
        FourierTruncation.from_dimension(v.shape[1])
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def grid_size(self) -> int:
        return self.values.shape[0]

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    @property
    def truncation(self) -> FourierTruncation:
        return FourierTruncation.from_dimension(self.dimension)

    @property
    def step(self) -> float:
        return self.interval.length / self.grid_size

    @property
    def x(self) -> np.ndarray:
        return self.interval.grid(self.grid_size)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.interval, values)

    def inner(self, other: "GridFunction") -> complex:
        return complex(self.step * np.vdot(self.values, other.values))

    def norm(self) -> float:
        return float(math.sqrt(self.step) * np.linalg.norm(self.values))

    def __add__(self, other):
        return self.with_values(self.values + _values_of(other))

    def __sub__(self, other):
        return self.with_values(self.values - _values_of(other))

    def __mul__(self, scalar):
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def endpoint_values(self, order: int = 8) -> tuple[np.ndarray, np.ndarray]:
        """``f(alpha)`` (a sample) and ``f(beta)`` by one-sided polynomial extrapolation."""
        g = self.grid_size
        p = min(order, g)
        nodes = np.arange(g - p, g, dtype=float)
        weights = _lagrange_weights(nodes, float(g))
        return self.values[0].copy(), weights @ self.values[g - p :]

    def to_dict(self) -> dict:
        return {
            "interval": self.interval.as_list(),
            "grid_size": self.grid_size,
            "truncation": self.truncation.max_mode,
            "re": self.values.real.tolist(),
            "im": self.values.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridFunction":
        try:
            interval = IntervalConfig(*data["interval"])
            values = np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)
            g, n = int(data["grid_size"]), int(data["truncation"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed grid function JSON: {exc}") from exc
        if values.shape != (g, 2 * n + 1):
            raise ValidationError(f"declared shape ({g}, {2 * n + 1}) does not match data {values.shape}")
        return cls(interval, values)


def _values_of(obj):
    return obj.values if isinstance(obj, GridFunction) else obj


def _lagrange_weights(nodes: np.ndarray, x: float) -> np.ndarray:
    w = np.ones(len(nodes))
    for k, xk in enumerate(nodes):
        others = np.delete(nodes, k)
        w[k] = np.prod((x - others) / (xk - others))
    return w


def _check_dims(V_or_model, f: GridFunction):
    dim = V_or_model.dimension
    if dim != f.dimension:
        raise ValidationError(f"operator dimension {dim} does not match grid function dimension {f.dimension}")


# ---------------------------------------------------------------------------
# unitary group


def evolve(a: float, V: BoundaryUnitary, f: GridFunction, interpolate: bool = False) -> GridFunction:
    """Apply ``e(a P_V)``: ``(e(a P_V) f)(x) = V^floor(x+a) f(<x+a>)``.

    For ``a`` an integer multiple of the grid step the result is a cyclic
    index shift combined with powers of ``V``.  Other ``a`` require
    ``interpolate=True``, which evolves the band-limited eigenfunction
    expansion instead.
    """
    _check_dims(V, f)
    G = f.grid_size
    steps = a / f.step
    k = round(steps)
    if abs(steps - k) > GRID_MULTIPLE_TOL * max(1.0, abs(steps)):
        if not interpolate:
            raise ValidationError(
                f"a={a} is not a multiple of the grid step {f.step}; pass interpolate=True"
            )
        model = eigendecompose(V)
        return _apply_spectral_multiplier(
            model, f, lambda freq: unit_phase(a * freq)  # e(a * (lambda_j + m) / L)
        )
    shifted = np.arange(G) + k
    windings = np.floor_divide(shifted, G)
    source = shifted - windings * G
    out = np.empty_like(f.values)
    for w in np.unique(windings):
        rows = windings == w
        out[rows] = f.values[source[rows]] @ V.power(int(w)).T
    return f.with_values(out)


# ---------------------------------------------------------------------------
# spectrum and eigenfunctions


@dataclass(frozen=True)
class MomentumSpectrum:
    """Eigenvalues ``(lambda_j + m) / L`` of ``P_V`` for bands ``m_lo <= m <= m_hi``."""

    values: np.ndarray
    multiplicities: np.ndarray
    bands: np.ndarray
    window: tuple[int, int]
    interval: IntervalConfig

    def __len__(self):
        return len(self.values)

    def points(self) -> list[tuple[float, int]]:
        return [(float(v), int(k)) for v, k in zip(self.values, self.multiplicities)]

    def rows(self) -> list[tuple[float, int, int]]:
        return [(float(v), int(k), int(b)) for v, k, b in zip(self.values, self.multiplicities, self.bands)]


def _cluster_phases(phases: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Merge eigenphases closer than ``tol`` on the circle; returns representatives and counts."""
    p = np.sort(np.asarray(phases, dtype=float))
    reps, counts = [], []
    for value in p:
        if reps and value - reps[-1][-1] <= tol:
            reps[-1].append(value)
        else:
            reps.append([value])
    if len(reps) > 1 and reps[0][0] + 1.0 - reps[-1][-1] <= tol:
        reps[0] = reps.pop() + reps[0]
    # a seam-straddling cluster is represented at 0
    rep_values = np.array([0.0 if g[0] > g[-1] else g[0] for g in reps])
    counts = np.array([len(g) for g in reps])
    order = np.argsort(rep_values)
    return rep_values[order], counts[order]


def spectrum(model: SpectralModel, interval: IntervalConfig, m_lo: int, m_hi: int) -> MomentumSpectrum:
    """Eigenvalues of ``P_V`` in the bands ``m_lo..m_hi`` with aggregated multiplicities."""
    if m_lo > m_hi:
        raise ValidationError(f"empty band window [{m_lo}, {m_hi}]")
    reps, counts = _cluster_phases(model.phases, SPECTRUM_MERGE_TOL)
    L = interval.length
    bands = np.repeat(np.arange(m_lo, m_hi + 1), len(reps))
    lam = np.tile(reps, m_hi - m_lo + 1)
    mult = np.tile(counts, m_hi - m_lo + 1)
    values = (lam + bands) / L
    order = np.lexsort((lam, bands))
    return MomentumSpectrum(values[order], mult[order], bands[order], (int(m_lo), int(m_hi)), interval)


def eigenfunction(
    lam: float,
    h,
    interval: IntervalConfig,
    grid_size: int,
    V: BoundaryUnitary | SpectralModel | None = None,
    tol: float = 1e-9,
) -> GridFunction:
    """Sample ``f(x) = e(lam x) h``; with ``V`` given, check ``V h = e(L lam) h``."""
    h = np.asarray(h, dtype=complex).ravel()
    if not np.any(h):
        raise ValidationError("eigenvector h must be nonzero")
    if V is not None:
        mat = V.reconstruct() if isinstance(V, SpectralModel) else V.matrix
        if mat.shape[0] != len(h):
            raise ValidationError(f"h has length {len(h)}, operator dimension is {mat.shape[0]}")
        mismatch = np.linalg.norm(mat @ h - unit_phase(interval.length * lam) * h)
        if mismatch > tol * np.linalg.norm(h):
            raise ValidationError(
                f"(lambda={lam}, h) is not an eigenpair: |V h - e(L lambda) h| = {mismatch:.3e}"
            )
    x = interval.grid(grid_size)
    return GridFunction(interval, np.outer(unit_phase(lam * x), h))


def x_derivative(f: GridFunction, rates=0.0) -> np.ndarray:
    """Fourier differentiation in ``x`` after detrending column ``k`` by ``e(rates[k] x)``.

    ``rates`` may be complex; the detrended samples are treated as periodic
    and the derivative of the trend is restored by the product rule.
    """
    G, L = f.grid_size, f.interval.length
    x = f.x[:, None]
    rates = np.broadcast_to(np.asarray(rates, dtype=complex), (f.dimension,))[None, :]
    trend = np.exp(TWO_PI_I * rates * x)
    g = f.values / trend
    m = np.fft.fftfreq(G, 1.0 / G)
    if G % 2 == 0:
        m[G // 2] = 0.0
    dg = np.fft.ifft(TWO_PI_I * (m / L)[:, None] * np.fft.fft(g, axis=0), axis=0)
    return trend * (dg + TWO_PI_I * rates * g)


def momentum_residual(f: GridFunction, lam: float, model: SpectralModel) -> float:
    """``|P f - lam f| / |f|`` with the derivative detrended along the eigenbasis of ``V``."""
    _check_dims(model, f)
    H = model.vectors
    c = f.with_values(f.values @ H.conj())
    dc = x_derivative(c, model.phases / f.interval.length)
    resid = dc / TWO_PI_I - lam * c.values
    return float(np.linalg.norm(resid) / np.linalg.norm(c.values))


# ---------------------------------------------------------------------------
# eigenfunction expansion


def _window_modes(G: int) -> np.ndarray:
    return np.fft.fftfreq(G, 1.0 / G).round().astype(int)


def spectral_coefficients(model: SpectralModel, f: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of ``f`` along the unit vectors ``L^-1/2 e((lambda_j + m) x / L) h_j``.

    Returns ``(modes, coeffs)`` with ``coeffs[k, j]`` belonging to band
    ``modes[k]`` (FFT ordering) and eigenvector ``j``.  The expansion over the
    ``G`` listed bands reproduces the samples exactly.
    """
    _check_dims(model, f)
    G, L, alpha = f.grid_size, f.interval.length, f.interval.alpha
    x = f.x[:, None]
    c = f.values @ model.vectors.conj()
    detrended = c * unit_phase(-model.phases[None, :] * x / L)
    modes = _window_modes(G)
    coeffs = np.fft.fft(detrended, axis=0) * (math.sqrt(L) / G) * unit_phase(-modes * alpha / L)[:, None]
    return modes, coeffs


def synthesize(model: SpectralModel, interval: IntervalConfig, modes: np.ndarray, coeffs: np.ndarray) -> GridFunction:
    """Inverse of :func:`spectral_coefficients` on the grid of size ``len(modes)``."""
    G, L = len(modes), interval.length
    x = interval.grid(G)[:, None]
    body = np.fft.ifft(coeffs * unit_phase(modes * interval.alpha / L)[:, None], axis=0) * (G / math.sqrt(L))
    c = body * unit_phase(model.phases[None, :] * x / L)
    return GridFunction(interval, c @ model.vectors.T)


def _frequencies(model: SpectralModel, modes: np.ndarray, L: float) -> np.ndarray:
    return (model.phases[None, :] + modes[:, None]) / L


def _apply_spectral_multiplier(model: SpectralModel, f: GridFunction, func) -> GridFunction:
    modes, coeffs = spectral_coefficients(model, f)
    freq = _frequencies(model, modes, f.interval.length)
    return synthesize(model, f.interval, modes, coeffs * func(freq))


def band_limited_function(
    model: SpectralModel, interval: IntervalConfig, grid_size: int, max_band: int, seed=None
) -> GridFunction:
    """Random smooth element of ``dom(P_V)`` using bands ``|m| <= max_band``."""
    if 2 * max_band + 1 > grid_size:
        raise ValidationError("max_band too large for the grid")
    rng = np.random.default_rng(seed)
    modes = _window_modes(grid_size)
    d = model.dimension
    coeffs = rng.standard_normal((grid_size, d)) + 1j * rng.standard_normal((grid_size, d))
    coeffs[np.abs(modes) > max_band] = 0.0
    return synthesize(model, interval, modes, coeffs)


# ---------------------------------------------------------------------------
# resolvents


def resolvent_spectral(
    z: complex, model: SpectralModel, f: GridFunction, m_bound: int = 64, full_output: bool = False
):
    """``(z - P_V)^-1 f`` by the eigenfunction expansion truncated to ``|m| <= m_bound``.

    With ``full_output`` also returns the tail bound ``|Im z|^-1 * |f_tail|``,
    where ``f_tail`` is the part of ``f`` in the discarded bands.
    """
    z = complex(z)
    if m_bound < 1:
        raise ValidationError("m_bound must be >= 1")
    if 2 * m_bound + 1 > f.grid_size:
        raise ValidationError(f"m_bound={m_bound} needs a grid of at least {2 * m_bound + 1} points")
    modes, coeffs = spectral_coefficients(model, f)
    freq = _frequencies(model, modes, f.interval.length)
    keep = np.abs(modes) <= m_bound
    dist = np.abs(z - freq[keep])
    if dist.min() < 1e-8:
        raise ValidationError(f"z={z} lies within 1e-8 of the spectrum")
    weights = np.zeros_like(freq, dtype=complex)
    weights[keep] = 1.0 / (z - freq[keep])
    out = synthesize(model, f.interval, modes, coeffs * weights)
    if not full_output:
        return out
    tail_mass = float(np.linalg.norm(coeffs[~keep]))
    scale = abs(z.imag) if z.imag != 0 else dist.min()
    return out, tail_mass / scale


def greens_branch_coefficients(z: complex, V: BoundaryUnitary, interval: IntervalConfig):
    """Branch matrices ``c1`` (``x < s``) and ``c2`` (``x > s``) of the Green's function.

    ``c1 = i 2 pi M``, ``c2 = i 2 pi (M - 1)`` with ``M = (1 - e(-L z) V)^-1``, so
    the jump ``G(s-, s) - G(s+, s) = c1 - c2 = i 2 pi`` is built in.
    """
    M = _resolvent_matrix(z, V, interval.length)
    c1 = TWO_PI_I * M
    c2 = c1 - TWO_PI_I * np.eye(V.dimension)
    return c1, c2


def greens_kernel(x: float, s: float, z: complex, V: BoundaryUnitary, interval: IntervalConfig) -> np.ndarray:
    """The matrix ``G(x, s, z)`` for ``x != s``."""
    if x == s:
        raise ValidationError("Green's function is discontinuous at x = s")
    c1, c2 = greens_branch_coefficients(z, V, interval)
    return (c1 if x < s else c2) * unit_phase_complex(z * (x - s))


def unit_phase_complex(w):
    """``e(w) = exp(2 pi i w)`` for complex ``w``."""
    return np.exp(TWO_PI_I * np.asarray(w, dtype=complex))


def _resolvent_matrix(z: complex, V: BoundaryUnitary, L: float) -> np.ndarray:
    A = np.eye(V.dimension) - unit_phase_complex(-L * complex(z)) * V.matrix
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NumericalError(f"1 - e(-L z) V is near-singular at z={z} (condition {cond:.3e})")
    return np.linalg.inv(A)


def _interpolation_nodes(f: GridFunction, order: int = 8) -> np.ndarray:
    """Samples of an order-``order`` local Lagrange interpolant at 4 Gauss nodes per cell.

    Cell ``i`` is ``[x_i, x_{i+1})``; the last cell ends at ``beta`` and uses a
    one-sided stencil.  Returns shape ``(G, 4, dim)``.
    """
    G = f.grid_size
    p = min(order, G)
    cells = np.arange(G)
    start = np.clip(cells - (p // 2 - 1), 0, G - p)
    offset = cells - start
    stencil_nodes = np.arange(p, dtype=float)
    weights = np.array(
        [[_lagrange_weights(stencil_nodes, o + t) for t in _GL_T] for o in range(p)]
    )  # (offset, node, stencil)
    gathered = f.values[start[:, None] + np.arange(p)[None, :]]  # (G, p, dim)
    return np.einsum("iqp,ipd->iqd", weights[offset], gathered)


def _greens_batch(zs: np.ndarray, V: BoundaryUnitary, nodes: np.ndarray, interval: IntervalConfig) -> np.ndarray:
    """Green's-function resolvent for each ``z`` in ``zs`` evaluated on the grid."""
    G = nodes.shape[0]
    L = interval.length
    h = L / G
    zs = np.asarray(zs, dtype=complex)
    # integral over cell i of e(z (x_{i+1} - s)) f(s) ds, shared kernel across cells
    kern = h * _GL_W[None, :] * unit_phase_complex(zs[:, None] * h * (1.0 - _GL_T)[None, :])
    cell = np.einsum("zq,iqd->zid", kern, nodes)
    step = unit_phase_complex(zs * h)[:, None]
    running = np.zeros((len(zs), G + 1, nodes.shape[2]), dtype=complex)
    for i in range(G):
        running[:, i + 1] = step * running[:, i] + cell[:, i]
    total = running[:, G]  # int_alpha^beta e(z (beta - s)) f(s) ds
    eye = np.eye(V.dimension)
    A = eye[None] - unit_phase_complex(-L * zs)[:, None, None] * V.matrix[None]
    cond = np.linalg.cond(A)
    if np.any(~np.isfinite(cond)) or np.any(cond > CONDITION_LIMIT):
        raise NumericalError(f"1 - e(-L z) V near-singular (max condition {np.max(cond):.3e})")
    mz_total = np.linalg.solve(A, total[:, :, None])[:, :, 0]
    back = unit_phase_complex(-zs[:, None] * h * (G - np.arange(G))[None, :])  # e(z (x_i - beta))
    return TWO_PI_I * (back[:, :, None] * mz_total[:, None, :] - running[:, :G])


def resolvent_greens(z: complex, V: BoundaryUnitary, f: GridFunction) -> GridFunction:
    """``(z - P_V)^-1 f`` by quadrature of the Green's function.

    Output points are grid nodes, so the kernel's jump at ``x = s`` falls on
    cell boundaries and every cell integrand is smooth.
    """
    _check_dims(V, f)
    out = _greens_batch(np.array([complex(z)]), V, _interpolation_nodes(f), f.interval)[0]
    return f.with_values(out)


# ---------------------------------------------------------------------------
# spectral projections


@dataclass(frozen=True)
class BandContribution:
    eigen_index: int
    band: int
    frequency: float
    vector: np.ndarray


@dataclass(frozen=True, eq=False)
class SpectralProjectionResult:
    """Spectral projection of ``P_V`` onto ``(mu, nu)`` as a list of rank-one pieces."""

    mu: float
    nu: float
    model: SpectralModel
    interval: IntervalConfig
    contributions: tuple[BandContribution, ...]

    @property
    def rank(self) -> int:
        return len(self.contributions)

    def apply(self, f: GridFunction) -> GridFunction:
        _check_dims(self.model, f)
        modes, coeffs = spectral_coefficients(self.model, f)
        mask = np.zeros(coeffs.shape, dtype=bool)
        index = {int(m): k for k, m in enumerate(modes)}
        for c in self.contributions:
            k = index.get(c.band)
            if k is None:
                raise ValidationError(
                    f"band {c.band} is not resolved by a grid of {f.grid_size} points"
                )
            mask[k, c.eigen_index] = True
        return synthesize(self.model, f.interval, modes, np.where(mask, coeffs, 0.0))


def spectral_projection(mu: float, nu: float, model: SpectralModel, interval: IntervalConfig, tol: float = 1e-9):
    """Projection onto eigenfunctions with eigenvalue ``(lambda_j + m) / L`` in ``(mu, nu)``."""
    if not mu < nu:
        raise ValidationError(f"need mu < nu, got ({mu}, {nu})")
    L = interval.length
    pieces = []
    for j, lam in enumerate(model.phases):
        m_first = math.floor(mu * L - lam) - 1
        m_last = math.ceil(nu * L - lam) + 1
        for m in range(m_first, m_last + 1):
            freq = (lam + m) / L
            if abs(freq - mu) <= tol or abs(freq - nu) <= tol:
                raise ValidationError(f"interval endpoint collides with spectrum point {freq}")
            if mu < freq < nu:
                pieces.append(BandContribution(j, m, freq, model.vectors[:, j]))
    pieces.sort(key=lambda c: (c.frequency, c.eigen_index))
    return SpectralProjectionResult(float(mu), float(nu), model, interval, tuple(pieces))


def stone_projection(
    mu: float,
    nu: float,
    V: BoundaryUnitary,
    b: float,
    f: GridFunction,
    quad_points: int | None = None,
    full_output: bool = False,
    monitor_tol: float = 1e-6,
):
    """Stone's formula at finite ``b``: ``(1 / 2 pi i) int_mu^nu (R(a - ib) - R(a + ib)) f da``.

    ``R`` is the Green's-function resolvent.  The ``a``-integral uses 8-point
    Gauss-Legendre panels of width at most ``b / 2`` unless ``quad_points``
    (total nodes) is given.  The convergence monitor compares against the rule
    with half as many panels; a miss raises :class:`ConvergenceWarning`.
    """
    if b <= 0:
        raise ValidationError("b must be positive")
    if not mu < nu:
        raise ValidationError(f"need mu < nu, got ({mu}, {nu})")
    _check_dims(V, f)
    nodes = _interpolation_nodes(f)
    per_panel = 8
    if quad_points is None:
        panels = max(16, math.ceil(2.0 * (nu - mu) / b))
    else:
        panels = max(2, math.ceil(quad_points / per_panel))
    fine = _stone_integral(mu, nu, V, b, nodes, f.interval, panels, per_panel)
    coarse = _stone_integral(mu, nu, V, b, nodes, f.interval, max(1, panels // 2), per_panel)
    scale = max(np.linalg.norm(f.values), np.finfo(float).tiny)
    change = float(np.linalg.norm(fine - coarse) / scale)
    converged = change <= monitor_tol
    if not converged:
        warnings.warn(
            f"Stone quadrature not converged: relative change {change:.2e} with {panels} panels",
            ConvergenceWarning,
            stacklevel=2,
        )
    out = f.with_values(fine)
    if full_output:
        return out, {"converged": converged, "relative_change": change, "panels": panels}
    return out


def _stone_integral(mu, nu, V, b, nodes, interval, panels, per_panel, batch: int = 1024):
    t, w = np.polynomial.legendre.leggauss(per_panel)
    edges = np.linspace(mu, nu, panels + 1)
    half = 0.5 * np.diff(edges)
    a = (edges[:-1, None] + half[:, None] * (t[None, :] + 1.0)).ravel()
    wa = (half[:, None] * w[None, :]).ravel()
    chunks = [slice(s, min(s + batch, len(a))) for s in range(0, len(a), batch)]

    def work(sl):
        zl = a[sl] - 1j * b
        zu = a[sl] + 1j * b
        diff = _greens_batch(zl, V, nodes, interval) - _greens_batch(zu, V, nodes, interval)
        return np.einsum("z,zid->id", wa[sl], diff)

    workers = min(max_threads(), len(chunks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(sl) for sl in chunks]
    return sum(parts) / TWO_PI_I


# ---------------------------------------------------------------------------
# bands


@dataclass(frozen=True)
class Band:
    index: int
    values: np.ndarray
    multiplicities: np.ndarray

    def shifted(self) -> np.ndarray:
        return self.values - self.index


def band_partition(spec: MomentumSpectrum) -> list[Band]:
    """Group spectrum points by unit band ``[k, k + 1)``; unit intervals only."""
    if abs(spec.interval.length - 1.0) > 1e-15:
        raise ValidationError("band partition requires beta - alpha = 1")
    keyed: dict[int, list[tuple[float, int]]] = {}
    for value, mult in zip(spec.values, spec.multiplicities):
        k = decompose(float(value)).winding
        keyed.setdefault(k, []).append((float(value), int(mult)))
    bands = []
    for k in sorted(keyed):
        vals = np.array([v for v, _ in keyed[k]])
        mults = np.array([m for _, m in keyed[k]])
        order = np.argsort(canonical_phase(vals - k))
        bands.append(Band(k, vals[order], mults[order]))
    return bands


def bands_shift_consistent(bands: list[Band], tol: float = 1e-10) -> bool:
    """Whether every band shifted to ``[0, 1)`` matches the reference band (band 0 if present)."""
    if not bands:
        return True
    ref = next((b for b in bands if b.index == 0), bands[0])
    ref_vals = canonical_phase(ref.shifted())
    for band in bands:
        vals = canonical_phase(band.shifted())
        if len(vals) != len(ref_vals) or not np.array_equal(band.multiplicities, ref.multiplicities):
            return False
        if np.max(np.abs(vals - ref_vals), initial=0.0) > tol:
            return False
    return True
