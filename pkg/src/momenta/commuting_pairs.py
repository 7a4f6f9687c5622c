"""Commuting momentum pairs on the square and the strip, their joint spectra, and tiling checks.

On the unit square a pair ``(P_U, Q_V)`` commutes exactly when one boundary
unitary is scalar and the other is diagonal in the matching exponential basis.
The joint spectrum is then the point set ``{(alpha + m, beta_m + n)}`` or its
transpose, and a set of unit-square translates can be checked for tiling on a
window by counting covers at raster cell centers.

For the strip ``[0, 1] x R`` the second operator is diagonalized by the
Fourier transform, and the joint spectrum is ``{(gamma(lam) + m, lam)}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .boundary_unitary import BoundaryUnitary
from .errors import ValidationError
from .phase_arith import canonical_phase, circular_distance

__all__ = [
    "CaseTag",
    "CommutingPairSpec",
    "JointSpectrum",
    "GammaFunction",
    "TilingReport",
    "check_commuting_square",
    "joint_spectrum_square",
    "geometric_spec",
    "detect_geometric",
    "generation_ranges",
    "tiling_check",
    "check_commuting_strip",
    "joint_spectrum_strip",
    "is_scalar",
    "is_diagonal",
    "spectrum_from_points",
]

DUPLICATE_TOL = 1e-10


class CaseTag(str, Enum):
    U_SCALAR = "U_scalar"
    V_SCALAR = "V_scalar"


@dataclass(frozen=True, eq=False)
class CommutingPairSpec:
    """Parameters ``alpha`` and ``beta_m`` of a commuting square pair.

    ``betas[k]`` belongs to mode ``modes[k]``; modes form a consecutive range.
    """

    case_tag: CaseTag
    alpha: float
    modes: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        modes = np.asarray(self.modes, dtype=int)
        betas = np.asarray(self.betas, dtype=float)
        if modes.ndim != 1 or modes.shape != betas.shape or len(modes) == 0:
            raise ValidationError("modes and betas must be matching non-empty 1-D arrays")
        if np.any(np.diff(modes) != 1):
            raise ValidationError("modes must be a consecutive increasing range")
        if not 0.0 <= self.alpha < 1.0 or np.any((betas < 0.0) | (betas >= 1.0)):
            raise ValidationError("alpha and beta_m must lie in [0, 1)")
        object.__setattr__(self, "case_tag", CaseTag(self.case_tag))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "betas", betas)

    @property
    def beta_list(self) -> dict[int, float]:
        return {int(m): float(b) for m, b in zip(self.modes, self.betas)}

    def beta(self, m: int) -> float:
        k = m - int(self.modes[0])
        if not 0 <= k < len(self.modes):
            raise ValidationError(f"mode {m} outside the spec range [{self.modes[0]}, {self.modes[-1]}]")
        return float(self.betas[k])

    def to_dict(self) -> dict:
        return {
            "case_tag": self.case_tag.value,
            "alpha": self.alpha,
            "modes": self.modes.tolist(),
            "betas": self.betas.tolist(),
        }


Rect = tuple[float, float, float, float]  # (x0, x1, y0, y1)


@dataclass(frozen=True, eq=False)
class JointSpectrum:
    """Points of a joint spectrum.

    ``window`` bounds every emitted point.  ``complete`` (if known) is the
    half-open rectangle ``[x0, x1) x [y0, y1)`` inside which every point of the
    infinite set has been emitted; tiling checks rely on it.
    """

    points: np.ndarray
    window: Rect
    complete: Rect | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def point_set(self, decimals: int = 12) -> set[tuple[float, float]]:
        return {(round(float(x), decimals), round(float(y), decimals)) for x, y in self.points}

    def without(self, point) -> "JointSpectrum":
        keep = np.any(np.abs(self.points - np.asarray(point, dtype=float)) > DUPLICATE_TOL, axis=1)
        return JointSpectrum(self.points[keep], self.window, self.complete)

    def transposed(self) -> "JointSpectrum":
        x0, x1, y0, y1 = self.window
        complete = None
        if self.complete is not None:
            cx0, cx1, cy0, cy1 = self.complete
            complete = (cy0, cy1, cx0, cx1)
        return JointSpectrum(self.points[:, ::-1], (y0, y1, x0, x1), complete)


def spectrum_from_points(points, complete: Rect | None = None) -> JointSpectrum:
    """Deduplicated, sorted joint spectrum with ``window`` the bounding box."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts):
        keys = np.round(pts / DUPLICATE_TOL).astype(np.int64)
        _, first = np.unique(keys, axis=0, return_index=True)
        pts = pts[np.sort(first)]
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        pts = pts[order]
        window = (float(pts[:, 0].min()), float(pts[:, 0].max()), float(pts[:, 1].min()), float(pts[:, 1].max()))
    else:
        window = (0.0, 0.0, 0.0, 0.0)
    return JointSpectrum(pts, window, complete)


def is_scalar(matrix: np.ndarray, tol: float) -> bool:
    d = matrix.shape[0]
    return bool(np.linalg.norm(matrix - (np.trace(matrix) / d) * np.eye(d), 2) <= tol)


def is_diagonal(matrix: np.ndarray, tol: float) -> bool:
    return bool(np.linalg.norm(matrix - np.diag(np.diag(matrix))) <= tol)


def _phase_of(z) -> np.ndarray:
    return canonical_phase(np.angle(z) / (2.0 * np.pi))


def check_commuting_square(U: BoundaryUnitary, V: BoundaryUnitary, tol: float = 1e-9) -> CommutingPairSpec | None:
    """Classify ``(U, V)``; returns the spec or ``None`` if neither case holds.

    ``V`` is read in the shifted basis labelled by its modes, so case ``U_scalar``
    means ``U`` scalar and ``V`` diagonal.  When both are scalar the
    ``U_scalar`` reading is reported.
    """
    if U.dimension != V.dimension:
        raise ValidationError(f"dimension mismatch: {U.dimension} vs {V.dimension}")
    modes = U.truncation.modes
    d = U.dimension
    for case, scalar, diag in ((CaseTag.U_SCALAR, U, V), (CaseTag.V_SCALAR, V, U)):
        if is_scalar(scalar.matrix, tol) and is_diagonal(diag.matrix, tol):
            alpha = float(_phase_of(np.trace(scalar.matrix) / d))
            return CommutingPairSpec(case, alpha, modes, _phase_of(np.diag(diag.matrix)))
    return None


def joint_spectrum_square(spec: CommutingPairSpec, m_range: tuple[int, int], n_range: tuple[int, int]) -> JointSpectrum:
    """Enumerate the lattice-like joint spectrum for ``m`` in ``m_range``, ``n`` in ``n_range``.

    Case ``U_scalar`` gives ``(alpha + m, beta_m + n)``; case ``V_scalar`` gives
    ``(beta_n + m, alpha + n)``.  Ranges are inclusive.
    """
    m0, m1 = (int(v) for v in m_range)
    n0, n1 = (int(v) for v in n_range)
    if m0 > m1 or n0 > n1:
        raise ValidationError("empty index range")
    a = spec.alpha
    if spec.case_tag is CaseTag.U_SCALAR:
        pts = [(a + m, spec.beta(m) + n) for m in range(m0, m1 + 1) for n in range(n0, n1 + 1)]
        complete = (a + m0, a + m1 + 1.0, float(n0), float(n1 + 1))
    else:
        pts = [(spec.beta(n) + m, a + n) for m in range(m0, m1 + 1) for n in range(n0, n1 + 1)]
        complete = (float(m0), float(m1 + 1), a + n0, a + n1 + 1.0)
    return spectrum_from_points(np.array(pts), complete)


def geometric_spec(r: float, m_range: tuple[int, int], alpha: float = 0.0, case: CaseTag = CaseTag.U_SCALAR) -> CommutingPairSpec:
    """The rotation spec ``beta_m = <r m>`` over an inclusive mode range."""
    modes = np.arange(int(m_range[0]), int(m_range[1]) + 1)
    return CommutingPairSpec(case, alpha, modes, canonical_phase(r * modes))


def detect_geometric(spec: CommutingPairSpec, tol: float = 1e-9) -> float | None:
    """Return ``r`` in ``[0, 1)`` with ``beta_m = <r m>`` on the whole range, or ``None``."""
    betas = spec.beta_list
    if 1 in betas:
        r = betas[1]
    elif -1 in betas:
        r = float(canonical_phase(-betas[-1]))
    else:
        # without mode 1 the candidate is not pinned down
        return None
    modes = spec.modes
    if np.all(circular_distance(canonical_phase(r * modes), spec.betas) <= tol):
        return float(r)
    return None


def generation_ranges(window: Rect, alpha: float = 0.0) -> tuple[tuple[int, int], tuple[int, int]]:
    """Index ranges whose square joint spectrum is complete around ``window`` (case ``U_scalar``)."""
    x0, x1, y0, y1 = window
    m_range = (math.floor(x0 - 1.0 - alpha) - 1, math.ceil(x1 - alpha) + 1)
    n_range = (math.floor(y0 - 1.0) - 1, math.ceil(y1) + 1)
    return m_range, n_range


@dataclass(frozen=True, eq=False)
class TilingReport:
    is_tiling: bool
    min_cover: int
    max_cover: int
    violation_cells: list[tuple[float, float, int]]
    counts: np.ndarray = field(repr=False)

    def to_dict(self, max_violations: int = 1000) -> dict:
        return {
            "is_tiling": self.is_tiling,
            "min_cover": self.min_cover,
            "max_cover": self.max_cover,
            "violation_count": len(self.violation_cells),
            "violations": [
                {"cx": cx, "cy": cy, "count": c} for cx, cy, c in self.violation_cells[:max_violations]
            ],
        }


def tiling_check(spectrum: JointSpectrum, window: Rect, resolution: int = 64) -> TilingReport:
    """Count covering unit squares ``lam + [0, 1]^2`` at the cell centers of ``window``.

    The window must keep a unit margin inside ``spectrum.complete`` so that no
    missing translate could reach it.
    """
    x0, x1, y0, y1 = (float(v) for v in window)
    if not (x0 < x1 and y0 < y1):
        raise ValidationError(f"degenerate window {window}")
    if spectrum.complete is None:
        raise ValidationError("joint spectrum lacks a completeness rectangle")
    cx0, cx1, cy0, cy1 = spectrum.complete
    if not (cx0 <= x0 - 1.0 and x1 <= cx1 and cy0 <= y0 - 1.0 and y1 <= cy1):
        raise ValidationError(
            f"window {window} is too close to the generation boundary {spectrum.complete}"
        )
    nx = max(1, round((x1 - x0) * resolution))
    ny = max(1, round((y1 - y0) * resolution))
    cx = x0 + (np.arange(nx) + 0.5) * ((x1 - x0) / nx)
    cy = y0 + (np.arange(ny) + 0.5) * ((y1 - y0) / ny)
    px, py = spectrum.points[:, 0], spectrum.points[:, 1]
    hit_x = (cx[None, :] >= px[:, None]) & (cx[None, :] <= px[:, None] + 1.0)
    hit_y = (cy[None, :] >= py[:, None]) & (cy[None, :] <= py[:, None] + 1.0)
    counts = hit_y.T.astype(np.int64) @ hit_x.astype(np.int64)  # (ny, nx)
    bad_y, bad_x = np.nonzero(counts != 1)
    violations = [(float(cx[i]), float(cy[j]), int(counts[j, i])) for j, i in zip(bad_y, bad_x)]
    return TilingReport(
        is_tiling=not violations,
        min_cover=int(counts.min()),
        max_cover=int(counts.max()),
        violation_cells=violations,
        counts=counts,
    )


@dataclass(frozen=True, eq=False)
class GammaFunction:
    """Phase function ``gamma`` sampled on a uniform frequency grid."""

    freqs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if freqs.ndim != 1 or freqs.shape != values.shape or len(freqs) == 0:
            raise ValidationError("freqs and values must be matching non-empty 1-D arrays")
        if not np.all(np.isfinite(freqs)):
            raise ValidationError("frequencies must be finite")
        if len(freqs) > 2:
            step = np.diff(freqs)
            if np.any(step <= 0) or np.ptp(step) > 1e-9 * max(1.0, abs(step[0])):
                raise ValidationError("frequency grid must be uniform and increasing")
        if np.any((values < 0.0) | (values >= 1.0)):
            raise ValidationError("gamma values must lie in [0, 1)")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "values", values)

    def to_dict(self) -> dict:
        return {"freqs": self.freqs.tolist(), "values": self.values.tolist()}


def check_commuting_strip(U, freqs, tol: float = 1e-9) -> GammaFunction | None:
    """Read off ``gamma`` when ``U`` is diagonal on the frequency samples, else ``None``."""
    mat = np.asarray(U.matrix if isinstance(U, BoundaryUnitary) else U, dtype=complex)
    freqs = np.asarray(freqs, dtype=float)
    if mat.ndim != 2 or mat.shape != (len(freqs), len(freqs)):
        raise ValidationError(f"operator shape {mat.shape} does not match {len(freqs)} frequency samples")
    defect = np.linalg.norm(mat.conj().T @ mat - np.eye(len(freqs)), 2)
    if defect > 1e-10:
        raise ValidationError(f"operator is not unitary (defect {defect:.3e})")
    if not is_diagonal(mat, tol):
        return None
    return GammaFunction(freqs, _phase_of(np.diag(mat)))


def joint_spectrum_strip(gamma: GammaFunction, m_range: tuple[int, int]) -> JointSpectrum:
    """Points ``(gamma(lam_k) + m, lam_k)`` for ``m`` in the inclusive ``m_range``."""
    m0, m1 = (int(v) for v in m_range)
    if m0 > m1:
        raise ValidationError("empty index range")
    m = np.arange(m0, m1 + 1)
    xs = (gamma.values[None, :] + m[:, None]).ravel()
    ys = np.broadcast_to(gamma.freqs[None, :], (len(m), len(gamma.freqs))).ravel()
    return spectrum_from_points(np.column_stack([xs, ys]), None)
