"""Boundary unitaries on the truncated Fourier basis ``e_n(y) = e(n y)``, ``|n| <= N``.

A boundary unitary ``V`` fixes the selfadjoint extension through the boundary
condition ``f(beta) = V f(alpha)``.  Here ``V`` is a dense ``(2N+1) x (2N+1)``
matrix whose column ``j`` is the image of the mode ``e_{j-N}``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import NumericalError, ValidationError
from .phase_arith import canonical_phase, circular_distance, unit_phase

__all__ = [
    "FourierTruncation",
    "BoundaryUnitary",
    "SpectralModel",
    "UNITARITY_TOL",
    "make_rotation",
    "make_twisted_rotation",
    "twisted_rotation_compression",
    "make_diagonal",
    "make_reflection",
    "make_scalar",
    "make_identity",
    "random_unitary",
    "polar_unitary",
    "eigendecompose",
    "are_unitarily_equivalent",
    "multiplicity_of_phase",
]

UNITARITY_TOL = 1e-10
EIGEN_TOL = 1e-9


@dataclass(frozen=True)
class FourierTruncation:
    max_mode: int

    def __post_init__(self):
        if int(self.max_mode) != self.max_mode or self.max_mode < 0:
            raise ValidationError(f"max_mode must be a nonnegative integer, got {self.max_mode}")
        object.__setattr__(self, "max_mode", int(self.max_mode))

    @property
    def dimension(self) -> int:
        return 2 * self.max_mode + 1

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.max_mode, self.max_mode + 1)

    def index(self, mode: int) -> int:
        if abs(mode) > self.max_mode:
            raise ValidationError(f"mode {mode} outside truncation |n| <= {self.max_mode}")
        return int(mode) + self.max_mode

    @classmethod
    def from_dimension(cls, dim: int) -> "FourierTruncation":
        if dim < 1 or dim % 2 == 0:
            raise ValidationError(f"dimension must be odd (2N+1), got {dim}")
        return cls((dim - 1) // 2)


def _unitarity_defect(matrix: np.ndarray) -> float:
    gram = matrix.conj().T @ matrix
    return float(np.linalg.norm(gram - np.eye(matrix.shape[0]), 2))


@dataclass(frozen=True, eq=False)
class BoundaryUnitary:
    """A unitary matrix on the truncated Fourier modes.

    Use :meth:`from_matrix` (or one of the ``make_*`` constructors) rather than
    the raw constructor; it computes and checks the unitarity defect.
    """

    truncation: FourierTruncation
    matrix: np.ndarray
    unitarity_defect: float
    label: str = "matrix"

    @classmethod
    def from_matrix(cls, matrix, label: str = "matrix", tol: float = UNITARITY_TOL) -> "BoundaryUnitary":
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"boundary unitary must be square, got shape {m.shape}")
        trunc = FourierTruncation.from_dimension(m.shape[0])
        defect = _unitarity_defect(m)
        if defect > tol:
            raise ValidationError(f"matrix is not unitary: defect {defect:.3e} > {tol:.1e}")
        m.setflags(write=False)
        return cls(trunc, m, defect, label)

    @property
    def dimension(self) -> int:
        return self.truncation.dimension

    @property
    def max_mode(self) -> int:
        return self.truncation.max_mode

    def power(self, k: int) -> np.ndarray:
        """``V**k`` for any integer ``k`` (negative powers use the adjoint)."""
        if k >= 0:
            return np.linalg.matrix_power(self.matrix, k)
        return np.linalg.matrix_power(self.matrix.conj().T, -k)

    def adjoint(self) -> "BoundaryUnitary":
        return BoundaryUnitary.from_matrix(self.matrix.conj().T, label=f"adjoint({self.label})")

    def conjugate_by(self, w) -> "BoundaryUnitary":
        """``W^dagger V W``."""
        w = np.asarray(w, dtype=complex)
        return BoundaryUnitary.from_matrix(w.conj().T @ self.matrix @ w, label=f"conj({self.label})")

    def to_dict(self) -> dict:
        return {
            "n": self.dimension,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BoundaryUnitary":
        try:
            n = int(data["n"])
            m = np.array(data["re"], dtype=float) + 1j * np.array(data["im"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed matrix JSON: {exc}") from exc
        if m.shape != (n, n):
            raise ValidationError(f"matrix JSON declares n={n} but arrays have shape {m.shape}")
        return cls.from_matrix(m, label="json")


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """Eigenphases ``lambda_j`` in ``[0, 1)`` and orthonormal eigenvectors ``h_j``.

    ``vectors[:, j]`` is ``h_j``; phases are sorted ascending.
    """

    phases: np.ndarray
    vectors: np.ndarray
    residual: float
    orthonormality_defect: float = 0.0
    source: BoundaryUnitary | None = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.phases)

    @property
    def eigenvalues(self) -> np.ndarray:
        return unit_phase(self.phases)

    def reconstruct(self) -> np.ndarray:
        h = self.vectors
        return (h * self.eigenvalues) @ h.conj().T


def _diag_unitary(phases, label: str) -> BoundaryUnitary:
    return BoundaryUnitary.from_matrix(np.diag(unit_phase(np.asarray(phases, dtype=float))), label=label)


def make_rotation(r: float, N: int) -> BoundaryUnitary:
    """Translation ``g(y) -> g(<y + r>)``: diagonal with entries ``e(n r)``."""
    trunc = FourierTruncation(N)
    if not np.isfinite(r):
        raise ValidationError("rotation parameter must be finite")
    if not 0.0 <= r < 1.0:
        warnings.warn(f"rotation parameter {r} reduced mod 1", UserWarning, stacklevel=2)
        r = float(np.mod(r, 1.0))
    return _diag_unitary(trunc.modes * r, label=f"rotation(r={r!r})")


def twisted_rotation_compression(theta_coeffs, r: float, N: int, quad_points: int = 4096) -> np.ndarray:
    """Raw compression of ``g(y) -> e(theta(y)) g(<y + r>)`` to ``|n| <= N``.

    ``theta_coeffs`` lists the Fourier coefficients of the real trigonometric
    polynomial ``theta`` for modes ``-d..d`` (length ``2d+1``).  The result is
    generally not unitary.
    """
    coeffs = np.asarray(theta_coeffs, dtype=complex)
    if coeffs.ndim != 1 or len(coeffs) % 2 == 0:
        raise ValidationError("theta_coeffs must have odd length 2d+1 (modes -d..d)")
    d = (len(coeffs) - 1) // 2
    if d > N:
        raise ValidationError(f"twist degree {d} exceeds truncation N={N}")
    if not np.allclose(coeffs, coeffs[::-1].conj(), atol=1e-14):
        raise ValidationError("theta must be real: coefficients need c_{-k} = conj(c_k)")
    y = np.arange(quad_points) / quad_points
    k = np.arange(-d, d + 1)
    theta = (coeffs[None, :] * unit_phase(np.outer(y, k))).sum(axis=1).real
    # Fourier coefficients of the multiplier e(theta); exact up to its (fast) decay past quad_points/2
    phi_hat = np.fft.fft(unit_phase(theta)) / quad_points
    modes = np.arange(-N, N + 1)
    toeplitz = phi_hat[np.mod(modes[:, None] - modes[None, :], quad_points)]
    return toeplitz * unit_phase(modes * r)[None, :]


def polar_unitary(matrix) -> np.ndarray:
    """Nearest unitary in Frobenius norm (unitary polar factor)."""
    u, _, vh = np.linalg.svd(np.asarray(matrix, dtype=complex))
    return u @ vh


def make_twisted_rotation(theta_coeffs, r: float, N: int) -> BoundaryUnitary:
    """Multiplication by ``e(theta)`` after translation by ``r``, cut to ``|n| <= N``.

    The cut is polar-projected onto the unitaries when its defect exceeds the
    unitarity tolerance.
    """
    FourierTruncation(N)
    r = float(np.mod(r, 1.0)) if np.isfinite(r) else r
    d = (len(theta_coeffs) - 1) // 2
    # translation is diagonal, so composing on a larger truncation and cutting
    # back to |n| <= N equals this compression
    cut = twisted_rotation_compression(theta_coeffs, r, N)
    label = f"twisted(d={d}, r={r!r})"
    if _unitarity_defect(cut) > UNITARITY_TOL:
        cut = polar_unitary(cut)
        label += "+polar"
    return BoundaryUnitary.from_matrix(cut, label=label)


def make_diagonal(phases, N: int) -> BoundaryUnitary:
    """Diagonal ``V e_n = e(r_n) e_n`` with ``phases[n + N] = r_n``."""
    trunc = FourierTruncation(N)
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (trunc.dimension,):
        raise ValidationError(f"expected {trunc.dimension} phases for N={N}, got shape {phases.shape}")
    return _diag_unitary(phases, label="diagonal")


def make_reflection(N: int) -> BoundaryUnitary:
    """``g(y) -> g(1 - y)``, sending mode ``n`` to mode ``-n``."""
    trunc = FourierTruncation(N)
    m = np.fliplr(np.eye(trunc.dimension, dtype=complex))
    return BoundaryUnitary.from_matrix(m, label="reflection")


def make_scalar(theta: float, N: int) -> BoundaryUnitary:
    trunc = FourierTruncation(N)
    return _diag_unitary(np.full(trunc.dimension, float(theta)), label=f"scalar(theta={theta!r})")


def make_identity(N: int) -> BoundaryUnitary:
    return make_scalar(0.0, N)


def random_unitary(N: int, seed=None) -> BoundaryUnitary:
    """Haar-distributed unitary from the QR factorization of a complex Gaussian."""
    trunc = FourierTruncation(N)
    rng = np.random.default_rng(seed)
    d = trunc.dimension
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))[None, :]
    return BoundaryUnitary.from_matrix(q, label=f"random(seed={seed!r})")


def eigendecompose(V: BoundaryUnitary) -> SpectralModel:
    """Eigenphases and orthonormal eigenvectors of a boundary unitary.

    Uses the complex Schur form: for a normal matrix the triangular factor is
    diagonal and the Schur vectors are an orthonormal eigenbasis, including
    inside degenerate eigenspaces.
    """
    if V.unitarity_defect > UNITARITY_TOL:
        raise ValidationError(f"unitarity defect {V.unitarity_defect:.3e} too large for eigendecompose")
    t, z = scipy.linalg.schur(V.matrix, output="complex")
    eig = np.diag(t)
    phases = canonical_phase(np.angle(eig) / (2.0 * np.pi))
    order = np.argsort(phases, kind="stable")
    phases = phases[order]
    vectors = z[:, order]
    residual = float(np.max(np.linalg.norm(V.matrix @ vectors - vectors * unit_phase(phases), axis=0)))
    ortho = float(np.max(np.abs(vectors.conj().T @ vectors - np.eye(len(phases)))))
    if residual > EIGEN_TOL or ortho > EIGEN_TOL:
        raise NumericalError(
            f"eigendecomposition failed: residual {residual:.3e}, orthonormality defect {ortho:.3e}"
        )
    phases.setflags(write=False)
    vectors.setflags(write=False)
    return SpectralModel(phases, vectors, residual, ortho, V)


def _as_model(V) -> SpectralModel:
    return V if isinstance(V, SpectralModel) else eigendecompose(V)


def are_unitarily_equivalent(U, V, tol: float = 1e-9) -> bool:
    """Whether ``U`` and ``V`` have the same eigenphase multiset on the circle.

    Both sorted phase lists are paired index-wise under every cyclic shift, so
    clusters straddling the 0/1 seam still match.
    """
    mu, mv = _as_model(U), _as_model(V)
    if mu.dimension != mv.dimension:
        raise ValidationError(f"dimension mismatch: {mu.dimension} vs {mv.dimension}")
    a, b = mu.phases, mv.phases
    for shift in range(len(a)):
        if np.all(circular_distance(a, np.roll(b, shift)) <= tol):
            return True
    return False


def multiplicity_of_phase(model: SpectralModel, phase: float, tol: float = 1e-9) -> int:
    return int(np.count_nonzero(circular_distance(model.phases, phase) <= tol))
