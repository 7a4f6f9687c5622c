"""Deficiency vectors, the boundary-condition domain test, and the Cayley correspondence.

The minimal momentum operator ``P_0`` on ``[alpha, beta] (x) H`` has deficiency
spaces spanned by ``exp(-2 pi x) h`` and ``exp(2 pi x) h``.  A selfadjoint
extension can be labelled either by the boundary unitary ``V_B`` in
``f(beta) = V_B f(alpha)`` or by the von Neumann unitary ``V_vN`` between the
deficiency spaces; with ``c = exp(2 pi L)`` the two are related by

    V_vN = (c - V_B)^-1 (c V_B - 1),     V_B = (1 + c V_vN) (c + V_vN)^-1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .boundary_unitary import BoundaryUnitary
from .errors import NumericalError, ValidationError
from .momentum_operator import GridFunction, x_derivative
from .phase_arith import IntervalConfig

__all__ = [
    "DeficiencyVector",
    "deficiency_vector",
    "cayley_boundary_to_vn",
    "cayley_vn_to_boundary",
    "mobius_boundary_to_vn",
    "domain_check",
    "boundary_mismatch",
]

log = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValidationError(f"sign must be '+' or '-', got {sign!r}")


@dataclass(frozen=True, eq=False)
class DeficiencyVector:
    """Sampled element of ``D_+`` (``sign=+1``) or ``D_-`` (``sign=-1``).

    ``f_+(x) = exp(2 pi (beta - x)) h`` and ``f_-(x) = exp(2 pi (x - alpha)) h``;
    both have ``4 pi |f|^2 = (exp(4 pi L) - 1) |h|^2``.
    """

    sign: int
    h: np.ndarray
    samples: GridFunction
    residual: float

    @property
    def interval(self) -> IntervalConfig:
        return self.samples.interval

    def profile(self, x) -> np.ndarray:
        iv = self.interval
        if self.sign > 0:
            return np.exp(2.0 * np.pi * (iv.beta - np.asarray(x, dtype=float)))
        return np.exp(2.0 * np.pi * (np.asarray(x, dtype=float) - iv.alpha))

    def norm_squared(self, quad_points: int = 64) -> float:
        """``|f|^2`` by Gauss-Legendre quadrature of the analytic profile."""
        t, w = np.polynomial.legendre.leggauss(quad_points)
        iv = self.interval
        x = iv.alpha + 0.5 * iv.length * (t + 1.0)
        return float(0.5 * iv.length * np.dot(w, self.profile(x) ** 2) * np.vdot(self.h, self.h).real)

    def norm_identity(self) -> float:
        """The closed form ``(exp(4 pi L) - 1) |h|^2 / (4 pi)``."""
        return float(math.expm1(4.0 * math.pi * self.interval.length) * np.vdot(self.h, self.h).real / (4.0 * math.pi))


def deficiency_vector(sign, h, interval: IntervalConfig, grid_size: int) -> DeficiencyVector:
    """Sample ``f_sign`` and record ``|(P -+ i) f| / |f|`` from spectral differentiation."""
    s = _sign(sign)
    h = np.asarray(h, dtype=complex).ravel()
    if not np.any(h):
        raise ValidationError("h must be nonzero")
    x = interval.grid(grid_size)
    shift = interval.beta if s > 0 else interval.alpha
    profile = np.exp(-2.0 * np.pi * s * (x - shift))
    f = GridFunction(interval, np.outer(profile, h))
    # exp(-+2 pi x) = e(rate x) with rate = +-i
    df = x_derivative(f, s * 1j)
    resid = df / (2j * np.pi) - s * 1j * f.values
    residual = float(np.linalg.norm(resid) / np.linalg.norm(f.values))
    return DeficiencyVector(s, h, f, residual)


def _cayley_constant(interval: IntervalConfig) -> float:
    try:
        return math.exp(2.0 * math.pi * interval.length)
    except OverflowError:
        raise NumericalError(f"exp(2 pi L) overflows for L = {interval.length}") from None


def _checked_solve(a: np.ndarray, b: np.ndarray, what: str) -> np.ndarray:
    cond = np.linalg.cond(a)
    log.debug("%s: condition number %.3e", what, cond)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NumericalError(f"{what}: ill-conditioned solve (condition {cond:.3e})")
    return scipy.linalg.solve(a, b)


def cayley_boundary_to_vn(V_B: BoundaryUnitary, interval: IntervalConfig) -> BoundaryUnitary:
    """``V_vN = (c - V_B)^-1 (c V_B - 1)`` with ``c = exp(2 pi L)``."""
    c = _cayley_constant(interval)
    eye = np.eye(V_B.dimension)
    mat = _checked_solve(c * eye - V_B.matrix, c * V_B.matrix - eye, "boundary -> von Neumann")
    return BoundaryUnitary.from_matrix(mat, label=f"vn({V_B.label})")


def cayley_vn_to_boundary(V_vN: BoundaryUnitary, interval: IntervalConfig) -> BoundaryUnitary:
    """``V_B = (1 + c V_vN)(c + V_vN)^-1`` with ``c = exp(2 pi L)``."""
    c = _cayley_constant(interval)
    eye = np.eye(V_vN.dimension)
    # X (c + V) = 1 + c V  <=>  (c + V)^T X^T = (1 + c V)^T
    mat = _checked_solve((c * eye + V_vN.matrix).T, (eye + c * V_vN.matrix).T, "von Neumann -> boundary").T
    return BoundaryUnitary.from_matrix(mat, label=f"boundary({V_vN.label})")


def mobius_boundary_to_vn(w, interval: IntervalConfig):
    """The scalar map ``w -> (c w - 1) / (c - w)`` acting on eigenvalues."""
    c = _cayley_constant(interval)
    w = np.asarray(w, dtype=complex)
    return (c * w - 1.0) / (c - w)


def boundary_mismatch(f: GridFunction, V: BoundaryUnitary) -> float:
    """``|f(beta) - V f(alpha)|`` with ``f(beta)`` extrapolated from the last samples."""
    if V.dimension != f.dimension:
        raise ValidationError(f"operator dimension {V.dimension} does not match grid function dimension {f.dimension}")
    f_alpha, f_beta = f.endpoint_values()
    return float(np.linalg.norm(f_beta - V.matrix @ f_alpha))


def domain_check(f: GridFunction, V: BoundaryUnitary, tol: float = 1e-8) -> bool:
    """Whether ``f`` satisfies ``f(beta) = V f(alpha)`` within ``tol * |f|``."""
    scale = f.norm()
    mismatch = boundary_mismatch(f, V)
    if scale == 0.0:
        return mismatch == 0.0
    return mismatch <= tol * scale
