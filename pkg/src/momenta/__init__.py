"""Selfadjoint momentum operators with boundary unitaries, realized at finite Fourier truncation."""

from .boundary_unitary import (
    BoundaryUnitary,
    FourierTruncation,
    SpectralModel,
    are_unitarily_equivalent,
    eigendecompose,
    make_diagonal,
    make_identity,
    make_reflection,
    make_rotation,
    make_scalar,
    make_twisted_rotation,
    multiplicity_of_phase,
    random_unitary,
)
from .commuting_pairs import (
    CaseTag,
    CommutingPairSpec,
    GammaFunction,
    JointSpectrum,
    TilingReport,
    check_commuting_square,
    check_commuting_strip,
    detect_geometric,
    geometric_spec,
    joint_spectrum_square,
    joint_spectrum_strip,
    tiling_check,
)
from .errors import ConvergenceWarning, NumericalError, ValidationError
from .fractal_measure import (
    CantorLevel,
    LambdaSet,
    cantor_fourier,
    check_commuting_fractal,
    gram_matrix,
    joint_gram,
    joint_spectrum_fractal,
    lambda_set,
)
from .momentum_operator import (
    GridFunction,
    MomentumSpectrum,
    SpectralProjectionResult,
    band_partition,
    eigenfunction,
    evolve,
    resolvent_greens,
    resolvent_spectral,
    spectral_projection,
    spectrum,
    stone_projection,
)
from .phase_arith import UNIT_INTERVAL, IntervalConfig, PhaseDecomposition, decompose, unit_phase
from .selfadjoint_extensions import (
    DeficiencyVector,
    cayley_boundary_to_vn,
    cayley_vn_to_boundary,
    deficiency_vector,
    domain_check,
)

__version__ = "0.1.0"
