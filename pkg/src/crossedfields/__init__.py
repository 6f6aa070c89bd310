"""Hydrogen Rydberg manifolds in magnetic and electric fields at arbitrary mutual angle."""

from .errors import (
    DegenerateFrameError,
    InsufficientDataError,
    NumericalError,
    UnsupportedConfigurationError,
)
from .fields import (
    CM1_PER_HARTREE,
    FieldParams,
    OmegaPair,
    energy_to_cm1,
    f_from_kv_per_cm,
    gamma_from_tesla,
    omega_vectors,
    stark_saddle_energy,
)
from .manifold import (
    ManifoldBasis,
    ManifoldOperators,
    angular_momentum_matrices,
    build_basis,
    manifold_operators,
)
from .perturbation import (
    EbetaScan,
    GapMinimum,
    build_extended_matrix,
    conventional_spectrum,
    diagonalize_manifold,
    ebeta_scan,
    first_order_energy,
    manifold_labels,
    min_gap_analysis,
    second_order_energy_conventional,
)
from .exact import BoundStates, TruncationScheme, convergence_scan, solve_bound_states
from .classical import (
    ScaledParams,
    SecularState,
    SectionSet,
    chaos_indicator,
    frames,
    integrate,
    psos,
    scaled_hamiltonian,
)
from .levelstats import (
    BrodyFit,
    LevelSequence,
    SpacingEnsemble,
    fit_brody,
    nns_pipeline,
    nns_pipeline_scaled,
    pool,
    unfold,
    window_levels,
)

__version__ = "0.1.0"
