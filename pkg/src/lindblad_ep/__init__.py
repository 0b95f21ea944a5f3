"""Driven dissipative two-level system: spectra, exceptional points, dynamics."""

from .errors import (
    DegenerateFitError,
    DomainError,
    LindbladEPError,
    NearDegenerateError,
    NonConvergenceError,
    NoRootError,
    StepSizeError,
)
from .model import (
    HS_COMPONENTS,
    INITIAL_STATES,
    HermiticityWarning,
    LabParams,
    ModelParams,
    check_density_matrix,
    devectorize,
    frame_unitary,
    hamiltonian_rotating,
    hamiltonian_rwa,
    initial_state,
    jump_operators,
    rotate_to_lab,
    vectorize,
)
from .superop import build_lindblad, equilibrium_state, lindblad_rhs, null_eigenvectors
from .spectrum import (
    CardanoParams,
    Spectrum,
    cardano_params,
    characteristic_residual,
    eigenvalues_closed_form,
    eigenvalues_numeric,
    eigenvectors_closed_form,
    full_spectrum,
    match_distance,
)
from .exceptional import (
    EPCurvePoint,
    PhasePoint,
    Region,
    classify,
    discriminant,
    ep2_eigenvalue,
    ep2_gamma,
    ep2_locate_numeric,
    ep3_locate_numeric,
    ep3_point,
    ep_curve_point,
    scaled_discriminant,
    splitting_exponent,
)
from .dynamics import (
    Trajectory,
    evolve_lab,
    evolve_rotating,
    spectral_evolve,
    step_rk4,
    verify_frame_equivalence,
)

__version__ = "0.1.0"

__all__ = [
    "CardanoParams",
    "DegenerateFitError",
    "DomainError",
    "EPCurvePoint",
    "HS_COMPONENTS",
    "HermiticityWarning",
    "INITIAL_STATES",
    "LabParams",
    "LindbladEPError",
    "ModelParams",
    "NearDegenerateError",
    "NonConvergenceError",
    "NoRootError",
    "PhasePoint",
    "Region",
    "Spectrum",
    "StepSizeError",
    "Trajectory",
    "build_lindblad",
    "cardano_params",
    "characteristic_residual",
    "check_density_matrix",
    "classify",
    "devectorize",
    "discriminant",
    "eigenvalues_closed_form",
    "eigenvalues_numeric",
    "eigenvectors_closed_form",
    "ep2_eigenvalue",
    "ep2_gamma",
    "ep2_locate_numeric",
    "ep3_locate_numeric",
    "ep3_point",
    "ep_curve_point",
    "equilibrium_state",
    "evolve_lab",
    "evolve_rotating",
    "frame_unitary",
    "full_spectrum",
    "hamiltonian_rotating",
    "hamiltonian_rwa",
    "initial_state",
    "jump_operators",
    "lindblad_rhs",
    "match_distance",
    "null_eigenvectors",
    "rotate_to_lab",
    "scaled_discriminant",
    "spectral_evolve",
    "splitting_exponent",
    "step_rk4",
    "vectorize",
    "verify_frame_equivalence",
]
