"""cubicgen: measurement-induced cubic phase state generation.

A truncated-Fock-space simulator of a two-mode interferometer with
photon-number heralding, together with an analytic-gradient L-BFGS-B
optimizer that finds interferometer settings producing cubic phase states
with high fidelity and detection probability.
"""

from .circuit import (
    PARAM_NAMES,
    GradientBundle,
    ParamVector,
    ProjectedOutput,
    build_beamsplitter,
    build_displacement,
    build_rotation,
    build_two_mode_squeezer,
    build_unitary,
    build_unitary_gradient,
    operator_gradient,
    output_state,
    project_and_normalize,
    projected_state_gradient,
    workspace_for,
)
from .exceptions import (
    ConfigurationError,
    CubicgenError,
    CutoffError,
    DegenerateProjectionError,
    NumericError,
)
from .fock import (
    FockSpace,
    OperatorMatrix,
    StateVector,
    WignerGrid,
    annihilator,
    creator,
    cubic_phase_target,
    fock_state,
    matrix_exp,
    number_operator,
    position_operator,
    squeezed_vacuum,
    tail_mass,
    wigner,
    xi_from_db,
)
from .optimize import (
    DEFAULT_BOUNDS,
    DEFAULT_CUTOFF,
    OptConfig,
    OptResult,
    TargetSpec,
    continuation,
    loss_and_grad,
    minimize,
    perturbation_study,
    random_restart,
    target_state,
)

__version__ = "0.1.0"
