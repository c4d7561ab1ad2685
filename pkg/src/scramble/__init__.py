"""Scrambling-dynamics toolkit: Bell-pair-seeded registers evolved under
Floquet or Haar dynamics, entanglement and measurement-visibility measures,
exact Haar-average theory, and (p, tau) phase-diagram sweeps."""

__version__ = "0.1.0"

from .ensemble import (
    ProjectedEnsemble,
    build_projected_ensemble,
    ensemble_D_RS,
    ensemble_Delta_RS,
    ensemble_from_state,
    factorization_gap,
)
from .errors import ConfigError, PartitionError, ResourceLimitError
from .measures import (
    DensityMatrix,
    log_negativity,
    mutual_information,
    partial_trace,
    partial_transpose,
    relative_entropy,
    renyi_entropy,
    trace_distance,
    trace_norm,
    von_neumann_entropy,
)
from .models import (
    FloquetOperator,
    build_fmfic_floquet,
    build_fruc_floquet,
    build_global_haar,
    evolve,
    sample_haar_unitary,
)
from .statevector import (
    PartitionSpec,
    StateVector,
    apply_global_unitary,
    apply_two_qubit_gate,
    prepare_initial_state,
    project_outcome,
    reduced_density_matrix,
    rho_r,
    rho_rs,
    rho_s,
)
from .sweep import (
    CriticalEstimate,
    Surface,
    SweepConfig,
    SweepResult,
    estimate_critical_line,
    interpolate_surface,
    run_sweep,
    self_averaging_chi,
    weighted_size_average,
)
from .theory import (
    TheoryParams,
    bound_decoupling,
    bound_drs_lower,
    bound_drs_upper,
    bound_mutual_information,
    critical_points,
    lambda_value,
    replica2_moment,
)
