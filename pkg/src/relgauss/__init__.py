"""Numerics for relational Gaussian states.

Kahler-structure bookkeeping for bosonic and fermionic Gaussian states,
finite-width wavepackets as regularized position/momentum kets,
center-of-mass/relational partition transforms, density-operator algebra
over non-orthogonal wavepacket bases (including the translation group
average as a CM trace), capacitor-model energy accounting for swap-based
entanglement extraction, and the binned-position measurement bridge
between the two relational constructions.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DimensionMismatchError,
    FieldRegionError,
    IncompatibleStructureError,
    MixedStateError,
    NumericToleranceError,
    PartitionTagError,
    ProtocolNotApplicableError,
    RelgaussError,
    ScenarioValidationError,
    SingularFormError,
    StatisticsError,
    TruncationOverflowError,
    WidthMismatchError,
)
from .kahler import (  # noqa: F401
    HamiltonianMatrix,
    KahlerStructure,
    Ordering,
    PhaseSpaceLayout,
    Statistics,
    bosonic_vacuum,
    canonical_fermion_metric,
    canonical_symplectic_form,
    check_kahler_compatible,
    complex_structure,
    fermionic_oscillator_excited,
    fermionic_oscillator_ground,
    gaussianity_projector,
    kahler_structure,
    mode_transformation_check,
    ordering_change_matrix,
)
from .wavepackets import (  # noqa: F401
    FockVector,
    Wavepacket,
    displace,
    fock_representation,
    fock_vacuum,
    momentum_projection,
    momentum_wavepacket,
    omega_for_width,
    overlap,
    position_eigenket_series,
    position_moment,
    position_wavepacket,
    squeeze,
)
from .states import (  # noqa: F401
    CM_RELATIONAL,
    EXTERNAL,
    RELATIONAL,
    ProductStateSuperposition,
    product_state,
    slot_gram,
    state_norm,
    superposition,
    term_gram,
    weighted_position_expectation,
)
from .partition import (  # noqa: F401
    DistinctnessReport,
    ParticleConfig,
    PartitionMap,
    branch_distinctness,
    build_partition_map,
    check_canonical,
    covariance_report,
    from_cm_relational,
    to_cm_relational,
    transformed_covariance,
)
from .density import (  # noqa: F401
    Bipartition,
    WavepacketDensityOperator,
    attach_dummy_cm,
    entanglement_entropy,
    g_twirl,
    log_negativity,
    max_negativity_over_cuts,
    partial_trace,
    position_expectation,
    pure_to_density,
    trace_distance,
)
from .zmodel import (  # noqa: F401
    CapacitorZModel,
    ExtractionResult,
    ModePair,
    PositionCoupling,
    boson_mode_operators,
    branch_energies,
    build_swap_unitary,
    check_extraction_condition,
    extraction_energy_cost,
    fermion_mode_operators,
    interaction_energy,
)
from .povm import (  # noqa: F401
    ConditionalOutcome,
    DetectorBinning,
    SweepPoint,
    closed_form_probability,
    conditional_relational_state,
    cross_term_ratio,
    limit_sweep,
    position_uncertainty,
)
