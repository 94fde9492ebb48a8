"""cohfreeze: simulate Kraus channels and certify coherence freezing.

The package provides validated density matrices, Kraus channels with an
incoherence classifier, the l1/relative-entropy coherence panel, an explicit
incoherent recovery-map construction, and sweep experiments that certify when
every coherence measure of a state is left untouched by a noisy channel.
"""

from .channels import (
    CHANNEL_FACTORIES,
    ChannelClass,
    ChannelClassification,
    ClassificationWitness,
    KrausChannel,
    amplitude_damping,
    apply_channel,
    bit_flip,
    bit_phase_flip,
    classify,
    compose,
    depolarizing,
    identity_channel,
    local_channel,
    phase_damping,
    phase_flip,
    random_incoherent_channel,
    random_sio_channel,
    tensor,
)
from .coherence import CoherenceReport, c_l1, c_rel_ent, measure_panel
from .errors import (
    BadRankError,
    CohfreezeError,
    DimensionMismatchError,
    DimensionTooLargeError,
    InvalidCanonicalFormError,
    NotDiagonalError,
    NotHermitianError,
    NotIncoherentChannelError,
    NotNormalizedError,
    NotStrictlyIncoherentError,
    NumericalInconsistencyError,
    OutOfRangeError,
    SpecParseError,
    ValidationError,
)
from .experiments import (
    FamilyReport,
    FreezingSummary,
    SweepSpec,
    TrajectoryRow,
    TrajectoryTable,
    bitflip_transfer_weights,
    bromley_report,
    default_heterogeneous_grids,
    detect_freezing,
    reproduce_mixed_family,
    reproduce_pure_family,
    run_sweep,
)
from .linalg import (
    Spectrum,
    binary_entropy,
    hermitian_eig,
    kron,
    relative_entropy,
    von_neumann_entropy,
)
from .recovery import FreezingCertificate, certify_freezing, petz_recovery
from .states import (
    DensityMatrix,
    MixedFamilySpec,
    basis_state,
    bit_index,
    bromley_spec,
    canonical_bitstrings,
    complement,
    dephase,
    from_pure,
    hamming_weight,
    mixed_family,
    phi_state,
    random_density,
    random_pure,
)

__version__ = "0.1.0"

__all__ = [
    "CHANNEL_FACTORIES",
    "BadRankError",
    "ChannelClass",
    "ChannelClassification",
    "ClassificationWitness",
    "CoherenceReport",
    "CohfreezeError",
    "DensityMatrix",
    "DimensionMismatchError",
    "DimensionTooLargeError",
    "FamilyReport",
    "FreezingCertificate",
    "FreezingSummary",
    "InvalidCanonicalFormError",
    "KrausChannel",
    "MixedFamilySpec",
    "NotDiagonalError",
    "NotHermitianError",
    "NotIncoherentChannelError",
    "NotNormalizedError",
    "NotStrictlyIncoherentError",
    "NumericalInconsistencyError",
    "OutOfRangeError",
    "SpecParseError",
    "Spectrum",
    "SweepSpec",
    "TrajectoryRow",
    "TrajectoryTable",
    "ValidationError",
    "amplitude_damping",
    "apply_channel",
    "basis_state",
    "binary_entropy",
    "bit_flip",
    "bit_index",
    "bit_phase_flip",
    "bitflip_transfer_weights",
    "bromley_report",
    "bromley_spec",
    "c_l1",
    "c_rel_ent",
    "canonical_bitstrings",
    "certify_freezing",
    "classify",
    "complement",
    "compose",
    "default_heterogeneous_grids",
    "dephase",
    "depolarizing",
    "detect_freezing",
    "from_pure",
    "hamming_weight",
    "hermitian_eig",
    "identity_channel",
    "kron",
    "local_channel",
    "measure_panel",
    "mixed_family",
    "petz_recovery",
    "phase_damping",
    "phase_flip",
    "phi_state",
    "random_density",
    "random_incoherent_channel",
    "random_pure",
    "random_sio_channel",
    "relative_entropy",
    "reproduce_mixed_family",
    "reproduce_pure_family",
    "run_sweep",
    "tensor",
    "von_neumann_entropy",
]
