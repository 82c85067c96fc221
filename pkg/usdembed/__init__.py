"""
``usdembed`` top-level module
=============================
"""
__version__ = '0.1.0'
from . import settings
from . import units
from . import numkernel
from .usd import (
    StateSet,
    LossyOperator,
    PovmSet,
    reciprocal_basis,
    build_lossy,
    scale_marginal,
    povm_from_lossy,
    outcome_probabilities,
    two_state_smin,
    two_state_angle_check,
    validate_usd
)
from .embedding import (
    CanonicalEmbedding,
    HamiltonianOpt,
    CostReport,
    canonical_embedding,
    exact_embedding,
    optimal_hamiltonian,
    cost_report,
    perturbed_embedding,
    unitary_action,
    rotation_angle,
    reduce_ancilla,
    extend_ancilla
)
from .dynamics import (
    HamiltonianSchedule,
    MeasurementRecord,
    propagate,
    schedule_action,
    verify_lower_bound,
    simulate_discrimination,
    fubini_angle
)
from .neumark import (
    DilationSet,
    dilation_projectors,
    dilation_probabilities,
    equivalence_check,
    concentration_cost
)
from . import atomlaser
from . import sweep
from . import verify
