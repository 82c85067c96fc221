"""
Three-level atom example
========================

Laser pulses that discriminate two states of the lower levels of a
three-level atom, using the upper level as the ancilla.
"""

from .atom import AtomConfig
from .pulse import (
    PulseDesign,
    TradeoffReport,
    design_pulse,
    rwa_hamiltonian,
    rwa_unitary,
    minimal_area,
    tradeoff_check
)
from .rwa import (
    field,
    full_hamiltonian_at,
    discretize,
    rwa_fidelity,
    design_for_overlap,
    atom_sweep
)
from ..usd import symmetric_pair
