"""Heisenberg-picture simulator of ideal quantum measurement.

Observables evolve by unitary conjugation while the state stays fixed at
its initial value. The package builds ideal measurement interactions over
labeled tensor-product spaces, runs the two-particle (EPRB) and
three-particle (GHZM) correlation experiments, brute-forces the
instruction-set bounds those experiments violate, and detects which tensor
factors an evolved observable has picked up support on.
"""

from .tensor import (
    DEFAULT_TOL,
    LayoutError,
    NonUnitaryError,
    Operator,
    StateVector,
    SubsystemLayout,
    conjugate_by,
    embed,
    expectation,
    frobenius_distance,
    identity,
    kron,
    partial_trace,
    projector_from_state,
    real_expectation,
    single_factor,
)
from .measure import (
    DOWN,
    UP,
    Direction,
    InteractionSequence,
    ObserverSpec,
    heisenberg_evolve,
    measurement_unitary,
    shift_operator,
    spin_eigenstate,
    spin_projector,
)
from .eprb import (
    BELL_PHIS,
    BETA_PRESETS,
    EprbConfig,
    EprbReport,
    PROBABILITY_BETA,
    SPIN_BETA,
    bell_q,
    bell_q_terms,
    run_eprb,
    singlet_entangler,
)
from .ghzm import (
    EVEN_GAMMA,
    GAMMA_PRESETS,
    GhzmConfig,
    ODD_GAMMA,
    ParityProjectors,
    ghz_entangler,
    parity_measurement_unitary,
    parity_projectors,
    run_ghzm,
)
from .labels import NotLocallySupportedError, SupportSet, acts_trivially_on, local_factor, support
from .schrodinger import EvolvedState, cross_check, schmidt_rank, schrodinger_evolve
from .lhv import (
    EprbInstructionSet,
    GhzInstructionSet,
    eprb_q_max,
    eprb_q_over_distribution,
    ghz_constrained_sets,
)

__version__ = "0.1.0"
