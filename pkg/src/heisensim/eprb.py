"""EPRB pipeline: two spin-1/2 particles, two observers.

The composite space is the fixed four-factor layout
``[O1:3, O2:3, S1:2, S2:2]``. The initial state has both observers
ignorant, particle 1 spin-up along z and particle 2 spin-down. An optional
entangler rotates the particle pair into the singlet state before each
observer measures its particle along a chosen direction; correlation
functions are then expectation values of evolved belief operators in the
fixed initial state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure import (
    Direction,
    InteractionSequence,
    ObserverSpec,
    SPIN_OUTCOMES,
    heisenberg_evolve,
    measurement_unitary,
    spin_projector,
)
from .tensor import (
    DEFAULT_TOL,
    Operator,
    StateVector,
    SubsystemLayout,
    embed,
    real_expectation,
)

OBSERVER_1, OBSERVER_2 = "O1", "O2"
PARTICLE_1, PARTICLE_2 = "S1", "S2"

#: Belief eigenvalues matching the spin labels: up maps to +1, down to -1.
SPIN_BETA = (0.0, 1.0, -1.0)
#: Belief eigenvalues turning <B1 B2> into the joint spin-up probability.
PROBABILITY_BETA = (0.0, 1.0, 0.0)
BETA_PRESETS = {"spin": SPIN_BETA, "probability": PROBABILITY_BETA}

#: The three coplanar analyzer azimuths used for the Bell quantity.
BELL_PHIS = (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)

_LAYOUT = SubsystemLayout(
    ((OBSERVER_1, 3), (OBSERVER_2, 3), (PARTICLE_1, 2), (PARTICLE_2, 2))
)


def eprb_layout() -> SubsystemLayout:
    return _LAYOUT


def initial_state() -> StateVector:
    """Both observers ignorant; particle 1 up, particle 2 down along z."""
    return StateVector.basis(_LAYOUT, (0, 0, 0, 1))


@dataclass(frozen=True)
class EprbConfig:
    n1: Direction
    n2: Direction
    entangled: bool = True
    beta: tuple[float, float, float] = SPIN_BETA

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        if len(self.beta) != 3:
            raise ValueError("beta must be a (b0, b1, b2) triple")
        # b1 == b2 would make the two outcomes indistinguishable; b0 may
        # coincide with an outcome (the probability preset reuses 0)
        if self.beta[1] == self.beta[2]:
            raise ValueError(f"outcome eigenvalues must differ, got {self.beta}")


@dataclass(frozen=True)
class EprbReport:
    mean_b1: float
    mean_b2: float
    mean_b1b2: float
    p_uu: float

    def __post_init__(self):
        if not -DEFAULT_TOL <= self.p_uu <= 1.0 + DEFAULT_TOL:
            raise ValueError(f"p_uu = {self.p_uu} is not a probability")


def singlet_entangler() -> Operator:
    """Unitary on the particle pair sending up-down to the singlet.

    Fixes the parallel-spin states, sends up-down to the antisymmetric
    combination and down-up to the symmetric one.
    """
    r = 1.0 / math.sqrt(2.0)
    m = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, r, r, 0.0],
            [0.0, -r, r, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    return Operator(SubsystemLayout(((PARTICLE_1, 2), (PARTICLE_2, 2))), m)


def _spin_measurement(n: Direction, observer: str, particle: str, beta) -> Operator:
    projectors = [spin_projector(n, o, particle) for o in SPIN_OUTCOMES]
    return measurement_unitary(
        _LAYOUT, observer, particle, projectors, ObserverSpec(observer, beta)
    )


def measurement_sequence(cfg: EprbConfig) -> InteractionSequence:
    """Entangler (when enabled) followed by the two measurements."""
    steps = []
    if cfg.entangled:
        steps.append(("t1:entangle", embed(singlet_entangler(), _LAYOUT)))
    steps.append(("t2:measure-1", _spin_measurement(cfg.n1, OBSERVER_1, PARTICLE_1, cfg.beta)))
    steps.append(("t2:measure-2", _spin_measurement(cfg.n2, OBSERVER_2, PARTICLE_2, cfg.beta)))
    return InteractionSequence(tuple(steps))


def belief_observables(beta) -> tuple[Operator, Operator]:
    """The two observers' belief operators on the full layout (time t0)."""
    b1 = embed(ObserverSpec(OBSERVER_1, beta).belief_operator(), _LAYOUT)
    b2 = embed(ObserverSpec(OBSERVER_2, beta).belief_operator(), _LAYOUT)
    return b1, b2


def _belief_means(
    seq: InteractionSequence, psi0: StateVector, beta
) -> tuple[float, float, float]:
    b1, b2 = belief_observables(beta)
    b1_t2 = heisenberg_evolve(b1, seq)
    b2_t2 = heisenberg_evolve(b2, seq)
    return (
        real_expectation(psi0, b1_t2),
        real_expectation(psi0, b2_t2),
        real_expectation(psi0, b1_t2 @ b2_t2),
    )


def run_eprb(cfg: EprbConfig) -> EprbReport:
    """Evolve both belief operators and evaluate the report fields.

    ``p_uu`` is the same product mean re-run under the probability preset
    rather than post-processed from the configured eigenvalues. The
    measurement unitaries do not depend on the eigenvalues, so the one
    sequence serves both evaluations.
    """
    seq = measurement_sequence(cfg)
    psi0 = initial_state()
    mean_b1, mean_b2, mean_b1b2 = _belief_means(seq, psi0, cfg.beta)
    _, _, p_uu = _belief_means(seq, psi0, PROBABILITY_BETA)
    return EprbReport(mean_b1, mean_b2, mean_b1b2, p_uu)


def bell_q_terms(
    phis: tuple[float, float, float] = BELL_PHIS, theta: float = math.pi / 2.0
) -> tuple[float, float, float]:
    """Joint spin-up probabilities at the three cyclic analyzer pairings."""
    pairs = ((phis[0], phis[1]), (phis[1], phis[2]), (phis[2], phis[0]))
    return tuple(
        run_eprb(EprbConfig(Direction(theta, a), Direction(theta, b), entangled=True)).p_uu
        for a, b in pairs
    )


def bell_q(phis: tuple[float, float, float] = BELL_PHIS, theta: float = math.pi / 2.0) -> float:
    """Sum of the three cyclic joint spin-up probabilities."""
    return float(sum(bell_q_terms(phis, theta)))
