"""State-evolution oracle for cross-checking the operator-evolution path.

Evolving the state and keeping operators fixed must give every expectation
value that evolving the operators and keeping the state fixed gives:
``<psi0| U' A U |psi0> == <U psi0| A |U psi0>``. This module evolves the
state through an interaction sequence by plain matrix-vector products, a
deliberately different code path from operator conjugation, so agreement
between the two is a meaningful end-to-end check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .measure import InteractionSequence
from .tensor import LayoutError, Operator, StateVector, expectation

#: Gates the discrete Schmidt-rank decision; looser than the operator
#: tolerance because singular values are compared against it directly.
SCHMIDT_THRESHOLD = 1e-8

_NORM_DRIFT_TOL = 1e-12


@dataclass(frozen=True)
class EvolvedState:
    state: StateVector
    applied: tuple[str, ...]


def schrodinger_evolve(initial: StateVector, seq: InteractionSequence) -> EvolvedState:
    """Apply the sequence unitaries to the state, earliest first."""
    if seq.steps and seq.layout != initial.layout:
        raise LayoutError("state and sequence live on different layouts")
    amps = initial.amplitudes
    applied = []
    for tag, u in seq.steps:
        amps = u.matrix @ amps
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > _NORM_DRIFT_TOL:
            raise ValueError(f"norm drifted to {norm!r} after step {tag!r}")
        applied.append(tag)
    return EvolvedState(StateVector(initial.layout, amps), tuple(applied))


def cross_check(op: Operator, seq: InteractionSequence, initial: StateVector) -> float:
    """Absolute difference between the two pictures' expectation values."""
    from .measure import heisenberg_evolve

    via_operators = expectation(initial, heisenberg_evolve(op, seq))
    via_state = expectation(schrodinger_evolve(initial, seq).state, op)
    return abs(via_operators - via_state)


def schmidt_rank(
    state: StateVector, left_labels: Iterable[str], threshold: float = SCHMIDT_THRESHOLD
) -> int:
    """Schmidt rank of the state across the given bipartition.

    Rank 1 means a product state across the cut; rank > 1 means
    entanglement between the two sides.
    """
    layout = state.layout
    wanted = set(left_labels)
    unknown = wanted - set(layout.labels)
    if unknown:
        raise LayoutError(f"unknown factor labels {sorted(unknown)}")
    left = [k for k, (label, _) in enumerate(layout.factors) if label in wanted]
    right = [k for k in range(len(layout)) if k not in left]
    if not left or not right:
        raise ValueError("bipartition must leave factors on both sides")
    tensor = state.amplitudes.reshape(layout.dims)
    tensor = tensor.transpose(left + right)
    d_left = int(np.prod([layout.dims[k] for k in left]))
    singulars = np.linalg.svd(tensor.reshape(d_left, -1), compute_uv=False)
    return int(np.count_nonzero(singulars > threshold))
