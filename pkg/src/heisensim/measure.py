"""Ideal-measurement builders and Heisenberg evolution.

An ideal measurement couples an observer factor to a system factor through
a unitary of the form ``sum_i u_i (x) P_i``: the shift operator ``u_i``
moves the observer from its ignorant state to the awareness state for
outcome ``i``, gated by the projector ``P_i`` onto the system eigenstate
for that outcome. Heisenberg-picture observables then evolve by
conjugation with the ordered product of the interaction unitaries.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .tensor import (
    DEFAULT_TOL,
    LayoutError,
    NonUnitaryError,
    Operator,
    SubsystemLayout,
    StateVector,
    conjugate_by,
    embed,
    single_factor,
)

UP = "up"
DOWN = "down"
SPIN_OUTCOMES = (UP, DOWN)


@dataclass(frozen=True)
class ObserverSpec:
    """An observer factor: its label and belief eigenvalues ``(b0, ..., bN)``.

    ``b0`` labels the ignorant state; ``b1..bN`` label awareness of outcome
    1..N and must be pairwise distinct so outcomes are distinguishable.
    ``b0`` may coincide with an outcome value: the probability preset
    ``(0, 1, 0)`` deliberately reuses 0 so the belief operator becomes the
    projector onto the outcome-1 awareness state.
    """

    label: str
    eigenvalues: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", tuple(float(v) for v in self.eigenvalues))
        if len(self.eigenvalues) < 2:
            raise ValueError("an observer needs the ignorant state plus at least one outcome")
        outcomes = self.eigenvalues[1:]
        if len(set(outcomes)) != len(outcomes):
            raise ValueError(f"outcome eigenvalues {outcomes} must be pairwise distinct")

    @property
    def n_outcomes(self) -> int:
        return len(self.eigenvalues) - 1

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def belief_operator(self) -> Operator:
        """Diagonal observable whose eigenvalues are the belief labels."""
        return Operator(single_factor(self.label, self.dim), np.diag(self.eigenvalues))


def shift_operator(spec: ObserverSpec, outcome: int) -> Operator:
    """Cyclic shift by ``outcome`` on the observer basis, mod ``N + 1``.

    Sends the ignorant basis state to the awareness state for the given
    outcome. The action on already-aware states is fixed to the cyclic
    completion so the operator is unitary; experiment outputs do not depend
    on that choice (see the completion-invariance test).
    """
    n = spec.n_outcomes
    if not 1 <= outcome <= n:
        raise ValueError(f"outcome index {outcome} out of range 1..{n}")
    d = spec.dim
    m = np.zeros((d, d), dtype=complex)
    for i in range(d):
        m[(i + outcome) % d, i] = 1.0
    return Operator(single_factor(spec.label, d), m)


@dataclass(frozen=True)
class Direction:
    """Analyzer orientation: polar angle theta and azimuth phi, radians."""

    theta: float
    phi: float

    @property
    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )

    def dot(self, other: "Direction") -> float:
        return float(np.dot(self.unit_vector, other.unit_vector))


def spin_eigenstate(n: Direction, outcome: str, label: str = "S") -> StateVector:
    """Spin-1/2 eigenstate along ``n`` in the half-angle, half-phase convention.

    Up is ``(e^{-i phi/2} cos(theta/2), e^{i phi/2} sin(theta/2))`` in the
    z basis; down is its orthogonal partner. At theta = 0 the azimuth only
    contributes a global phase, so any phi is accepted there.
    """
    half_theta = 0.5 * n.theta
    c, s = math.cos(half_theta), math.sin(half_theta)
    minus, plus = cmath.exp(-0.5j * n.phi), cmath.exp(0.5j * n.phi)
    if outcome == UP:
        amps = np.array([minus * c, plus * s])
    elif outcome == DOWN:
        amps = np.array([-minus * s, plus * c])
    else:
        raise ValueError(f"outcome must be {UP!r} or {DOWN!r}, got {outcome!r}")
    return StateVector(single_factor(label, 2), amps)


def spin_projector(n: Direction, outcome: str, label: str = "S") -> Operator:
    """Projector onto the spin eigenstate along ``n``.

    Assembled from the z-basis projectors plus the two transition operators
    |up><down| and |down><up| weighted by ``sin(theta) e^{-+i phi}/2``;
    equal to the outer product of :func:`spin_eigenstate` with itself.
    """
    c2 = math.cos(0.5 * n.theta) ** 2
    s2 = math.sin(0.5 * n.theta) ** 2
    cross = 0.5 * math.sin(n.theta) * cmath.exp(-1j * n.phi)
    if outcome == UP:
        m = np.array([[c2, cross], [np.conj(cross), s2]])
    elif outcome == DOWN:
        m = np.array([[s2, -cross], [-np.conj(cross), c2]])
    else:
        raise ValueError(f"outcome must be {UP!r} or {DOWN!r}, got {outcome!r}")
    return Operator(single_factor(label, 2), m)


@dataclass(frozen=True)
class InteractionSequence:
    """Ordered ``(tag, unitary)`` interaction steps on one shared layout.

    Order is time order: the first step acts first. Every operator is
    verified unitary at construction, so downstream evolution can trust
    the product.
    """

    steps: tuple[tuple[str, Operator], ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple((str(t), u) for t, u in self.steps))
        layouts = {u.layout for _, u in self.steps}
        if len(layouts) > 1:
            raise LayoutError("interaction steps live on different layouts")
        for tag, u in self.steps:
            if not u.is_unitary(DEFAULT_TOL):
                raise NonUnitaryError(f"step {tag!r} is not unitary within {DEFAULT_TOL}")

    @property
    def layout(self) -> SubsystemLayout | None:
        return self.steps[0][1].layout if self.steps else None

    @property
    def tags(self) -> tuple[str, ...]:
        return tuple(t for t, _ in self.steps)

    def total_unitary(self) -> Operator:
        """Product of all steps, earliest step rightmost."""
        if not self.steps:
            raise ValueError("empty sequence has no total unitary")
        total = self.steps[0][1].matrix
        for _, u in self.steps[1:]:
            total = u.matrix @ total
        return Operator(self.layout, total)

    def reordered(self, tag_order: Sequence[str]) -> "InteractionSequence":
        """Same steps, permuted into the given tag order."""
        by_tag = dict(self.steps)
        if sorted(tag_order) != sorted(by_tag):
            raise ValueError(f"tag order {tag_order} does not permute {self.tags}")
        return InteractionSequence(tuple((t, by_tag[t]) for t in tag_order))


def measurement_unitary(
    layout: SubsystemLayout,
    observer_label: str,
    system_label: str,
    projectors: Iterable[Operator],
    spec: ObserverSpec,
    tol: float = DEFAULT_TOL,
) -> Operator:
    """Ideal-measurement unitary ``sum_i u_i (x) P_i`` on the full layout.

    The projectors must form a complete orthogonal family on the system
    factor. Because each term acts on the observer and system factors only,
    the sum equals ``sum_i embed(u_i) @ embed(P_i)`` exactly.
    """
    if observer_label == system_label:
        raise LayoutError(f"observer and system share the label {observer_label!r}")
    if spec.label != observer_label:
        raise LayoutError(f"observer spec is labeled {spec.label!r}, expected {observer_label!r}")
    if layout.dim_of(observer_label) != spec.dim:
        raise LayoutError(
            f"observer factor {observer_label!r} has dim {layout.dim_of(observer_label)}, "
            f"spec needs {spec.dim}"
        )
    projectors = tuple(projectors)
    if len(projectors) != spec.n_outcomes:
        raise ValueError(f"{spec.n_outcomes} outcomes need {spec.n_outcomes} projectors")
    sys_dim = layout.dim_of(system_label)
    for p in projectors:
        if p.layout != single_factor(system_label, sys_dim):
            raise LayoutError(f"projector must live on the single factor {system_label!r}")
    total = np.zeros((sys_dim, sys_dim), dtype=complex)
    for i, p in enumerate(projectors):
        total += p.matrix
        for j, q in enumerate(projectors):
            target = p.matrix if i == j else 0.0
            if float(np.linalg.norm(p.matrix @ q.matrix - target)) >= tol:
                raise ValueError("projector family is not orthogonal within tolerance")
    if float(np.linalg.norm(total - np.eye(sys_dim))) >= tol:
        raise ValueError("projector family does not sum to the identity (incomplete family)")

    # embed is linear, so summing on the observer-system block first and
    # embedding once is exactly the sum of the embedded products
    block = np.zeros((spec.dim * sys_dim, spec.dim * sys_dim), dtype=complex)
    for i, p in enumerate(projectors):
        block += np.kron(shift_operator(spec, i + 1).matrix, p.matrix)
    block_layout = SubsystemLayout(((observer_label, spec.dim), (system_label, sys_dim)))
    block_op = Operator(block_layout, block)
    if not block_op.is_unitary(tol):
        raise ValueError("measurement unitary failed its unitarity post-check")
    return embed(block_op, layout)


def heisenberg_evolve(op: Operator, seq: InteractionSequence) -> Operator:
    """Conjugate ``op`` by the sequence product: ``U† op U`` with the
    earliest interaction acting first (rightmost in the product)."""
    if not seq.steps:
        return op
    if seq.layout != op.layout:
        raise LayoutError("operator and sequence live on different layouts")
    # steps were unitarity-checked at sequence construction; their product
    # needs no re-check
    return conjugate_by(op, seq.total_unitary(), check=False)
