"""Detect which tensor factors an operator acts on nontrivially.

An operator acts trivially on a factor when it equals the embedding of its
normalized partial trace over that factor, i.e. when it is (up to
reordering) something-tensor-identity there. The Frobenius distance
between the operator and that reconstruction is a constructive residual:
below tolerance the factor is excluded from the support, and the residual
is reported either way so borderline cases are auditable.

Operators that start local pick up support on other factors through
measurement interactions; the growing support set is the machine-readable
record of which systems an observable has become entangled with.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .tensor import (
    DEFAULT_TOL,
    LayoutError,
    Operator,
    embed,
    partial_trace,
    single_factor,
)


class NotLocallySupportedError(ValueError):
    """Asked for the local factor of an operator whose support is not that
    single label."""


class TrivialityCheck(NamedTuple):
    trivial: bool
    residual: float


@dataclass(frozen=True)
class SupportSet:
    """Labels an operator acts on nontrivially, plus per-label residuals.

    ``residuals`` maps every layout label to its reconstruction error; a
    label is in ``labels`` iff its residual reached the tolerance.
    """

    labels: frozenset[str]
    residuals: dict[str, float]


def acts_trivially_on(op: Operator, label: str, tol: float = DEFAULT_TOL) -> TrivialityCheck:
    """Test whether ``op`` is identity-like on one factor.

    Reconstructs the operator from its normalized partial trace over the
    factor and measures the Frobenius distance to the original.
    """
    layout = op.layout
    d = layout.dim_of(label)
    if len(layout) == 1:
        # single-factor space: trivial means a multiple of the identity
        scale = np.trace(op.matrix) / d
        residual = float(np.linalg.norm(op.matrix - scale * np.eye(d)))
        return TrivialityCheck(residual < tol, residual)
    reduced = partial_trace(op, label)
    rebuilt = embed(Operator(reduced.layout, reduced.matrix / d), layout)
    residual = float(np.linalg.norm(op.matrix - rebuilt.matrix))
    return TrivialityCheck(residual < tol, residual)


def support(op: Operator, tol: float = DEFAULT_TOL) -> SupportSet:
    """Support set of ``op``: every factor it acts on nontrivially."""
    residuals: dict[str, float] = {}
    nontrivial = set()
    for label in op.layout.labels:
        check = acts_trivially_on(op, label, tol)
        residuals[label] = check.residual
        if not check.trivial:
            nontrivial.add(label)
    return SupportSet(labels=frozenset(nontrivial), residuals=residuals)


def local_factor(op: Operator, label: str, tol: float = DEFAULT_TOL) -> Operator:
    """Extract the single-factor operator F with embed(F) == op.

    Requires the support of ``op`` to be exactly ``{label}``.
    """
    if label not in op.layout.labels:
        raise LayoutError(f"unknown factor label {label!r}")
    sup = support(op, tol)
    if sup.labels != {label}:
        raise NotLocallySupportedError(
            f"support is {sorted(sup.labels)}, not [{label!r}]; no local factor exists"
        )
    reduced = op
    for other in op.layout.labels:
        if other == label:
            continue
        d = reduced.layout.dim_of(other)
        reduced = Operator(reduced.layout.drop(other), partial_trace(reduced, other).matrix / d)
    extracted = Operator(single_factor(label, op.layout.dim_of(label)), reduced.matrix)
    residual = float(np.linalg.norm(embed(extracted, op.layout).matrix - op.matrix))
    if residual >= tol:
        raise NotLocallySupportedError(
            f"reconstruction from factor {label!r} misses by {residual:.3e}"
        )
    return extracted
