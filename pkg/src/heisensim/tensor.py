"""Dense complex linear algebra over labeled tensor-product spaces.

A composite Hilbert space is described by a :class:`SubsystemLayout`, an
ordered list of ``(label, dim)`` factors. Operators and state vectors are
dense complex arrays whose row-major index is the mixed-radix encoding of
the per-factor indices, leftmost factor most significant (the same
convention as chained ``numpy.kron``).

All values are immutable after construction and all operations are pure
functions, so they are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

#: Default Frobenius-norm tolerance for operator comparisons and the
#: unitarity check. Overridable per call; the CLI exposes it as --tol.
DEFAULT_TOL = 1e-10

#: State vectors must be normalized to this accuracy at construction.
STATE_NORM_TOL = 1e-12

#: Guard against accidentally requesting an unreasonably large dense space.
MAX_TOTAL_DIM = 10_000


class LayoutError(ValueError):
    """A layout is malformed, or two layouts are incompatible."""


class NonUnitaryError(ValueError):
    """A matrix required to be unitary failed the Frobenius check."""


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered, labeled tensor factors of a composite space.

    ``factors`` is a tuple of ``(label, dim)`` pairs. Labels are unique,
    every dim is at least 2, and the factor order is fixed at construction;
    all operators and states on the space share it.
    """

    factors: tuple[tuple[str, int], ...]

    def __init__(self, factors: Iterable[tuple[str, int]]):
        object.__setattr__(
            self, "factors", tuple((str(label), int(dim)) for label, dim in factors)
        )
        if not self.factors:
            raise LayoutError("layout needs at least one factor")
        labels = [label for label, _ in self.factors]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate factor labels in {labels}")
        for label, dim in self.factors:
            if dim < 2:
                raise LayoutError(f"factor {label!r} has dim {dim}; every dim must be >= 2")
        if self.total_dim > MAX_TOTAL_DIM:
            raise LayoutError(
                f"total dimension {self.total_dim} exceeds the {MAX_TOTAL_DIM} guard"
            )

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.factors)

    @cached_property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @cached_property
    def total_dim(self) -> int:
        return reduce(lambda a, b: a * b, self.dims, 1)

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {label: k for k, (label, _) in enumerate(self.factors)}

    def position(self, label: str) -> int:
        try:
            return self._positions[label]
        except KeyError:
            raise LayoutError(f"unknown factor label {label!r}; have {self.labels}") from None

    def dim_of(self, label: str) -> int:
        return self.dims[self.position(label)]

    def drop(self, label: str) -> "SubsystemLayout":
        """Layout with one factor removed, order of the rest preserved."""
        k = self.position(label)
        rest = self.factors[:k] + self.factors[k + 1 :]
        if not rest:
            raise LayoutError("cannot drop the only factor of a layout")
        return SubsystemLayout(rest)

    def __len__(self) -> int:
        return len(self.factors)


def single_factor(label: str, dim: int) -> SubsystemLayout:
    """Layout holding one factor; building block for local operators."""
    return SubsystemLayout(((label, dim),))


def _as_finite_complex(data, shape: tuple[int, ...], what: str) -> np.ndarray:
    arr = np.asarray(data, dtype=complex)
    if arr.shape != shape:
        raise LayoutError(f"{what} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")
    # read-only view, no copy; treat source arrays as handed over
    view = arr.view()
    view.setflags(write=False)
    return view


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex square matrix bound to a layout.

    Unitarity and hermiticity are properties checked by predicates, not
    assumed at construction; intermediate non-unitary algebra (projectors,
    transition operators) is legitimate.
    """

    layout: SubsystemLayout
    matrix: np.ndarray

    def __post_init__(self):
        d = self.layout.total_dim
        object.__setattr__(
            self, "matrix", _as_finite_complex(self.matrix, (d, d), "operator matrix")
        )

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    @property
    def dagger(self) -> "Operator":
        return Operator(self.layout, self.matrix.conj().T)

    def is_hermitian(self, tol: float = DEFAULT_TOL) -> bool:
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T)) < tol

    @cached_property
    def _unitarity_residual(self) -> float:
        # cached: the matrix is immutable, so the Frobenius residual of
        # u†u - I never changes
        gram = self.matrix.conj().T @ self.matrix
        return float(np.linalg.norm(gram - np.eye(self.dim)))

    def is_unitary(self, tol: float = DEFAULT_TOL) -> bool:
        return self._unitarity_residual < tol

    def _require_same_layout(self, other: "Operator") -> None:
        if self.layout != other.layout:
            raise LayoutError(
                f"layout mismatch: {self.layout.labels} vs {other.layout.labels}"
            )

    def __matmul__(self, other: "Operator") -> "Operator":
        self._require_same_layout(other)
        return Operator(self.layout, self.matrix @ other.matrix)

    def __add__(self, other: "Operator") -> "Operator":
        self._require_same_layout(other)
        return Operator(self.layout, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._require_same_layout(other)
        return Operator(self.layout, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.layout, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.layout, -self.matrix)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Dense complex unit vector bound to a layout.

    The Euclidean norm must be 1 within ``STATE_NORM_TOL`` at construction;
    use :meth:`normalized` to build one from unnormalized amplitudes.
    """

    layout: SubsystemLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        d = self.layout.total_dim
        amps = _as_finite_complex(self.amplitudes, (d,), "state amplitudes")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond {STATE_NORM_TOL}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, layout: SubsystemLayout, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex)
        norm = float(np.linalg.norm(amps))
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(layout, amps / norm)

    @classmethod
    def basis(cls, layout: SubsystemLayout, indices: Sequence[int]) -> "StateVector":
        """Product basis state from one index per factor, in layout order."""
        if len(indices) != len(layout):
            raise LayoutError(f"need {len(layout)} indices, got {len(indices)}")
        flat = 0
        for idx, dim in zip(indices, layout.dims):
            if not 0 <= idx < dim:
                raise ValueError(f"basis index {idx} out of range for dim {dim}")
            flat = flat * dim + idx
        amps = np.zeros(layout.total_dim, dtype=complex)
        amps[flat] = 1.0
        return cls(layout, amps)


def identity(layout: SubsystemLayout) -> Operator:
    return Operator(layout, np.eye(layout.total_dim, dtype=complex))


def frobenius_distance(a: Operator, b: Operator) -> float:
    if a.layout != b.layout:
        raise LayoutError("cannot compare operators on different layouts")
    return float(np.linalg.norm(a.matrix - b.matrix))


def kron(a: Operator, b: Operator) -> Operator:
    """Kronecker product; the result's factors are a's followed by b's."""
    clash = set(a.layout.labels) & set(b.layout.labels)
    if clash:
        raise LayoutError(f"factor labels {sorted(clash)} appear on both sides of kron")
    layout = SubsystemLayout(a.layout.factors + b.layout.factors)
    return Operator(layout, np.kron(a.matrix, b.matrix))


def embed(op: Operator, layout: SubsystemLayout) -> Operator:
    """Extend ``op`` to ``layout``, acting as identity on every other factor.

    Every factor of ``op.layout`` must exist in ``layout`` with the same
    dimension. The usual case is a single-factor operator; multi-factor
    operators (an entangler on two particles, a parity projector on three
    observers) embed the same way.
    """
    positions = tuple(layout.position(label) for label in op.layout.labels)
    for label, d in op.layout.factors:
        if layout.dim_of(label) != d:
            raise LayoutError(
                f"factor {label!r} has dim {layout.dim_of(label)} in the target "
                f"layout but {d} in the operator"
            )
    m = len(layout)
    rest = tuple(k for k in range(m) if k not in positions)
    rest_dim = reduce(lambda a, b: a * b, (layout.dims[k] for k in rest), 1)
    big = np.kron(op.matrix, np.eye(rest_dim, dtype=complex))
    # big's factor order is op's factors then the rest; permute into layout order
    order = positions + rest
    dims_in_order = tuple(layout.dims[k] for k in order)
    tensor = big.reshape(dims_in_order + dims_in_order)
    perm = tuple(order.index(k) for k in range(m))
    tensor = tensor.transpose(perm + tuple(m + j for j in perm))
    d = layout.total_dim
    result = Operator(layout, np.ascontiguousarray(tensor.reshape(d, d)))
    if "_unitarity_residual" in op.__dict__:
        # embedding is (X kron I) up to a simultaneous row/column
        # permutation, so |u'u' - I|_F scales exactly by sqrt(rest_dim)
        result.__dict__["_unitarity_residual"] = op.__dict__[
            "_unitarity_residual"
        ] * float(np.sqrt(rest_dim))
    return result


def conjugate_by(op: Operator, u: Operator, tol: float = DEFAULT_TOL, *, check: bool = True) -> Operator:
    """Heisenberg conjugation: return ``u† op u``.

    ``check=False`` skips the unitarity test for callers that hold a
    product of already-verified unitaries.
    """
    op._require_same_layout(u)
    if check and not u.is_unitary(tol):
        raise NonUnitaryError(
            f"conjugation matrix fails unitarity: |u†u - I| = {u._unitarity_residual:.3e}"
        )
    return Operator(op.layout, u.matrix.conj().T @ op.matrix @ u.matrix)


def expectation(state: StateVector, op: Operator) -> complex:
    """Matrix element <psi|op|psi> as a complex number."""
    if state.layout != op.layout:
        raise LayoutError("state and operator live on different layouts")
    return complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))


def real_expectation(state: StateVector, op: Operator, tol: float = DEFAULT_TOL) -> float:
    """Expectation of a Hermitian observable; rejects stray imaginary parts."""
    value = expectation(state, op)
    if abs(value.imag) >= tol:
        raise ValueError(f"expectation {value} has imaginary part beyond {tol}")
    return value.real


def projector_from_state(v: StateVector) -> Operator:
    """Rank-1 projector |v><v|."""
    return Operator(v.layout, np.outer(v.amplitudes, v.amplitudes.conj()))


def partial_trace(op: Operator, label: str) -> Operator:
    """Trace out one factor; the result lives on the layout without it."""
    layout = op.layout
    k = layout.position(label)
    m = len(layout)
    if m < 2:
        raise LayoutError("partial trace needs at least two factors")
    tensor = op.matrix.reshape(layout.dims + layout.dims)
    reduced = np.trace(tensor, axis1=k, axis2=m + k)
    new_layout = layout.drop(label)
    d = new_layout.total_dim
    return Operator(new_layout, reduced.reshape(d, d))
