"""Multi-register state vectors with exact complex amplitudes.

A layout packs named qubit registers into a single basis index.  The first
register in the list is the most significant block of bits, and within a
register the usual binary convention (MSB first) applies.  Every module in
the package shares this one convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DegenerateStateError, ShapeMismatchError, UnknownRegisterError

# Equality / normalization tolerances used throughout the package.
STATE_ATOL = 1e-10
NORM_ATOL = 1e-12


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered named registers; first entry holds the most significant bits."""

    registers: tuple[tuple[str, int], ...]

    def __post_init__(self):
        regs = tuple((str(name), int(q)) for name, q in self.registers)
        object.__setattr__(self, "registers", regs)
        names = [name for name, _ in regs]
        if len(set(names)) != len(names):
            raise ShapeMismatchError(f"duplicate register names in {names}")
        if not regs:
            raise ShapeMismatchError("layout needs at least one register")
        for name, q in regs:
            if q <= 0:
                raise ShapeMismatchError(f"register {name!r} must have >= 1 qubit")

    @classmethod
    def of(cls, **sizes: int) -> "RegisterLayout":
        """Build a layout from keyword order, e.g. ``RegisterLayout.of(X=2, F=2)``."""
        return cls(tuple(sizes.items()))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.registers)

    @property
    def total_qubits(self) -> int:
        return sum(q for _, q in self.registers)

    @property
    def dimension(self) -> int:
        return 1 << self.total_qubits

    def qubits(self, reg: str) -> int:
        for name, q in self.registers:
            if name == reg:
                return q
        raise UnknownRegisterError(reg)

    def dim(self, reg: str) -> int:
        return 1 << self.qubits(reg)

    def offset(self, reg: str) -> int:
        """Bit offset of the register's least significant bit."""
        off = 0
        for name, q in reversed(self.registers):
            if name == reg:
                return off
            off += q
        raise UnknownRegisterError(reg)

    def encode(self, assignments: Mapping[str, int]) -> int:
        """Pack per-register values into a basis index; omitted registers are 0."""
        for reg in assignments:
            self.qubits(reg)  # raises UnknownRegisterError
        index = 0
        for name, q in self.registers:
            value = int(assignments.get(name, 0))
            if not 0 <= value < (1 << q):
                raise ValueError(f"value {value} out of range for register {name!r} ({q} qubits)")
            index = (index << q) | value
        return index

    def extract(self, index: int, reg: str) -> int:
        return (index >> self.offset(reg)) & (self.dim(reg) - 1)

    def decode(self, index: int) -> dict[str, int]:
        return {name: self.extract(index, name) for name, _ in self.registers}

    def to_json(self) -> dict:
        return {"registers": [[name, q] for name, q in self.registers]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "RegisterLayout":
        return cls(tuple((name, q) for name, q in doc["registers"]))


@dataclass(frozen=True)
class PureState:
    """Dense complex amplitude vector over ``layout.dimension`` basis states.

    Instances are immutable: the amplitude buffer is copied on construction
    and marked read-only, so states are safe to share and every operation on
    them returns a fresh value.
    """

    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.layout.dimension,):
            raise ShapeMismatchError(
                f"amplitude vector has shape {amps.shape}, layout needs ({self.layout.dimension},)"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_amplitudes(self, amps: np.ndarray) -> "PureState":
        return PureState(self.layout, amps)

    def to_json(self) -> dict:
        return {
            "layout": self.layout.to_json(),
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "PureState":
        layout = RegisterLayout.from_json(doc["layout"])
        amps = np.array([complex(re, im) for re, im in doc["amplitudes"]])
        return cls(layout, amps)


@dataclass(frozen=True)
class StateDistance:
    """Non-negative distance with a label saying which metric produced it."""

    value: float
    kind: str  # "pure" | "distribution" | "frobenius"

    def __post_init__(self):
        if self.value < -1e-12:
            raise ValueError(f"distance must be non-negative, got {self.value}")
        object.__setattr__(self, "value", max(0.0, float(self.value)))


def make_basis_state(layout: RegisterLayout, assignments: Mapping[str, int]) -> PureState:
    """Computational basis state with the given per-register values."""
    amps = np.zeros(layout.dimension, dtype=np.complex128)
    amps[layout.encode(assignments)] = 1.0
    return PureState(layout, amps)


def normalize(state: PureState) -> PureState:
    """Scale to unit norm; a (numerically) zero vector is an error.

    A state whose norm is already 1 up to rounding is returned unchanged,
    which makes the operation exactly idempotent.
    """
    n = state.norm()
    if n < NORM_ATOL:
        raise DegenerateStateError("cannot normalize a zero-norm state")
    if abs(n - 1.0) < 5e-13:
        return state
    return state.with_amplitudes(state.amplitudes / n)


def compare_up_to_global_phase(a: PureState, b: PureState) -> StateDistance:
    """Return 1 - |<a|b>|, which is zero iff the states differ only by a phase."""
    if a.layout != b.layout:
        raise ShapeMismatchError(f"layout mismatch: {a.layout} vs {b.layout}")
    na, nb = a.norm(), b.norm()
    if na < NORM_ATOL or nb < NORM_ATOL:
        raise DegenerateStateError("cannot compare zero-norm states")
    overlap = abs(np.vdot(a.amplitudes, b.amplitudes)) / (na * nb)
    return StateDistance(1.0 - min(overlap, 1.0), kind="pure")
