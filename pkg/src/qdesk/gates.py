"""Unitaries applied register-wise: Hadamard layers, Fourier transforms,
XOR table oracles, and the inversion-about-mean step.

Oracles are basis-index permutations of the amplitude vector, never dense
matrices: cost O(2^total) per application instead of O(4^total).  The
Fourier transform ships in two interchangeable forms, a dense matrix (the
reference) and an FFT fast path, which must agree within 1e-10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from .errors import ShapeMismatchError
from .qstate import PureState, RegisterLayout


@dataclass(frozen=True)
class FunctionTable:
    """Explicit lookup table for f: {0,1}^input_bits -> {0,1}^output_bits."""

    input_bits: int
    output_bits: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if len(self.table) != 1 << self.input_bits:
            raise ShapeMismatchError(
                f"table has {len(self.table)} entries, expected {1 << self.input_bits}"
            )
        if any(not 0 <= v < (1 << self.output_bits) for v in self.table):
            raise ShapeMismatchError(f"table entry out of range for {self.output_bits} output bits")

    @classmethod
    def from_callable(cls, fn: Callable[[int], int], input_bits: int, output_bits: int) -> "FunctionTable":
        return cls(input_bits, output_bits, tuple(fn(x) for x in range(1 << input_bits)))

    def __call__(self, x: int) -> int:
        return self.table[x]

    def to_json(self) -> dict:
        return {"input_bits": self.input_bits, "output_bits": self.output_bits, "table": list(self.table)}

    @classmethod
    def from_json(cls, doc: Mapping) -> "FunctionTable":
        return cls(doc["input_bits"], doc["output_bits"], tuple(doc["table"]))


@dataclass(frozen=True)
class ModedFunctionTable:
    """Lookup table for F(mode, x), stored row-major over (mode, x)."""

    mode_bits: int
    input_bits: int
    output_bits: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        expected = 1 << (self.mode_bits + self.input_bits)
        if len(self.table) != expected:
            raise ShapeMismatchError(f"table has {len(self.table)} entries, expected {expected}")
        if any(not 0 <= v < (1 << self.output_bits) for v in self.table):
            raise ShapeMismatchError(f"table entry out of range for {self.output_bits} output bits")

    def __call__(self, mode: int, x: int) -> int:
        return self.table[(mode << self.input_bits) | x]

    @classmethod
    def equality_test(cls, bits: int) -> "ModedFunctionTable":
        """The drawer oracle: output 1 exactly when mode == x."""
        size = 1 << bits
        table = tuple(1 if k == x else 0 for k in range(size) for x in range(size))
        return cls(bits, bits, 1, table)

    def to_json(self) -> dict:
        return {
            "mode_bits": self.mode_bits,
            "input_bits": self.input_bits,
            "output_bits": self.output_bits,
            "table": list(self.table),
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "ModedFunctionTable":
        return cls(doc["mode_bits"], doc["input_bits"], doc["output_bits"], tuple(doc["table"]))


def modexp_table(base: int, modulus: int, input_bits: int) -> FunctionTable:
    """Table for f(x) = base**x mod modulus; requires gcd(base, modulus) = 1."""
    if modulus < 2 or math.gcd(base, modulus) != 1:
        raise ValueError(f"need gcd(base, modulus) = 1 and modulus >= 2, got {base}, {modulus}")
    output_bits = max(1, (modulus - 1).bit_length())
    values = []
    acc = 1 % modulus
    for _ in range(1 << input_bits):
        values.append(acc)
        acc = (acc * base) % modulus
    return FunctionTable(input_bits, output_bits, tuple(values))


def _as_register_axis(state: PureState, reg: str) -> tuple[np.ndarray, int, int, int]:
    """Reshape the amplitude vector to (left, register_dim, right)."""
    layout = state.layout
    d = layout.dim(reg)
    right = 1 << layout.offset(reg)
    left = layout.dimension // (d * right)
    return state.amplitudes.reshape(left, d, right), left, d, right


def _apply_register_matrix(state: PureState, reg: str, matrix: np.ndarray) -> PureState:
    block, *_ = _as_register_axis(state, reg)
    out = np.einsum("cd,ldr->lcr", matrix, block)
    return state.with_amplitudes(out.reshape(-1))


_HADAMARD_1Q = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)


def hadamard_all(state: PureState, reg: str) -> PureState:
    """Apply H to every qubit of the register."""
    layout = state.layout
    q = layout.qubits(reg)
    off = layout.offset(reg)
    amps = state.amplitudes
    for bit in range(off, off + q):
        stride = 1 << bit
        shaped = amps.reshape(layout.dimension // (2 * stride), 2, stride)
        amps = np.einsum("cd,ldr->lcr", _HADAMARD_1Q, shaped).reshape(-1)
    return state.with_amplitudes(amps)


@lru_cache(maxsize=None)
def fourier_matrix(qubits: int, inverse: bool = False) -> np.ndarray:
    """Dense transform matrix M[c, x] = exp(+-2*pi*i*c*x/D) / sqrt(D)."""
    d = 1 << qubits
    sign = -1.0 if inverse else 1.0
    grid = np.outer(np.arange(d), np.arange(d))
    m = np.exp(sign * 2j * np.pi * grid / d) / math.sqrt(d)
    m.setflags(write=False)
    return m


def qft(state: PureState, reg: str, inverse: bool = False, method: str = "dense") -> PureState:
    """Digital Fourier transform of one register.

    ``method="dense"`` multiplies by the reference matrix; ``method="fast"``
    runs the FFT butterfly along the register axis.  The dense form is the
    correctness oracle for the fast one.
    """
    if method == "dense":
        return _apply_register_matrix(state, reg, fourier_matrix(state.layout.qubits(reg), inverse))
    if method == "fast":
        block, *_ = _as_register_axis(state, reg)
        transform = np.fft.fft if inverse else np.fft.ifft
        return state.with_amplitudes(transform(block, axis=1, norm="ortho").reshape(-1))
    raise ValueError(f"unknown qft method {method!r}")


def _field(layout: RegisterLayout, reg: str, indices: np.ndarray) -> np.ndarray:
    return (indices >> layout.offset(reg)) & (layout.dim(reg) - 1)


def oracle_xor(state: PureState, f: FunctionTable, in_reg: str, out_reg: str) -> PureState:
    """Basis map |x>|y> -> |x>|y XOR f(x)>; self-inverse."""
    layout = state.layout
    if layout.qubits(in_reg) != f.input_bits or layout.qubits(out_reg) != f.output_bits:
        raise ShapeMismatchError(
            f"table ({f.input_bits}->{f.output_bits} bits) does not fit registers "
            f"{in_reg!r} ({layout.qubits(in_reg)}) and {out_reg!r} ({layout.qubits(out_reg)})"
        )
    if in_reg == out_reg:
        raise ShapeMismatchError("input and output registers must differ")
    indices = np.arange(layout.dimension)
    values = np.asarray(f.table)[_field(layout, in_reg, indices)]
    partner = indices ^ (values << layout.offset(out_reg))
    # XOR-ing a fixed field is an involution, so gathering along the partner
    # permutation is its own inverse.
    return state.with_amplitudes(state.amplitudes[partner])


def oracle_moded(
    state: PureState, f: ModedFunctionTable, mode_reg: str, in_reg: str, out_reg: str
) -> PureState:
    """Basis map |k>|x>|y> -> |k>|x>|y XOR F(k, x)>."""
    layout = state.layout
    if (
        layout.qubits(mode_reg) != f.mode_bits
        or layout.qubits(in_reg) != f.input_bits
        or layout.qubits(out_reg) != f.output_bits
    ):
        raise ShapeMismatchError("moded table dimensions do not fit the three registers")
    if len({mode_reg, in_reg, out_reg}) != 3:
        raise ShapeMismatchError("mode, input, and output registers must be distinct")
    indices = np.arange(layout.dimension)
    keys = (_field(layout, mode_reg, indices) << f.input_bits) | _field(layout, in_reg, indices)
    values = np.asarray(f.table)[keys]
    partner = indices ^ (values << layout.offset(out_reg))
    return state.with_amplitudes(state.amplitudes[partner])


def grover_diffusion(state: PureState, reg: str) -> PureState:
    """Inversion about the mean on one register: 2|u><u| - I."""
    block, *_ = _as_register_axis(state, reg)
    out = 2.0 * block.mean(axis=1, keepdims=True) - block
    return state.with_amplitudes(out.reshape(-1))


def grover_iteration(state: PureState, f: FunctionTable, x_reg: str, f_reg: str) -> PureState:
    """One oracle call followed by diffusion on the search register.

    Expects ``f_reg`` to carry the (|0> - |1>)/sqrt(2) factor so the oracle
    acts by phase kickback.
    """
    return grover_diffusion(oracle_xor(state, f, x_reg, f_reg), x_reg)
