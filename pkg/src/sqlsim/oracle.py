"""Dense state-vector simulator used as the correctness oracle.

Tracks all 2^n amplitudes in a numpy array and applies gates by tensor
contraction. Gate matrices are defined here again on purpose: the only thing
this module shares with the relational path is the bit-ordering convention
(qubit 0 = least significant bit, first listed qubit = most significant
local bit), so agreement between the two is a meaningful check.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, GateInstance, GateKind

# 2^26 complex doubles is 1 GiB; refuse anything larger.
MAX_ORACLE_QUBITS = 26


class OracleLimitError(RuntimeError):
    """Dense simulation refused: the state vector would not fit in memory."""


@dataclass(frozen=True)
class DenseState:
    n: int
    amplitudes: np.ndarray

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


_INV_SQRT2 = 2.0**-0.5


def gate_matrix(kind: GateKind, params: tuple[float, ...] = (),
                matrix: tuple[complex, ...] | None = None) -> np.ndarray:
    """Dense unitary for a gate, indexed by the local packing convention."""
    if kind.takes_matrix:
        dim = 1 << kind.arity
        return np.asarray(matrix, dtype=complex).reshape(dim, dim)
    if kind in (GateKind.RX, GateKind.RY, GateKind.RZ):
        (theta,) = params
        half = theta / 2.0
        if kind is GateKind.RX:
            return np.array(
                [
                    [math.cos(half), -1j * math.sin(half)],
                    [-1j * math.sin(half), math.cos(half)],
                ],
                dtype=complex,
            )
        if kind is GateKind.RY:
            return np.array(
                [
                    [math.cos(half), -math.sin(half)],
                    [math.sin(half), math.cos(half)],
                ],
                dtype=complex,
            )
        return np.array(
            [[cmath.exp(-1j * half), 0], [0, cmath.exp(1j * half)]], dtype=complex
        )
    return _FIXED_MATRICES[kind]


_FIXED_MATRICES: dict[GateKind, np.ndarray] = {
    GateKind.H: np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]],
                         dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, cmath.exp(1j * math.pi / 4)]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, cmath.exp(-1j * math.pi / 4)]], dtype=complex),
    GateKind.CX: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    GateKind.CZ: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]], dtype=complex
    ),
    GateKind.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}
_ccx = np.eye(8, dtype=complex)
_ccx[[6, 7]] = _ccx[[7, 6]]
_FIXED_MATRICES[GateKind.CCX] = _ccx


def apply_gate(amplitudes: np.ndarray, n: int, gate: GateInstance) -> np.ndarray:
    """Apply one gate to a length-2^n amplitude array, returning a new array."""
    mat = gate_matrix(gate.kind, gate.params, gate.matrix)
    k = len(gate.qubits)
    # Axis n-1-q of the rank-n tensor is qubit q; gate axes follow the
    # first-listed-qubit-is-most-significant packing.
    axes = [n - 1 - q for q in gate.qubits]
    tensor = amplitudes.reshape((2,) * n)
    gate_tensor = mat.reshape((2,) * (2 * k))
    moved = np.tensordot(gate_tensor, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(moved, list(range(k)), axes).reshape(-1)


def simulate_dense(circuit: Circuit) -> DenseState:
    """Run the full circuit from |0...0> and return the dense final state."""
    if circuit.num_qubits > MAX_ORACLE_QUBITS:
        raise OracleLimitError(
            f"dense oracle supports at most {MAX_ORACLE_QUBITS} qubits, "
            f"got {circuit.num_qubits}"
        )
    amplitudes = np.zeros(1 << circuit.num_qubits, dtype=complex)
    amplitudes[0] = 1.0
    for gate in circuit.gates:
        amplitudes = apply_gate(amplitudes, circuit.num_qubits, gate)
    return DenseState(circuit.num_qubits, amplitudes)


def simulate_dense_steps(circuit: Circuit,
                         boundaries: list[int]) -> list[DenseState]:
    """Snapshots of the dense state after each gate-count boundary.

    `boundaries` are cumulative gate counts (e.g. [1, 3] snapshots after the
    first gate and after the third); they must be nondecreasing.
    """
    if circuit.num_qubits > MAX_ORACLE_QUBITS:
        raise OracleLimitError(
            f"dense oracle supports at most {MAX_ORACLE_QUBITS} qubits, "
            f"got {circuit.num_qubits}"
        )
    amplitudes = np.zeros(1 << circuit.num_qubits, dtype=complex)
    amplitudes[0] = 1.0
    snapshots = []
    done = 0
    for boundary in boundaries:
        while done < boundary:
            amplitudes = apply_gate(amplitudes, circuit.num_qubits,
                                    circuit.gates[done])
            done += 1
        snapshots.append(DenseState(circuit.num_qubits, amplitudes.copy()))
    return snapshots


def compare_states(rows, dense: DenseState) -> float:
    """Max absolute amplitude difference, zero-padding indices missing in rows.

    `rows` is any iterable of (s, r, i) records, e.g. executor StateRows.
    """
    full = np.zeros(1 << dense.n, dtype=complex)
    for row in rows:
        s, re, im = row.s, row.r, row.i
        if not 0 <= s < full.size:
            raise ValueError(f"basis state {s} out of range for n={dense.n}")
        full[s] = complex(re, im)
    return float(np.max(np.abs(full - dense.amplitudes)))
