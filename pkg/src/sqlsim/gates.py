"""Sparse relational encoding of gate unitaries and algebraic gate fusion.

A k-qubit gate becomes a set of rows (in_s, out_s, r, i): the nonzero matrix
elements M[out_s][in_s] = r + i*1j. Local bit packing puts the first listed
qubit at the most significant local bit, so CX listed as [control, target]
has local index control*2 + target.
"""
from __future__ import annotations

import cmath
import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .circuit import GateInstance, GateKind

# Entries smaller than this are floating-point dust and never stored.
DROP_TOLERANCE = 1e-15

# Explicit u1/u2 matrices must be unitary within this bound.
UNITARY_TOLERANCE = 1e-9

MAX_FUSED_QUBITS = 3


class GateDefinitionError(ValueError):
    """Bad gate parameters or a non-unitary explicit matrix."""


class FusionError(ValueError):
    """Fusion refused: combined support would exceed the 3-qubit cap."""


@dataclass(frozen=True)
class GateRelation:
    """Relational form of one gate: arity, nonzero rows, and a stable label."""

    arity: int
    entries: tuple[tuple[int, int, float, float], ...]
    label: str

    @property
    def dim(self) -> int:
        return 1 << self.arity

    def to_matrix(self) -> np.ndarray:
        mat = np.zeros((self.dim, self.dim), dtype=complex)
        for in_s, out_s, re, im in self.entries:
            mat[out_s, in_s] = complex(re, im)
        return mat

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, label: str) -> "GateRelation":
        dim = matrix.shape[0]
        arity = dim.bit_length() - 1
        entries = []
        for out_s in range(dim):
            for in_s in range(dim):
                amp = complex(matrix[out_s, in_s])
                if abs(amp) > DROP_TOLERANCE:
                    entries.append((in_s, out_s, float(amp.real), float(amp.imag)))
        entries.sort()
        return cls(arity=arity, entries=tuple(entries), label=label)


_SQRT1_2 = 1.0 / math.sqrt(2.0)


def _named_matrix(kind: GateKind, params: tuple[float, ...]) -> np.ndarray:
    if kind is GateKind.H:
        return np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex)
    if kind is GateKind.X:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind is GateKind.Y:
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if kind is GateKind.Z:
        return np.diag([1, -1]).astype(complex)
    if kind is GateKind.S:
        return np.diag([1, 1j]).astype(complex)
    if kind is GateKind.SDG:
        return np.diag([1, -1j]).astype(complex)
    if kind is GateKind.T:
        return np.diag([1, cmath.exp(1j * math.pi / 4)]).astype(complex)
    if kind is GateKind.TDG:
        return np.diag([1, cmath.exp(-1j * math.pi / 4)]).astype(complex)
    if kind is GateKind.RX:
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RZ:
        (theta,) = params
        return np.diag(
            [cmath.exp(-1j * theta / 2), cmath.exp(1j * theta / 2)]
        ).astype(complex)
    if kind is GateKind.CX:
        # local index = control*2 + target
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if kind is GateKind.CZ:
        return np.diag([1, 1, 1, -1]).astype(complex)
    if kind is GateKind.SWAP:
        return np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
        )
    if kind is GateKind.CCX:
        mat = np.eye(8, dtype=complex)
        mat[6, 6] = mat[7, 7] = 0
        mat[6, 7] = mat[7, 6] = 1
        return mat
    raise GateDefinitionError(f"no built-in matrix for {kind.value}")


def _label(kind: GateKind, params: tuple[float, ...],
           matrix: tuple[complex, ...] | None) -> str:
    if matrix is not None:
        digest = hashlib.sha256(
            np.asarray(matrix, dtype=complex).tobytes()
        ).hexdigest()[:12]
        return f"{kind.value}_{digest}"
    if params:
        rendered = "_".join(repr(p) for p in params)
        return f"{kind.value}_{rendered}"
    return kind.value


def relation_for(
    kind: GateKind,
    params: tuple[float, ...] = (),
    matrix: tuple[complex, ...] | None = None,
) -> GateRelation:
    """Relational encoding of the standard unitary for a gate kind."""
    if len(params) != kind.num_params:
        raise GateDefinitionError(
            f"{kind.value} takes {kind.num_params} parameter(s), got {len(params)}"
        )
    if kind.takes_matrix:
        dim = 1 << kind.arity
        if matrix is None or len(matrix) != dim * dim:
            raise GateDefinitionError(
                f"{kind.value} needs an explicit {dim}x{dim} matrix"
            )
        mat = np.asarray(matrix, dtype=complex).reshape(dim, dim)
        deviation = np.max(np.abs(mat.conj().T @ mat - np.eye(dim)))
        if deviation > UNITARY_TOLERANCE:
            raise GateDefinitionError(
                f"{kind.value} matrix is not unitary (max deviation {deviation:.3e})"
            )
    elif matrix is not None:
        raise GateDefinitionError(f"{kind.value} does not take a matrix")
    else:
        mat = _named_matrix(kind, params)
    return GateRelation.from_matrix(mat, _label(kind, params, matrix))


def relation_for_gate(gate: GateInstance) -> GateRelation:
    return relation_for(gate.kind, gate.params, gate.matrix)


def _embed(matrix: np.ndarray, qubits: tuple[int, ...],
           combined: tuple[int, ...]) -> np.ndarray:
    """Tensor with identity so a gate on `qubits` acts on the `combined` support."""
    k, big_k = len(qubits), len(combined)
    bit_of = {q: big_k - 1 - pos for pos, q in enumerate(combined)}
    rest_mask = (1 << big_k) - 1
    for q in qubits:
        rest_mask &= ~(1 << bit_of[q])
    out = np.zeros((1 << big_k, 1 << big_k), dtype=complex)
    for x_in in range(1 << big_k):
        g_in = 0
        for p, q in enumerate(qubits):
            g_in |= ((x_in >> bit_of[q]) & 1) << (k - 1 - p)
        base = x_in & rest_mask
        for g_out in range(1 << k):
            x_out = base
            for p, q in enumerate(qubits):
                x_out |= ((g_out >> (k - 1 - p)) & 1) << bit_of[q]
            out[x_out, x_in] = matrix[g_out, g_in]
    return out


def fuse(
    first: GateRelation,
    first_qubits: tuple[int, ...],
    second: GateRelation,
    second_qubits: tuple[int, ...],
) -> tuple[GateRelation, tuple[int, ...]]:
    """Combine two consecutive gates into one relation on their joint support.

    `second` is applied after `first`, so the result densifies to
    M(second) @ M(first) with both embedded on the combined qubit list
    (first gate's qubits, then any new ones, in order of appearance).
    """
    combined = tuple(first_qubits) + tuple(
        q for q in second_qubits if q not in first_qubits
    )
    if len(combined) > MAX_FUSED_QUBITS:
        raise FusionError(
            f"combined support {sorted(combined)} exceeds {MAX_FUSED_QUBITS} qubits"
        )
    m1 = _embed(first.to_matrix(), tuple(first_qubits), combined)
    m2 = _embed(second.to_matrix(), tuple(second_qubits), combined)
    product = m2 @ m1
    digest = hashlib.sha256(np.ascontiguousarray(product).tobytes()).hexdigest()[:12]
    label = f"fused{len(combined)}_{digest}"
    return GateRelation.from_matrix(product, label), combined
