"""Circuit data model and its JSON interchange format.

A circuit is an ordered list of gate applications over ``num_qubits`` wires.
Basis states are packed into integers with qubit 0 at the least significant
bit, which is why qubit counts are capped at 62: every index and bitmask then
fits a nonnegative 64-bit signed integer on any SQL engine.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

MAX_QUBITS = 62


class CircuitError(ValueError):
    """Raised for malformed or invalid circuit input."""

    def __init__(self, message: str, gate_index: int | None = None):
        self.gate_index = gate_index
        if gate_index is not None:
            message = f"gate {gate_index}: {message}"
        super().__init__(message)


class GateKind(str, Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"
    CCX = "ccx"
    U1 = "u1"
    U2 = "u2"

    @property
    def arity(self) -> int:
        if self in (GateKind.CX, GateKind.CZ, GateKind.SWAP, GateKind.U2):
            return 2
        if self is GateKind.CCX:
            return 3
        return 1

    @property
    def num_params(self) -> int:
        return 1 if self in (GateKind.RX, GateKind.RY, GateKind.RZ) else 0

    @property
    def takes_matrix(self) -> bool:
        return self in (GateKind.U1, GateKind.U2)


@dataclass(frozen=True)
class GateInstance:
    """One gate application: a kind, the qubits it touches, and any angles.

    ``matrix`` is only present for u1/u2 and holds the explicit unitary in
    row-major order (length 4 or 16).
    """

    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    matrix: tuple[complex, ...] | None = None

    def validate(self, num_qubits: int, index: int | None = None) -> None:
        arity = self.kind.arity
        if len(self.qubits) != arity:
            raise CircuitError(
                f"{self.kind.value} takes {arity} qubit(s), got {len(self.qubits)}",
                index,
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"duplicate qubits {list(self.qubits)}", index)
        for q in self.qubits:
            if not 0 <= q < num_qubits:
                raise CircuitError(f"qubit {q} out of range [0, {num_qubits})", index)
        if len(self.params) != self.kind.num_params:
            raise CircuitError(
                f"{self.kind.value} takes {self.kind.num_params} parameter(s), "
                f"got {len(self.params)}",
                index,
            )
        if self.kind.takes_matrix:
            want = (2**arity) ** 2
            if self.matrix is None or len(self.matrix) != want:
                got = "none" if self.matrix is None else str(len(self.matrix))
                raise CircuitError(
                    f"{self.kind.value} needs a row-major matrix of {want} entries, got {got}",
                    index,
                )
        elif self.matrix is not None:
            raise CircuitError(f"{self.kind.value} does not take a matrix", index)
        for p in self.params:
            if not math.isfinite(p):
                raise CircuitError(f"nonfinite parameter {p}", index)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[GateInstance, ...] = ()
    name: str | None = None

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise CircuitError(
                f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}"
            )
        for i, gate in enumerate(self.gates):
            gate.validate(self.num_qubits, i)

    def __len__(self) -> int:
        return len(self.gates)


def _parse_matrix(raw, index: int) -> tuple[complex, ...]:
    if not isinstance(raw, list):
        raise CircuitError("matrix must be a list of [re, im] pairs", index)
    entries = []
    for cell in raw:
        if not (isinstance(cell, list) and len(cell) == 2):
            raise CircuitError("matrix entries must be [re, im] pairs", index)
        re, im = cell
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
            raise CircuitError("matrix entries must be numeric", index)
        entries.append(complex(float(re), float(im)))
    return tuple(entries)


def _parse_gate(raw, index: int) -> GateInstance:
    if not isinstance(raw, dict):
        raise CircuitError("gate must be an object", index)
    name = raw.get("name")
    try:
        kind = GateKind(str(name).lower())
    except ValueError:
        raise CircuitError(f"unknown gate name {name!r}", index) from None
    qubits = raw.get("qubits")
    if not isinstance(qubits, list) or not all(
        isinstance(q, int) and not isinstance(q, bool) for q in qubits
    ):
        raise CircuitError("qubits must be a list of integers", index)
    params = raw.get("params", [])
    if not isinstance(params, list) or not all(
        isinstance(p, (int, float)) and not isinstance(p, bool) for p in params
    ):
        raise CircuitError("params must be a list of numbers", index)
    matrix = None
    if "matrix" in raw and raw["matrix"] is not None:
        matrix = _parse_matrix(raw["matrix"], index)
    unknown = set(raw) - {"name", "qubits", "params", "matrix"}
    if unknown:
        raise CircuitError(f"unknown gate fields {sorted(unknown)}", index)
    return GateInstance(
        kind=kind,
        qubits=tuple(qubits),
        params=tuple(float(p) for p in params),
        matrix=matrix,
    )


def circuit_from_dict(doc: dict) -> Circuit:
    """Build a validated circuit from an already-parsed JSON document."""
    if not isinstance(doc, dict):
        raise CircuitError("circuit document must be an object")
    unknown = set(doc) - {"name", "num_qubits", "gates"}
    if unknown:
        raise CircuitError(f"unknown circuit fields {sorted(unknown)}")
    num_qubits = doc.get("num_qubits")
    if not isinstance(num_qubits, int) or isinstance(num_qubits, bool):
        raise CircuitError("num_qubits must be an integer")
    gates_raw = doc.get("gates")
    if not isinstance(gates_raw, list):
        raise CircuitError("gates must be a list")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise CircuitError("name must be a string")
    gates = tuple(_parse_gate(g, i) for i, g in enumerate(gates_raw))
    return Circuit(num_qubits=num_qubits, gates=gates, name=name)


def parse_circuit_json(text: str) -> Circuit:
    """Parse and validate the JSON interchange form of a circuit.

    Raises CircuitError with the byte offset for malformed JSON, or with
    the offending gate index for schema violations.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitError(f"malformed JSON at offset {exc.pos}: {exc.msg}") from exc
    return circuit_from_dict(doc)


def circuit_to_dict(circuit: Circuit) -> dict:
    """Canonical dict form: fixed key order, name omitted when unset."""
    doc: dict = {}
    if circuit.name is not None:
        doc["name"] = circuit.name
    doc["num_qubits"] = circuit.num_qubits
    gates = []
    for gate in circuit.gates:
        entry: dict = {"name": gate.kind.value, "qubits": list(gate.qubits)}
        if gate.params:
            entry["params"] = list(gate.params)
        if gate.matrix is not None:
            entry["matrix"] = [[c.real, c.imag] for c in gate.matrix]
        gates.append(entry)
    doc["gates"] = gates
    return doc


def serialize_circuit_json(circuit: Circuit) -> str:
    """Canonical JSON text; parse_circuit_json round-trips it exactly."""
    return json.dumps(circuit_to_dict(circuit), separators=(",", ":"))
