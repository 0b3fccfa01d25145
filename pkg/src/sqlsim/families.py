"""Parameterized circuit-family generators.

Five families cover the benchmark and demo scenarios: ghz and
equal_superposition stress the two extremes of state-table growth,
parity_check is the classic ancilla-accumulation algorithm, sparse_chain
stays a single basis state under any depth (X/CX only), and random_dense
draws from the whole named gate set.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .circuit import MAX_QUBITS, Circuit, CircuitError, GateInstance, GateKind


class FamilyError(ValueError):
    """Unknown family or invalid family parameters."""


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str  # "int", "bits"
    required: bool
    default: int | None = None
    minimum: int | None = None
    maximum: int | None = None
    description: str = ""


@dataclass(frozen=True)
class FamilyDescriptor:
    name: str
    description: str
    params: tuple[ParamSpec, ...]


def ghz(n: int) -> Circuit:
    """H on qubit 0 then a CX ladder: (|0...0> + |1...1>)/sqrt(2)."""
    _check_n(n)
    gates = [GateInstance(GateKind.H, (0,))]
    gates += [GateInstance(GateKind.CX, (q, q + 1)) for q in range(n - 1)]
    return Circuit(n, tuple(gates), name=f"ghz_{n}")


def equal_superposition(n: int) -> Circuit:
    """H on every qubit: all 2^n amplitudes equal."""
    _check_n(n)
    gates = tuple(GateInstance(GateKind.H, (q,)) for q in range(n))
    return Circuit(n, gates, name=f"equal_superposition_{n}")


def parity_check(n: int, input_bits: list[int] | tuple[int, ...] | str) -> Circuit:
    """Parity of n-1 input bits accumulated onto the ancilla qubit n-1.

    X prepares each input qubit whose bit is 1, then CX(i, n-1) folds every
    input into the ancilla.
    """
    _check_n(n, minimum=2)
    if isinstance(input_bits, str):
        if not set(input_bits) <= {"0", "1"}:
            raise FamilyError(f"input_bits string must be binary, got {input_bits!r}")
        bits = [int(b) for b in input_bits]
    else:
        bits = [int(b) for b in input_bits]
    if len(bits) != n - 1:
        raise FamilyError(f"input_bits must have length n-1={n - 1}, got {len(bits)}")
    if not set(bits) <= {0, 1}:
        raise FamilyError(f"input_bits must be 0/1, got {bits}")
    gates = [GateInstance(GateKind.X, (i,)) for i, b in enumerate(bits) if b]
    gates += [GateInstance(GateKind.CX, (i, n - 1)) for i in range(n - 1)]
    label = "".join(str(b) for b in bits)
    return Circuit(n, tuple(gates), name=f"parity_check_{n}_{label}")


def sparse_chain(n: int, depth: int, seed: int = 0) -> Circuit:
    """Pseudorandom X/CX sequence; the state stays a single basis state."""
    _check_n(n)
    _check_depth(depth)
    rng = random.Random(seed)
    gates = []
    for _ in range(depth):
        if n >= 2 and rng.randrange(2):
            control = rng.randrange(n)
            target = rng.randrange(n - 1)
            if target >= control:
                target += 1
            gates.append(GateInstance(GateKind.CX, (control, target)))
        else:
            gates.append(GateInstance(GateKind.X, (rng.randrange(n),)))
    return Circuit(n, tuple(gates), name=f"sparse_chain_{n}_{depth}_{seed}")


_RANDOM_ONE_QUBIT = (
    GateKind.H, GateKind.X, GateKind.Y, GateKind.Z, GateKind.S, GateKind.SDG,
    GateKind.T, GateKind.TDG, GateKind.RX, GateKind.RY, GateKind.RZ,
)
_RANDOM_TWO_QUBIT = (GateKind.CX, GateKind.CZ, GateKind.SWAP)


def random_dense(n: int, depth: int, seed: int = 0) -> Circuit:
    """Pseudorandom circuit over the full named gate set, uniform angles."""
    _check_n(n)
    _check_depth(depth)
    rng = random.Random(seed)
    kinds: tuple[GateKind, ...] = _RANDOM_ONE_QUBIT
    if n >= 2:
        kinds = kinds + _RANDOM_TWO_QUBIT
    if n >= 3:
        kinds = kinds + (GateKind.CCX,)
    gates = []
    for _ in range(depth):
        kind = kinds[rng.randrange(len(kinds))]
        qubits = _draw_qubits(rng, n, kind.arity)
        params = tuple(
            rng.random() * 2.0 * math.pi for _ in range(kind.num_params)
        )
        gates.append(GateInstance(kind, qubits, params))
    return Circuit(n, tuple(gates), name=f"random_dense_{n}_{depth}_{seed}")


def _draw_qubits(rng: random.Random, n: int, arity: int) -> tuple[int, ...]:
    chosen: list[int] = []
    while len(chosen) < arity:
        q = rng.randrange(n)
        if q not in chosen:
            chosen.append(q)
    return tuple(chosen)


def _check_n(n: int, minimum: int = 1) -> None:
    if not isinstance(n, int) or isinstance(n, bool):
        raise FamilyError(f"n must be an integer, got {n!r}")
    if not minimum <= n <= MAX_QUBITS:
        raise FamilyError(f"n must be in [{minimum}, {MAX_QUBITS}], got {n}")


def _check_depth(depth: int) -> None:
    if not isinstance(depth, int) or isinstance(depth, bool) or depth < 0:
        raise FamilyError(f"depth must be a nonnegative integer, got {depth!r}")


FAMILIES: dict[str, FamilyDescriptor] = {
    "ghz": FamilyDescriptor(
        "ghz",
        "GHZ state preparation: H then a CX ladder; 2 nonzero amplitudes.",
        (ParamSpec("n", "int", True, minimum=1, maximum=MAX_QUBITS,
                   description="qubit count"),),
    ),
    "equal_superposition": FamilyDescriptor(
        "equal_superposition",
        "H on every qubit; all 2^n amplitudes equal.",
        (ParamSpec("n", "int", True, minimum=1, maximum=MAX_QUBITS,
                   description="qubit count"),),
    ),
    "parity_check": FamilyDescriptor(
        "parity_check",
        "Computes the parity of n-1 input bits onto the ancilla qubit n-1.",
        (
            ParamSpec("n", "int", True, minimum=2, maximum=MAX_QUBITS,
                      description="qubit count including the ancilla"),
            ParamSpec("input_bits", "bits", True,
                      description="bitstring of length n-1"),
        ),
    ),
    "sparse_chain": FamilyDescriptor(
        "sparse_chain",
        "Random X/CX chain; state stays one basis state at every step.",
        (
            ParamSpec("n", "int", True, minimum=1, maximum=MAX_QUBITS,
                      description="qubit count"),
            ParamSpec("depth", "int", True, minimum=0,
                      description="number of gates"),
            ParamSpec("seed", "int", False, default=0, description="RNG seed"),
        ),
    ),
    "random_dense": FamilyDescriptor(
        "random_dense",
        "Random circuit over the full named gate set with uniform angles.",
        (
            ParamSpec("n", "int", True, minimum=1, maximum=MAX_QUBITS,
                      description="qubit count"),
            ParamSpec("depth", "int", True, minimum=0,
                      description="number of gates"),
            ParamSpec("seed", "int", False, default=0, description="RNG seed"),
        ),
    ),
}

_GENERATORS = {
    "ghz": ghz,
    "equal_superposition": equal_superposition,
    "parity_check": parity_check,
    "sparse_chain": sparse_chain,
    "random_dense": random_dense,
}


def _coerce(spec: ParamSpec, value):
    """Normalize a parameter that may arrive as CLI/JSON text."""
    if spec.kind == "int":
        if isinstance(value, bool):
            raise FamilyError(f"{spec.name} must be an integer, got {value!r}")
        if isinstance(value, int):
            return value
        if isinstance(value, str) and value.lstrip("-").isdigit():
            return int(value)
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise FamilyError(f"{spec.name} must be an integer, got {value!r}")
    if spec.kind == "bits" and isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return value


def generate_family(name: str, **params) -> Circuit:
    """Instantiate a named family; same name+params always yields the same circuit."""
    generator = _GENERATORS.get(name)
    if generator is None:
        raise FamilyError(
            f"unknown family {name!r}; known: {', '.join(sorted(_GENERATORS))}"
        )
    descriptor = FAMILIES[name]
    specs = {p.name: p for p in descriptor.params}
    unknown = set(params) - set(specs)
    if unknown:
        raise FamilyError(f"unknown parameter(s) {sorted(unknown)} for family {name}")
    missing = [p.name for p in descriptor.params if p.required and p.name not in params]
    if missing:
        raise FamilyError(f"missing parameter(s) {missing} for family {name}")
    coerced = {key: _coerce(specs[key], value) for key, value in params.items()}
    try:
        return generator(**coerced)
    except CircuitError as exc:
        raise FamilyError(f"family {name}: {exc}") from exc
