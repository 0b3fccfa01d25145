import math
import random

import numpy as np
import pytest

from sqlsim import families
from sqlsim.backends import StateRow
from sqlsim.circuit import Circuit, GateInstance, GateKind
from sqlsim.gates import relation_for
from sqlsim.oracle import (
    DenseState,
    MAX_ORACLE_QUBITS,
    OracleLimitError,
    apply_gate,
    compare_states,
    simulate_dense,
    simulate_dense_steps,
)

SQRT1_2 = 1.0 / math.sqrt(2.0)

_INVERSE = {
    GateKind.S: (GateKind.SDG, False),
    GateKind.SDG: (GateKind.S, False),
    GateKind.T: (GateKind.TDG, False),
    GateKind.TDG: (GateKind.T, False),
    GateKind.RX: (GateKind.RX, True),
    GateKind.RY: (GateKind.RY, True),
    GateKind.RZ: (GateKind.RZ, True),
}


def _inverse_gate(gate: GateInstance) -> GateInstance:
    kind, negate = _INVERSE.get(gate.kind, (gate.kind, False))
    params = tuple(-p for p in gate.params) if negate else gate.params
    return GateInstance(kind, gate.qubits, params)


def test_ghz3_amplitudes():
    dense = simulate_dense(families.ghz(3))
    expected = np.zeros(8, dtype=complex)
    expected[0] = expected[7] = SQRT1_2
    assert np.max(np.abs(dense.amplitudes - expected)) < 1e-12


def test_intermediate_after_h():
    c = families.ghz(3)
    prefix = Circuit(3, c.gates[:1])
    dense = simulate_dense(prefix)
    assert abs(dense.amplitudes[0] - SQRT1_2) < 1e-12
    assert abs(dense.amplitudes[1] - SQRT1_2) < 1e-12
    assert np.max(np.abs(dense.amplitudes[2:])) == 0.0


def test_equal_superposition_two_qubits():
    dense = simulate_dense(families.equal_superposition(2))
    assert np.max(np.abs(dense.amplitudes - 0.5)) < 1e-12


def test_bit_ordering_x_on_qubit_one():
    c = Circuit(2, (GateInstance(GateKind.X, (1,)),))
    dense = simulate_dense(c)
    assert abs(dense.amplitudes[2] - 1.0) < 1e-15
    assert abs(dense.amplitudes[0]) < 1e-15


def test_qubit_guard_refuses_with_limit():
    with pytest.raises(OracleLimitError, match=str(MAX_ORACLE_QUBITS)):
        simulate_dense(Circuit(MAX_ORACLE_QUBITS + 1))


def test_gate_then_inverse_restores_state():
    rng = random.Random(41)
    n = 3
    named = [k for k in GateKind if not k.takes_matrix]
    for _ in range(1000):
        kind = named[rng.randrange(len(named))]
        qubits = tuple(rng.sample(range(n), kind.arity))
        params = tuple(
            rng.uniform(-2 * math.pi, 2 * math.pi)
            for _ in range(kind.num_params)
        )
        gate = GateInstance(kind, qubits, params)
        state = np.asarray(
            [rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(1 << n)]
        )
        state /= np.linalg.norm(state)
        forward = apply_gate(state, n, gate)
        restored = apply_gate(forward, n, _inverse_gate(gate))
        assert np.max(np.abs(restored - state)) <= 1e-12


def test_normalization_preserved_gate_by_gate():
    for seed in range(10):
        c = families.random_dense(5, 25, seed=seed)
        amplitudes = np.zeros(32, dtype=complex)
        amplitudes[0] = 1.0
        for gate in c.gates:
            amplitudes = apply_gate(amplitudes, 5, gate)
            assert abs(np.linalg.norm(amplitudes) - 1.0) <= 1e-12


def _kron_embed(matrix: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Independent expansion: permute a kron product instead of bit loops."""
    k = len(qubits)
    full = np.kron(matrix, np.eye(1 << (n - k), dtype=complex))
    # full acts on [qubits..., rest...] with the first factor most significant;
    # build the permutation taking packed indices to that ordering.
    rest = [q for q in reversed(range(n)) if q not in qubits]
    order = list(qubits) + rest  # order[0] is the most significant bit
    perm = np.zeros(1 << n, dtype=int)
    for s in range(1 << n):
        t = 0
        for position, qubit in enumerate(order):
            t = (t << 1) | ((s >> qubit) & 1)
        perm[s] = t
    lifted = np.zeros_like(full)
    for s_in in range(1 << n):
        for s_out in range(1 << n):
            lifted[s_out, s_in] = full[perm[s_out], perm[s_in]]
    return lifted


def test_relation_action_matches_oracle_gate_action():
    rng = random.Random(59)
    named = [k for k in GateKind if not k.takes_matrix]
    for _ in range(60):
        n = rng.randint(1, 3)
        usable = [k for k in named if k.arity <= n]
        kind = usable[rng.randrange(len(usable))]
        qubits = tuple(rng.sample(range(n), kind.arity))
        params = tuple(
            rng.uniform(-2 * math.pi, 2 * math.pi)
            for _ in range(kind.num_params)
        )
        state = np.asarray(
            [rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(1 << n)]
        )
        state /= np.linalg.norm(state)
        via_relation = _kron_embed(
            relation_for(kind, params).to_matrix(), qubits, n
        ) @ state
        via_oracle = apply_gate(state, n, GateInstance(kind, qubits, params))
        assert np.max(np.abs(via_relation - via_oracle)) <= 1e-12


def test_compare_states_exact_and_padding():
    dense = DenseState(2, np.array([1.0, 0.0, 0.1, 0.0], dtype=complex))
    rows = [StateRow(0, 1.0, 0.0), StateRow(2, 0.1, 0.0)]
    assert compare_states(rows, dense) == 0.0
    assert compare_states([StateRow(0, 1.0, 0.0)], dense) == pytest.approx(0.1)


def test_compare_states_rejects_out_of_range():
    dense = DenseState(1, np.array([1.0, 0.0], dtype=complex))
    with pytest.raises(ValueError, match="out of range"):
        compare_states([StateRow(4, 1.0, 0.0)], dense)


def test_simulate_dense_steps_snapshots():
    c = families.ghz(3)
    snaps = simulate_dense_steps(c, [1, 3])
    assert abs(snaps[0].amplitudes[1] - SQRT1_2) < 1e-12
    assert abs(snaps[1].amplitudes[7] - SQRT1_2) < 1e-12
