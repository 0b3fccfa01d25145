import math

import pytest

from sqlsim import families
from sqlsim.backends import (
    BackendError,
    StateRow,
    UnknownBackendError,
    available_backends,
    create_backend,
)
from sqlsim.circuit import Circuit, GateKind
from sqlsim.codegen import CodegenOptions, SqlPlan, Statement, translate_circuit
from sqlsim.executor import (
    ExecutionError,
    NumericError,
    probabilities,
    result_to_dict,
    run_circuit,
    run_plan,
    sample_counts,
)
from sqlsim.oracle import compare_states, simulate_dense

SQRT1_2 = 1.0 / math.sqrt(2.0)

BACKENDS = available_backends()


def _open(name, location=None):
    session = create_backend(name)
    session.open(location)
    return session


@pytest.mark.parametrize("backend", BACKENDS)
def test_ghz3_final_rows(backend):
    result, _ = run_circuit(families.ghz(3), backend,
                            CodegenOptions(fusion_window=1))
    assert [row.s for row in result.final_state] == [0, 7]
    for row in result.final_state:
        assert abs(row.r - SQRT1_2) <= 1e-9
        assert abs(row.i) <= 1e-9
    assert compare_states(result.final_state, simulate_dense(families.ghz(3))) <= 1e-9


@pytest.mark.parametrize("backend", BACKENDS)
def test_empty_circuit(backend):
    result, plan = run_circuit(Circuit(2), backend)
    assert result.final_state == [StateRow(0, 1.0, 0.0)]
    assert plan.final_table == "state_0"


def _chain_permutation(circuit) -> int:
    """Bit-level oracle: X/CX circuits permute one basis state."""
    s = 0
    for gate in circuit.gates:
        if gate.kind is GateKind.X:
            s ^= 1 << gate.qubits[0]
        elif gate.kind is GateKind.CX:
            control, target = gate.qubits
            if (s >> control) & 1:
                s ^= 1 << target
        else:  # pragma: no cover - sparse chains only emit X and CX
            raise AssertionError(gate.kind)
    return s


@pytest.mark.parametrize("backend", BACKENDS)
def test_sparse_chain_single_row(backend):
    circuit = families.sparse_chain(40, 200, seed=1)
    result, _ = run_circuit(circuit, backend, CodegenOptions(fusion_window=1))
    assert len(result.final_state) == 1
    row = result.final_state[0]
    assert abs(row.probability - 1.0) <= 1e-9
    assert row.s == _chain_permutation(circuit)
    assert result.metrics.peak_rows == 1


def test_probabilities_examples():
    ghz_rows = [StateRow(0, SQRT1_2, 0.0), StateRow(7, SQRT1_2, 0.0)]
    assert probabilities(ghz_rows) == [
        (0, pytest.approx(0.5)),
        (7, pytest.approx(0.5)),
    ]
    assert probabilities([StateRow(0, 1.0, 0.0)]) == [(0, 1.0)]
    mixed = [StateRow(0, 0.0, 0.6), StateRow(1, 0.8, 0.0)]
    assert probabilities(mixed) == [
        (0, pytest.approx(0.36)),
        (1, pytest.approx(0.64)),
    ]


def test_sample_counts_deterministic_point_mass():
    rows = [StateRow(0, 1.0, 0.0)]
    assert sample_counts(rows, 100, seed=3) == {0: 100}


def test_sample_counts_ghz_within_five_sigma():
    rows = [StateRow(0, SQRT1_2, 0.0), StateRow(7, SQRT1_2, 0.0)]
    shots = 100_000
    counts = sample_counts(rows, shots, seed=1234)
    sigma = math.sqrt(shots * 0.25)
    assert counts[0] + counts[7] == shots
    for s in (0, 7):
        assert abs(counts[s] - shots / 2) <= 5 * sigma
    assert counts == sample_counts(rows, shots, seed=1234)


def test_sample_counts_input_validation():
    with pytest.raises(ValueError, match="empty"):
        sample_counts([], 10, seed=0)
    with pytest.raises(ValueError, match="shots"):
        sample_counts([StateRow(0, 1.0, 0.0)], 0, seed=0)
    with pytest.raises(ValueError, match="not normalized"):
        sample_counts([StateRow(0, 0.5, 0.0)], 10, seed=0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_normalization_after_random_runs(backend):
    for seed in range(5):
        circuit = families.random_dense(6, 18, seed=seed)
        result, _ = run_circuit(circuit, backend,
                                CodegenOptions(epsilon=1e-12))
        total = sum(row.probability for row in result.final_state)
        assert abs(total - 1.0) <= 1e-9


def test_backend_agreement_fifty_random_circuits():
    for seed in range(50):
        n = 2 + seed % 7  # up to 8 qubits
        depth = 1 + seed % 15
        circuit = families.random_dense(n, depth, seed=seed)
        reference = None
        for backend in BACKENDS:
            result, _ = run_circuit(circuit, backend)
            rows = result.final_state
            assert [row.s for row in rows] == sorted(row.s for row in rows)
            if reference is None:
                reference = rows
                continue
            assert [row.s for row in rows] == [row.s for row in reference]
            for mine, theirs in zip(rows, reference):
                assert abs(mine.r - theirs.r) <= 1e-9
                assert abs(mine.i - theirs.i) <= 1e-9


def test_read_back_strictly_ascending():
    result, _ = run_circuit(families.equal_superposition(6), "sqlite")
    indices = [row.s for row in result.final_state]
    assert indices == sorted(set(indices))


def test_on_disk_rerun_identical(tmp_path):
    circuit = families.random_dense(5, 10, seed=13)
    plan = translate_circuit(circuit, CodegenOptions())
    results = []
    for attempt in range(2):
        session = _open("sqlite", tmp_path / f"run_{attempt}.db")
        try:
            results.append(run_plan(plan, session))
        finally:
            session.close()
    assert results[0].final_state == results[1].final_state
    assert results[0].metrics.mode == "disk"
    assert results[0].metrics.db_bytes and results[0].metrics.db_bytes > 0


def test_metrics_align_with_apply_steps():
    plan = translate_circuit(families.ghz(4), CodegenOptions(fusion_window=1))
    session = _open("reference")
    try:
        result = run_plan(plan, session)
    finally:
        session.close()
    applies = len(plan.apply_statements())
    assert len(result.metrics.step_wall_ns) == applies
    assert len(result.metrics.step_rows) == applies
    assert result.metrics.step_rows == (2, 2, 2, 2)
    assert result.metrics.peak_rows == 2
    assert result.metrics.total_wall_ns > 0


@pytest.mark.parametrize("backend", BACKENDS)
def test_execution_error_carries_statement_index(backend):
    plan = translate_circuit(families.ghz(2), CodegenOptions())
    broken = SqlPlan(
        num_qubits=plan.num_qubits,
        statements=plan.statements[:2]
        + (Statement("SELECT nonsense FROM missing_table", "apply_step",
                     step_index=0, target="missing"),),
        state_table_names=plan.state_table_names,
        gate_table_names=plan.gate_table_names,
        steps=plan.steps,
        options=plan.options,
    )
    session = _open(backend)
    try:
        with pytest.raises(ExecutionError) as err:
            run_plan(broken, session)
    finally:
        session.close()
    assert err.value.statement_index == 2


@pytest.mark.parametrize("backend", BACKENDS)
def test_nonfinite_amplitudes_rejected(backend):
    plan = SqlPlan(
        num_qubits=1,
        statements=(
            Statement("CREATE TABLE state_0 (s BIGINT, r DOUBLE, i DOUBLE)",
                      "create_state", target="state_0"),
            Statement("INSERT INTO state_0 (s, r, i) VALUES (0, 1e400, 0.0)",
                      "insert_state", target="state_0"),
        ),
        state_table_names=("state_0",),
        gate_table_names=(),
        steps=(),
        options=CodegenOptions(),
    )
    session = _open(backend)
    try:
        with pytest.raises(NumericError):
            run_plan(plan, session)
    finally:
        session.close()


def test_unknown_backend_lists_configured():
    with pytest.raises(UnknownBackendError, match="reference"):
        create_backend("nope")


def test_reference_backend_refuses_disk(tmp_path):
    session = create_backend("reference")
    with pytest.raises(BackendError, match="in-memory"):
        session.open(tmp_path / "x.db")


def test_result_export_shape():
    result, _ = run_circuit(families.ghz(2), "reference")
    doc = result_to_dict(result)
    assert set(doc) == {"final_state", "probabilities", "metrics"}
    assert doc["final_state"][0] == {"s": 0, "r": pytest.approx(SQRT1_2), "i": 0.0}
    assert doc["probabilities"][1]["p"] == pytest.approx(0.5)
    assert doc["metrics"]["backend"] == "reference"
    assert doc["metrics"]["mode"] == "memory"
