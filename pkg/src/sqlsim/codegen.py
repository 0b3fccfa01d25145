"""Compiles a circuit into an ordered SQL plan over sparse state tables.

Every step joins the current state table with a gate table on the gate's
local input index, extracted from the packed basis-state integer with shifts
and masks, then regroups by the scattered output index and sums real and
imaginary parts so interfering paths cancel. Only &, |, << and >> appear in
the emitted SQL; bit complements are folded into integer mask literals at
translation time because `~` misbehaves on 64-bit signed columns and XOR is
not portable across engines.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .circuit import Circuit
from .gates import GateRelation, MAX_FUSED_QUBITS, fuse, relation_for_gate

StatementKind = str  # create_state | insert_state | create_gate | insert_gate | apply_step | cleanup


@dataclass(frozen=True)
class CodegenOptions:
    fusion_window: int = 4
    epsilon: float = 1e-12
    keep_intermediates: bool = False

    def __post_init__(self):
        if self.fusion_window < 1:
            raise ValueError(f"fusion_window must be >= 1, got {self.fusion_window}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")


@dataclass(frozen=True)
class Statement:
    sql: str
    kind: StatementKind
    step_index: int | None = None
    target: str | None = None


@dataclass(frozen=True)
class PlanStep:
    """One apply_step: which gates it covers and which tables it touches."""

    index: int
    source_table: str
    target_table: str
    gate_table: str
    qubits: tuple[int, ...]
    gate_indices: tuple[int, ...]
    label: str


@dataclass(frozen=True)
class SqlPlan:
    num_qubits: int
    statements: tuple[Statement, ...]
    state_table_names: tuple[str, ...]
    gate_table_names: tuple[str, ...]
    steps: tuple[PlanStep, ...]
    options: CodegenOptions = field(default_factory=CodegenOptions)

    @property
    def final_table(self) -> str:
        return self.state_table_names[-1]

    def apply_statements(self) -> list[Statement]:
        return [s for s in self.statements if s.kind == "apply_step"]


def gate_table_name(label: str) -> str:
    return "gate_" + hashlib.sha256(label.encode()).hexdigest()[:12]


def sql_float(value: float) -> str:
    return repr(float(value))


def local_index_expr(qubits: tuple[int, ...], state_col: str = "s") -> str:
    """Extract the gate's local input index from the packed state integer."""
    k = len(qubits)
    terms = []
    for position, qubit in enumerate(qubits):
        local_bit = k - 1 - position
        bit = f"(({state_col} >> {qubit}) & 1)"
        terms.append(bit if local_bit == 0 else f"({bit} << {local_bit})")
    if len(terms) == 1:
        return terms[0]
    return "(" + " | ".join(terms) + ")"


def scatter_expr(qubits: tuple[int, ...], cleared_state: str,
                 out_col: str = "out_s") -> str:
    """Compose the output index: cleared input OR each local out bit in place."""
    k = len(qubits)
    terms = [cleared_state]
    for position, qubit in enumerate(qubits):
        local_bit = k - 1 - position
        terms.append(f"((({out_col} >> {local_bit}) & 1) << {qubit})")
    return "(" + " | ".join(terms) + ")"


def _create_state_sql(table: str) -> str:
    return f"CREATE TABLE {table} (s BIGINT, r DOUBLE, i DOUBLE)"


def _insert_initial_sql(table: str) -> str:
    return f"INSERT INTO {table} (s, r, i) VALUES (0, 1.0, 0.0)"


def _create_gate_sql(table: str) -> str:
    return f"CREATE TABLE {table} (in_s BIGINT, out_s BIGINT, r DOUBLE, i DOUBLE)"


def _insert_gate_sql(table: str, relation: GateRelation) -> str:
    rows = ", ".join(
        f"({in_s}, {out_s}, {sql_float(re)}, {sql_float(im)})"
        for in_s, out_s, re, im in relation.entries
    )
    return f"INSERT INTO {table} (in_s, out_s, r, i) VALUES {rows}"


def translate_gate_step(
    step: int,
    relation: GateRelation,
    qubits: tuple[int, ...],
    num_qubits: int,
    source_table: str,
    target_table: str,
    gate_table: str,
    epsilon: float,
) -> Statement:
    """One CREATE-TABLE-AS-SELECT applying a (possibly fused) gate relation."""
    qubit_mask = 0
    for q in qubits:
        qubit_mask |= 1 << q
    keep_mask = ((1 << num_qubits) - 1) ^ qubit_mask
    in_expr = local_index_expr(qubits, "t.s")
    out_expr = scatter_expr(qubits, f"(t.s & {keep_mask})", "g.out_s")
    re_expr = "SUM(t.r * g.r - t.i * g.i)"
    im_expr = "SUM(t.r * g.i + t.i * g.r)"
    lines = [
        f"CREATE TABLE {target_table} AS",
        f"SELECT {out_expr} AS s,",
        f"       {re_expr} AS r,",
        f"       {im_expr} AS i",
        f"FROM {source_table} AS t",
        f"INNER JOIN {gate_table} AS g ON g.in_s = {in_expr}",
        f"GROUP BY {out_expr}",
    ]
    if epsilon > 0:
        threshold = sql_float(epsilon * epsilon)
        lines.append(
            f"HAVING {re_expr} * {re_expr} + {im_expr} * {im_expr} > {threshold}"
        )
    return Statement("\n".join(lines), "apply_step", step_index=step,
                     target=target_table)


def _fused_groups(
    circuit: Circuit, window: int
) -> list[tuple[GateRelation, tuple[int, ...], tuple[int, ...]]]:
    """Greedy fusion: extend the current run while it stays within the window
    and its cumulative support stays within the fusable-qubit cap."""
    groups: list[tuple[GateRelation, tuple[int, ...], tuple[int, ...]]] = []
    current: tuple[GateRelation, tuple[int, ...], tuple[int, ...]] | None = None
    for index, gate in enumerate(circuit.gates):
        relation = relation_for_gate(gate)
        if current is not None and len(current[2]) < window:
            union = set(current[1]) | set(gate.qubits)
            if len(union) <= MAX_FUSED_QUBITS:
                fused, combined = fuse(current[0], current[1], relation, gate.qubits)
                current = (fused, combined, current[2] + (index,))
                continue
        if current is not None:
            groups.append(current)
        current = (relation, tuple(gate.qubits), (index,))
    if current is not None:
        groups.append(current)
    return groups


def translate_circuit(circuit: Circuit,
                      options: CodegenOptions | None = None) -> SqlPlan:
    """Full plan: initial state table, deduplicated gate tables, one
    apply_step per fused gate group, and cleanup of superseded state tables."""
    opts = options or CodegenOptions()
    statements: list[Statement] = [
        Statement(_create_state_sql("state_0"), "create_state", target="state_0"),
        Statement(_insert_initial_sql("state_0"), "insert_state", target="state_0"),
    ]
    state_tables = ["state_0"]
    gate_tables: list[str] = []
    created_labels: set[str] = set()
    steps: list[PlanStep] = []

    for step_index, (relation, qubits, gate_indices) in enumerate(
        _fused_groups(circuit, opts.fusion_window)
    ):
        table = gate_table_name(relation.label)
        if relation.label not in created_labels:
            created_labels.add(relation.label)
            gate_tables.append(table)
            statements.append(
                Statement(_create_gate_sql(table), "create_gate", target=table)
            )
            statements.append(
                Statement(_insert_gate_sql(table, relation), "insert_gate",
                          target=table)
            )
        source = state_tables[-1]
        target = f"state_{step_index + 1}"
        statements.append(
            translate_gate_step(
                step_index, relation, qubits, circuit.num_qubits,
                source, target, table, opts.epsilon,
            )
        )
        steps.append(
            PlanStep(step_index, source, target, table, qubits, gate_indices,
                     relation.label)
        )
        state_tables.append(target)
        if not opts.keep_intermediates:
            statements.append(
                Statement(f"DROP TABLE {source}", "cleanup", target=source)
            )

    return SqlPlan(
        num_qubits=circuit.num_qubits,
        statements=tuple(statements),
        state_table_names=tuple(state_tables),
        gate_table_names=tuple(gate_tables),
        steps=tuple(steps),
        options=opts,
    )


def emit_sql(plan: SqlPlan) -> str:
    """Deterministic text form of the plan, one `;`-terminated statement per block."""
    return "".join(statement.sql + ";\n" for statement in plan.statements)
