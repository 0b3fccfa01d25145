"""Runs SQL plans on a backend session and post-processes the results.

One session per run; the executor never caches anything across runs, so
rerunning the same plan on a fresh database must give identical rows.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .backends import BackendAdapter, BackendError, StateRow, create_backend
from .circuit import Circuit
from .codegen import CodegenOptions, SqlPlan, translate_circuit

__all__ = [
    "ExecutionError",
    "NumericError",
    "RunMetrics",
    "RunResult",
    "StateRow",
    "probabilities",
    "run_circuit",
    "run_plan",
    "sample_counts",
    "result_to_dict",
]


class ExecutionError(RuntimeError):
    """A statement failed on the backend; carries the statement index."""

    def __init__(self, statement_index: int, message: str):
        self.statement_index = statement_index
        super().__init__(f"statement {statement_index}: {message}")


class NumericError(RuntimeError):
    """Nonfinite amplitudes observed on read-back."""


@dataclass(frozen=True)
class RunMetrics:
    backend: str
    backend_version: str
    mode: str
    total_wall_ns: int
    step_wall_ns: tuple[int, ...]
    step_rows: tuple[int, ...]
    peak_rows: int
    db_bytes: int | None
    mem_bytes: int | None


@dataclass(frozen=True)
class RunResult:
    final_state: list[StateRow]
    per_step: list[list[StateRow]] | None
    metrics: RunMetrics


def _peak_rss_bytes() -> int | None:
    # Best-effort: ru_maxrss is kilobytes on Linux. Absent platforms report None.
    try:
        import resource

        return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
    except Exception:
        return None


def run_plan(plan: SqlPlan, session: BackendAdapter) -> RunResult:
    """Execute every statement in order on an open session.

    Wall time is sampled around each apply_step; bulk loads are excluded so
    gate-table setup does not contaminate query-execution timings.
    """
    step_wall: list[int] = []
    step_rows: list[int] = []
    started = time.perf_counter_ns()
    for index, statement in enumerate(plan.statements):
        try:
            if statement.kind == "apply_step":
                step_started = time.perf_counter_ns()
                session.execute(statement.sql)
                step_wall.append(time.perf_counter_ns() - step_started)
                step_rows.append(session.table_row_count(statement.target))
            else:
                session.execute(statement.sql)
        except BackendError as exc:
            raise ExecutionError(index, str(exc)) from exc
    final = session.query_state(plan.final_table)
    total = time.perf_counter_ns() - started

    for row in final:
        if not (math.isfinite(row.r) and math.isfinite(row.i)):
            raise NumericError(f"nonfinite amplitude at basis state {row.s}")

    per_step = None
    if plan.options.keep_intermediates:
        per_step = [session.query_state(step.target_table) for step in plan.steps]

    db_bytes = session.database_size()
    metrics = RunMetrics(
        backend=session.info.name,
        backend_version=session.info.version,
        mode="disk" if db_bytes is not None else "memory",
        total_wall_ns=total,
        step_wall_ns=tuple(step_wall),
        step_rows=tuple(step_rows),
        peak_rows=max([1, *step_rows]),
        db_bytes=db_bytes,
        mem_bytes=_peak_rss_bytes(),
    )
    return RunResult(final_state=final, per_step=per_step, metrics=metrics)


def run_circuit(
    circuit: Circuit,
    backend: str = "reference",
    options: CodegenOptions | None = None,
    location=None,
) -> tuple[RunResult, SqlPlan]:
    """Translate and run a circuit on a fresh single-use session."""
    plan = translate_circuit(circuit, options)
    session = create_backend(backend)
    session.open(location)
    try:
        result = run_plan(plan, session)
    finally:
        session.close()
    return result, plan


def probabilities(rows: list[StateRow]) -> list[tuple[int, float]]:
    """Born-rule probabilities (s, r^2 + i^2), ascending by basis state."""
    return [(row.s, row.probability) for row in sorted(rows, key=lambda r: r.s)]


def sample_counts(rows: list[StateRow], shots: int, seed: int) -> dict[int, int]:
    """Multinomial measurement histogram; deterministic for a fixed seed."""
    if not rows:
        raise ValueError("cannot sample from an empty state")
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    ordered = sorted(rows, key=lambda r: r.s)
    weights = np.array([row.probability for row in ordered], dtype=float)
    total = float(weights.sum())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"state is not normalized: probabilities sum to {total!r}")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, weights / total)
    return {row.s: int(c) for row, c in zip(ordered, counts) if c > 0}


def metrics_to_dict(metrics: RunMetrics) -> dict:
    return {
        "backend": metrics.backend,
        "backend_version": metrics.backend_version,
        "mode": metrics.mode,
        "total_wall_ns": metrics.total_wall_ns,
        "step_wall_ns": list(metrics.step_wall_ns),
        "step_rows": list(metrics.step_rows),
        "peak_rows": metrics.peak_rows,
        "db_bytes": metrics.db_bytes,
        "mem_bytes": metrics.mem_bytes,
    }


def result_to_dict(result: RunResult) -> dict:
    """JSON-ready export: final state, probabilities, and metrics."""
    return {
        "final_state": [
            {"s": row.s, "r": row.r, "i": row.i} for row in result.final_state
        ],
        "probabilities": [
            {"s": s, "p": p} for s, p in probabilities(result.final_state)
        ],
        "metrics": metrics_to_dict(result.metrics),
    }
