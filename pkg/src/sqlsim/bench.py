"""Parameter-sweep benchmark runner comparing backends across circuit families.

Runs every (point, backend, repetition) sequentially in a fresh session so
timings stay uncontaminated; oracle refusals are recorded as rows, never
dropped. Reports export as CSV (fixed column order) and JSON.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import statistics
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import families
from .backends import available_backends, create_backend
from .circuit import Circuit
from .codegen import CodegenOptions, translate_circuit
from .executor import run_plan
from .families import FamilyError, generate_family
from .oracle import OracleLimitError, simulate_dense

CSV_HEADER = [
    "family", "params", "backend", "rep", "wall_ns", "step_wall_ns",
    "final_rows", "peak_rows", "mem_bytes", "status",
]

ORACLE_BACKEND = "oracle"


class ScenarioError(ValueError):
    """Invalid benchmark scenario configuration."""


@dataclass(frozen=True)
class Scenario:
    family: str
    parameters: dict[str, list]
    backends: tuple[str, ...]
    repetitions: int
    fusion_window: int = 4
    epsilon: float = 1e-12
    mode: str = "memory"

    def points(self) -> list[dict]:
        names = list(self.parameters)
        combos = itertools.product(*(self.parameters[k] for k in names))
        return [dict(zip(names, values)) for values in combos]

    def codegen_options(self) -> CodegenOptions:
        return CodegenOptions(fusion_window=self.fusion_window,
                              epsilon=self.epsilon)


@dataclass(frozen=True)
class BenchRow:
    family: str
    params: dict
    backend: str
    rep: int
    wall_ns: int | None
    step_wall_ns: int | None
    final_rows: int | None
    peak_rows: int | None
    mem_bytes: int | None
    status: str  # success | refused | failed
    error: str | None = None


@dataclass
class BenchReport:
    scenario: Scenario
    rows: list[BenchRow] = field(default_factory=list)


def _expand_values(raw) -> list:
    """One parameter's sweep values: scalar, list, from/to/step dict, or 'a..b[..s]'."""
    if isinstance(raw, list):
        return list(raw)
    if isinstance(raw, dict):
        unknown = set(raw) - {"from", "to", "step"}
        if unknown or "from" not in raw or "to" not in raw:
            raise ScenarioError(f"range needs from/to[/step], got {raw}")
        step = int(raw.get("step", 1))
        if step < 1:
            raise ScenarioError(f"range step must be >= 1, got {step}")
        return list(range(int(raw["from"]), int(raw["to"]) + 1, step))
    if isinstance(raw, str) and ".." in raw:
        pieces = raw.split("..")
        if len(pieces) not in (2, 3) or not all(
            p.lstrip("-").isdigit() for p in pieces
        ):
            raise ScenarioError(f"bad range syntax {raw!r}, want a..b or a..b..step")
        start, stop = int(pieces[0]), int(pieces[1])
        step = int(pieces[2]) if len(pieces) == 3 else 1
        if step < 1:
            raise ScenarioError(f"range step must be >= 1, got {step}")
        return list(range(start, stop + 1, step))
    return [raw]


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be an object")
    unknown = set(doc) - {"family", "params", "backends", "repetitions", "options"}
    if unknown:
        raise ScenarioError(f"unknown scenario fields {sorted(unknown)}")
    family = doc.get("family")
    if family not in families.FAMILIES:
        raise ScenarioError(f"unknown family {family!r}")
    params_raw = doc.get("params", {})
    if not isinstance(params_raw, dict):
        raise ScenarioError("params must be an object")
    parameters = {k: _expand_values(v) for k, v in params_raw.items()}
    backends = doc.get("backends")
    if not isinstance(backends, list) or not backends:
        raise ScenarioError("backends must be a non-empty list")
    reps = doc.get("repetitions", 1)
    if not isinstance(reps, int) or isinstance(reps, bool) or reps < 1:
        raise ScenarioError(f"repetitions must be >= 1, got {reps}")
    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise ScenarioError("options must be an object")
    unknown = set(options) - {"fusion_window", "epsilon", "mode"}
    if unknown:
        raise ScenarioError(f"unknown option fields {sorted(unknown)}")
    scenario = Scenario(
        family=family,
        parameters=parameters,
        backends=tuple(backends),
        repetitions=reps,
        fusion_window=int(options.get("fusion_window", 4)),
        epsilon=float(options.get("epsilon", 1e-12)),
        mode=str(options.get("mode", "memory")),
    )
    validate_scenario(scenario)
    return scenario


def validate_scenario(scenario: Scenario) -> None:
    configured = set(available_backends()) | {ORACLE_BACKEND}
    for name in scenario.backends:
        if name not in configured:
            raise ScenarioError(
                f"backend {name!r} is not configured; configured: "
                f"{', '.join(sorted(configured))}"
            )
        if name != ORACLE_BACKEND and scenario.mode == "disk":
            if not create_backend(name).info.supports_disk:
                raise ScenarioError(f"backend {name!r} does not support disk mode")
    if scenario.mode not in ("memory", "disk"):
        raise ScenarioError(f"mode must be memory or disk, got {scenario.mode!r}")
    if scenario.repetitions < 1:
        raise ScenarioError("repetitions must be >= 1")
    scenario.codegen_options()
    points = scenario.points()
    if not points:
        raise ScenarioError("scenario sweeps no points")
    for point in points:
        try:
            generate_family(scenario.family, **point)
        except FamilyError as exc:
            raise ScenarioError(str(exc)) from exc


def _run_oracle_point(circuit: Circuit, epsilon: float) -> tuple[int, int, int]:
    """Timed dense run: (wall_ns, nonzero amplitude count, held entries)."""
    started = time.perf_counter_ns()
    dense = simulate_dense(circuit)
    wall = time.perf_counter_ns() - started
    threshold = epsilon if epsilon > 0 else 0.0
    final_rows = int(np.count_nonzero(np.abs(dense.amplitudes) > threshold))
    return wall, final_rows, 1 << circuit.num_qubits


def run_benchmark(
    scenario: Scenario,
    on_progress: Callable[[int, int, BenchRow], None] | None = None,
) -> BenchReport:
    """Every (point, backend, repetition), sequential, fresh session per run."""
    validate_scenario(scenario)
    report = BenchReport(scenario=scenario)
    points = scenario.points()
    total = len(points) * len(scenario.backends) * scenario.repetitions
    options = scenario.codegen_options()
    for point in points:
        circuit = generate_family(scenario.family, **point)
        plan = translate_circuit(circuit, options)
        for backend in scenario.backends:
            for rep in range(scenario.repetitions):
                row = _run_one(scenario, circuit, plan, point, backend, rep)
                report.rows.append(row)
                if on_progress is not None:
                    on_progress(len(report.rows), total, row)
    return report


def _run_one(scenario, circuit, plan, point, backend, rep) -> BenchRow:
    base = dict(family=scenario.family, params=dict(point), backend=backend, rep=rep)
    if backend == ORACLE_BACKEND:
        try:
            wall, final_rows, held = _run_oracle_point(circuit, scenario.epsilon)
        except OracleLimitError as exc:
            return BenchRow(
                **base, wall_ns=None, step_wall_ns=None, final_rows=None,
                peak_rows=None, mem_bytes=None, status="refused", error=str(exc),
            )
        except Exception as exc:
            return BenchRow(
                **base, wall_ns=None, step_wall_ns=None, final_rows=None,
                peak_rows=None, mem_bytes=None, status="failed", error=str(exc),
            )
        return BenchRow(
            **base, wall_ns=wall, step_wall_ns=wall, final_rows=final_rows,
            peak_rows=held, mem_bytes=None, status="success",
        )

    tmpdir: tempfile.TemporaryDirectory | None = None
    location = None
    if scenario.mode == "disk":
        tmpdir = tempfile.TemporaryDirectory(prefix="sqlsim_bench_")
        location = str(Path(tmpdir.name) / "bench.db")
    session = create_backend(backend)
    try:
        session.open(location)
        result = run_plan(plan, session)
    except Exception as exc:
        return BenchRow(
            **base, wall_ns=None, step_wall_ns=None, final_rows=None,
            peak_rows=None, mem_bytes=None, status="failed", error=str(exc),
        )
    finally:
        session.close()
        if tmpdir is not None:
            tmpdir.cleanup()
    metrics = result.metrics
    return BenchRow(
        **base,
        wall_ns=metrics.total_wall_ns,
        step_wall_ns=sum(metrics.step_wall_ns),
        final_rows=len(result.final_state),
        peak_rows=metrics.peak_rows,
        mem_bytes=metrics.mem_bytes,
        status="success",
    )


def format_params(params: dict) -> str:
    return ";".join(f"{k}={params[k]}" for k in params)


def row_to_dict(row: BenchRow) -> dict:
    doc = {
        "family": row.family,
        "params": row.params,
        "backend": row.backend,
        "rep": row.rep,
        "wall_ns": row.wall_ns,
        "step_wall_ns": row.step_wall_ns,
        "final_rows": row.final_rows,
        "peak_rows": row.peak_rows,
        "mem_bytes": row.mem_bytes,
        "status": row.status,
    }
    if row.error is not None:
        doc["error"] = row.error
    return doc


def csv_text(report: BenchReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(CSV_HEADER)
    for row in report.rows:
        writer.writerow([
            row.family,
            format_params(row.params),
            row.backend,
            row.rep,
            "" if row.wall_ns is None else row.wall_ns,
            "" if row.step_wall_ns is None else row.step_wall_ns,
            "" if row.final_rows is None else row.final_rows,
            "" if row.peak_rows is None else row.peak_rows,
            "" if row.mem_bytes is None else row.mem_bytes,
            row.status,
        ])
    return buffer.getvalue()


def write_csv(report: BenchReport, path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(csv_text(report))


def write_json(report: BenchReport, path: str | Path) -> None:
    with open(path, "w") as handle:
        json.dump([row_to_dict(r) for r in report.rows], handle, indent=2)
        handle.write("\n")


def summarize(report: BenchReport) -> list[dict]:
    """Per (family, point, backend): wall-time spread and mean row counts.

    Refused cells stay marked refused instead of reporting zeros.
    """
    if not report.rows:
        raise ValueError("cannot summarize an empty report")
    buckets: dict[tuple, list[BenchRow]] = {}
    order: list[tuple] = []
    for row in report.rows:
        key = (row.family, format_params(row.params), row.backend)
        if key not in buckets:
            buckets[key] = []
            order.append(key)
        buckets[key].append(row)
    summary = []
    for key in order:
        rows = buckets[key]
        succeeded = [r for r in rows if r.status == "success"]
        entry: dict = {
            "family": key[0],
            "params": key[1],
            "backend": key[2],
            "runs": len(rows),
            "status": _cell_status(rows),
        }
        if succeeded:
            walls = [r.wall_ns for r in succeeded]
            entry.update(
                median_wall_ns=int(statistics.median(walls)),
                min_wall_ns=min(walls),
                max_wall_ns=max(walls),
                mean_final_rows=statistics.fmean(r.final_rows for r in succeeded),
                mean_peak_rows=statistics.fmean(r.peak_rows for r in succeeded),
            )
        else:
            entry.update(
                median_wall_ns=None, min_wall_ns=None, max_wall_ns=None,
                mean_final_rows=None, mean_peak_rows=None,
            )
        summary.append(entry)
    return summary


def _cell_status(rows: list[BenchRow]) -> str:
    statuses = {r.status for r in rows}
    if statuses == {"success"}:
        return "success"
    if "failed" in statuses:
        return "failed"
    if statuses == {"refused"}:
        return "refused"
    return "mixed"
