"""HTTP service exposing translation, simulation, families, and benchmarking.

JSON over HTTP; no auth (local tool). Every error body carries a machine
code plus a human message. The service recomputes nothing: response fields
mirror the translator, executor, and bench outputs exactly.
"""
from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import (
    HTMLResponse,
    JSONResponse,
    PlainTextResponse,
    StreamingResponse,
)
from fastapi.staticfiles import StaticFiles

from . import __version__, oracle
from .backends import StateRow, available_backends, create_backend
from .bench import (
    BenchReport,
    ORACLE_BACKEND,
    ScenarioError,
    csv_text,
    row_to_dict,
    run_benchmark,
    scenario_from_dict,
)
from .circuit import Circuit, CircuitError, circuit_from_dict
from .codegen import CodegenOptions, SqlPlan, emit_sql, translate_circuit
from .executor import (
    ExecutionError,
    metrics_to_dict,
    probabilities,
    run_plan,
    sample_counts,
)
from .families import FAMILIES, FamilyError, generate_family
from .oracle import OracleLimitError

STEP_ROW_CAP = 4096


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    backends: tuple[str, ...] = ()
    epsilon: float = 1e-12
    ui_dir: str | None = None


def load_config(path: str | Path | None = None,
                env: dict | None = None) -> ServiceConfig:
    """JSON config file plus SQLSIM_* environment overrides."""
    env = os.environ if env is None else env
    doc: dict = {}
    if path is not None:
        with open(path) as handle:
            doc = json.load(handle)
        unknown = set(doc) - {"host", "port", "backends", "epsilon", "ui_dir"}
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
    host = env.get("SQLSIM_HOST", doc.get("host", "127.0.0.1"))
    port = int(env.get("SQLSIM_PORT", doc.get("port", 8000)))
    backends = doc.get("backends", [])
    if "SQLSIM_BACKENDS" in env:
        backends = [b.strip() for b in env["SQLSIM_BACKENDS"].split(",") if b.strip()]
    epsilon = float(env.get("SQLSIM_EPSILON", doc.get("epsilon", 1e-12)))
    ui_dir = env.get("SQLSIM_UI_DIR", doc.get("ui_dir"))
    return ServiceConfig(host=host, port=port, backends=tuple(backends),
                         epsilon=epsilon, ui_dir=ui_dir)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, **extra):
        self.status = status
        self.code = code
        self.message = message
        self.extra = extra
        super().__init__(message)

    def response(self) -> JSONResponse:
        body = {"code": self.code, "message": self.message, **self.extra}
        return JSONResponse(status_code=self.status, content=body)


class _BenchRun:
    def __init__(self, scenario, total: int):
        self.scenario = scenario
        self.total = total
        self.completed = 0
        self.state = "running"
        self.events: list[dict] = []
        self.report: BenchReport | None = None
        self.report_rows: list[dict] | None = None
        self.error: str | None = None
        self.cond = threading.Condition()

    def push(self, event: str, data) -> None:
        with self.cond:
            self.events.append({"event": event, "data": data})
            self.cond.notify_all()

    def finish(self, state: str) -> None:
        with self.cond:
            self.state = state
            self.cond.notify_all()

    def snapshot(self) -> dict:
        with self.cond:
            doc = {
                "state": self.state,
                "completed": self.completed,
                "total": self.total,
            }
            if self.report_rows is not None:
                doc["report"] = self.report_rows
            if self.error is not None:
                doc["error"] = self.error
            return doc


def _rows_to_json(rows: list[StateRow]) -> list[dict]:
    return [{"s": r.s, "r": r.r, "i": r.i} for r in rows]


def _dense_rows(amplitudes: np.ndarray, epsilon: float) -> list[StateRow]:
    indices = np.nonzero(np.abs(amplitudes) > epsilon)[0]
    return [
        StateRow(int(s), float(amplitudes[s].real), float(amplitudes[s].imag))
        for s in indices
    ]


def _capped(rows: list[StateRow]) -> tuple[list[dict], bool]:
    truncated = len(rows) > STEP_ROW_CAP
    return _rows_to_json(rows[:STEP_ROW_CAP]), truncated


def _resolve_circuit(body: dict) -> Circuit:
    has_circuit = "circuit" in body and body["circuit"] is not None
    has_family = "family" in body and body["family"] is not None
    if has_circuit == has_family:
        raise ApiError(400, "bad_request",
                       "exactly one of 'circuit' or 'family' must be given")
    if has_circuit:
        try:
            return circuit_from_dict(body["circuit"])
        except CircuitError as exc:
            raise ApiError(422, "invalid_circuit", str(exc)) from exc
    family = body["family"]
    if not isinstance(family, dict) or not isinstance(family.get("name"), str):
        raise ApiError(400, "bad_request",
                       "'family' must be {\"name\": ..., \"params\": {...}}")
    params = family.get("params", {})
    if not isinstance(params, dict):
        raise ApiError(400, "bad_request", "'family.params' must be an object")
    try:
        return generate_family(family["name"], **params)
    except FamilyError as exc:
        raise ApiError(422, "invalid_family", str(exc)) from exc


def _resolve_options(body: dict, default_epsilon: float) -> tuple[CodegenOptions, dict]:
    raw = body.get("options", {})
    if not isinstance(raw, dict):
        raise ApiError(400, "bad_request", "'options' must be an object")
    unknown = set(raw) - {"fusion_window", "epsilon", "keep_intermediates",
                          "shots", "seed"}
    if unknown:
        raise ApiError(400, "bad_request", f"unknown options {sorted(unknown)}")
    try:
        options = CodegenOptions(
            fusion_window=int(raw.get("fusion_window", 4)),
            epsilon=float(raw.get("epsilon", default_epsilon)),
            keep_intermediates=bool(raw.get("keep_intermediates", False)),
        )
    except (TypeError, ValueError) as exc:
        raise ApiError(400, "bad_request", f"bad options: {exc}") from exc
    shots = raw.get("shots")
    seed = raw.get("seed", 0)
    if shots is not None and (not isinstance(shots, int) or shots < 1):
        raise ApiError(400, "bad_request", f"shots must be a positive int, got {shots}")
    if not isinstance(seed, int):
        raise ApiError(400, "bad_request", f"seed must be an int, got {seed}")
    return options, {"shots": shots, "seed": seed}


def oracle_execute(circuit: Circuit, plan: SqlPlan, epsilon: float,
                    keep: bool):
    """Dense-path execution mirroring the plan's fused step boundaries."""
    if circuit.num_qubits > oracle.MAX_ORACLE_QUBITS:
        raise OracleLimitError(
            f"dense oracle supports at most {oracle.MAX_ORACLE_QUBITS} qubits, "
            f"got {circuit.num_qubits}"
        )
    amplitudes = np.zeros(1 << circuit.num_qubits, dtype=complex)
    amplitudes[0] = 1.0
    step_wall: list[int] = []
    step_rows: list[int] = []
    snapshots: list[list[StateRow]] = []
    done = 0
    started = time.perf_counter_ns()
    for step in plan.steps:
        boundary = step.gate_indices[-1] + 1
        step_started = time.perf_counter_ns()
        while done < boundary:
            amplitudes = oracle.apply_gate(amplitudes, circuit.num_qubits,
                                           circuit.gates[done])
            done += 1
        step_wall.append(time.perf_counter_ns() - step_started)
        rows = _dense_rows(amplitudes, epsilon)
        step_rows.append(len(rows))
        if keep:
            snapshots.append(rows)
    total = time.perf_counter_ns() - started
    final = _dense_rows(amplitudes, epsilon)
    metrics = {
        "backend": ORACLE_BACKEND,
        "backend_version": __version__,
        "mode": "memory",
        "total_wall_ns": total,
        "step_wall_ns": step_wall,
        "step_rows": step_rows,
        "peak_rows": 1 << circuit.num_qubits,
        "db_bytes": None,
        "mem_bytes": None,
    }
    return final, (snapshots if keep else None), metrics


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="sqlsim", version=__version__)

    configured = list(config.backends) or (available_backends() + [ORACLE_BACKEND])
    runs: dict[str, _BenchRun] = {}
    runs_lock = threading.Lock()
    bench_lock = threading.Lock()  # serializes benchmark execution for timing integrity

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return exc.response()

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception as exc:
            raise ApiError(400, "bad_request", f"body is not valid JSON: {exc}")
        if not isinstance(body, dict):
            raise ApiError(400, "bad_request", "body must be a JSON object")
        return body

    def _check_backend(name) -> str:
        if not isinstance(name, str) or name not in configured:
            raise ApiError(
                400, "unknown_backend",
                f"backend {name!r} is not configured",
                configured=configured,
            )
        return name

    @app.get("/families")
    def families_catalog():
        catalog = []
        for descriptor in FAMILIES.values():
            catalog.append({
                "name": descriptor.name,
                "description": descriptor.description,
                "params": [
                    {
                        "name": p.name,
                        "type": p.kind,
                        "required": p.required,
                        "default": p.default,
                        "min": p.minimum,
                        "max": p.maximum,
                        "description": p.description,
                    }
                    for p in descriptor.params
                ],
            })
        return catalog

    @app.get("/backends")
    def backends_catalog():
        entries = []
        for name in configured:
            if name == ORACLE_BACKEND:
                entries.append({
                    "name": ORACLE_BACKEND,
                    "version": __version__,
                    "supports_disk": False,
                    "kind": "dense",
                })
            else:
                info = create_backend(name).info
                entries.append({
                    "name": info.name,
                    "version": info.version,
                    "supports_disk": info.supports_disk,
                    "kind": "sql",
                })
        return entries

    def _translate(body: dict) -> tuple[Circuit, SqlPlan, str]:
        circuit = _resolve_circuit(body)
        options, _ = _resolve_options(body, config.epsilon)
        plan = translate_circuit(circuit, options)
        return circuit, plan, emit_sql(plan)

    @app.post("/translate")
    async def translate(request: Request):
        body = await _json_body(request)
        unknown = set(body) - {"circuit", "family", "options", "backend"}
        if unknown:
            raise ApiError(400, "bad_request", f"unknown fields {sorted(unknown)}")
        _, plan, sql = _translate(body)
        return {
            "sql": sql,
            "statement_count": len(plan.statements),
            "state_tables": list(plan.state_table_names),
            "gate_tables": list(plan.gate_table_names),
        }

    @app.post("/simulate")
    async def simulate(request: Request):
        body = await _json_body(request)
        unknown = set(body) - {"circuit", "family", "backend", "options"}
        if unknown:
            raise ApiError(400, "bad_request", f"unknown fields {sorted(unknown)}")
        backend = _check_backend(body.get("backend", "reference"))
        circuit = _resolve_circuit(body)
        options, sampling = _resolve_options(body, config.epsilon)
        plan = translate_circuit(circuit, options)
        sql = emit_sql(plan)

        if backend == ORACLE_BACKEND:
            try:
                final, snapshots, metrics = oracle_execute(
                    circuit, plan, options.epsilon, options.keep_intermediates
                )
            except OracleLimitError as exc:
                raise ApiError(507, "oracle_refused", str(exc)) from exc
        else:
            session = create_backend(backend)
            session.open(None)
            try:
                result = run_plan(plan, session)
            except ExecutionError as exc:
                raise ApiError(
                    500, "execution_error", str(exc),
                    statement_index=exc.statement_index,
                ) from exc
            finally:
                session.close()
            final = result.final_state
            snapshots = result.per_step
            metrics = metrics_to_dict(result.metrics)

        response: dict = {
            "final_state": _rows_to_json(final),
            "probabilities": [{"s": s, "p": p} for s, p in probabilities(final)],
            "sql": sql,
            "metrics": metrics,
        }
        if snapshots is not None:
            steps = []
            for step, rows in zip(plan.steps, snapshots):
                rows_json, truncated = _capped(rows)
                steps.append({
                    "index": step.index,
                    "gate_indices": list(step.gate_indices),
                    "sql": next(
                        s.sql for s in plan.statements
                        if s.kind == "apply_step" and s.step_index == step.index
                    ),
                    "rows": rows_json,
                    "truncated": truncated,
                })
            response["steps"] = steps
        if sampling["shots"]:
            try:
                counts = sample_counts(final, sampling["shots"], sampling["seed"])
            except ValueError as exc:
                raise ApiError(422, "invalid_state", str(exc)) from exc
            response["counts"] = {str(s): c for s, c in counts.items()}
        return response

    def _parse_scenario(body: dict):
        try:
            return scenario_from_dict(body)
        except ScenarioError as exc:
            raise ApiError(400, "invalid_scenario", str(exc)) from exc

    @app.post("/benchmark")
    def benchmark(body: dict):
        scenario = _parse_scenario(body)
        with bench_lock:
            report = run_benchmark(scenario)
        return {"rows": [row_to_dict(r) for r in report.rows]}

    def _start_run(scenario) -> str:
        total = (
            len(scenario.points()) * len(scenario.backends) * scenario.repetitions
        )
        run = _BenchRun(scenario, total)
        run_id = uuid.uuid4().hex[:12]
        with runs_lock:
            runs[run_id] = run

        def worker():
            def on_progress(completed, total_rows, row):
                run.completed = completed
                run.push("progress", {
                    "completed": completed,
                    "total": total_rows,
                    "row": row_to_dict(row),
                })

            try:
                with bench_lock:
                    report = run_benchmark(scenario, on_progress=on_progress)
                run.report = report
                run.report_rows = [row_to_dict(r) for r in report.rows]
                run.push("report", run.report_rows)
                run.finish("done")
            except Exception as exc:  # scenario validated, so this is unexpected
                run.error = str(exc)
                run.push("error", {"message": str(exc)})
                run.finish("failed")

        threading.Thread(target=worker, daemon=True).start()
        return run_id

    @app.post("/benchmark/start")
    def benchmark_start(body: dict):
        scenario = _parse_scenario(body)
        run_id = _start_run(scenario)
        return {"run_id": run_id, "events": f"/benchmark/runs/{run_id}/events"}

    def _get_run(run_id: str) -> _BenchRun:
        with runs_lock:
            run = runs.get(run_id)
        if run is None:
            raise ApiError(404, "unknown_run", f"no benchmark run {run_id!r}")
        return run

    @app.get("/benchmark/runs/{run_id}")
    def benchmark_poll(run_id: str):
        return _get_run(run_id).snapshot()

    @app.get("/benchmark/runs/{run_id}/report.csv")
    def benchmark_csv(run_id: str):
        run = _get_run(run_id)
        if run.report is None:
            raise ApiError(409, "not_finished",
                           f"benchmark run {run_id} has not finished")
        return PlainTextResponse(csv_text(run.report), media_type="text/csv")

    @app.get("/benchmark/runs/{run_id}/events")
    def benchmark_events(run_id: str):
        run = _get_run(run_id)

        def stream():
            index = 0
            while True:
                with run.cond:
                    while index >= len(run.events) and run.state == "running":
                        run.cond.wait(timeout=10.0)
                    pending = run.events[index:]
                    index = len(run.events)
                    state = run.state
                for event in pending:
                    yield (
                        f"event: {event['event']}\n"
                        f"data: {json.dumps(event['data'])}\n\n"
                    )
                if state != "running" and index >= len(run.events):
                    yield "event: done\ndata: {}\n\n"
                    return

        return StreamingResponse(stream(), media_type="text/event-stream")

    ui_dir = Path(config.ui_dir) if config.ui_dir else None
    if ui_dir is not None and ui_dir.is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return (
                "<html><body><h1>sqlsim API</h1>"
                "<p>UI bundle not configured; the JSON API is live. "
                "See /families and /backends.</p></body></html>"
            )

    return app
