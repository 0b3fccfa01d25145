"""Command-line entry point: translate, simulate, bench, serve, families.

Exit codes: 0 success, 1 validation error (bad flags, files, circuits,
scenarios), 2 execution error (backend failure, bind failure).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .backends import BackendError, available_backends
from .bench import (
    ORACLE_BACKEND,
    ScenarioError,
    run_benchmark,
    scenario_from_dict,
    summarize,
    write_csv,
    write_json,
)
from .circuit import Circuit, CircuitError, parse_circuit_json
from .codegen import CodegenOptions, emit_sql, translate_circuit
from .executor import (
    ExecutionError,
    NumericError,
    probabilities,
    result_to_dict,
    run_plan,
    sample_counts,
)
from .families import FAMILIES, FamilyError, generate_family
from .oracle import OracleLimitError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_EXECUTION = 2


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on flag validation errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _formatter(prog):
    # Fixed width keeps --help output byte-stable for snapshot tests.
    return argparse.HelpFormatter(prog, width=96)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sqlsim",
        description="Simulate quantum circuits by compiling them to SQL.",
        formatter_class=_formatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add_source_flags(p):
        p.add_argument("--circuit", metavar="PATH",
                       help="circuit JSON file (exclusive with --family)")
        p.add_argument("--family", metavar="NAME",
                       help="circuit family name (see the families command)")
        p.add_argument("--param", action="append", default=[], metavar="K=V",
                       help="family parameter, repeatable (e.g. --param n=3)")

    def add_codegen_flags(p):
        p.add_argument("--fusion", type=int, default=4, metavar="N",
                       help="gate-fusion window, >= 1 (default 4)")
        p.add_argument("--epsilon", type=float, default=1e-12, metavar="E",
                       help="amplitude pruning threshold (default 1e-12)")

    p_translate = sub.add_parser(
        "translate", help="compile a circuit to SQL without running it",
        formatter_class=_formatter,
    )
    add_source_flags(p_translate)
    add_codegen_flags(p_translate)
    p_translate.add_argument("-o", "--output", metavar="PATH",
                             help="write SQL here instead of stdout")

    p_simulate = sub.add_parser(
        "simulate", help="compile and run a circuit on a backend",
        formatter_class=_formatter,
    )
    add_source_flags(p_simulate)
    add_codegen_flags(p_simulate)
    p_simulate.add_argument("--backend", default="reference", metavar="NAME",
                            help="backend adapter or 'oracle' (default reference)")
    p_simulate.add_argument("--keep-intermediates", action="store_true",
                            help="retain per-step state tables in the output")
    p_simulate.add_argument("--shots", type=int, default=None, metavar="S",
                            help="sample a measurement histogram with S shots")
    p_simulate.add_argument("--seed", type=int, default=0, metavar="R",
                            help="sampling seed (default 0)")
    p_simulate.add_argument("--disk", metavar="PATH",
                            help="run against an on-disk database file")
    p_simulate.add_argument("-o", "--output", default="result.json", metavar="PATH",
                            help="result JSON path (default result.json)")

    p_bench = sub.add_parser(
        "bench", help="run a benchmark scenario file across backends",
        formatter_class=_formatter,
    )
    p_bench.add_argument("--scenario", required=True, metavar="PATH",
                         help="scenario JSON file")
    p_bench.add_argument("-o", "--output", default="report.csv", metavar="PATH",
                         help="report CSV path (default report.csv); a JSON "
                              "twin is written next to it")
    p_bench.add_argument("--no-figures", action="store_true",
                         help="skip rendering the PNG figures next to the CSV")

    p_serve = sub.add_parser(
        "serve", help="start the HTTP API and web workbench",
        formatter_class=_formatter,
    )
    p_serve.add_argument("--port", type=int, default=None, metavar="P",
                         help="port to bind (0 picks an ephemeral port)")
    p_serve.add_argument("--host", default=None, metavar="H",
                         help="host to bind (default 127.0.0.1)")
    p_serve.add_argument("--config", metavar="PATH",
                         help="service config JSON (keys: host, port, backends, "
                              "epsilon, ui_dir)")
    p_serve.add_argument("--ui-dir", metavar="PATH",
                         help="directory with the built web UI bundle")

    sub.add_parser(
        "families", help="list the built-in circuit families",
        formatter_class=_formatter,
    )
    return parser


def _parse_params(pairs: list[str]) -> dict:
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise FamilyError(f"--param expects K=V, got {pair!r}")
        key, value = pair.split("=", 1)
        params[key.strip()] = value.strip()
    return params


def _load_circuit(args) -> Circuit:
    if (args.circuit is None) == (args.family is None):
        raise CircuitError("exactly one of --circuit or --family is required")
    if args.circuit is not None:
        if args.param:
            raise CircuitError("--param only applies to --family")
        path = Path(args.circuit)
        if not path.is_file():
            raise CircuitError(f"circuit file not found: {path}")
        return parse_circuit_json(path.read_text())
    return generate_family(args.family, **_parse_params(args.param))


def _options(args, keep: bool = False) -> CodegenOptions:
    return CodegenOptions(fusion_window=args.fusion, epsilon=args.epsilon,
                          keep_intermediates=keep)


def _cmd_translate(args) -> int:
    circuit = _load_circuit(args)
    plan = translate_circuit(circuit, _options(args))
    sql = emit_sql(plan)
    if args.output:
        Path(args.output).write_text(sql)
        print(f"{len(plan.statements)} statements -> {args.output}")
    else:
        sys.stdout.write(sql)
        print(f"{len(plan.statements)} statements", file=sys.stderr)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    circuit = _load_circuit(args)
    options = _options(args, keep=args.keep_intermediates)
    backends = available_backends() + [ORACLE_BACKEND]
    if args.backend not in backends:
        raise CircuitError(
            f"unknown backend {args.backend!r}; configured: {', '.join(backends)}"
        )
    plan = translate_circuit(circuit, options)

    if args.backend == ORACLE_BACKEND:
        if args.disk:
            raise CircuitError("--disk does not apply to the oracle backend")
        from .service import oracle_execute

        final, snapshots, metrics = oracle_execute(
            circuit, plan, options.epsilon, options.keep_intermediates
        )
        doc = {
            "final_state": [{"s": r.s, "r": r.r, "i": r.i} for r in final],
            "probabilities": [{"s": s, "p": p} for s, p in probabilities(final)],
            "metrics": metrics,
        }
    else:
        from .backends import create_backend

        session = create_backend(args.backend)
        session.open(args.disk)
        try:
            result = run_plan(plan, session)
        finally:
            session.close()
        final = result.final_state
        snapshots = result.per_step
        doc = result_to_dict(result)

    if snapshots is not None:
        doc["steps"] = [
            {
                "index": step.index,
                "gate_indices": list(step.gate_indices),
                "rows": [{"s": r.s, "r": r.r, "i": r.i} for r in rows],
            }
            for step, rows in zip(plan.steps, snapshots)
        ]
    if args.shots is not None:
        counts = sample_counts(final, args.shots, args.seed)
        doc["counts"] = {str(s): c for s, c in counts.items()}

    Path(args.output).write_text(json.dumps(doc, indent=2) + "\n")

    print(f"{len(final)} final rows; probabilities:")
    for s, p in probabilities(final):
        print(f"  {s:>8d}  {p:.6f}")
    if args.shots is not None:
        print(f"counts ({args.shots} shots): "
              + ", ".join(f"{s}:{c}" for s, c in sorted(doc["counts"].items(),
                                                        key=lambda kv: int(kv[0]))))
    print(f"result -> {args.output}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    path = Path(args.scenario)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    scenario = scenario_from_dict(doc)
    report = run_benchmark(scenario)

    out_csv = Path(args.output)
    write_csv(report, out_csv)
    out_json = out_csv.with_suffix(".json")
    write_json(report, out_json)
    written = [str(out_csv), str(out_json)]
    if not args.no_figures:
        from .figures import render_report_figures

        figures = render_report_figures(report, out_csv.parent, stem=out_csv.stem)
        written += [str(f) for f in figures]

    for entry in summarize(report):
        median = entry["median_wall_ns"]
        wall = f"{median / 1e6:10.3f} ms" if median is not None else "         --"
        rows = entry["mean_final_rows"]
        rows_text = f"{rows:10.1f}" if rows is not None else "        --"
        print(f"{entry['family']:>20s} {entry['params']:>16s} "
              f"{entry['backend']:>10s} {entry['status']:>8s} {wall} "
              f"rows={rows_text}")
    print("report -> " + ", ".join(written))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import socket

    import uvicorn

    from .service import create_app, load_config

    try:
        config = load_config(args.config)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"sqlsim serve: bad config: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    host = args.host if args.host is not None else config.host
    port = args.port if args.port is not None else config.port
    ui_dir = args.ui_dir if args.ui_dir is not None else config.ui_dir
    if ui_dir is None and Path("frontend/dist/index.html").is_file():
        ui_dir = str(Path("frontend/dist").resolve())
    config = replace(config, host=host, port=port, ui_dir=ui_dir)

    app = create_app(config)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((config.host, config.port))
    except OSError as exc:
        print(f"sqlsim serve: cannot bind {config.host}:{config.port}: {exc}",
              file=sys.stderr)
        sock.close()
        return EXIT_EXECUTION
    actual_port = sock.getsockname()[1]
    print(f"serving on http://{config.host}:{actual_port}", flush=True)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
    return EXIT_OK


def _cmd_families() -> int:
    for descriptor in FAMILIES.values():
        print(f"{descriptor.name}: {descriptor.description}")
        for p in descriptor.params:
            required = "required" if p.required else f"default {p.default}"
            bounds = ""
            if p.minimum is not None or p.maximum is not None:
                bounds = f" in [{p.minimum}, {p.maximum}]"
            print(f"  {p.name} ({p.kind}, {required}){bounds}: {p.description}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "translate":
            return _cmd_translate(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "serve":
            return _cmd_serve(args)
        return _cmd_families()
    except (CircuitError, FamilyError, ScenarioError, ValueError) as exc:
        print(f"sqlsim {args.command}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"sqlsim {args.command}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ExecutionError, BackendError, NumericError, OracleLimitError) as exc:
        print(f"sqlsim {args.command}: {exc}", file=sys.stderr)
        return EXIT_EXECUTION


if __name__ == "__main__":
    sys.exit(main())
