import csv
import json

import pytest

from sqlsim.bench import (
    BenchReport,
    BenchRow,
    CSV_HEADER,
    Scenario,
    ScenarioError,
    format_params,
    run_benchmark,
    scenario_from_dict,
    summarize,
    write_csv,
    write_json,
)


def _ghz_scenario(**overrides) -> dict:
    doc = {
        "family": "ghz",
        "params": {"n": [4, 8, 12]},
        "backends": ["reference", "oracle"],
        "repetitions": 3,
    }
    doc.update(overrides)
    return doc


def test_scenario_range_forms():
    for params in ({"n": {"from": 4, "to": 12, "step": 4}}, {"n": "4..12..4"},
                   {"n": [4, 8, 12]}):
        scenario = scenario_from_dict(_ghz_scenario(params=params))
        assert scenario.points() == [{"n": 4}, {"n": 8}, {"n": 12}]


def test_scenario_validation_errors():
    with pytest.raises(ScenarioError, match="not configured"):
        scenario_from_dict(_ghz_scenario(backends=["reference", "mariadb"]))
    with pytest.raises(ScenarioError, match="repetitions"):
        scenario_from_dict(_ghz_scenario(repetitions=0))
    with pytest.raises(ScenarioError, match="unknown family"):
        scenario_from_dict(_ghz_scenario(family="bell_pairs"))
    with pytest.raises(ScenarioError, match="backends"):
        scenario_from_dict(_ghz_scenario(backends=[]))
    with pytest.raises(ScenarioError, match="disk"):
        scenario_from_dict(
            _ghz_scenario(backends=["reference"], options={"mode": "disk"})
        )
    with pytest.raises(ScenarioError, match="n must be"):
        scenario_from_dict(_ghz_scenario(params={"n": [0]}))
    with pytest.raises(ScenarioError, match="sweeps no points"):
        scenario_from_dict(_ghz_scenario(params={"n": []}))


def test_ghz_sweep_report():
    report = run_benchmark(scenario_from_dict(_ghz_scenario()))
    assert len(report.rows) == 3 * 2 * 3  # points x backends x reps
    assert all(row.status == "success" for row in report.rows)
    sql_rows = [row for row in report.rows if row.backend == "reference"]
    assert all(row.final_rows == 2 for row in sql_rows)
    oracle_rows = [row for row in report.rows if row.backend == "oracle"]
    assert all(row.final_rows == 2 for row in oracle_rows)
    assert {row.params["n"] for row in report.rows} == {4, 8, 12}


def test_sparse_chain_oracle_refusal():
    scenario = scenario_from_dict({
        "family": "sparse_chain",
        "params": {"n": [30, 40], "depth": [50], "seed": [1]},
        "backends": ["reference", "oracle"],
        "repetitions": 1,
    })
    report = run_benchmark(scenario)
    assert len(report.rows) == 4
    by_backend = {}
    for row in report.rows:
        by_backend.setdefault(row.backend, []).append(row)
    assert all(r.status == "refused" for r in by_backend["oracle"])
    assert all("26" in r.error for r in by_backend["oracle"])
    assert all(r.status == "success" and r.final_rows == 1 and r.peak_rows == 1
               for r in by_backend["reference"])


def test_equal_superposition_dense_rows():
    scenario = scenario_from_dict({
        "family": "equal_superposition",
        "params": {"n": [12]},
        "backends": ["reference"],
        "repetitions": 1,
    })
    report = run_benchmark(scenario)
    assert report.rows[0].final_rows == 4096


def test_progress_callback_order():
    seen = []
    scenario = scenario_from_dict(_ghz_scenario(params={"n": [2]}, repetitions=2))
    run_benchmark(scenario, on_progress=lambda done, total, row: seen.append(
        (done, total, row.backend, row.rep)))
    assert seen == [
        (1, 4, "reference", 0), (2, 4, "reference", 1),
        (3, 4, "oracle", 0), (4, 4, "oracle", 1),
    ]


def _synthetic_report() -> BenchReport:
    scenario = Scenario("ghz", {"n": [2]}, ("reference",), 3)
    rows = [
        BenchRow("ghz", {"n": 2}, "reference", rep, wall, wall, 2, 2, None,
                 "success")
        for rep, wall in enumerate((5_000_000, 3_000_000, 9_000_000))
    ]
    rows.append(BenchRow("ghz", {"n": 30}, "oracle", 0, None, None, None, None,
                         None, "refused", error="too big"))
    return BenchReport(scenario=scenario, rows=rows)


def test_summarize_median_and_refused():
    summary = summarize(_synthetic_report())
    success = summary[0]
    assert success["median_wall_ns"] == 5_000_000
    assert success["min_wall_ns"] == 3_000_000
    assert success["max_wall_ns"] == 9_000_000
    assert success["mean_final_rows"] == 2
    refused = summary[1]
    assert refused["status"] == "refused"
    assert refused["median_wall_ns"] is None


def test_summarize_empty_report_rejected():
    with pytest.raises(ValueError):
        summarize(BenchReport(scenario=Scenario("ghz", {"n": [2]},
                                                ("reference",), 1)))


def test_ghz_summary_row_count_constant():
    report = run_benchmark(scenario_from_dict(_ghz_scenario()))
    for entry in summarize(report):
        if entry["backend"] == "reference":
            assert entry["mean_final_rows"] == 2


def test_csv_and_json_outputs(tmp_path):
    report = run_benchmark(scenario_from_dict(_ghz_scenario(repetitions=1)))
    csv_path = tmp_path / "report.csv"
    json_path = tmp_path / "report.json"
    write_csv(report, csv_path)
    write_json(report, json_path)
    with open(csv_path, newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + len(report.rows)
    assert rows[1][0] == "ghz"
    assert rows[1][1] == "n=4"
    assert rows[1][9] == "success"
    parsed = json.loads(json_path.read_text())
    assert len(parsed) == len(report.rows)
    assert parsed[0]["params"] == {"n": 4}


def test_format_params_order_preserved():
    assert format_params({"n": 4, "depth": 7}) == "n=4;depth=7"


def test_rerun_deterministic_row_counts():
    scenario = scenario_from_dict(_ghz_scenario(repetitions=1))
    first = run_benchmark(scenario)
    second = run_benchmark(scenario)
    fixed = lambda report: [
        (r.family, format_params(r.params), r.backend, r.rep, r.final_rows,
         r.peak_rows, r.status)
        for r in report.rows
    ]
    assert fixed(first) == fixed(second)
