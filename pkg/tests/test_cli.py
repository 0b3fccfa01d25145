import json
import re
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import pytest

from sqlsim.cli import main

SNAPSHOTS = Path(__file__).parent / "snapshots"


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.parametrize(
    "name,argv",
    [
        ("help_root", ["--help"]),
        ("help_translate", ["translate", "--help"]),
        ("help_simulate", ["simulate", "--help"]),
        ("help_bench", ["bench", "--help"]),
        ("help_serve", ["serve", "--help"]),
        ("help_families", ["families", "--help"]),
    ],
)
def test_help_snapshots(capsys, name, argv):
    with pytest.raises(SystemExit) as exit_info:
        main(argv)
    assert exit_info.value.code == 0
    out = capsys.readouterr().out
    assert out == (SNAPSHOTS / f"{name}.txt").read_text()


def test_help_documents_every_flag():
    text = (SNAPSHOTS / "help_simulate.txt").read_text()
    for flag in ("--circuit", "--family", "--param", "--fusion", "--epsilon",
                 "--backend", "--keep-intermediates", "--shots", "--seed",
                 "--disk", "-o"):
        assert flag in text


def test_translate_family_to_stdout(capsys):
    code, out, err = _run(capsys, ["translate", "--family", "ghz",
                                   "--param", "n=3", "--fusion", "1"])
    assert code == 0
    assert out.count("INNER JOIN") == 3
    assert "12 statements" in err


def test_translate_deterministic_files(tmp_path, capsys):
    paths = [tmp_path / "a.sql", tmp_path / "b.sql"]
    for path in paths:
        code, _, _ = _run(capsys, ["translate", "--family", "ghz",
                                   "--param", "n=3", "-o", str(path)])
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_translate_missing_file(capsys):
    code, _, err = _run(capsys, ["translate", "--circuit", "missing.json"])
    assert code == 1
    assert "not found" in err


def test_translate_requires_one_source(capsys):
    code, _, err = _run(capsys, ["translate"])
    assert code == 1
    assert "exactly one" in err
    code, _, err = _run(capsys, ["translate", "--circuit", "x.json",
                                 "--family", "ghz"])
    assert code == 1


def test_unknown_flag_exits_one(capsys):
    with pytest.raises(SystemExit) as exit_info:
        main(["translate", "--frobnicate"])
    assert exit_info.value.code == 1


def test_simulate_ghz_probabilities(tmp_path, capsys):
    out_path = tmp_path / "ghz.json"
    code, out, _ = _run(capsys, [
        "simulate", "--family", "ghz", "--param", "n=3",
        "--backend", "reference", "-o", str(out_path),
    ])
    assert code == 0
    doc = json.loads(out_path.read_text())
    probs = {entry["s"]: entry["p"] for entry in doc["probabilities"]}
    assert set(probs) == {0, 7}
    assert abs(probs[0] - 0.5) <= 1e-9
    assert abs(probs[7] - 0.5) <= 1e-9
    assert "0.500000" in out


def test_simulate_parity_check_outcome(tmp_path, capsys):
    out_path = tmp_path / "parity.json"
    code, out, _ = _run(capsys, [
        "simulate", "--family", "parity_check", "--param", "n=3",
        "--param", "input_bits=11", "--backend", "reference",
        "--shots", "50", "-o", str(out_path),
    ])
    assert code == 0
    doc = json.loads(out_path.read_text())
    # bits 1,1 -> ancilla parity 0: state |011> = index 3
    assert doc["final_state"] == [{"s": 3, "r": 1.0, "i": 0.0}]
    assert doc["counts"] == {"3": 50}


def test_simulate_unknown_backend(capsys):
    code, _, err = _run(capsys, ["simulate", "--family", "ghz",
                                 "--param", "n=2", "--backend", "nope"])
    assert code == 1
    assert "reference" in err and "sqlite" in err


def test_simulate_oracle_backend(tmp_path, capsys):
    out_path = tmp_path / "oracle.json"
    code, _, _ = _run(capsys, [
        "simulate", "--family", "ghz", "--param", "n=2",
        "--backend", "oracle", "-o", str(out_path),
    ])
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["metrics"]["backend"] == "oracle"
    assert [row["s"] for row in doc["final_state"]] == [0, 3]


def test_simulate_on_disk(tmp_path, capsys):
    db = tmp_path / "run.db"
    out_path = tmp_path / "disk.json"
    code, _, _ = _run(capsys, [
        "simulate", "--family", "ghz", "--param", "n=2",
        "--backend", "sqlite", "--disk", str(db), "-o", str(out_path),
    ])
    assert code == 0
    assert db.is_file() and db.stat().st_size > 0
    assert json.loads(out_path.read_text())["metrics"]["mode"] == "disk"


def _scenario_file(tmp_path, doc=None) -> Path:
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc or {
        "family": "sparse_chain",
        "params": {"n": [6, 10], "depth": [20], "seed": [1]},
        "backends": ["reference", "sqlite"],
        "repetitions": 2,
    }))
    return path


def test_bench_writes_reports_and_figures(tmp_path, capsys):
    scenario = _scenario_file(tmp_path)
    out_csv = tmp_path / "report.csv"
    code, out, _ = _run(capsys, ["bench", "--scenario", str(scenario),
                                 "-o", str(out_csv)])
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == ("family,params,backend,rep,wall_ns,step_wall_ns,"
                        "final_rows,peak_rows,mem_bytes,status")
    assert len(lines) == 1 + 2 * 2 * 2
    assert all(",1," in line or line.endswith("success") for line in lines[1:])
    # every SQL point of a sparse chain holds exactly one row
    assert all(line.split(",")[6] == "1" for line in lines[1:])
    assert (tmp_path / "report.json").is_file()
    assert (tmp_path / "report_walltime.png").is_file()
    assert (tmp_path / "report_rows.png").is_file()
    assert "sparse_chain" in out


def test_bench_no_figures(tmp_path, capsys):
    scenario = _scenario_file(tmp_path, {
        "family": "ghz", "params": {"n": [2]},
        "backends": ["reference"], "repetitions": 1,
    })
    out_csv = tmp_path / "r.csv"
    code, _, _ = _run(capsys, ["bench", "--scenario", str(scenario),
                               "-o", str(out_csv), "--no-figures"])
    assert code == 0
    assert not (tmp_path / "r_walltime.png").exists()


def test_bench_invalid_scenario(tmp_path, capsys):
    scenario = _scenario_file(tmp_path, {
        "family": "ghz", "params": {"n": [2]},
        "backends": ["reference"], "repetitions": 0,
    })
    code, _, err = _run(capsys, ["bench", "--scenario", str(scenario)])
    assert code == 1
    assert "repetitions" in err


def test_bench_missing_scenario(capsys):
    code, _, err = _run(capsys, ["bench", "--scenario", "absent.json"])
    assert code == 1
    assert "not found" in err


def test_families_listing(capsys):
    code, out, _ = _run(capsys, ["families"])
    assert code == 0
    for family in ("ghz", "equal_superposition", "parity_check",
                   "sparse_chain", "random_dense"):
        assert family in out


def test_serve_bad_config(tmp_path, capsys):
    bad = tmp_path / "config.json"
    bad.write_text("{nope")
    code, _, err = _run(capsys, ["serve", "--config", str(bad)])
    assert code == 1
    assert "bad config" in err


def test_serve_ephemeral_port_and_families_endpoint():
    process = subprocess.Popen(
        [sys.executable, "-m", "sqlsim.cli", "serve", "--port", "0"],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True,
    )
    try:
        line = process.stdout.readline()
        match = re.search(r"http://127\.0\.0\.1:(\d+)", line)
        assert match, line
        port = int(match.group(1))
        assert port > 0
        deadline = time.time() + 10
        catalog = None
        while time.time() < deadline:
            try:
                with urllib.request.urlopen(
                    f"http://127.0.0.1:{port}/families", timeout=2
                ) as response:
                    catalog = json.load(response)
                break
            except OSError:
                time.sleep(0.1)
        assert catalog is not None
        assert len(catalog) == 5
    finally:
        process.terminate()
        process.wait(timeout=10)
