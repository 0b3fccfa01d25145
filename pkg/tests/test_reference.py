import sqlite3

import pytest

from sqlsim import families
from sqlsim.codegen import CodegenOptions, translate_circuit
from sqlsim.reference import ReferenceEngine, ReferenceEngineError, _tokenize


def test_create_insert_query_drop():
    engine = ReferenceEngine()
    engine.execute("CREATE TABLE t (s BIGINT, r DOUBLE, i DOUBLE)")
    added = engine.execute(
        "INSERT INTO t (s, r, i) VALUES (0, 1.0, 0.0), (3, -0.5, 2e-3)"
    )
    assert added == 2
    assert engine.row_count("t") == 2
    assert engine.rows("t")[1] == {"s": 3, "r": -0.5, "i": 0.002}
    engine.execute("DROP TABLE t")
    with pytest.raises(ReferenceEngineError):
        engine.rows("t")


def test_errors_for_bad_tables():
    engine = ReferenceEngine()
    engine.execute("CREATE TABLE t (s BIGINT)")
    with pytest.raises(ReferenceEngineError, match="already exists"):
        engine.execute("CREATE TABLE t (s BIGINT)")
    with pytest.raises(ReferenceEngineError, match="no such table"):
        engine.execute("DROP TABLE nope")
    with pytest.raises(ReferenceEngineError, match="no such table"):
        engine.execute("INSERT INTO nope (s) VALUES (1)")


def test_unsupported_statement_rejected():
    engine = ReferenceEngine()
    with pytest.raises(ReferenceEngineError, match="unsupported"):
        engine.execute("UPDATE t SET s = 1")


def test_tokenizer_handles_operators_and_floats():
    tokens = _tokenize("(t.s >> 2) & 1 | 3 << 1 > 1e-24")
    text = [t[1] for t in tokens]
    assert ">>" in text and "<<" in text and "1e-24" in text


def test_bitwise_on_floats_rejected():
    engine = ReferenceEngine()
    engine.execute("CREATE TABLE t (s BIGINT, r DOUBLE, i DOUBLE)")
    engine.execute("INSERT INTO t (s, r, i) VALUES (1, 0.5, 0.0)")
    engine.execute("CREATE TABLE g (in_s BIGINT, out_s BIGINT, r DOUBLE, i DOUBLE)")
    engine.execute("INSERT INTO g (in_s, out_s, r, i) VALUES (1, 1, 1.0, 0.0)")
    with pytest.raises(ReferenceEngineError, match="bitwise"):
        engine.execute(
            "CREATE TABLE t2 AS SELECT (t.r & 1) AS s, SUM(t.r) AS r, SUM(t.i) AS i "
            "FROM t AS t INNER JOIN g AS g ON g.in_s = (t.s & 1) GROUP BY (t.r & 1)"
        )


def _run_statements_on_sqlite(statements):
    conn = sqlite3.connect(":memory:")
    for statement in statements:
        conn.execute(statement.sql)
    return conn


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_ctas_agrees_with_sqlite(seed):
    """Differential check: identical plan text on both engines, identical tables."""
    c = families.random_dense(4, 10, seed=seed)
    plan = translate_circuit(
        c, CodegenOptions(fusion_window=2, keep_intermediates=True)
    )
    engine = ReferenceEngine()
    for statement in plan.statements:
        engine.execute(statement.sql)
    conn = _run_statements_on_sqlite(plan.statements)
    for table in plan.state_table_names:
        ours = sorted(
            (row["s"], round(row["r"], 12), round(row["i"], 12))
            for row in engine.rows(table)
        )
        theirs = sorted(
            (s, round(r, 12), round(i, 12))
            for s, r, i in conn.execute(f"SELECT s, r, i FROM {table}")
        )
        assert ours == theirs, table


def test_join_without_index_pattern_falls_back():
    engine = ReferenceEngine()
    engine.execute("CREATE TABLE a (s BIGINT, r DOUBLE, i DOUBLE)")
    engine.execute("INSERT INTO a (s, r, i) VALUES (0, 1.0, 0.0), (1, 2.0, 0.0)")
    engine.execute("CREATE TABLE b (in_s BIGINT, out_s BIGINT, r DOUBLE, i DOUBLE)")
    engine.execute("INSERT INTO b (in_s, out_s, r, i) VALUES (0, 0, 1.0, 0.0)")
    # ON with the column on the right side of `=` defeats the hash-join probe.
    engine.execute(
        "CREATE TABLE c AS SELECT t.s AS s, SUM(t.r * g.r) AS r, SUM(t.i) AS i "
        "FROM a AS t INNER JOIN b AS g ON (t.s & 1) = g.in_s GROUP BY t.s"
    )
    assert engine.rows("c") == [{"s": 0, "r": 1.0, "i": 0.0}]
