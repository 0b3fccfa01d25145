"""Uniform session contract over embedded SQL engines.

Three adapters: the stdlib SQLite engine, DuckDB (registered only when the
package is importable), and the pure-Python reference engine. One adapter
instance is one database session; sessions are single-threaded and never
shared across concurrent runs.
"""
from __future__ import annotations

import os
import sqlite3
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

from .reference import ReferenceEngine, ReferenceEngineError


class BackendError(RuntimeError):
    """Engine-level failure while executing a statement."""


class UnknownBackendError(ValueError):
    def __init__(self, name: str):
        known = ", ".join(available_backends())
        super().__init__(f"unknown backend {name!r}; configured: {known}")
        self.name = name


@dataclass(frozen=True)
class StateRow:
    """One nonzero basis state: packed index plus complex amplitude parts."""

    s: int
    r: float
    i: float

    @property
    def probability(self) -> float:
        return self.r * self.r + self.i * self.i


@dataclass(frozen=True)
class BackendInfo:
    name: str
    version: str
    supports_memory: bool
    supports_disk: bool


class BackendAdapter(ABC):
    """One open database session. open() before use, close() when done."""

    info: BackendInfo

    @abstractmethod
    def open(self, location: str | Path | None = None) -> None:
        """Open a session; None means in-memory, a path means on-disk."""

    @abstractmethod
    def execute(self, sql: str) -> int:
        """Run one statement; returns the affected-row count when known."""

    @abstractmethod
    def query_state(self, table: str) -> list[StateRow]:
        """All rows of a state table, ascending by basis-state index."""

    @abstractmethod
    def table_row_count(self, table: str) -> int: ...

    @abstractmethod
    def close(self) -> None: ...

    def database_size(self) -> int | None:
        """On-disk database file size in bytes; None for in-memory sessions."""
        return None


class ReferenceAdapter(BackendAdapter):
    info = BackendInfo("reference", "builtin", supports_memory=True,
                       supports_disk=False)

    def __init__(self):
        self._engine: ReferenceEngine | None = None

    def open(self, location: str | Path | None = None) -> None:
        if location is not None:
            raise BackendError("reference backend is in-memory only")
        self._engine = ReferenceEngine()

    def _ready(self) -> ReferenceEngine:
        if self._engine is None:
            raise BackendError("session not open")
        return self._engine

    def execute(self, sql: str) -> int:
        try:
            return self._ready().execute(sql)
        except ReferenceEngineError as exc:
            raise BackendError(str(exc)) from exc

    def query_state(self, table: str) -> list[StateRow]:
        try:
            rows = self._ready().rows(table)
        except ReferenceEngineError as exc:
            raise BackendError(str(exc)) from exc
        return sorted(
            (StateRow(int(r["s"]), float(r["r"]), float(r["i"])) for r in rows),
            key=lambda row: row.s,
        )

    def table_row_count(self, table: str) -> int:
        try:
            return self._ready().row_count(table)
        except ReferenceEngineError as exc:
            raise BackendError(str(exc)) from exc

    def close(self) -> None:
        self._engine = None


class SqliteAdapter(BackendAdapter):
    info = BackendInfo("sqlite", sqlite3.sqlite_version, supports_memory=True,
                       supports_disk=True)

    def __init__(self):
        self._conn: sqlite3.Connection | None = None
        self._location: str | None = None

    def open(self, location: str | Path | None = None) -> None:
        self._location = str(location) if location is not None else None
        self._conn = sqlite3.connect(self._location or ":memory:",
                                     isolation_level=None)

    def _cursor(self) -> sqlite3.Cursor:
        if self._conn is None:
            raise BackendError("session not open")
        return self._conn.cursor()

    def execute(self, sql: str) -> int:
        try:
            cursor = self._cursor()
            cursor.execute(sql)
            return max(cursor.rowcount, 0)
        except sqlite3.Error as exc:
            raise BackendError(f"sqlite: {exc}") from exc

    def query_state(self, table: str) -> list[StateRow]:
        try:
            cursor = self._cursor()
            cursor.execute(f"SELECT s, r, i FROM {table} ORDER BY s")
            return [StateRow(int(s), float(r), float(i)) for s, r, i in cursor]
        except sqlite3.Error as exc:
            raise BackendError(f"sqlite: {exc}") from exc

    def table_row_count(self, table: str) -> int:
        try:
            cursor = self._cursor()
            cursor.execute(f"SELECT COUNT(*) FROM {table}")
            return int(cursor.fetchone()[0])
        except sqlite3.Error as exc:
            raise BackendError(f"sqlite: {exc}") from exc

    def close(self) -> None:
        if self._conn is not None:
            self._conn.close()
            self._conn = None

    def database_size(self) -> int | None:
        if self._location is None:
            return None
        try:
            return os.path.getsize(self._location)
        except OSError:
            return None


try:  # pragma: no cover - exercised only where the duckdb package exists
    import duckdb as _duckdb
except ImportError:  # pragma: no cover
    _duckdb = None


class DuckDbAdapter(BackendAdapter):  # pragma: no cover - needs duckdb installed
    def __init__(self):
        if _duckdb is None:
            raise BackendError("duckdb package is not installed")
        self.info = BackendInfo("duckdb", _duckdb.__version__,
                                supports_memory=True, supports_disk=True)
        self._conn = None
        self._location: str | None = None

    def open(self, location: str | Path | None = None) -> None:
        self._location = str(location) if location is not None else None
        self._conn = _duckdb.connect(self._location or ":memory:")

    def execute(self, sql: str) -> int:
        if self._conn is None:
            raise BackendError("session not open")
        try:
            result = self._conn.execute(sql)
        except Exception as exc:
            raise BackendError(f"duckdb: {exc}") from exc
        stripped = sql.lstrip().upper()
        if stripped.startswith("INSERT"):
            try:
                row = result.fetchone()
                return int(row[0]) if row else 0
            except Exception:
                return 0
        return 0

    def query_state(self, table: str) -> list[StateRow]:
        if self._conn is None:
            raise BackendError("session not open")
        try:
            rows = self._conn.execute(
                f"SELECT s, r, i FROM {table} ORDER BY s"
            ).fetchall()
        except Exception as exc:
            raise BackendError(f"duckdb: {exc}") from exc
        return [StateRow(int(s), float(r), float(i)) for s, r, i in rows]

    def table_row_count(self, table: str) -> int:
        if self._conn is None:
            raise BackendError("session not open")
        try:
            return int(
                self._conn.execute(f"SELECT COUNT(*) FROM {table}").fetchone()[0]
            )
        except Exception as exc:
            raise BackendError(f"duckdb: {exc}") from exc

    def close(self) -> None:
        if self._conn is not None:
            self._conn.close()
            self._conn = None

    def database_size(self) -> int | None:
        if self._location is None:
            return None
        try:
            return os.path.getsize(self._location)
        except OSError:
            return None


_REGISTRY: dict[str, type[BackendAdapter]] = {
    "reference": ReferenceAdapter,
    "sqlite": SqliteAdapter,
}
if _duckdb is not None:  # pragma: no cover
    _REGISTRY["duckdb"] = DuckDbAdapter


def available_backends() -> list[str]:
    """Names of adapters usable in this environment, stable order."""
    return list(_REGISTRY)


def create_backend(name: str) -> BackendAdapter:
    """New unopened session for a configured backend."""
    cls = _REGISTRY.get(name)
    if cls is None:
        raise UnknownBackendError(name)
    return cls()
