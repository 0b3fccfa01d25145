"""Quantum circuit simulation on relational databases.

Circuits compile to SQL over integer-indexed sparse state tables; plans run
on embedded engines (SQLite, DuckDB, or a built-in reference interpreter)
and are checked against a dense state-vector oracle.
"""

__version__ = "0.1.0"
