"""Pure-Python engine for the SQL subset the code generator emits.

Executes real statement text (CREATE TABLE, INSERT ... VALUES, CREATE TABLE
AS SELECT with one inner join + GROUP BY + HAVING, DROP TABLE) over in-memory
row lists, so the whole test suite can run with no database engine installed.
The expression grammar covers integer/float literals, qualified columns, SUM,
arithmetic, comparisons and the bitwise operators &, |, <<, >>.
"""
from __future__ import annotations

import re

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><<|>>|<>|<=|>=|[(),.;*/+\-&|=<>])"
    r")"
)


class ReferenceEngineError(RuntimeError):
    """Statement outside the supported subset, or an execution fault."""


def _tokenize(sql: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(sql):
        match = _TOKEN_RE.match(sql, pos)
        if match is None:
            if sql[pos:].strip() == "":
                break
            raise ReferenceEngineError(f"cannot tokenize SQL at offset {pos}")
        pos = match.end()
        if match.lastgroup == "number":
            tokens.append(("number", match.group("number")))
        elif match.lastgroup == "ident":
            tokens.append(("ident", match.group("ident")))
        else:
            tokens.append(("op", match.group("op")))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, str]:
        token = self.peek()
        if token is None:
            raise ReferenceEngineError("unexpected end of statement")
        self.pos += 1
        return token

    def accept_keyword(self, word: str) -> bool:
        token = self.peek()
        if token and token[0] == "ident" and token[1].upper() == word:
            self.pos += 1
            return True
        return False

    def expect_keyword(self, word: str) -> None:
        if not self.accept_keyword(word):
            raise ReferenceEngineError(f"expected {word} near {self.peek()}")

    def accept_op(self, op: str) -> bool:
        token = self.peek()
        if token and token == ("op", op):
            self.pos += 1
            return True
        return False

    def expect_op(self, op: str) -> None:
        if not self.accept_op(op):
            raise ReferenceEngineError(f"expected {op!r} near {self.peek()}")

    def ident(self) -> str:
        token = self.next()
        if token[0] != "ident":
            raise ReferenceEngineError(f"expected identifier, got {token}")
        return token[1]

    # Expression grammar, loosest binding first. The generator emits fully
    # parenthesized text, so the exact levels only matter for HAVING.
    def expression(self):
        return self._comparison()

    def _comparison(self):
        left = self._bitor()
        while True:
            token = self.peek()
            if token and token[0] == "op" and token[1] in ("=", ">", "<", ">=", "<=", "<>"):
                self.pos += 1
                left = ("bin", token[1], left, self._bitor())
            else:
                return left

    def _bitor(self):
        left = self._bitand()
        while self.accept_op("|"):
            left = ("bin", "|", left, self._bitand())
        return left

    def _bitand(self):
        left = self._shift()
        while self.accept_op("&"):
            left = ("bin", "&", left, self._shift())
        return left

    def _shift(self):
        left = self._additive()
        while True:
            if self.accept_op("<<"):
                left = ("bin", "<<", left, self._additive())
            elif self.accept_op(">>"):
                left = ("bin", ">>", left, self._additive())
            else:
                return left

    def _additive(self):
        left = self._multiplicative()
        while True:
            if self.accept_op("+"):
                left = ("bin", "+", left, self._multiplicative())
            elif self.accept_op("-"):
                left = ("bin", "-", left, self._multiplicative())
            else:
                return left

    def _multiplicative(self):
        left = self._unary()
        while True:
            if self.accept_op("*"):
                left = ("bin", "*", left, self._unary())
            elif self.accept_op("/"):
                left = ("bin", "/", left, self._unary())
            else:
                return left

    def _unary(self):
        if self.accept_op("-"):
            return ("neg", self._unary())
        return self._atom()

    def _atom(self):
        token = self.next()
        kind, text = token
        if kind == "number":
            if re.search(r"[.eE]", text):
                return ("num", float(text))
            return ("num", int(text))
        if kind == "op" and text == "(":
            inner = self.expression()
            self.expect_op(")")
            return inner
        if kind == "ident":
            if text.upper() == "SUM":
                self.expect_op("(")
                inner = self.expression()
                self.expect_op(")")
                return ("sum", inner)
            if self.accept_op("."):
                return ("col", text, self.ident())
            return ("col", None, text)
        raise ReferenceEngineError(f"unexpected token {token}")


def _eval(node, env, aggregates=None):
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "col":
        _, alias, name = node
        if alias is not None:
            row = env.get(alias)
            if row is None or name not in row:
                raise ReferenceEngineError(f"unknown column {alias}.{name}")
            return row[name]
        for row in env.values():
            if name in row:
                return row[name]
        raise ReferenceEngineError(f"unknown column {name}")
    if tag == "sum":
        if aggregates is None:
            raise ReferenceEngineError("SUM outside aggregate context")
        return aggregates[node]
    if tag == "neg":
        return -_eval(node[1], env, aggregates)
    if tag == "bin":
        _, op, left, right = node
        lv = _eval(left, env, aggregates)
        rv = _eval(right, env, aggregates)
        if op in ("&", "|", "<<", ">>"):
            if not (isinstance(lv, int) and isinstance(rv, int)):
                raise ReferenceEngineError(f"bitwise {op} on non-integers")
            if op == "&":
                return lv & rv
            if op == "|":
                return lv | rv
            if op == "<<":
                return lv << rv
            return lv >> rv
        if op == "*":
            return lv * rv
        if op == "/":
            return lv / rv
        if op == "+":
            return lv + rv
        if op == "-":
            return lv - rv
        if op == "=":
            return lv == rv
        if op == "<>":
            return lv != rv
        if op == ">":
            return lv > rv
        if op == "<":
            return lv < rv
        if op == ">=":
            return lv >= rv
        return lv <= rv
    raise ReferenceEngineError(f"cannot evaluate node {node!r}")


def _collect_sums(node, into: list):
    if not isinstance(node, tuple):
        return
    if node[0] == "sum":
        if node not in into:
            into.append(node)
        return
    for child in node[1:]:
        _collect_sums(child, into)


class ReferenceEngine:
    """In-memory tables plus an interpreter for the emitted statement shapes."""

    def __init__(self):
        self.tables: dict[str, list[dict]] = {}

    def execute(self, sql: str) -> int:
        parser = _Parser(_tokenize(sql))
        token = parser.peek()
        if token is None:
            return 0
        word = token[1].upper() if token[0] == "ident" else ""
        if word == "CREATE":
            return self._create(parser)
        if word == "INSERT":
            return self._insert(parser)
        if word == "DROP":
            return self._drop(parser)
        raise ReferenceEngineError(f"unsupported statement: {sql[:40]!r}...")

    def rows(self, table: str) -> list[dict]:
        if table not in self.tables:
            raise ReferenceEngineError(f"no such table {table}")
        return self.tables[table]

    def row_count(self, table: str) -> int:
        return len(self.rows(table))

    def _create(self, parser: _Parser) -> int:
        parser.expect_keyword("CREATE")
        parser.expect_keyword("TABLE")
        name = parser.ident()
        if name in self.tables:
            raise ReferenceEngineError(f"table {name} already exists")
        if parser.accept_keyword("AS"):
            self.tables[name] = self._select(parser)
            return len(self.tables[name])
        parser.expect_op("(")
        # Column declarations: name followed by type words we do not need.
        depth = 1
        while depth:
            kind, text = parser.next()
            if kind == "op" and text == "(":
                depth += 1
            elif kind == "op" and text == ")":
                depth -= 1
        self.tables[name] = []
        return 0

    def _drop(self, parser: _Parser) -> int:
        parser.expect_keyword("DROP")
        parser.expect_keyword("TABLE")
        name = parser.ident()
        if name not in self.tables:
            raise ReferenceEngineError(f"no such table {name}")
        del self.tables[name]
        return 0

    def _insert(self, parser: _Parser) -> int:
        parser.expect_keyword("INSERT")
        parser.expect_keyword("INTO")
        name = parser.ident()
        if name not in self.tables:
            raise ReferenceEngineError(f"no such table {name}")
        parser.expect_op("(")
        columns = [parser.ident()]
        while parser.accept_op(","):
            columns.append(parser.ident())
        parser.expect_op(")")
        parser.expect_keyword("VALUES")
        added = 0
        while True:
            parser.expect_op("(")
            values = [_eval(parser.expression(), {})]
            while parser.accept_op(","):
                values.append(_eval(parser.expression(), {}))
            parser.expect_op(")")
            if len(values) != len(columns):
                raise ReferenceEngineError("VALUES arity mismatch")
            self.tables[name].append(dict(zip(columns, values)))
            added += 1
            if not parser.accept_op(","):
                break
        return added

    def _select(self, parser: _Parser) -> list[dict]:
        parser.expect_keyword("SELECT")
        items = []  # (expr, alias)
        while True:
            expr = parser.expression()
            parser.expect_keyword("AS")
            items.append((expr, parser.ident()))
            if not parser.accept_op(","):
                break
        parser.expect_keyword("FROM")
        left_table = parser.ident()
        parser.expect_keyword("AS")
        left_alias = parser.ident()
        parser.expect_keyword("INNER")
        parser.expect_keyword("JOIN")
        right_table = parser.ident()
        parser.expect_keyword("AS")
        right_alias = parser.ident()
        parser.expect_keyword("ON")
        on_expr = parser.expression()
        parser.expect_keyword("GROUP")
        parser.expect_keyword("BY")
        group_expr = parser.expression()
        having_expr = None
        if parser.accept_keyword("HAVING"):
            having_expr = parser.expression()
        parser.accept_op(";")
        if parser.peek() is not None:
            raise ReferenceEngineError(f"trailing tokens near {parser.peek()}")

        sum_nodes: list = []
        for expr, _ in items:
            _collect_sums(expr, sum_nodes)
        if having_expr is not None:
            _collect_sums(having_expr, sum_nodes)

        left_rows = self.rows(left_table)
        right_rows = self.rows(right_table)

        # The emitted join condition is `g.col = f(t)`: hash the right side.
        index_col = None
        probe_expr = None
        if (
            isinstance(on_expr, tuple)
            and on_expr[0] == "bin"
            and on_expr[1] == "="
            and on_expr[2][0] == "col"
            and on_expr[2][1] == right_alias
        ):
            index_col = on_expr[2][2]
            probe_expr = on_expr[3]

        groups: dict = {}
        order: list = []

        def feed(env):
            key = _eval(group_expr, env)
            bucket = groups.get(key)
            if bucket is None:
                bucket = {"sums": {node: 0.0 for node in sum_nodes}, "env": env}
                groups[key] = bucket
                order.append(key)
            for node in sum_nodes:
                bucket["sums"][node] += _eval(node[1], env)

        if index_col is not None:
            by_key: dict = {}
            for row in right_rows:
                by_key.setdefault(row[index_col], []).append(row)
            for left_row in left_rows:
                env = {left_alias: left_row}
                key = _eval(probe_expr, env)
                for right_row in by_key.get(key, ()):
                    feed({left_alias: left_row, right_alias: right_row})
        else:
            for left_row in left_rows:
                for right_row in right_rows:
                    env = {left_alias: left_row, right_alias: right_row}
                    if _eval(on_expr, env):
                        feed(env)

        result = []
        for key in order:
            bucket = groups[key]
            if having_expr is not None and not _eval(
                having_expr, bucket["env"], bucket["sums"]
            ):
                continue
            row = {
                alias: _eval(expr, bucket["env"], bucket["sums"])
                for expr, alias in items
            }
            result.append(row)
        return result
