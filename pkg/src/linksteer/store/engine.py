"""In-process relational store for the live link parameters.

Tables are plain in-memory rows behind a single-writer lock; every mutation
goes through the SQL subset (``execute``) except the initial seeding, which
loads rows from a JSON config.  An optional append-only persistence log
records each applied UPDATE in canonical form and is replayed on open.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional, Union

from .parser import parse_sql
from .sqlast import (
    ColumnDelta,
    Literal,
    Predicate,
    Select,
    SqlStatement,
    Update,
    to_sql,
)

Value = Union[int, float, str]

COLUMN_TYPES = ("INTEGER", "REAL", "TEXT")


class StoreError(Exception):
    pass


class UnknownTableError(StoreError):
    pass


class UnknownColumnError(StoreError):
    pass


class TypeMismatchError(StoreError):
    pass


class ConstraintViolationError(StoreError):
    pass


class DuplicateKeyError(StoreError):
    pass


class InvalidConfigError(StoreError):
    pass


@dataclass(frozen=True)
class CheckConstraint:
    """Inclusive numeric range on one column."""

    column: str
    min_value: float
    max_value: float


@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[tuple[str, str], ...]  # (name, type) in declared order
    primary_key: str
    checks: tuple[CheckConstraint, ...] = ()
    unique: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        names = [c for c, _ in self.columns]
        lowered = [n.lower() for n in names]
        if len(set(lowered)) != len(lowered):
            raise InvalidConfigError(f"table {self.name}: duplicate column names")
        for cname, ctype in self.columns:
            if ctype not in COLUMN_TYPES:
                raise InvalidConfigError(
                    f"table {self.name}: column {cname} has unknown type {ctype}"
                )
        col_types = dict(self.columns)
        if self.primary_key not in col_types:
            raise InvalidConfigError(
                f"table {self.name}: primary key {self.primary_key} is not a column"
            )
        if col_types[self.primary_key] == "REAL":
            raise InvalidConfigError(
                f"table {self.name}: primary key must be INTEGER or TEXT"
            )

    def column_type(self, name: str) -> str:
        for cname, ctype in self.columns:
            if cname == name:
                return ctype
        raise UnknownColumnError(f"table {self.name} has no column {name}")

    def has_column(self, name: str) -> bool:
        return any(cname == name for cname, _ in self.columns)


@dataclass
class QueryResult:
    """Rows for a Select (respecting the requested column order), or the
    affected-row count for an Update."""

    rows: list[tuple[Value, ...]] = field(default_factory=list)
    affected: int = 0
    columns: tuple[str, ...] = ()


def _coerce(value: Any, ctype: str, context: str) -> Value:
    if isinstance(value, bool):
        raise TypeMismatchError(f"{context}: boolean is not a supported value")
    if ctype == "INTEGER":
        if not isinstance(value, int):
            raise TypeMismatchError(f"{context}: expected INTEGER, got {value!r}")
        return value
    if ctype == "REAL":
        if not isinstance(value, (int, float)):
            raise TypeMismatchError(f"{context}: expected REAL, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise TypeMismatchError(f"{context}: expected TEXT, got {value!r}")
    return value


def _check_predicate_type(ctype: str, lit: Literal, context: str) -> None:
    if ctype == "TEXT":
        if not isinstance(lit.value, str):
            raise TypeMismatchError(f"{context}: TEXT column compared to {lit.value!r}")
    elif isinstance(lit.value, str):
        raise TypeMismatchError(f"{context}: numeric column compared to {lit.value!r}")


def _compare(lhs: Value, op: str, rhs: Value) -> bool:
    if op == "=":
        return lhs == rhs
    if op == "<>":
        return lhs != rhs
    if op == "<":
        return lhs < rhs
    if op == ">":
        return lhs > rhs
    if op == "<=":
        return lhs <= rhs
    return lhs >= rhs


class Table:
    def __init__(self, schema: TableSchema):
        self.schema = schema
        self.rows: list[dict[str, Value]] = []  # insertion order, deterministic
        self._pk_index: dict[Value, int] = {}

    def insert(self, values: Mapping[str, Any]) -> None:
        row: dict[str, Value] = {}
        for cname, ctype in self.schema.columns:
            if cname not in values:
                raise InvalidConfigError(
                    f"table {self.schema.name}: row missing column {cname}"
                )
            row[cname] = _coerce(values[cname], ctype, f"column {cname}")
        extra = set(values) - {c for c, _ in self.schema.columns}
        if extra:
            raise InvalidConfigError(
                f"table {self.schema.name}: unknown columns {sorted(extra)}"
            )
        self._validate_row(row)
        pk = row[self.schema.primary_key]
        if pk in self._pk_index:
            raise DuplicateKeyError(
                f"table {self.schema.name}: duplicate primary key {pk!r}"
            )
        for group in self.schema.unique:
            key = tuple(row[c] for c in group)
            for existing in self.rows:
                if tuple(existing[c] for c in group) == key:
                    raise DuplicateKeyError(
                        f"table {self.schema.name}: duplicate {group} = {key!r}"
                    )
        self._pk_index[pk] = len(self.rows)
        self.rows.append(row)

    def _validate_row(self, row: Mapping[str, Value]) -> None:
        for check in self.schema.checks:
            v = row[check.column]
            if not (check.min_value <= v <= check.max_value):  # type: ignore[operator]
                raise ConstraintViolationError(
                    f"table {self.schema.name}: {check.column} = {v!r} outside "
                    f"[{check.min_value}, {check.max_value}]"
                )

    def _validate_unique(self, rows: list[dict[str, Value]]) -> None:
        for group in self.schema.unique:
            seen: set[tuple[Value, ...]] = set()
            for row in rows:
                key = tuple(row[c] for c in group)
                if key in seen:
                    raise ConstraintViolationError(
                        f"table {self.schema.name}: duplicate {group} = {key!r}"
                    )
                seen.add(key)


class ParamStore:
    """Holds the tables; reads are safe from any thread, writes must come
    from one writer at a time (the orchestrator serializes them)."""

    def __init__(self, log_path: Optional[str] = None):
        self.tables: dict[str, Table] = {}
        self._write_lock = threading.RLock()
        self._log_path = log_path
        self._replaying = False

    # --- seeding ---

    @classmethod
    def seed(cls, config: Mapping[str, Any], log_path: Optional[str] = None) -> "ParamStore":
        """Build a store from a seed config.

        Config shape: {"tables": [{name, columns, primary_key, checks, unique}],
        "rows": {table: [row, ...]}}.  If an ``audit`` table is declared, a row
        recording the seed event is appended.
        """
        store = cls(log_path=None)  # do not log seeding
        if not isinstance(config, Mapping) or "tables" not in config:
            raise InvalidConfigError("seed config must declare 'tables'")
        for spec in config["tables"]:
            try:
                columns = tuple((c[0], c[1]) for c in spec["columns"])
                checks = tuple(
                    CheckConstraint(c["column"], c["min"], c["max"])
                    for c in spec.get("checks", [])
                )
                unique = tuple(tuple(g) for g in spec.get("unique", []))
                schema = TableSchema(
                    name=spec["name"],
                    columns=columns,
                    primary_key=spec["primary_key"],
                    checks=checks,
                    unique=unique,
                )
            except (KeyError, IndexError, TypeError) as exc:
                raise InvalidConfigError(f"bad table spec: {exc}") from exc
            for check in schema.checks:
                if not schema.has_column(check.column):
                    raise InvalidConfigError(
                        f"table {schema.name}: check on unknown column {check.column}"
                    )
            if schema.name in store.tables:
                raise InvalidConfigError(f"table {schema.name} declared twice")
            store.tables[schema.name] = Table(schema)
        for tname, rows in (config.get("rows") or {}).items():
            if tname not in store.tables:
                raise InvalidConfigError(f"rows for undeclared table {tname}")
            for row in rows:
                store.tables[tname].insert(row)
        if "audit" in store.tables:
            store.append_audit("seed", f"{store.row_count()} rows seeded")
        store._log_path = log_path
        return store

    @classmethod
    def open(
        cls, config: Mapping[str, Any], log_path: Optional[str] = None
    ) -> "ParamStore":
        """Seed and, if a persistence log exists, replay it statement by
        statement before enabling further logging."""
        store = cls.seed(config, log_path=None)
        if log_path:
            try:
                with open(log_path, "r", encoding="utf-8") as fh:
                    lines = [ln.strip() for ln in fh if ln.strip()]
            except FileNotFoundError:
                lines = []
            store._replaying = True
            try:
                for line in lines:
                    store.execute(parse_sql(line))
            finally:
                store._replaying = False
        store._log_path = log_path
        return store

    # --- engine-level helpers ---

    def table(self, name: str) -> Table:
        if name not in self.tables:
            raise UnknownTableError(f"no such table: {name}")
        return self.tables[name]

    def insert_row(self, table: str, values: Mapping[str, Any]) -> None:
        with self._write_lock:
            self.table(table).insert(values)

    def append_audit(self, event: str, detail: str, t: float = 0.0) -> None:
        if "audit" not in self.tables:
            return
        audit = self.tables["audit"]
        next_id = len(audit.rows) + 1
        audit.insert({"audit_id": next_id, "event": event, "detail": detail, "t": t})

    def row_count(self) -> int:
        return sum(len(t.rows) for t in self.tables.values())

    # --- SQL execution ---

    def execute(self, stmt: SqlStatement) -> QueryResult:
        if isinstance(stmt, Select):
            return self._execute_select(stmt)
        if isinstance(stmt, Update):
            with self._write_lock:
                result = self._execute_update(stmt)
                if self._log_path and not self._replaying:
                    with open(self._log_path, "a", encoding="utf-8") as fh:
                        fh.write(to_sql(stmt) + "\n")
                return result
        raise TypeError(f"not a statement: {stmt!r}")

    def execute_text(self, text: str) -> QueryResult:
        return self.execute(parse_sql(text))

    def _matching_rows(
        self, table: Table, where: tuple[Predicate, ...]
    ) -> Iterable[dict[str, Value]]:
        for pred in where:
            ctype = table.schema.column_type(pred.column)
            _check_predicate_type(ctype, pred.value, f"WHERE {pred.column}")
        for row in table.rows:
            if all(_compare(row[p.column], p.op, p.value.value) for p in where):
                yield row

    def _execute_select(self, stmt: Select) -> QueryResult:
        table = self.table(stmt.table)
        for col in stmt.columns:
            if not table.schema.has_column(col):
                raise UnknownColumnError(f"table {stmt.table} has no column {col}")
        rows = [
            tuple(row[c] for c in stmt.columns)
            for row in self._matching_rows(table, stmt.where)
        ]
        return QueryResult(rows=rows, columns=stmt.columns)

    def _execute_update(self, stmt: Update) -> QueryResult:
        table = self.table(stmt.table)
        schema = table.schema
        for a in stmt.assignments:
            if not schema.has_column(a.column):
                raise UnknownColumnError(f"table {stmt.table} has no column {a.column}")
            if a.column == schema.primary_key:
                raise ConstraintViolationError(
                    f"table {stmt.table}: assignment targets primary key"
                )
            if isinstance(a.expr, ColumnDelta):
                if not schema.has_column(a.expr.column):
                    raise UnknownColumnError(
                        f"table {stmt.table} has no column {a.expr.column}"
                    )
                if schema.column_type(a.expr.column) == "TEXT" or isinstance(
                    a.expr.delta.value, str
                ):
                    raise TypeMismatchError(
                        f"table {stmt.table}: arithmetic on non-numeric operand"
                    )

        # Compute every new row up front so a late constraint failure leaves
        # the table untouched (all-or-none).
        matched = {id(r) for r in self._matching_rows(table, stmt.where)}
        new_rows: list[dict[str, Value]] = []
        for row in table.rows:
            if id(row) in matched:
                updated = dict(row)
                for a in stmt.assignments:
                    ctype = schema.column_type(a.column)
                    if isinstance(a.expr, ColumnDelta):
                        base = row[a.expr.column]  # pre-update value
                        delta = a.expr.delta.value
                        value = base + delta if a.expr.sign == "+" else base - delta
                    else:
                        value = a.expr.value
                    updated[a.column] = _coerce(value, ctype, f"column {a.column}")
                table._validate_row(updated)
                new_rows.append(updated)
            else:
                new_rows.append(row)
        table._validate_unique(new_rows)
        table.rows = new_rows
        table._pk_index = {
            row[schema.primary_key]: i for i, row in enumerate(new_rows)
        }
        return QueryResult(affected=len(matched))

    # --- inspection ---

    def dump(self) -> bytes:
        """Canonical byte serialization of the full store state."""
        doc: dict[str, Any] = {"tables": {}}
        for name in sorted(self.tables):
            table = self.tables[name]
            doc["tables"][name] = {
                "columns": [list(c) for c in table.schema.columns],
                "primary_key": table.schema.primary_key,
                "checks": [
                    [c.column, c.min_value, c.max_value] for c in table.schema.checks
                ],
                "unique": [list(g) for g in table.schema.unique],
                "rows": table.rows,
            }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
