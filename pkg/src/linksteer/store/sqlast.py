"""AST types for the supported SQL subset and the canonical printer.

The dialect is deliberately small: single-table SELECT and UPDATE with an
optional conjunctive WHERE clause.  Canonical text (what ``to_sql`` emits)
uses upper-case keywords, lower-case identifiers, single spaces and a
trailing semicolon; ``parse_sql(to_sql(ast)) == ast`` holds for every AST.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

COMPARISON_OPS = ("=", "<>", "<=", ">=", "<", ">")


@dataclass(frozen=True)
class Literal:
    """A typed constant: int (INTEGER), float (REAL) or str (TEXT)."""

    value: Union[int, float, str]

    def sql_type(self) -> str:
        if isinstance(self.value, bool):  # bool is an int subclass; reject early
            raise TypeError("boolean literals are not part of the dialect")
        if isinstance(self.value, int):
            return "INTEGER"
        if isinstance(self.value, float):
            return "REAL"
        return "TEXT"


@dataclass(frozen=True)
class ColumnDelta:
    """Relative assignment expression: ``column (+|-) literal``."""

    column: str
    sign: str  # "+" or "-"
    delta: Literal


@dataclass(frozen=True)
class Assignment:
    column: str
    expr: Union[Literal, ColumnDelta]


@dataclass(frozen=True)
class Predicate:
    column: str
    op: str  # one of COMPARISON_OPS
    value: Literal


@dataclass(frozen=True)
class Select:
    table: str
    columns: tuple[str, ...]
    where: tuple[Predicate, ...] = ()


@dataclass(frozen=True)
class Update:
    table: str
    assignments: tuple[Assignment, ...]
    where: tuple[Predicate, ...] = ()


SqlStatement = Union[Select, Update]


def literal_to_sql(lit: Literal) -> str:
    v = lit.value
    if isinstance(v, str):
        return "'" + v.replace("'", "''") + "'"
    # repr gives the shortest round-tripping form for both int and float,
    # which keeps the persistence log bit-exact under replay.
    return repr(v)


def _expr_to_sql(expr: Union[Literal, ColumnDelta]) -> str:
    if isinstance(expr, Literal):
        return literal_to_sql(expr)
    return f"{expr.column} {expr.sign} {literal_to_sql(expr.delta)}"


def _where_to_sql(where: tuple[Predicate, ...]) -> str:
    if not where:
        return ""
    parts = [f"{p.column} {p.op} {literal_to_sql(p.value)}" for p in where]
    return " WHERE " + " AND ".join(parts)


def to_sql(stmt: SqlStatement) -> str:
    """Render a statement in canonical form."""
    if isinstance(stmt, Select):
        cols = ", ".join(stmt.columns)
        return f"SELECT {cols} FROM {stmt.table}{_where_to_sql(stmt.where)};"
    if isinstance(stmt, Update):
        sets = ", ".join(
            f"{a.column} = {_expr_to_sql(a.expr)}" for a in stmt.assignments
        )
        return f"UPDATE {stmt.table} SET {sets}{_where_to_sql(stmt.where)};"
    raise TypeError(f"not a statement: {stmt!r}")
