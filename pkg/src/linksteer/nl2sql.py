"""Deterministic NL -> SQL compilation.

Handles two inputs: the controlled command sentence ("Please increase the
encoding depth between transmitter 1 and receiver 2") and validated intents.
Emits canonical SQL text that always parses under the store's grammar; a
remote SQL backend may substitute its own statement, but it is accepted only
if it parses and touches linked tables/columns.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .intent import Direction, Intent, SchemaLinkage
from .store.parser import SqlSyntaxError, parse_sql
from .store.sqlast import SqlStatement, Update


class GrammarMismatchError(ValueError):
    """Input does not match the controlled grammar; the message names the
    production that failed."""


class UnlinkedParameterError(ValueError):
    pass


class RejectedRemoteSqlError(ValueError):
    """Remote SQL failed validation; caller should fall back to the
    deterministic emitter."""


PARAMETER_PHRASES = {
    "encoding depth": "encoding_depth",
    "transmit power": "tx_power_w",
}
_PHRASE_BY_PARAMETER = {v: k for k, v in PARAMETER_PHRASES.items()}

_CONTROLLED_RE = re.compile(
    r"^(?:please\s+)?(?P<verb>increase|decrease)\s+the\s+(?P<phrase>.+?)\s+"
    r"between\s+transmitter\s+(?P<tx>\d+)\s+and\s+receiver\s+(?P<rx>\d+)\s*\.?$",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class ControlledCommand:
    verb: str  # "increase" | "decrease"
    parameter: str
    tx_id: int
    rx_id: int

    @property
    def direction(self) -> Direction:
        return Direction.INCREASE if self.verb == "increase" else Direction.DECREASE


def parse_controlled(text: str) -> ControlledCommand:
    """Parse the controlled grammar:
    [Please] (increase|decrease) the <parameter-phrase>
    between transmitter <int> and receiver <int>
    """
    normalized = " ".join(text.split())
    m = _CONTROLLED_RE.match(normalized)
    if m is None:
        if not re.match(r"^(?:please\s+)?(?:increase|decrease)\b", normalized, re.IGNORECASE):
            raise GrammarMismatchError(
                "expected '[Please] (increase|decrease) the <parameter> "
                "between transmitter <int> and receiver <int>'"
            )
        raise GrammarMismatchError(
            "expected 'the <parameter> between transmitter <int> and receiver <int>' "
            "after the verb"
        )
    phrase = m.group("phrase").lower()
    if phrase not in PARAMETER_PHRASES:
        known = ", ".join(sorted(PARAMETER_PHRASES))
        raise GrammarMismatchError(f"unknown parameter phrase {phrase!r}; expected one of: {known}")
    return ControlledCommand(
        verb=m.group("verb").lower(),
        parameter=PARAMETER_PHRASES[phrase],
        tx_id=int(m.group("tx")),
        rx_id=int(m.group("rx")),
    )


def print_controlled(cmd: ControlledCommand) -> str:
    phrase = _PHRASE_BY_PARAMETER[cmd.parameter]
    return (
        f"Please {cmd.verb} the {phrase} between "
        f"transmitter {cmd.tx_id} and receiver {cmd.rx_id}"
    )


def _resolve(parameter: str, linkage: SchemaLinkage) -> tuple[str, str]:
    entry = linkage.find_parameter(parameter)
    if entry is None:
        raise UnlinkedParameterError(f"parameter {parameter!r} has no schema linkage")
    return entry.table, entry.column


def _target_of(source: Union[ControlledCommand, Intent]) -> tuple[int, int]:
    if isinstance(source, ControlledCommand):
        return source.tx_id, source.rx_id
    return source.target


def to_select(source: Union[ControlledCommand, Intent], linkage: SchemaLinkage) -> str:
    """Canonical single-column SELECT for the source's parameter and link."""
    table, column = _resolve(source.parameter, linkage)
    tx, rx = _target_of(source)
    return f"SELECT {column} FROM {table} WHERE tx_id = {tx} AND rx_id = {rx};"


def to_update(plan, linkage: SchemaLinkage) -> str:
    """Canonical UPDATE applying a plan's absolute new value.

    Plans carry absolute values (never relative deltas) so clamping is
    decided in exactly one place, the optimizer.
    """
    table, column = _resolve(plan.parameter, linkage)
    tx, rx = plan.target
    value = plan.new_value
    rendered = repr(value) if isinstance(value, (int, float)) else value
    return f"UPDATE {table} SET {column} = {rendered} WHERE tx_id = {tx} AND rx_id = {rx};"


def validate_remote_sql(sql_text: str, linkage: SchemaLinkage) -> SqlStatement:
    """Accept remote-generated SQL only if it parses and references linked
    tables/columns (reads may also touch tx_id/rx_id selectors)."""
    try:
        stmt = parse_sql(sql_text)
    except SqlSyntaxError as exc:
        raise RejectedRemoteSqlError(f"does not parse: {exc}") from exc
    linked_tables = set()
    linked_columns = {"tx_id", "rx_id", "link_id"}
    for entries in linkage.entries.values():
        for entry in entries:
            linked_tables.add(entry.table)
            linked_columns.add(entry.column)
    if stmt.table not in linked_tables:
        raise RejectedRemoteSqlError(f"table {stmt.table!r} is not linked")
    referenced = set()
    if isinstance(stmt, Update):
        referenced.update(a.column for a in stmt.assignments)
    else:
        referenced.update(stmt.columns)
    referenced.update(p.column for p in stmt.where)
    unknown = referenced - linked_columns
    if unknown:
        raise RejectedRemoteSqlError(f"columns {sorted(unknown)} are not linked")
    return stmt
