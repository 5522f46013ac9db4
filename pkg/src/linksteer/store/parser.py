"""Tokenizer and recursive-descent parser for the SQL subset.

Grammar (keywords case-insensitive, identifiers lower-cased on parse)::

    statement   := select_stmt | update_stmt
    select_stmt := SELECT column {"," column} FROM table [WHERE conj] ";"
    update_stmt := UPDATE table SET assign {"," assign} [WHERE conj] ";"
    assign      := column "=" expr
    expr        := literal | column ("+" | "-") literal
    conj        := predicate {AND predicate}
    predicate   := column op literal      op := = | <> | <= | >= | < | >
    literal     := ["-"] NUMBER | STRING

There are no joins, subqueries or ORDER BY; see the module docstring of
``sqlast`` for the canonical printed form.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .sqlast import (
    Assignment,
    ColumnDelta,
    Literal,
    Predicate,
    Select,
    SqlStatement,
    Update,
)

KEYWORDS = {"select", "update", "from", "where", "set", "and"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>'(?:[^']|'')*')
  | (?P<op><>|<=|>=|[=<>+\-,;])
    """,
    re.VERBOSE,
)


class SqlSyntaxError(ValueError):
    """Malformed statement; carries the byte offset and what was expected."""

    def __init__(self, position: int, expected: str, found: str):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(f"at offset {position}: expected {expected}, found {found}")


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident" | "keyword" | "number" | "string" | "op" | "end"
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SqlSyntaxError(pos, "a token", repr(text[pos]))
        if m.lastgroup != "ws":
            lexeme = m.group()
            kind = m.lastgroup
            if kind == "ident" and lexeme.lower() in KEYWORDS:
                kind = "keyword"
            tokens.append(_Token(kind, lexeme, pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: str) -> SqlSyntaxError:
        tok = self.peek()
        found = repr(tok.text) if tok.kind != "end" else "end of input"
        return SqlSyntaxError(tok.position, expected, found)

    def expect_keyword(self, word: str) -> None:
        tok = self.peek()
        if tok.kind != "keyword" or tok.text.lower() != word:
            raise self.fail(f"keyword {word.upper()}")
        self.advance()

    def expect_op(self, op: str) -> None:
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            raise self.fail(f"'{op}'")
        self.advance()

    def identifier(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.fail(what)
        self.advance()
        return tok.text.lower()

    def literal(self) -> Literal:
        tok = self.peek()
        negative = False
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            negative = True
            tok = self.peek()
        if tok.kind == "number":
            self.advance()
            if any(c in tok.text for c in ".eE"):
                value: int | float = float(tok.text)
            else:
                value = int(tok.text)
            return Literal(-value if negative else value)
        if tok.kind == "string" and not negative:
            self.advance()
            return Literal(tok.text[1:-1].replace("''", "'"))
        raise self.fail("a literal")

    # --- productions ---

    def statement(self) -> SqlStatement:
        tok = self.peek()
        if tok.kind == "keyword" and tok.text.lower() == "select":
            return self.select_stmt()
        if tok.kind == "keyword" and tok.text.lower() == "update":
            return self.update_stmt()
        raise self.fail("keyword SELECT or UPDATE")

    def select_stmt(self) -> Select:
        self.expect_keyword("select")
        columns = [self.identifier("a column name")]
        while self.peek().kind == "op" and self.peek().text == ",":
            self.advance()
            columns.append(self.identifier("a column name"))
        self.expect_keyword("from")
        table = self.identifier("a table name")
        where = self.where_clause()
        self.expect_op(";")
        self.expect_end()
        return Select(table=table, columns=tuple(columns), where=where)

    def update_stmt(self) -> Update:
        self.expect_keyword("update")
        table = self.identifier("a table name")
        self.expect_keyword("set")
        assignments = [self.assignment()]
        while self.peek().kind == "op" and self.peek().text == ",":
            self.advance()
            assignments.append(self.assignment())
        where = self.where_clause()
        self.expect_op(";")
        self.expect_end()
        return Update(table=table, assignments=tuple(assignments), where=where)

    def assignment(self) -> Assignment:
        column = self.identifier("a column name")
        self.expect_op("=")
        tok = self.peek()
        if tok.kind == "ident":
            ref = self.identifier("a column name")
            sign_tok = self.peek()
            if sign_tok.kind != "op" or sign_tok.text not in "+-":
                raise self.fail("'+' or '-'")
            self.advance()
            delta = self.literal()
            return Assignment(column, ColumnDelta(ref, sign_tok.text, delta))
        return Assignment(column, self.literal())

    def where_clause(self) -> tuple[Predicate, ...]:
        tok = self.peek()
        if not (tok.kind == "keyword" and tok.text.lower() == "where"):
            return ()
        self.advance()
        preds = [self.predicate()]
        while self.peek().kind == "keyword" and self.peek().text.lower() == "and":
            self.advance()
            preds.append(self.predicate())
        return tuple(preds)

    def predicate(self) -> Predicate:
        column = self.identifier("a column name")
        tok = self.peek()
        if tok.kind != "op" or tok.text not in ("=", "<>", "<=", ">=", "<", ">"):
            raise self.fail("a comparison operator")
        self.advance()
        return Predicate(column, tok.text, self.literal())

    def expect_end(self) -> None:
        if self.peek().kind != "end":
            raise self.fail("end of statement")


def parse_sql(text: str) -> SqlStatement:
    """Parse a single ';'-terminated statement into its AST.

    Raises SqlSyntaxError with the offending offset and the expected token.
    Schema-level checks (unknown table/column, literal types) happen at
    execution time, when the live schema is available.
    """
    return _Parser(text).statement()
