"""SQL-subset engine and the in-process parameter store."""

from .engine import (
    CheckConstraint,
    ConstraintViolationError,
    DuplicateKeyError,
    InvalidConfigError,
    ParamStore,
    QueryResult,
    StoreError,
    TableSchema,
    TypeMismatchError,
    UnknownColumnError,
    UnknownTableError,
)
from .parser import SqlSyntaxError, parse_sql
from .sqlast import (
    Assignment,
    ColumnDelta,
    Literal,
    Predicate,
    Select,
    SqlStatement,
    Update,
    to_sql,
)

__all__ = [
    "Assignment",
    "CheckConstraint",
    "ColumnDelta",
    "ConstraintViolationError",
    "DuplicateKeyError",
    "InvalidConfigError",
    "Literal",
    "ParamStore",
    "Predicate",
    "QueryResult",
    "Select",
    "SqlStatement",
    "SqlSyntaxError",
    "StoreError",
    "TableSchema",
    "TypeMismatchError",
    "Update",
    "UnknownColumnError",
    "UnknownTableError",
    "parse_sql",
    "to_sql",
]
