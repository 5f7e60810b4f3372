from .ast import Annotation, Assert, Comment, Query, Retract, Trigger
from .execute import Executor, Outcome, Trace, TraceEntry, execute_program
from .format import format_fact, format_program, format_statement
from .parser import DslSyntaxError, UnknownPredicate, parse_fact, parse_program

__all__ = [
    "Annotation",
    "Assert",
    "Comment",
    "DslSyntaxError",
    "Executor",
    "Outcome",
    "Query",
    "Retract",
    "Trace",
    "TraceEntry",
    "Trigger",
    "UnknownPredicate",
    "execute_program",
    "format_fact",
    "format_program",
    "format_statement",
    "parse_fact",
    "parse_program",
]
