"""Canonical printing of facts and programs.

Canonical form: one statement per line, no whitespace inside argument lists,
each line terminated by ``\\n``.  Provenance annotations follow the
statement's ``.`` as `` @{by=X,cap=Y,at=N,exp=N,sig=HEX}`` with keys in that
order and absent keys omitted.  Comments print as ``//`` followed by their
text verbatim.
"""

from __future__ import annotations

from ..model import Fact
from ..terms import format_key

def format_fact(fact: Fact) -> str:
    return format_key(fact.key)


def _num(x) -> str:
    return repr(x) if isinstance(x, float) else str(x)


def format_annotation(ann) -> str:
    parts = []
    if ann.by is not None:
        parts.append(f"by={ann.by}")
    if ann.cap is not None:
        parts.append(f"cap={ann.cap}")
    if ann.at is not None:
        parts.append(f"at={_num(ann.at)}")
    if ann.exp is not None:
        parts.append(f"exp={_num(ann.exp)}")
    if ann.sig is not None:
        parts.append(f"sig={ann.sig.hex()}")
    return "@{" + ",".join(parts) + "}"


def format_statement(stmt) -> str:
    from .ast import Assert, Comment, Query, Retract, Trigger

    if isinstance(stmt, Comment):
        return "//" + stmt.text
    if isinstance(stmt, (Assert, Retract)):
        sign = "+" if isinstance(stmt, Assert) else "-"
        text = f"{sign}{format_fact(stmt.fact)}."
        if stmt.annotation is not None:
            text += " " + format_annotation(stmt.annotation)
        return text
    if isinstance(stmt, Query):
        return f"?{stmt.predicate}({','.join(stmt.args)})."
    if isinstance(stmt, Trigger):
        return f"{stmt.name}({','.join(stmt.args)})."
    raise TypeError(f"not a statement: {stmt!r}")


def format_program(program) -> str:
    return "".join(format_statement(s) + "\n" for s in program)
