"""Recursive-descent parser for ``.plg`` qualification/scenario programs.

Grammar::

    program    := (comment | statement)*
    statement  := ("+" | "-") fact "." [annotation]
                | "?" "lawful-request" args "."
                | trigger args "."
    fact       := PREDICATE args
    args       := "(" ATOM ("," ATOM)* ")"
    annotation := "@" "{" [KEY "=" VALUE ("," KEY "=" VALUE)*] "}"
    comment    := "//" <text up to end of line>
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..model import BASIS_ORDER, Capability, Fact, MalformedFact, PurposeCheckError
from .ast import Annotation, Assert, Comment, Query, Retract, Trigger, TRIGGERS


class DslSyntaxError(PurposeCheckError, ValueError):
    def __init__(self, line: int, column: int, expected, found: str = ""):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.found = found
        exp = ", ".join(self.expected)
        super().__init__(f"{line}:{column}: expected {exp}" + (f", found {found!r}" if found else ""))


class UnknownPredicate(PurposeCheckError, ValueError):
    def __init__(self, name: str, line: int, column: int):
        self.name = name
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: unknown predicate {name!r}")


# surface name -> (fact kind, fixed leading args, number of atom args)
FACT_PREDICATES: dict[str, tuple[str, tuple[str, ...], int]] = {
    "subject-of": ("subject-of", (), 2),
    "asset": ("asset", (), 1),
    "prerequisite-of": ("prerequisite-of", (), 2),
    "specific-of": ("specific-of", (), 2),
    "sufficiently-specific": ("sufficiently-specific", (), 1),
    "compatible-with": ("compatible-with", (), 2),
    "consent-given": ("consent-given", (), 3),
    "contract": ("contract", (), 3),
    "dpa": ("dpa", (), 3),
    "has-been-informed": ("has-been-informed", (), 3),
    "purpose": ("purpose-decl", (), 1),
    "processing-action": ("action-decl", (), 1),
    "processing-purpose-for": ("processing-purpose-for", (), 2),
    **{kind: ("actor-decl", (kind,), 1) for kind in ("controller", "processor", "subject", "authority")},
    **{f"legal-basis-{b}": ("legal-basis-claim", (b,), 2) for b in BASIS_ORDER},
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z][A-Za-z0-9_-]*)
  | (?P<num>[0-9][0-9A-Za-z_.]*)
  | (?P<punct>[+\-?().,@{}=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslSyntaxError(line, pos - line_start + 1, ["a token"], text[pos])
        kind = m.lastgroup
        tok_text = m.group()
        if kind != "ws":
            tokens.append(Token(kind, tok_text, line, pos - line_start + 1))
        nl = tok_text.count("\n")
        if nl:
            line += nl
            line_start = pos + tok_text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, expected) -> None:
        tok = self.peek()
        raise DslSyntaxError(tok.line, tok.column, expected, tok.text or "end of input")

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != text:
            self.fail([repr(text)])
        return self.next()

    def atom(self) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            self.fail(["atom"])
        return self.next().text

    def args(self, arity: int | None) -> tuple[str, ...]:
        self.expect("(")
        out = [self.atom()]
        while self.peek().text == "," and self.peek().kind == "punct":
            if arity is not None and len(out) == arity:
                self.fail(["')'"])
            self.next()
            out.append(self.atom())
        if arity is not None and len(out) < arity:
            self.fail(["','"])
        self.expect(")")
        return tuple(out)

    def program(self) -> list:
        out = []
        while self.peek().kind != "eof":
            out.append(self.statement())
        return out

    def statement(self):
        tok = self.peek()
        if tok.kind == "comment":
            self.next()
            return Comment(tok.text[2:])
        if tok.kind == "punct" and tok.text in "+-":
            self.next()
            fact = self.fact()
            self.expect(".")
            ann = self.annotation() if self.peek().text == "@" else None
            return Assert(fact, ann) if tok.text == "+" else Retract(fact, ann)
        if tok.kind == "punct" and tok.text == "?":
            self.next()
            name = self.peek()
            if name.kind != "ident":
                self.fail(["'lawful-request'"])
            if name.text != "lawful-request":
                raise UnknownPredicate(name.text, name.line, name.column)
            self.next()
            args = self.args(4)
            self.expect(".")
            return Query("lawful-request", args)
        if tok.kind == "ident":
            if tok.text in TRIGGERS:
                self.next()
                args = self.args(4)
                self.expect(".")
                return Trigger(tok.text, args)
            raise UnknownPredicate(tok.text, tok.line, tok.column)
        self.fail(["'+'", "'-'", "'?'", "trigger", "comment"])

    def fact(self) -> Fact:
        tok = self.peek()
        if tok.kind != "ident":
            self.fail(["predicate"])
        spec = FACT_PREDICATES.get(tok.text)
        if spec is None:
            raise UnknownPredicate(tok.text, tok.line, tok.column)
        self.next()
        kind, lead, arity = spec
        args = self.args(arity)
        try:
            return Fact(kind, lead + args)
        except MalformedFact as exc:
            raise DslSyntaxError(tok.line, tok.column, ["well-formed fact"], str(exc)) from None

    def annotation(self) -> Annotation:
        self.expect("@")
        self.expect("{")
        fields: dict = {}
        if self.peek().text == "}":
            self.next()
            return Annotation()
        while True:
            key = self.peek()
            if key.kind != "ident" or key.text not in ("by", "cap", "at", "exp", "sig"):
                self.fail(["by", "cap", "at", "exp", "sig"])
            if key.text in fields:
                self.fail(["a new annotation key"])
            self.next()
            self.expect("=")
            fields[key.text] = self.annotation_value(key.text)
            if self.peek().text == ",":
                self.next()
                continue
            self.expect("}")
            return Annotation(**fields)

    def annotation_value(self, key: str):
        tok = self.peek()
        if key == "by":
            return self.atom()
        if key == "cap":
            if tok.kind != "ident" or tok.text not in {c.value for c in Capability}:
                self.fail([c.value for c in Capability])
            return self.next().text
        if key == "sig":
            if tok.kind not in ("ident", "num") or not re.fullmatch(r"(?:[0-9a-fA-F]{2})+", tok.text):
                self.fail(["hex bytes"])
            return bytes.fromhex(self.next().text)
        if tok.kind != "num" or not re.fullmatch(r"[0-9]+(?:\.[0-9]+)?", tok.text):
            self.fail(["number"])
        text = self.next().text
        return float(text) if "." in text else int(text)


def parse_program(text: str) -> list:
    """Parse program text into a list of statements."""
    return _Parser(text).program()


def parse_fact(text: str) -> Fact:
    """Parse a single fact such as ``subject-of(Alice,AlicesRecords)``."""
    p = _Parser(text)
    fact = p.fact()
    if p.peek().text == ".":
        p.next()
    if p.peek().kind != "eof":
        p.fail(["end of input"])
    return fact
