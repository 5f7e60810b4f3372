"""Access to the bundled example graphs and scenario scripts."""

from __future__ import annotations

from importlib import resources

from ..dsl import Annotation, Assert, Comment, parse_program
from ..model import PurposeGraph, assert_fact


def fixture_text(name: str) -> str:
    return resources.files("purposecheck.fixtures").joinpath(name).read_text("utf-8")


def fixture_program(name: str) -> list:
    return parse_program(fixture_text(name))


def load_graph(text: str, *, now: float = 0, default_by: str = "loader") -> PurposeGraph:
    """Build a graph from graph-file text (assertions only)."""
    g = PurposeGraph()
    for stmt in parse_program(text):
        if isinstance(stmt, Assert):
            ann = stmt.annotation or Annotation()
            g = assert_fact(g, stmt.fact, ann.provenance(stmt.fact, default_by, now))
        elif not isinstance(stmt, Comment):
            raise ValueError(f"graph files may only contain assertions: {stmt!r}")
    return g


def fixture_graph(name: str, *, now: float = 0) -> PurposeGraph:
    return load_graph(fixture_text(name), now=now)
