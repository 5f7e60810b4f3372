"""Graph file reading/writing and DOT export."""

from __future__ import annotations

from .dsl.ast import Annotation, Assert
from .dsl.format import format_statement
from .fixtures import load_graph
from .inference import saturate
from .model import PurposeGraph


def dump_graph(graph: PurposeGraph) -> str:
    """Serialize a graph as graph-file text with full provenance."""
    lines = []
    for fact in graph:
        prov = graph.provenance(fact)
        ann = Annotation(
            by=prov.asserted_by,
            cap=prov.capability.value,
            at=prov.asserted_at,
            exp=prov.expires_at,
            sig=prov.signature,
        )
        lines.append(format_statement(Assert(fact, ann)) + "\n")
    return "".join(lines)


def read_graph(path, *, now: float = 0) -> PurposeGraph:
    with open(path, encoding="utf-8") as fh:
        return load_graph(fh.read(), now=now)


def _q(name: str) -> str:
    return '"' + name.replace('"', '\\"') + '"'


def to_dot(graph: PurposeGraph) -> str:
    """Render the purpose graph in DOT.

    Purposes are filled ellipses, processing actions dotted, assets dashed;
    relation edges use the abbreviations po, so, cw and ss.
    """
    state = saturate(graph)
    ss = {f.args[0] for f in graph if f.kind == "sufficiently-specific"}
    lines = ["digraph purpose_graph {", "  rankdir=LR;"]
    for p in state.purposes:
        label = f"{p}\\n(ss)" if p in ss else p
        lines.append(f'  {_q(p)} [shape=ellipse, style=filled, fillcolor="#dde8f5", label={_q(label)}];')
    for a in state.actions:
        lines.append(f"  {_q(a)} [shape=ellipse, style=dotted];")
    for d in state.assets:
        lines.append(f"  {_q(d)} [shape=box, style=dashed];")
    for s in state.subjects:
        lines.append(f"  {_q(s)} [shape=plaintext];")
    for c in state.controllers:
        lines.append(f"  {_q(c)} [shape=house];")
    edge_labels = {
        "prerequisite-of": "po",
        "specific-of": "so",
        "compatible-with": "cw",
        "subject-of": "subject of",
    }
    for f in graph:
        if f.kind in edge_labels:
            a, b = f.args
            lines.append(f"  {_q(a)} -> {_q(b)} [label={_q(edge_labels[f.kind])}];")
        elif f.kind == "legal-basis-claim":
            basis, c, p = f.args
            lines.append(f"  {_q(c)} -> {_q(p)} [label={_q('legal-basis-' + basis)}, style=bold];")
        elif f.kind in ("consent-given", "contract", "has-been-informed"):
            s, c, p = f.args
            lines.append(f"  {_q(s)} -> {_q(p)} [label={_q(f'{f.kind} ({c})')}, style=dashed];")
        elif f.kind == "dpa":
            c, u, p = f.args
            lines.append(f"  {_q(u)} -> {_q(c)} [label={_q(f'dpa ({p})')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
