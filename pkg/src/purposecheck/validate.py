"""Advisory checks over a purpose graph.  Validation never fails; it reports."""

from __future__ import annotations

from dataclasses import dataclass, field

from .inference import saturate
from .model import PurposeGraph


@dataclass(frozen=True)
class Finding:
    code: str  # w1..w4
    message: str
    items: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message, "items": list(self.items)}


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.findings)

    def __len__(self) -> int:
        return len(self.findings)

    def codes(self) -> set[str]:
        return {f.code for f in self.findings}

    def to_json(self) -> list[dict]:
        return [f.to_json() for f in self.findings]


def validate_graph(graph: PurposeGraph) -> ValidationReport:
    state = saturate(graph)
    report = ValidationReport()
    facts = [f for f in graph]

    # w1: non-trivial specific-of cycles (strongly connected components)
    done: set[str] = set()
    for p in state.purposes:
        if p in done:
            continue
        scc = [q for q in state.more_general(p) if state.hop(q, p) >= 0]
        done.update(scc)
        if len(scc) > 1:
            report.findings.append(
                Finding("w1", f"specific-of cycle among {', '.join(scc)}", tuple(scc))
            )

    # w2: claims that can never activate
    for f in facts:
        if f.kind == "legal-basis-claim":
            basis, c, p = f.args
            if p not in state.sufficiently_specific:
                report.findings.append(
                    Finding("w2", f"{f}: purpose {p} is not sufficiently specific", (str(f),))
                )

    # w3: assets without subjects
    for d in state.assets:
        if not state.subjects_for(d):
            report.findings.append(
                Finding("w3", f"asset {d} has no subject-of edges", (d,))
            )

    # w4: DPAs naming actors that are not otherwise declared
    declared = {(f.args[0], f.args[1]) for f in facts if f.kind == "actor-decl"}
    claimers = {f.args[1] for f in facts if f.kind == "legal-basis-claim"}
    for f in facts:
        if f.kind != "dpa":
            continue
        c, u, _ = f.args
        missing = []
        if ("controller", c) not in declared and c not in claimers:
            missing.append(c)
        if ("processor", u) not in declared:
            missing.append(u)
        if missing:
            report.findings.append(
                Finding("w4", f"{f} references undeclared actors {', '.join(missing)}", tuple(missing))
            )
    return report
