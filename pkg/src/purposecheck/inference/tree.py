"""Derivation trees: the recorded proof behind every Permit."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

from ..terms import format_key

RULE_IDS = (
    "AXIOM",
    "EQ1-BASE",
    "EQ2-CONTROLLER-IS-PROCESSOR",
    "EQ3-DPA",
    "EQ4-LEGITIMATE-INTEREST",
    "EQ5-CONSENT",
    "EQ4x-CONTRACT",
    "EQ4x-LEGAL-OBLIGATION",
    "EQ4x-VITAL-INTEREST",
    "EQ4x-PUBLIC-INTEREST",
    "EQ6-CONTRACT-INFORMS",
    "CONSENT-INFORMS",
    "EQ7-SPECIFIC",
    "EQ8-COMPATIBLE",
    "EQ9-SPECIFICITY-PROP",
    "EQ10-TRANSITIVE",
    "EQ11-REFLEXIVE",
    "EQ12-TERNARY",
    "PROP-CONSENT-SPECIFIC",
    "PROP-CONTRACT-SPECIFIC",
)

BASIS_RULES = {
    "consent": "EQ5-CONSENT",
    "contract": "EQ4x-CONTRACT",
    "legal-obligation": "EQ4x-LEGAL-OBLIGATION",
    "vital-interest": "EQ4x-VITAL-INTEREST",
    "public-interest": "EQ4x-PUBLIC-INTEREST",
    "legitimate-interest": "EQ4-LEGITIMATE-INTEREST",
}
RULE_BASIS = {v: k for k, v in BASIS_RULES.items()}


@dataclass(frozen=True)
class DerivationTree:
    conclusion: tuple[str, ...]
    rule_id: str
    children: tuple["DerivationTree", ...] = ()
    # per quantified subject, the trees of that subject's premises
    forall_block: tuple[tuple[str, tuple["DerivationTree", ...]], ...] | None = None

    def walk(self) -> Iterator["DerivationTree"]:
        yield self
        for c in self.children:
            yield from c.walk()
        for _, trees in self.forall_block or ():
            for t in trees:
                yield from t.walk()

    def axioms(self) -> list[tuple[str, ...]]:
        """Conclusions of all AXIOM leaves, in tree order, without duplicates."""
        seen: dict[tuple, None] = {}
        for node in self.walk():
            if node.rule_id == "AXIOM":
                seen.setdefault(node.conclusion, None)
        return list(seen)

    def find(self, predicate: str) -> "DerivationTree | None":
        for node in self.walk():
            if node.conclusion[0] == predicate:
                return node
        return None

    def to_json(self) -> dict:
        out: dict = {"rule": self.rule_id, "conclusion": format_key(self.conclusion)}
        out["key"] = list(self.conclusion)
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        if self.forall_block is not None:
            out["forall"] = [
                {"subject": s, "trees": [t.to_json() for t in trees]}
                for s, trees in self.forall_block
            ]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "DerivationTree":
        forall = data.get("forall")
        return cls(
            conclusion=tuple(data["key"]),
            rule_id=data["rule"],
            children=tuple(cls.from_json(c) for c in data.get("children", ())),
            forall_block=None
            if forall is None
            else tuple(
                (e["subject"], tuple(cls.from_json(t) for t in e["trees"])) for e in forall
            ),
        )

    def to_text(self, indent: int = 0) -> str:
        """Canonical indented rendering, one node per line."""
        pad = "  " * indent
        lines = [f"{pad}{format_key(self.conclusion)}  [{self.rule_id}]"]
        for c in self.children:
            lines.append(c.to_text(indent + 1))
        if self.forall_block is not None:
            if not self.forall_block:
                lines.append(f"{pad}  forall: (no subjects)")
            for subject, trees in self.forall_block:
                lines.append(f"{pad}  forall {subject}:")
                for t in trees:
                    lines.append(t.to_text(indent + 2))
        return "\n".join(lines)

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
