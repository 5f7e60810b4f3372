"""Statement types of the qualification/scenario language."""

from __future__ import annotations

from dataclasses import dataclass

from ..model import Capability, Fact, Provenance, licensing_capability


@dataclass(frozen=True)
class Annotation:
    """Optional provenance written after a statement: ``@{by=..,cap=..}``."""

    by: str | None = None
    cap: str | None = None
    at: float | None = None
    exp: float | None = None
    sig: bytes | None = None

    def provenance(self, fact: Fact, default_by: str, default_at: float) -> Provenance:
        cap = Capability(self.cap) if self.cap else licensing_capability(fact.kind)
        return Provenance(
            asserted_by=self.by or default_by,
            capability=cap,
            asserted_at=self.at if self.at is not None else default_at,
            expires_at=self.exp,
            signature=self.sig,
        )


@dataclass(frozen=True)
class Assert:
    fact: Fact
    annotation: Annotation | None = None


@dataclass(frozen=True)
class Retract:
    fact: Fact
    annotation: Annotation | None = None


@dataclass(frozen=True)
class Trigger:
    name: str  # "make-request" | "process"
    args: tuple[str, str, str, str]


@dataclass(frozen=True)
class Query:
    predicate: str  # always "lawful-request"
    args: tuple[str, str, str, str]


@dataclass(frozen=True)
class Comment:
    text: str


Statement = Assert | Retract | Trigger | Query | Comment
Program = list
TRIGGERS = ("make-request", "process")
