"""Domain types and the immutable purpose-graph store.

A purpose graph holds the case-specific qualifications (facts) that the
inference engine reasons over.  Every fact carries a :class:`Provenance`
recording who asserted it, under which administration capability, and when
it stops being valid.
"""

from __future__ import annotations

import enum
import re
import threading
import uuid
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Iterator, Mapping

ATOM_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")


class PurposeCheckError(Exception):
    """Base class for all errors raised by this package."""


class MalformedFact(PurposeCheckError, ValueError):
    pass


class MalformedRequest(PurposeCheckError, ValueError):
    pass


class CapabilityViolation(PurposeCheckError):
    def __init__(self, capability: "Capability", kind: str, who: str | None = None):
        self.capability = capability
        self.kind = kind
        self.who = who
        msg = f"capability {capability.value} does not license {kind!r} facts"
        if who:
            msg = f"{who}: {msg}"
        super().__init__(msg)


def is_atom(value: object) -> bool:
    return isinstance(value, str) and ATOM_RE.match(value) is not None


def check_atom(value: object, what: str = "atom") -> str:
    if not is_atom(value):
        raise MalformedFact(f"invalid {what}: {value!r}")
    return value  # type: ignore[return-value]


class Capability(enum.Enum):
    CONTROL = "Control"
    QUALIFY = "Qualify"
    COLLECT = "Collect"
    PERFORM = "Perform"
    CONSENT = "Consent"


class Basis(enum.Enum):
    """The six lawful grounds a controller can claim for a purpose."""

    CONSENT = "consent"
    CONTRACT = "contract"
    LEGAL_OBLIGATION = "legal-obligation"
    VITAL_INTEREST = "vital-interest"
    PUBLIC_INTEREST = "public-interest"
    LEGITIMATE_INTEREST = "legitimate-interest"


BASIS_ORDER = tuple(b.value for b in Basis)
ACTOR_KINDS = ("controller", "processor", "subject", "authority")


@dataclass(frozen=True)
class FactKind:
    name: str
    sorts: tuple[str, ...]
    capability: Capability | None


# Argument sorts drive sort derivation: every atom in a "purpose" slot is a
# purpose, and so on.  "basis" and "actor-kind" slots are enumerations.
FACT_KINDS: dict[str, FactKind] = {
    k.name: k
    for k in [
        FactKind("subject-of", ("subject", "asset"), Capability.COLLECT),
        FactKind("asset", ("asset",), Capability.COLLECT),
        FactKind("prerequisite-of", ("action", "purpose"), Capability.QUALIFY),
        FactKind("specific-of", ("purpose", "purpose"), Capability.QUALIFY),
        FactKind("sufficiently-specific", ("purpose",), Capability.QUALIFY),
        FactKind("compatible-with", ("purpose", "purpose"), Capability.QUALIFY),
        FactKind("legal-basis-claim", ("basis", "controller", "purpose"), Capability.CONTROL),
        FactKind("consent-given", ("subject", "controller", "purpose"), Capability.CONSENT),
        FactKind("contract", ("subject", "controller", "purpose"), Capability.CONTROL),
        FactKind("dpa", ("controller", "processor", "purpose"), Capability.CONTROL),
        FactKind("has-been-informed", ("subject", "controller", "purpose"), Capability.CONTROL),
        # Not covered by the capability table; licensed by the capability
        # whose facts imply the same sort membership.
        FactKind("actor-decl", ("actor-kind", "actor"), Capability.CONTROL),
        FactKind("purpose-decl", ("purpose",), Capability.QUALIFY),
        FactKind("action-decl", ("action",), Capability.QUALIFY),
        FactKind("processing-purpose-for", ("action", "purpose"), Capability.QUALIFY),
    ]
}


def licenses(capability: Capability, kind: str) -> bool:
    """Whether facts of ``kind`` may be contributed under ``capability``."""
    fk = FACT_KINDS.get(kind)
    return fk is not None and fk.capability is capability


def licensing_capability(kind: str) -> Capability:
    return FACT_KINDS[kind].capability  # type: ignore[return-value]


@dataclass(frozen=True, order=True)
class Fact:
    """One qualification: a predicate name plus atom arguments.

    Equality is structural; provenance lives beside the fact in the graph.
    ``legal-basis-claim`` carries the basis kind as its first argument and
    ``actor-decl`` carries the actor kind as its first argument.
    """

    kind: str
    args: tuple[str, ...]

    def __post_init__(self) -> None:
        fk = FACT_KINDS.get(self.kind)
        if fk is None:
            raise MalformedFact(f"unknown fact kind {self.kind!r}")
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != len(fk.sorts):
            raise MalformedFact(
                f"{self.kind} takes {len(fk.sorts)} arguments, got {len(self.args)}"
            )
        for sort, arg in zip(fk.sorts, self.args):
            if sort == "basis":
                if arg not in BASIS_ORDER:
                    raise MalformedFact(f"unknown legal basis {arg!r}")
            elif sort == "actor-kind":
                if arg not in ACTOR_KINDS:
                    raise MalformedFact(f"unknown actor kind {arg!r}")
            else:
                check_atom(arg, sort)

    @classmethod
    def of(cls, kind: str, *args: str) -> "Fact":
        return cls(kind, tuple(args))

    @property
    def key(self) -> tuple[str, ...]:
        return (self.kind, *self.args)

    def sorted_atoms(self) -> Iterator[tuple[str, str]]:
        """Yield (sort, atom) for every atom argument."""
        sorts = FACT_KINDS[self.kind].sorts
        if self.kind == "actor-decl":
            yield ("subject" if self.args[0] == "subject" else self.args[0], self.args[1])
            return
        for sort, arg in zip(sorts, self.args):
            if sort != "basis":
                yield sort, arg

    def __str__(self) -> str:
        from .terms import format_key

        return format_key(self.key)


@dataclass(frozen=True)
class Provenance:
    asserted_by: str
    capability: Capability
    asserted_at: float = 0
    expires_at: float | None = None
    signature: bytes | None = None

    def __post_init__(self) -> None:
        check_atom(self.asserted_by, "asserter")
        if not isinstance(self.capability, Capability):
            object.__setattr__(self, "capability", Capability(self.capability))
        if self.expires_at is not None and not self.expires_at > self.asserted_at:
            raise MalformedFact(
                f"expires_at ({self.expires_at}) must be after asserted_at ({self.asserted_at})"
            )

    def to_json(self) -> dict:
        out: dict = {
            "by": self.asserted_by,
            "cap": self.capability.value,
            "at": self.asserted_at,
        }
        if self.expires_at is not None:
            out["exp"] = self.expires_at
        if self.signature is not None:
            out["sig"] = self.signature.hex()
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "Provenance":
        sig = data.get("sig")
        return cls(
            asserted_by=data["by"],
            capability=Capability(data["cap"]),
            asserted_at=data.get("at", 0),
            expires_at=data.get("exp"),
            signature=bytes.fromhex(sig) if sig is not None else None,
        )


@dataclass(frozen=True)
class Mutation:
    """One entry of a graph's mutation history."""

    op: str  # "assert" | "retract" | "expire"
    fact: Fact
    provenance: Provenance | None
    version: int  # graph version after this mutation

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "fact": str(self.fact),
            "prov": self.provenance.to_json() if self.provenance else None,
            "version": self.version,
        }


@dataclass(frozen=True)
class _HistoryNode:
    prev: "_HistoryNode | None"
    entry: Mutation


@dataclass(frozen=True)
class PurposeGraph:
    """Immutable snapshot of asserted facts with provenance.

    Mutating operations return a new graph; the receiver is never changed.
    """

    _facts: Mapping[Fact, Provenance] = field(default_factory=lambda: MappingProxyType({}))
    version: int = 0
    _history: _HistoryNode | None = field(default=None, repr=False, compare=False)

    @property
    def facts(self) -> Mapping[Fact, Provenance]:
        return self._facts

    def fact_set(self) -> frozenset[Fact]:
        return frozenset(self._facts)

    def __contains__(self, fact: object) -> bool:
        return fact in self._facts

    def __len__(self) -> int:
        return len(self._facts)

    def __iter__(self) -> Iterator[Fact]:
        return iter(sorted(self._facts))

    def provenance(self, fact: Fact) -> Provenance | None:
        return self._facts.get(fact)

    def history(self) -> list[Mutation]:
        out = []
        node = self._history
        while node is not None:
            out.append(node.entry)
            node = node.prev
        out.reverse()
        return out

    def _with(self, facts: dict[Fact, Provenance], entry: Mutation) -> "PurposeGraph":
        return PurposeGraph(
            MappingProxyType(facts), entry.version, _HistoryNode(self._history, entry)
        )


def _check_capability(fact: Fact, prov: Provenance | None, enforce: bool) -> None:
    if enforce:
        if prov is None:
            raise CapabilityViolation(Capability.PERFORM, fact.kind)
        if not licenses(prov.capability, fact.kind):
            raise CapabilityViolation(prov.capability, fact.kind, prov.asserted_by)


def assert_fact(
    graph: PurposeGraph,
    fact: Fact,
    prov: Provenance,
    enforce_capabilities: bool = False,
) -> PurposeGraph:
    """Return ``graph`` with ``fact`` present under provenance ``prov``.

    Re-asserting an existing fact replaces its provenance and still bumps the
    version, so the replacement is visible in the history.
    """
    if not isinstance(fact, Fact):
        raise MalformedFact(f"not a fact: {fact!r}")
    _check_capability(fact, prov, enforce_capabilities)
    facts = dict(graph.facts)
    facts[fact] = prov
    return graph._with(facts, Mutation("assert", fact, prov, graph.version + 1))


def retract_fact(
    graph: PurposeGraph,
    fact: Fact,
    prov: Provenance | None = None,
    enforce_capabilities: bool = False,
) -> PurposeGraph:
    """Return ``graph`` without ``fact``; a no-op when the fact is absent."""
    _check_capability(fact, prov, enforce_capabilities)
    if fact not in graph.facts:
        return graph
    facts = dict(graph.facts)
    del facts[fact]
    return graph._with(facts, Mutation("retract", fact, prov, graph.version + 1))


def expire_facts(graph: PurposeGraph, now: float) -> tuple[PurposeGraph, list[Fact]]:
    """Drop every fact whose ``expires_at <= now``.

    Expired facts are returned in sorted order and each removal is recorded
    as a separate ``expire`` mutation.
    """
    expired = sorted(
        f for f, p in graph.facts.items() if p.expires_at is not None and p.expires_at <= now
    )
    g = graph
    for f in expired:
        facts = dict(g.facts)
        prov = facts.pop(f)
        g = g._with(facts, Mutation("expire", f, prov, g.version + 1))
    return g, expired


def graph_from_facts(facts, prov: Provenance | None = None) -> PurposeGraph:
    """Convenience constructor used by tests and fixtures."""
    g = PurposeGraph()
    for f in facts:
        p = prov or Provenance("fixture", licensing_capability(f.kind))
        g = assert_fact(g, f, p)
    return g


def replay(history, base: PurposeGraph | None = None) -> PurposeGraph:
    """Rebuild a graph by re-applying mutations in order."""
    g = base or PurposeGraph()
    for m in history:
        if m.op == "assert":
            g = assert_fact(g, m.fact, m.provenance)
        else:
            facts = dict(g.facts)
            facts.pop(m.fact, None)
            g = g._with(facts, replace(m, version=g.version + 1))
    return g


@dataclass(frozen=True)
class ActorRef:
    id: str
    declared_kind: str

    def __post_init__(self) -> None:
        check_atom(self.id, "actor")
        if self.declared_kind not in ACTOR_KINDS:
            raise MalformedFact(f"unknown actor kind {self.declared_kind!r}")

    def as_fact(self) -> Fact:
        return Fact("actor-decl", (self.declared_kind, self.id))


@dataclass(frozen=True)
class Request:
    actor: str
    action: str
    purpose: str
    asset: str
    request_id: str = field(default_factory=lambda: uuid.uuid4().hex)

    def __post_init__(self) -> None:
        for name in ("actor", "action", "purpose", "asset"):
            value = getattr(self, name)
            if not is_atom(value):
                raise MalformedRequest(f"invalid {name}: {value!r}")
        if not isinstance(self.request_id, str) or not self.request_id:
            raise MalformedRequest("request_id must be a non-empty string")

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.actor, self.action, self.purpose, self.asset)

    def to_json(self) -> dict:
        return {
            "actor": self.actor,
            "action": self.action,
            "purpose": self.purpose,
            "asset": self.asset,
            "request_id": self.request_id,
        }


class GraphStore:
    """Single-writer, many-reader holder of the latest graph snapshot.

    Readers call :meth:`snapshot` and get an immutable graph; writers go
    through :meth:`update`, which serializes updates under a lock.
    """

    def __init__(self, graph: PurposeGraph | None = None):
        self._graph = graph or PurposeGraph()
        self._lock = threading.Lock()

    def snapshot(self) -> PurposeGraph:
        return self._graph

    def update(self, fn) -> PurposeGraph:
        with self._lock:
            result = fn(self._graph)
            graph = result[0] if isinstance(result, tuple) else result
            self._graph = graph
            return result
