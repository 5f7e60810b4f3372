"""Sequential execution of parsed programs against a working graph."""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable

from ..inference import Decision, decide_request
from ..model import (
    CapabilityViolation,
    MalformedFact,
    PurposeGraph,
    Request,
    assert_fact,
    expire_facts,
    retract_fact,
)
from .ast import Assert, Comment, Query, Retract, Trigger


class Outcome(enum.Enum):
    OK = "Ok"
    VIOLATION = "Violation"
    QUERY_SUCCESS = "QuerySuccess"
    QUERY_FAILURE = "QueryFailure"

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    Outcome.OK: "no violation",
    Outcome.VIOLATION: "violation",
    Outcome.QUERY_SUCCESS: "query succeeds",
    Outcome.QUERY_FAILURE: "query fails",
}


@dataclass(frozen=True)
class TraceEntry:
    statement: object
    outcome: Outcome
    decision: Decision | None = None
    message: str = ""


@dataclass
class Trace:
    entries: list[TraceEntry] = field(default_factory=list)
    graph_version: int = 0

    @property
    def outcomes(self) -> list[Outcome]:
        return [e.outcome for e in self.entries]

    @property
    def decisions(self) -> list[Decision]:
        return [e.decision for e in self.entries if e.decision is not None]

    @property
    def clean(self) -> bool:
        """True when nothing was violated, denied or failed."""
        return all(e.outcome in (Outcome.OK, Outcome.QUERY_SUCCESS) for e in self.entries)


class Executor:
    """Runs statements one at a time; subclasses may reroute the effects."""

    def __init__(
        self,
        graph: PurposeGraph | None = None,
        *,
        enforce_capabilities: bool = False,
        default_by: str = "dsl",
        clock: Callable[[], float] = time.time,
    ):
        self.graph = graph or PurposeGraph()
        self.enforce = enforce_capabilities
        self.default_by = default_by
        self.clock = clock
        self.requests: dict[tuple, Request] = {}
        self._counter = 0

    # -- hooks --------------------------------------------------------------

    def apply_assert(self, stmt: Assert) -> None:
        prov = self._provenance(stmt)
        self.graph = assert_fact(self.graph, stmt.fact, prov, self.enforce)

    def apply_retract(self, stmt: Retract) -> None:
        prov = self._provenance(stmt)
        self.graph = retract_fact(self.graph, stmt.fact, prov, self.enforce)

    def decide(self, request: Request) -> Decision:
        now = self.clock()
        self.graph, _ = expire_facts(self.graph, now)
        return decide_request(self.graph, request, now=now)

    def on_request(self, request: Request) -> None:
        pass

    # -- driver -------------------------------------------------------------

    def _provenance(self, stmt):
        from .ast import Annotation

        ann = stmt.annotation or Annotation()
        return ann.provenance(stmt.fact, self.default_by, self.clock())

    def _new_request(self, args) -> Request:
        self._counter += 1
        return Request(*args, request_id=f"{self.default_by}-{self._counter}")

    def step(self, stmt) -> TraceEntry | None:
        if isinstance(stmt, Comment):
            return None
        if isinstance(stmt, (Assert, Retract)):
            try:
                if isinstance(stmt, Assert):
                    self.apply_assert(stmt)
                else:
                    self.apply_retract(stmt)
            except (CapabilityViolation, MalformedFact) as exc:
                return TraceEntry(stmt, Outcome.VIOLATION, message=str(exc))
            return TraceEntry(stmt, Outcome.OK)
        if isinstance(stmt, Trigger) and stmt.name == "make-request":
            req = self.requests.get(stmt.args)
            if req is None:
                req = self._new_request(stmt.args)
                self.requests[stmt.args] = req
            self.on_request(req)
            return TraceEntry(stmt, Outcome.OK)
        if isinstance(stmt, (Query, Trigger)):
            is_query = isinstance(stmt, Query)
            req = self.requests.get(stmt.args)
            if req is None:
                outcome = Outcome.QUERY_FAILURE if is_query else Outcome.VIOLATION
                return TraceEntry(stmt, outcome, message="no matching request was made")
            if is_query:
                decision = self.decide(req)
                outcome = Outcome.QUERY_SUCCESS if decision.permitted else Outcome.QUERY_FAILURE
                return TraceEntry(stmt, outcome, decision)
            decision = self.decide_for_process(req)
            outcome = Outcome.OK if decision.permitted else Outcome.VIOLATION
            message = self.on_processed(req, decision) or ""
            return TraceEntry(stmt, outcome, decision, message)
        raise TypeError(f"not a statement: {stmt!r}")

    def decide_for_process(self, request: Request) -> Decision:
        """The decision a ``process`` trigger acts on; a fresh one by default."""
        return self.decide(request)

    def on_processed(self, request: Request, decision: Decision) -> str | None:
        """Called after every ``process``; may return a message for the trace."""
        return None

    def run(self, program) -> Trace:
        trace = Trace()
        for stmt in program:
            entry = self.step(stmt)
            if entry is not None:
                trace.entries.append(entry)
        trace.graph_version = self.graph.version
        return trace


def execute_program(
    program,
    graph: PurposeGraph | None = None,
    *,
    enforce_capabilities: bool = False,
    default_by: str = "dsl",
    clock: Callable[[], float] = time.time,
) -> tuple[Trace, PurposeGraph]:
    """Run ``program`` sequentially over ``graph``.

    Failures never raise: capability violations and malformed facts become
    ``Violation`` entries, failed queries ``QueryFailure`` entries.
    """
    ex = Executor(graph, enforce_capabilities=enforce_capabilities, default_by=default_by, clock=clock)
    trace = ex.run(program)
    return trace, ex.graph
