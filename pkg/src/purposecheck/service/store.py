"""Decision store: the graph, the append-only log, and the records it holds.

The log is line-delimited JSON, one canonical record per line, fsynced
before any caller sees the effect.  Three record types appear:

``{"type": "mutation", "op": ..., "fact": ..., "prov": ..., "version": ...}``
    one graph mutation (assert, retract or expire)
``{"type": "decision", "record": {...}}``
    a DecisionRecord at the time it was made
``{"type": "processed", "request_id": ..., "at": ...}``
    the single processed_at transition of a Permit record

On start-up the log is replayed; it is the authoritative state.  Snapshots
are graph files written every ``snapshot_every`` mutations for inspection
and fast diffing; they are never read back.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

from ..dsl import parse_fact
from ..graphio import dump_graph
from ..inference import (
    RULE_SET_VERSION,
    Decision,
    Diagnosis,
    Premise,
    TernaryRequest,
    decide_request,
    decide_ternary,
)
from ..model import (
    Fact,
    GraphStore,
    MalformedRequest,
    Mutation,
    Provenance,
    PurposeCheckError,
    PurposeGraph,
    Request,
    assert_fact,
    expire_facts,
    replay,
    retract_fact,
)

log = logging.getLogger("purposecheck.service")


class StoreUnavailable(PurposeCheckError):
    pass


class UnknownRequest(PurposeCheckError, KeyError):
    def __str__(self) -> str:
        return f"unknown request {self.args[0]!r}"


class NotPermitted(PurposeCheckError):
    pass


class AlreadyProcessed(PurposeCheckError):
    pass


class DuplicateRequest(PurposeCheckError):
    pass


PIP_VETO_PREFIX = "pip-veto: "

# A PIP hook sees a Permit and may return a reason to veto it.
PipHook = Callable[[Request, Decision], "str | None"]


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def tree_ref(decision: Decision) -> str | None:
    if decision.tree is None:
        return None
    return "sha256:" + hashlib.sha256(decision.tree.canonical().encode()).hexdigest()


def apply_veto(decision: Decision, reason: str) -> Decision:
    diag = Diagnosis((Premise(PIP_VETO_PREFIX + reason, False),), ())
    return replace(decision, outcome="deny", tree=None, diagnosis=diag)


@dataclass(frozen=True)
class DecisionRecord:
    request: Request | TernaryRequest
    decision: Decision
    graph_version: int
    rule_set_version: str
    processed_at: float | None = None

    def to_json(self) -> dict:
        return {
            "request": self.request.to_json(),
            "decision": self.decision.to_json(),
            "graph_version": self.graph_version,
            "rule_set_version": self.rule_set_version,
            "processed_at": self.processed_at,
        }

    @classmethod
    def from_json(cls, data: dict) -> "DecisionRecord":
        decision = Decision.from_json(data["decision"])
        return cls(
            decision.request,
            decision,
            data["graph_version"],
            data["rule_set_version"],
            data.get("processed_at"),
        )


@dataclass(frozen=True)
class SubjectEntry:
    asset: str
    action: str
    purpose: str
    basis: str
    controller: str
    decided_at: float
    processed: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class SubjectReport:
    subject: str
    entries: tuple[SubjectEntry, ...] = ()

    def to_json(self) -> dict:
        return {"subject": self.subject, "entries": [e.to_json() for e in self.entries]}


@dataclass(frozen=True)
class AuditReport:
    rule_set_version: str
    history: tuple[dict, ...] = ()
    decisions: tuple[dict, ...] = ()

    def to_json(self) -> dict:
        return {
            "rule_set_version": self.rule_set_version,
            "history": list(self.history),
            "decisions": list(self.decisions),
        }

    @classmethod
    def from_json(cls, data: dict) -> "AuditReport":
        return cls(data["rule_set_version"], tuple(data["history"]), tuple(data["decisions"]))


def _mutation_json(m: Mutation) -> dict:
    return {"type": "mutation", **m.to_json()}


def _mutation_from_json(data: dict) -> Mutation:
    prov = Provenance.from_json(data["prov"]) if data.get("prov") else None
    return Mutation(data["op"], parse_fact(data["fact"]), prov, data["version"])


def _purpose_of(decision: Decision) -> str:
    req = decision.request
    if isinstance(req, Request):
        return req.purpose
    # ternary: the purpose the engine selected is on the first child
    return decision.tree.children[0].conclusion[2]


class ServiceStore:
    """State behind the decision service.

    ``log_path=None`` keeps everything in memory (used by tests and the
    in-process simulator).
    """

    def __init__(
        self,
        log_path: str | os.PathLike | None = None,
        *,
        snapshot_dir: str | os.PathLike | None = None,
        snapshot_every: int = 100,
        rule_set_version: str = RULE_SET_VERSION,
        ternary: bool = False,
        enforce_capabilities: bool = False,
        pip_hook: PipHook | None = None,
        clock: Callable[[], float] = time.time,
    ):
        self.rule_set_version = rule_set_version
        self.ternary = ternary
        self.enforce = enforce_capabilities
        self.pip_hook = pip_hook
        self.clock = clock
        self.snapshot_every = snapshot_every
        self.log_path = Path(log_path) if log_path is not None else None
        self.snapshot_dir = Path(snapshot_dir) if snapshot_dir is not None else None
        self.graphs = GraphStore()
        self.records: dict[str, DecisionRecord] = {}
        self._order: list[str] = []
        self._records_lock = threading.Lock()
        self._log_lock = threading.Lock()
        self._fh = None
        self._since_snapshot = 0
        if self.log_path is not None:
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
            if self.log_path.exists():
                self._load()
            self._fh = open(self.log_path, "a", encoding="utf-8")

    # -- persistence --------------------------------------------------------

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _append(self, entries: list[dict]) -> None:
        if self._fh is None or not entries:
            return
        try:
            with self._log_lock:
                self._fh.write("".join(_dumps(e) + "\n" for e in entries))
                self._fh.flush()
                os.fsync(self._fh.fileno())
        except OSError as exc:
            raise StoreUnavailable(f"cannot write log: {exc}") from exc

    def _load(self) -> None:
        graph = PurposeGraph()
        with open(self.log_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                entry = json.loads(line)
                kind = entry["type"]
                if kind == "mutation":
                    graph = replay([_mutation_from_json(entry)], graph)
                elif kind == "decision":
                    rec = DecisionRecord.from_json(entry["record"])
                    self.records[rec.request.request_id] = rec
                    self._order.append(rec.request.request_id)
                elif kind == "processed":
                    rid = entry["request_id"]
                    self.records[rid] = replace(self.records[rid], processed_at=entry["at"])
                else:
                    raise StoreUnavailable(f"{self.log_path}:{lineno}: unknown record type {kind!r}")
        self.graphs = GraphStore(graph)

    def _maybe_snapshot(self, graph: PurposeGraph, n: int) -> None:
        self._since_snapshot += n
        if self.snapshot_dir is None or self._since_snapshot < self.snapshot_every:
            return
        self._since_snapshot = 0
        self.write_snapshot(graph)

    def write_snapshot(self, graph: PurposeGraph | None = None) -> Path | None:
        if self.snapshot_dir is None:
            return None
        graph = graph or self.graphs.snapshot()
        self.snapshot_dir.mkdir(parents=True, exist_ok=True)
        path = self.snapshot_dir / f"snapshot-{graph.version:08d}.graph"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(dump_graph(graph), encoding="utf-8")
        os.replace(tmp, path)
        return path

    # -- administration -----------------------------------------------------

    def _mutate(self, fn) -> tuple[PurposeGraph, list]:
        """Apply ``fn(graph) -> (graph, payload)`` under the writer lock,
        logging the new mutations before the new snapshot becomes visible."""

        def step(graph):
            new, payload = fn(graph)
            fresh = new.history()[len(graph.history()):] if new is not graph else []
            self._append([_mutation_json(m) for m in fresh])
            return new, payload, len(fresh)

        new, payload, n = self.graphs.update(step)
        if n:
            self._maybe_snapshot(new, n)
        return new, payload

    def assert_facts(self, items: list[tuple[Fact, Provenance]]) -> PurposeGraph:
        def fn(g):
            for fact, prov in items:
                g = assert_fact(g, fact, prov, self.enforce)
            return g, None

        return self._mutate(fn)[0]

    def retract_facts(self, items: list[tuple[Fact, Provenance | None]]) -> PurposeGraph:
        def fn(g):
            for fact, prov in items:
                g = retract_fact(g, fact, prov, self.enforce)
            return g, None

        return self._mutate(fn)[0]

    def sweep(self, now: float | None = None) -> list[Fact]:
        now = self.clock() if now is None else now
        return self._mutate(lambda g: expire_facts(g, now))[1]

    def graph(self) -> PurposeGraph:
        return self.graphs.snapshot()

    # -- decisions ----------------------------------------------------------

    def _evaluate(self, graph: PurposeGraph, request, now: float) -> Decision:
        if isinstance(request, TernaryRequest):
            decision = decide_ternary(
                graph,
                request.actor,
                request.action,
                request.asset,
                self.ternary,
                request_id=request.request_id,
                now=now,
            )
        else:
            decision = decide_request(graph, request, now=now)
        if decision.permitted and self.pip_hook is not None:
            reason = self.pip_hook(request, decision)
            if reason:
                decision = apply_veto(decision, reason)
        return decision

    def decide(self, request: Request | TernaryRequest) -> Decision:
        """Sweep expired facts, decide against one snapshot, persist, return."""
        if not isinstance(request, (Request, TernaryRequest)):
            raise MalformedRequest(f"not a request: {request!r}")
        rid = request.request_id
        if not rid:
            raise MalformedRequest("request_id must be a non-empty string")
        if rid in self.records:
            raise DuplicateRequest(f"request_id {rid!r} already decided")
        now = self.clock()
        self.sweep(now)
        graph = self.graphs.snapshot()
        decision = self._evaluate(graph, request, now)
        record = DecisionRecord(request, decision, graph.version, self.rule_set_version)
        with self._records_lock:
            if rid in self.records:
                raise DuplicateRequest(f"request_id {rid!r} already decided")
            self._append([{"type": "decision", "record": record.to_json()}])
            self.records[rid] = record
            self._order.append(rid)
        return decision

    def processed(self, request_id: str) -> DecisionRecord:
        """Record the processed notification for a Permit."""
        with self._records_lock:
            rec = self.records.get(request_id)
            if rec is None:
                raise UnknownRequest(request_id)
            if not rec.decision.permitted:
                log.error(
                    "ALERT: processed notification for denied request %s %s; "
                    "the enforcement point processed without authorisation",
                    request_id,
                    json.dumps(rec.request.to_json(), sort_keys=True),
                )
                raise NotPermitted(f"request {request_id!r} was denied")
            if rec.processed_at is not None:
                raise AlreadyProcessed(f"request {request_id!r} already processed")
            at = self.clock()
            self._append([{"type": "processed", "request_id": request_id, "at": at}])
            rec = replace(rec, processed_at=at)
            self.records[request_id] = rec
            return rec

    def decision_records(self) -> list[DecisionRecord]:
        with self._records_lock:
            return [self.records[r] for r in self._order]

    # -- reports ------------------------------------------------------------

    def graph_at(self, version: int) -> PurposeGraph:
        history = self.graph().history()
        return replay(history[:version])

    def subject_report(self, subject: str) -> SubjectReport:
        entries = []
        cache: dict[int, PurposeGraph] = {}
        for rec in self.decision_records():
            if not rec.decision.permitted:
                continue
            g = cache.get(rec.graph_version)
            if g is None:
                g = cache[rec.graph_version] = self.graph_at(rec.graph_version)
            asset = rec.request.asset
            if Fact("subject-of", (subject, asset)) not in g:
                continue
            entries.append(
                SubjectEntry(
                    asset=asset,
                    action=rec.request.action,
                    purpose=_purpose_of(rec.decision),
                    basis=rec.decision.basis,
                    controller=rec.decision.controller,
                    decided_at=rec.decision.decided_at,
                    processed=rec.processed_at is not None,
                )
            )
        return SubjectReport(subject, tuple(entries))

    def audit_report(self) -> AuditReport:
        history = tuple(m.to_json() for m in self.graph().history())
        decisions = tuple(r.to_json() for r in self.decision_records())
        return AuditReport(self.rule_set_version, history, decisions)


@dataclass
class ReplayResult:
    checked: int = 0
    mismatches: list[str] = field(default_factory=list)
    missing_leaves: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.missing_leaves


def verify_audit_report(report: AuditReport, *, ternary: bool = True) -> ReplayResult:
    """Replay a report's history into a fresh engine and re-decide everything.

    Decisions must come out byte-identical in canonical form, and every
    Permit tree's axiom leaves must be facts present at its graph version.
    PIP vetoes are re-applied from the record, since the hook's external
    attributes are not part of the report.
    """
    history = [_mutation_from_json({"type": "mutation", **m}) for m in report.history]
    result = ReplayResult()
    for data in report.decisions:
        rec = DecisionRecord.from_json(data)
        graph = replay(history[: rec.graph_version])
        if graph.version != rec.graph_version:
            result.mismatches.append(f"{rec.request.request_id}: history too short")
            continue
        req = rec.request
        now = rec.decision.decided_at
        if isinstance(req, TernaryRequest):
            again = decide_ternary(
                graph, req.actor, req.action, req.asset, ternary, request_id=req.request_id, now=now
            )
        else:
            again = decide_request(graph, req, now=now)
        veto = [
            p.text[len(PIP_VETO_PREFIX):]
            for p in (rec.decision.diagnosis.premises if rec.decision.diagnosis else ())
            if p.text.startswith(PIP_VETO_PREFIX)
        ]
        if veto and again.permitted:
            again = apply_veto(again, veto[0])
        result.checked += 1
        if again.canonical() != rec.decision.canonical():
            result.mismatches.append(f"{req.request_id}: replayed decision differs")
        if rec.decision.tree is not None:
            present = {f.key for f in graph}
            for leaf in rec.decision.tree.axioms():
                if tuple(leaf) not in present:
                    result.missing_leaves.append(f"{req.request_id}: {leaf}")
    return result
