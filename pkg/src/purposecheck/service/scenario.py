"""Run a scenario program against a live store, as a PEP and administrator would."""

from __future__ import annotations

from ..dsl import Executor, Trace
from ..dsl.ast import Assert, Retract
from ..inference import Decision
from ..model import PurposeGraph, Request
from .store import AlreadyProcessed, NotPermitted, ServiceStore


class StoreExecutor(Executor):
    """Administration goes to the store's PAP side; queries become decisions;
    ``process`` sends the processed notification for the latest decision."""

    def __init__(self, store: ServiceStore, *, default_by: str = "pep"):
        super().__init__(PurposeGraph(), enforce_capabilities=store.enforce, default_by=default_by, clock=store.clock)
        self.store = store
        self.last: dict[tuple, Decision] = {}
        self._n = 0

    def apply_assert(self, stmt: Assert) -> None:
        self.store.assert_facts([(stmt.fact, self._provenance(stmt))])

    def apply_retract(self, stmt: Retract) -> None:
        self.store.retract_facts([(stmt.fact, self._provenance(stmt))])

    def decide(self, request: Request) -> Decision:
        self._n += 1
        wire = Request(*request.key, request_id=f"{request.request_id}.{self._n}")
        while wire.request_id in self.store.records:
            self._n += 1
            wire = Request(*request.key, request_id=f"{request.request_id}.{self._n}")
        decision = self.store.decide(wire)
        self.last[request.key] = decision
        return decision

    def decide_for_process(self, request: Request) -> Decision:
        last = self.last.get(request.key)
        return last if last is not None else self.decide(request)

    def on_processed(self, request: Request, decision: Decision) -> str | None:
        try:
            self.store.processed(decision.request.request_id)
        except (NotPermitted, AlreadyProcessed) as exc:
            return f"{type(exc).__name__}: {exc}"
        return None


def run_on_store(store: ServiceStore, program, *, default_by: str = "pep") -> Trace:
    return StoreExecutor(store, default_by=default_by).run(program)
