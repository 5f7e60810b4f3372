"""Running programs across a simulated deployment.

Each organisation executes its own statements.  Administration statements
travel to the PAP its node is wired to; triggers go through the org's local
PEP to the wired PDP, producing the request/decision message sequence

    a  PEP -> PDP  decision request
    b  PDP -> PAP  policy request
    c  PAP -> PDP  policies (the purpose graph snapshot)
    d  PDP -> PEP  decision
    e  PEP -> PDP  processed notification (sent by every process trigger;
                   the PDP rejects it and raises an alert after a Deny)

In-process mode backs each policy stack with a :class:`ServiceStore`;
loopback mode starts a real HTTP service per stack and talks to it.
"""

from __future__ import annotations

import itertools
import json
from contextlib import ExitStack
from dataclasses import dataclass, field

from ..dsl import Assert, Comment, Executor, Retract, Trace
from ..dsl.format import format_statement
from ..inference import Decision
from ..model import (
    Capability,
    CapabilityViolation,
    PurposeGraph,
    Request,
    licensing_capability,
)
from ..service import AlreadyProcessed, NotPermitted, PurposeService, ServiceConfig, ServiceStore
from ..service.client import ServiceClient
from .topology import PAP, PDP, PEP, PERFORMER, Topology, WiringError


class SimCapabilityViolation(CapabilityViolation):
    """A capability violation attributed to the issuing organisation and statement."""

    def __init__(self, org: str, statement, capability: Capability, kind: str):
        self.org = org
        self.statement = statement
        self.step = None
        super().__init__(capability, kind, org)
        self.args = (f"{org}: {format_statement(statement)} needs {capability.value}",)

    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True)
class Message:
    seq: int
    label: str  # a..e, or "admin" for PAP administration
    src: str
    dst: str
    src_role: str
    dst_role: str
    tenant: str
    request_id: str | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"type": "message", **self.__dict__}


@dataclass
class SimTrace:
    topology: Topology
    traces: dict[str, Trace] = field(default_factory=dict)
    messages: list[Message] = field(default_factory=list)
    decisions: list[tuple[str, Decision]] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)

    def outcomes(self) -> list[str]:
        """Decision outcomes in the order they were made, across all orgs."""
        return [d.outcome for _, d in self.decisions]

    def decision_signature(self) -> list[tuple]:
        """Routing-independent view of the decisions, for comparing runs."""
        return [(d.request.key, d.outcome, d.rule, d.basis, d.anchor) for _, d in self.decisions]

    def cross_stack_messages(self) -> list[Message]:
        """Messages from an org whose own stack differs from the message's stack."""
        home = {o: e.tenant for o, e in self.topology.wiring.items()}
        out = []
        for m in self.messages:
            for end in (m.src, m.dst):
                if end in home and home[end] != m.tenant:
                    out.append(m)
                    break
        return out

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.events)


class _Stack:
    """The PAP+PDP of one policy tenant."""

    def __init__(self, tenant: str, host: str, backend):
        self.tenant = tenant
        self.host = host
        self.backend = backend

    def assert_facts(self, items):
        self.backend.assert_facts(items)

    def retract_facts(self, items):
        self.backend.retract_facts(items)

    def decide(self, request: Request) -> Decision:
        return self.backend.decide(request)

    def processed(self, request_id: str) -> None:
        self.backend.processed(request_id)


class _OrgExecutor(Executor):
    def __init__(self, sim: "_Simulation", org: str):
        super().__init__(PurposeGraph(), enforce_capabilities=True, default_by=org, clock=sim.clock)
        self.sim = sim
        self.org = org
        self.node = sim.topology.node(org)
        self.endpoint = sim.topology.endpoint(org)
        self.last_decision: dict[tuple, Decision] = {}

    def _check(self, stmt) -> None:
        ann = stmt.annotation
        cap = Capability(ann.cap) if ann and ann.cap else licensing_capability(stmt.fact.kind)
        needed = licensing_capability(stmt.fact.kind)
        for c in {cap, needed}:
            if c not in self.node.capabilities:
                raise SimCapabilityViolation(self.org, stmt, c, stmt.fact.kind)
        if cap is not needed:
            raise SimCapabilityViolation(self.org, stmt, needed, stmt.fact.kind)

    def step(self, stmt):
        # checked here so the violation propagates instead of becoming a trace entry
        if isinstance(stmt, (Assert, Retract)):
            self._check(stmt)
        return super().step(stmt)

    def _admin(self, stmt, op: str) -> None:
        prov = self._provenance(stmt)
        stack = self.sim.stacks[self.endpoint.tenant]
        self.sim.send("admin", self.org, self.endpoint.host, "admin", PAP, stack.tenant, detail=f"{op}{stmt.fact}")
        if op == "+":
            stack.assert_facts([(stmt.fact, prov)])
        else:
            stack.retract_facts([(stmt.fact, prov)])

    def apply_assert(self, stmt: Assert) -> None:
        self._admin(stmt, "+")

    def apply_retract(self, stmt: Retract) -> None:
        self._admin(stmt, "-")

    def _pep(self) -> None:
        if PEP not in self.node.enforcement_roles:
            raise WiringError(f"{self.org} issues a request but hosts no PEP")

    def on_request(self, request: Request) -> None:
        self._pep()

    def decide(self, request: Request) -> Decision:
        self._pep()
        e = self.endpoint
        stack = self.sim.stacks[e.tenant]
        # each query or process is a fresh decision at the PDP
        self.sim.counter += 1
        wire = Request(*request.key, request_id=f"{request.request_id}.{self.sim.counter}")
        rid = wire.request_id
        self.sim.send("a", self.org, e.host, PEP, PDP, e.tenant, rid, str(request.key))
        self.sim.send("b", e.host, e.host, PDP, PAP, e.tenant, rid)
        decision = stack.decide(wire)
        self.sim.send("c", e.host, e.host, PAP, PDP, e.tenant, rid, f"graph v{decision.graph_version}")
        self.sim.send("d", e.host, self.org, PDP, PEP, e.tenant, rid, decision.outcome)
        self.sim.trace.decisions.append((self.org, decision))
        self.last_decision[request.key] = decision
        return decision

    def decide_for_process(self, request: Request) -> Decision:
        # processing acts on the PDP's latest answer for this request
        last = self.last_decision.get(request.key)
        return last if last is not None else self.decide(request)

    def on_processed(self, request: Request, decision: Decision) -> str | None:
        e = self.endpoint
        rid = decision.request.request_id
        self.sim.send("e", self.org, e.host, PEP, PDP, e.tenant, rid)
        try:
            self.sim.stacks[e.tenant].processed(rid)
        except (NotPermitted, AlreadyProcessed) as exc:
            return f"{type(exc).__name__}: {exc}"
        return None


class _Simulation:
    def __init__(self, topology: Topology, stacks: dict[str, _Stack], clock):
        self.topology = topology
        self.stacks = stacks
        self.clock = clock
        self.trace = SimTrace(topology)
        self.seq = itertools.count(1)
        self.counter = 0

    def send(self, label, src, dst, src_role, dst_role, tenant, rid=None, detail="") -> None:
        m = Message(next(self.seq), label, src, dst, src_role, dst_role, tenant, rid, detail)
        self.trace.messages.append(m)
        self.trace.events.append(m.to_json())


def _in_process_stacks(topology: Topology, clock) -> dict[str, _Stack]:
    hosts = {e.tenant: e.host for e in topology.wiring.values()}
    return {t: _Stack(t, hosts[t], ServiceStore(clock=clock)) for t in topology.tenants}


def default_assignment(stmt, topology: Topology) -> str:
    """Pick the organisation that would naturally issue ``stmt``.

    Administration goes to the first org holding the licensing capability;
    triggers and queries go to a Performer's PEP (falling back to any PEP).
    """
    nodes = [n for n in topology.nodes if n.admin_roles]
    if isinstance(stmt, (Assert, Retract)):
        cap = licensing_capability(stmt.fact.kind)
        for n in nodes:
            if cap in n.capabilities:
                return n.org
        raise WiringError(f"no organisation holds {cap.value} for {format_statement(stmt)}")
    peps = [n for n in nodes if PEP in n.enforcement_roles]
    for n in peps:
        if PERFORMER in n.admin_roles:
            return n.org
    if peps:
        return peps[0].org
    raise WiringError("no organisation hosts a PEP")


def split_program(program, topology: Topology) -> list[tuple[str, object]]:
    """Assign each statement of a single program to an issuing organisation."""
    return [
        (default_assignment(s, topology), s) for s in program if not isinstance(s, Comment)
    ]


def run_steps(
    topology: Topology,
    steps: list[tuple[str, object]],
    *,
    loopback: bool = False,
    clock=None,
) -> SimTrace:
    """Execute ``(org, statement)`` steps in order."""
    ticks = itertools.count(1)
    clock = clock or (lambda: float(next(ticks)))
    for org, _ in steps:
        topology.node(org)
        topology.endpoint(org)
    with ExitStack() as stack_ctx:
        if loopback:
            stacks = {}
            hosts = {e.tenant: e.host for e in topology.wiring.values()}
            for t in topology.tenants:
                svc = PurposeService(
                    ServiceConfig(listen="127.0.0.1:0"), ServiceStore(clock=clock)
                ).start()
                stack_ctx.callback(svc.stop)
                stacks[t] = _Stack(t, hosts[t], ServiceClient(svc.url))
        else:
            stacks = _in_process_stacks(topology, clock)
        sim = _Simulation(topology, stacks, clock)
        execs = {org: _OrgExecutor(sim, org) for org in topology.orgs if topology.node(org).admin_roles}
        for i, (org, stmt) in enumerate(steps):
            ex = execs[org]
            try:
                entry = ex.step(stmt)
            except SimCapabilityViolation as exc:
                exc.step = i
                raise
            if entry is None:
                continue
            sim.trace.traces.setdefault(org, Trace()).entries.append(entry)
            event = {
                "type": "entry",
                "org": org,
                "statement": format_statement(stmt),
                "outcome": entry.outcome.value,
            }
            if entry.decision is not None:
                event["decision"] = entry.decision.to_json()
            sim.trace.events.append(event)
        return sim.trace


def run_scenario(
    topology: Topology,
    scripts: dict[str, list],
    *,
    loopback: bool = False,
    clock=None,
) -> SimTrace:
    """Run each org's program, orgs taken in topology order.

    Raises :class:`SimCapabilityViolation` when an org asserts a fact its
    capabilities do not license, and :class:`WiringError` when a script
    names an unknown org or a trigger is issued where no PEP exists.
    """
    unknown = set(scripts) - set(topology.orgs)
    if unknown:
        raise WiringError(f"scripts for unknown organisations: {', '.join(sorted(unknown))}")
    steps = [
        (org, s)
        for org in topology.orgs
        for s in scripts.get(org, ())
        if not isinstance(s, Comment)
    ]
    return run_steps(topology, steps, loopback=loopback, clock=clock)


def graph_statements(graph: PurposeGraph) -> list[Assert]:
    """Assertions recreating ``graph`` (provenance carried as annotations)."""
    from ..dsl.ast import Annotation

    out = []
    for f in graph:
        p = graph.provenance(f)
        out.append(Assert(f, Annotation(cap=p.capability.value, exp=p.expires_at, sig=p.signature)))
    return out


__all__ = [
    "Message",
    "SimCapabilityViolation",
    "SimTrace",
    "default_assignment",
    "graph_statements",
    "run_scenario",
    "run_steps",
    "split_program",
]
