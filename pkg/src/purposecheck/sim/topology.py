"""Delegation archetypes, governance variants and the deployments they induce."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..model import Capability, PurposeCheckError, check_atom


class Archetype(enum.Enum):
    NO_DELEGATION = "NoDelegation"
    DELEGATED_ACTION = "DelegatedAction"
    DELEGATED_PROCESSING = "DelegatedProcessing"
    DELEGATED_COLLECTION = "DelegatedCollection"
    DISTRIBUTED = "Distributed"
    INDEPENDENT_CONTROLLERS = "IndependentControllers"


class Governance(enum.Enum):
    SELF = "SelfGoverned"
    INTERMEDIARY = "IntermediaryGoverned"


CONTROLLER, COLLECTOR, PERFORMER = "Controller", "Collector", "Performer"
PEP, PDP, PAP = "PEP", "PDP", "PAP"

# (default org name, administration roles) per organisation, in slot order
ARCHETYPE_ROLES: dict[Archetype, tuple[tuple[str, frozenset[str]], ...]] = {
    Archetype.NO_DELEGATION: (("Ctrl", frozenset({CONTROLLER, COLLECTOR, PERFORMER})),),
    Archetype.DELEGATED_ACTION: (
        ("Ctrl", frozenset({CONTROLLER, COLLECTOR})),
        ("Perf", frozenset({PERFORMER})),
    ),
    Archetype.DELEGATED_PROCESSING: (
        ("Ctrl", frozenset({CONTROLLER})),
        ("Perf", frozenset({COLLECTOR, PERFORMER})),
    ),
    Archetype.DELEGATED_COLLECTION: (
        ("Ctrl", frozenset({CONTROLLER, PERFORMER})),
        ("Col", frozenset({COLLECTOR})),
    ),
    Archetype.DISTRIBUTED: (
        ("Ctrl", frozenset({CONTROLLER})),
        ("Col", frozenset({COLLECTOR})),
        ("Perf", frozenset({PERFORMER})),
    ),
    Archetype.INDEPENDENT_CONTROLLERS: (
        ("A", frozenset({CONTROLLER, COLLECTOR})),
        ("B", frozenset({CONTROLLER, PERFORMER})),
    ),
}

# The controller relays subjects' consent, so it carries the Consent capability.
ROLE_CAPABILITIES: dict[str, frozenset[Capability]] = {
    CONTROLLER: frozenset({Capability.CONTROL, Capability.QUALIFY, Capability.CONSENT}),
    COLLECTOR: frozenset({Capability.COLLECT, Capability.PERFORM}),
    PERFORMER: frozenset({Capability.PERFORM}),
}

PROCESSOR_PAP_VIOLATION = "processor has their actions authorised by an external decision-making process"


class OrgCountMismatch(PurposeCheckError, ValueError):
    pass


class WiringError(PurposeCheckError):
    pass


def org_count(archetype: Archetype) -> int:
    return len(ARCHETYPE_ROLES[archetype])


def capabilities_for(roles) -> frozenset[Capability]:
    caps: set[Capability] = set()
    for r in roles:
        caps |= ROLE_CAPABILITIES[r]
    return frozenset(caps)


@dataclass(frozen=True)
class Node:
    org: str
    admin_roles: frozenset[str]
    enforcement_roles: frozenset[str]

    @property
    def capabilities(self) -> frozenset[Capability]:
        return capabilities_for(self.admin_roles)

    @property
    def is_controller(self) -> bool:
        return CONTROLLER in self.admin_roles

    @property
    def holds_data(self) -> bool:
        return bool(self.admin_roles & {COLLECTOR, PERFORMER})


@dataclass(frozen=True)
class Endpoint:
    """Where a PEP or an administrator is wired: the node hosting the
    PDP/PAP, and the controller whose policy stack (tenant) is used there."""

    host: str
    tenant: str


@dataclass(frozen=True)
class Topology:
    archetype: Archetype
    governance: Governance
    nodes: tuple[Node, ...]
    wiring: dict[str, Endpoint] = field(default_factory=dict)

    def node(self, org: str) -> Node:
        for n in self.nodes:
            if n.org == org:
                return n
        raise WiringError(f"no node for organisation {org!r}")

    @property
    def orgs(self) -> tuple[str, ...]:
        return tuple(n.org for n in self.nodes)

    @property
    def tenants(self) -> tuple[str, ...]:
        return tuple(sorted({e.tenant for e in self.wiring.values()}))

    def endpoint(self, org: str) -> Endpoint:
        try:
            return self.wiring[org]
        except KeyError:
            raise WiringError(f"organisation {org!r} is not wired to any PAP/PDP") from None

    def to_json(self) -> dict:
        return {
            "archetype": self.archetype.value,
            "governance": self.governance.value,
            "nodes": [
                {
                    "org": n.org,
                    "admin_roles": sorted(n.admin_roles),
                    "enforcement_roles": sorted(n.enforcement_roles),
                }
                for n in self.nodes
            ],
            "wiring": {o: {"host": e.host, "tenant": e.tenant} for o, e in sorted(self.wiring.items())},
        }


def build_topology(
    archetype: Archetype | str,
    governance: Governance | str = Governance.SELF,
    orgs: list[str] | None = None,
    *,
    intermediary: str = "Intermediary",
) -> Topology:
    """Lay out the nodes and wiring for an archetype under a governance mode."""
    archetype = Archetype(archetype)
    governance = Governance(governance)
    slots = ARCHETYPE_ROLES[archetype]
    if orgs is None:
        orgs = [name for name, _ in slots]
    orgs = [check_atom(o, "organisation") for o in orgs]
    if len(orgs) != len(slots):
        raise OrgCountMismatch(
            f"{archetype.value} needs {len(slots)} organisation(s), got {len(orgs)}"
        )
    if len(set(orgs)) != len(orgs):
        raise OrgCountMismatch("organisation names must be distinct")
    if governance is Governance.INTERMEDIARY:
        check_atom(intermediary, "intermediary")
        if intermediary in orgs:
            raise OrgCountMismatch(f"intermediary {intermediary!r} clashes with an organisation")

    controllers = [o for o, (_, roles) in zip(orgs, slots) if CONTROLLER in roles]
    nodes = []
    wiring: dict[str, Endpoint] = {}
    for org, (_, roles) in zip(orgs, slots):
        enf: set[str] = set()
        if roles & {COLLECTOR, PERFORMER}:
            enf.add(PEP)
        if CONTROLLER in roles and governance is Governance.SELF:
            enf |= {PDP, PAP}
        nodes.append(Node(org, roles, frozenset(enf)))
        # independent controllers keep to their own stack; everyone else
        # shares the single controller's policy stack
        tenant = org if CONTROLLER in roles else controllers[0]
        host = tenant if governance is Governance.SELF else intermediary
        wiring[org] = Endpoint(host, tenant)
    if governance is Governance.INTERMEDIARY:
        nodes.append(Node(intermediary, frozenset(), frozenset({PDP, PAP})))
    return Topology(archetype, governance, tuple(nodes), wiring)


def verify_capability_assignment(topology: Topology) -> list[str]:
    """List every violated role/capability/wiring constraint (empty when sound)."""
    out: list[str] = []
    expected = sorted(sorted(r) for _, r in ARCHETYPE_ROLES[topology.archetype])
    admin = [n for n in topology.nodes if n.admin_roles]
    got = sorted(sorted(n.admin_roles) for n in admin)
    if got != expected:
        out.append(
            f"role assignment {got} does not match {topology.archetype.value} {expected}"
        )
    controllers = {n.org for n in admin if n.is_controller}
    intermediaries = [n for n in topology.nodes if not n.admin_roles]
    if topology.governance is Governance.SELF and intermediaries:
        out.append("self-governed topology contains an intermediary node")
    if topology.governance is Governance.INTERMEDIARY:
        if len(intermediaries) != 1:
            out.append("intermediary-governed topology needs exactly one intermediary node")
        elif not {PDP, PAP} <= intermediaries[0].enforcement_roles:
            out.append("the intermediary implements the PDP and PAP")
    for n in topology.nodes:
        if n.holds_data and PEP not in n.enforcement_roles:
            out.append(f"{n.org}: an organisation holding data implements a PEP")
        if n.admin_roles and not n.is_controller and n.enforcement_roles & {PDP, PAP}:
            out.append(f"{n.org}: {PROCESSOR_PAP_VIOLATION}")
        if n.is_controller and topology.governance is Governance.SELF:
            if not {PDP, PAP} <= n.enforcement_roles:
                out.append(f"{n.org}: a controller implements a PDP and a PAP unless delegated")
        if n.is_controller and not {Capability.CONTROL, Capability.QUALIFY} <= n.capabilities:
            out.append(f"{n.org}: a controller implements the Control and Qualify capabilities")
        if n.holds_data and not {Capability.PERFORM} <= n.capabilities:
            out.append(f"{n.org}: an organisation holding data implements Perform")
        if COLLECTOR in n.admin_roles and Capability.COLLECT not in n.capabilities:
            out.append(f"{n.org}: a Collector implements Collect")
    hosts = {n.org: n for n in topology.nodes}
    for n in admin:
        e = topology.wiring.get(n.org)
        if e is None:
            out.append(f"{n.org}: not wired to a PDP/PAP")
            continue
        host = hosts.get(e.host)
        if host is None or not {PDP, PAP} <= host.enforcement_roles:
            out.append(f"{n.org}: wired to {e.host}, which does not host a PDP and PAP")
        if e.tenant not in controllers:
            out.append(f"{n.org}: wired to the policy stack of non-controller {e.tenant}")
        if n.is_controller and e.tenant != n.org:
            out.append(f"{n.org}: independent controllers do not share policy stacks")
        if not n.is_controller and len(controllers) == 1 and e.tenant not in controllers:
            out.append(f"{n.org}: must consult its controller's policy stack")
    return out
