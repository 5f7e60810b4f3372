"""Multi-organisation deployments of the decision architecture."""

from .config import format_topology, load_topology, parse_topology_config
from .run import (
    Message,
    SimCapabilityViolation,
    SimTrace,
    default_assignment,
    graph_statements,
    run_scenario,
    run_steps,
    split_program,
)
from .topology import (
    ARCHETYPE_ROLES,
    PROCESSOR_PAP_VIOLATION,
    ROLE_CAPABILITIES,
    Archetype,
    Endpoint,
    Governance,
    Node,
    OrgCountMismatch,
    Topology,
    WiringError,
    build_topology,
    org_count,
    verify_capability_assignment,
)

__all__ = [
    "ARCHETYPE_ROLES",
    "PROCESSOR_PAP_VIOLATION",
    "ROLE_CAPABILITIES",
    "Archetype",
    "Endpoint",
    "Governance",
    "Message",
    "Node",
    "OrgCountMismatch",
    "SimCapabilityViolation",
    "SimTrace",
    "Topology",
    "WiringError",
    "build_topology",
    "default_assignment",
    "format_topology",
    "graph_statements",
    "load_topology",
    "org_count",
    "parse_topology_config",
    "run_scenario",
    "run_steps",
    "split_program",
    "verify_capability_assignment",
]
