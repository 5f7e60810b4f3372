"""Purpose-based access and usage control for lawful personal-data processing."""

from .inference import (
    RULE_SET_VERSION,
    Decision,
    DerivationTree,
    DerivedState,
    Diagnosis,
    FeatureDisabled,
    decide_request,
    decide_ternary,
    saturate,
)
from .model import (
    ActorRef,
    Basis,
    Capability,
    CapabilityViolation,
    Fact,
    GraphStore,
    MalformedFact,
    MalformedRequest,
    Provenance,
    PurposeGraph,
    Request,
    assert_fact,
    expire_facts,
    retract_fact,
)
from .validate import ValidationReport, validate_graph

__version__ = "0.1.0"

__all__ = [
    "RULE_SET_VERSION",
    "ActorRef",
    "Basis",
    "Capability",
    "CapabilityViolation",
    "Decision",
    "DerivationTree",
    "DerivedState",
    "Diagnosis",
    "Fact",
    "FeatureDisabled",
    "GraphStore",
    "MalformedFact",
    "MalformedRequest",
    "Provenance",
    "PurposeGraph",
    "Request",
    "ValidationReport",
    "assert_fact",
    "decide_request",
    "decide_ternary",
    "expire_facts",
    "retract_fact",
    "saturate",
    "validate_graph",
]
