from .engine import (
    RULE_SET_VERSION,
    Candidate,
    Decision,
    DerivedState,
    Diagnosis,
    FeatureDisabled,
    Link,
    Premise,
    TernaryRequest,
    decide_request,
    decide_ternary,
    saturate,
)
from .tree import RULE_IDS, DerivationTree

__all__ = [
    "RULE_IDS",
    "RULE_SET_VERSION",
    "Candidate",
    "Decision",
    "DerivationTree",
    "DerivedState",
    "Diagnosis",
    "FeatureDisabled",
    "Link",
    "Premise",
    "TernaryRequest",
    "decide_request",
    "decide_ternary",
    "saturate",
]
