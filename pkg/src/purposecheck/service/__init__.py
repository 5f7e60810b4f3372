"""Network decision service: administration, decisions, notifications and audit."""

from .client import ServiceClient, ServiceError, decision_from_payload
from .config import ServiceConfig, load_config
from .http import PurposeHTTPServer, PurposeService, decision_payload, parse_decision_payload
from .scenario import StoreExecutor, run_on_store
from .store import (
    AlreadyProcessed,
    AuditReport,
    DecisionRecord,
    DuplicateRequest,
    NotPermitted,
    ReplayResult,
    ServiceStore,
    StoreUnavailable,
    SubjectEntry,
    SubjectReport,
    UnknownRequest,
    verify_audit_report,
)

__all__ = [
    "AlreadyProcessed",
    "AuditReport",
    "DecisionRecord",
    "DuplicateRequest",
    "NotPermitted",
    "PurposeHTTPServer",
    "PurposeService",
    "ReplayResult",
    "ServiceClient",
    "ServiceConfig",
    "ServiceError",
    "decision_from_payload",
    "ServiceStore",
    "StoreExecutor",
    "StoreUnavailable",
    "SubjectEntry",
    "SubjectReport",
    "UnknownRequest",
    "decision_payload",
    "load_config",
    "parse_decision_payload",
    "run_on_store",
    "verify_audit_report",
]
