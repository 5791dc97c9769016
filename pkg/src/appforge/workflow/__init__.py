"""Application lifecycle: state machine, reviews, version store, audit chain."""

from .audit import AuditEvent, AuditLog, GENESIS, verify_audit_lines
from .content import ContentStore, content_hash
from .service import Application, AppVersion, ReviewRecord, WorkflowService
from .states import LifecycleState, TRANSITIONS, next_state

__all__ = [
    "AppVersion",
    "Application",
    "AuditEvent",
    "AuditLog",
    "ContentStore",
    "GENESIS",
    "LifecycleState",
    "ReviewRecord",
    "TRANSITIONS",
    "WorkflowService",
    "content_hash",
    "next_state",
    "verify_audit_lines",
]
