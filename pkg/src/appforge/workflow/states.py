"""Version lifecycle states and the table of legal transitions.

ValidationFailed, SandboxFailed, Rejected, and Retired are terminal for a
version; ChangesRequested too — a revision is a new version, never an edit.
The rollback edges re-deploy a previously approved version under the
"rollback" verb so the audit trail names the action explicitly.
"""

from __future__ import annotations

import enum

from ..errors import IllegalTransition


class LifecycleState(str, enum.Enum):
    SUBMITTED = "Submitted"
    VALIDATION_FAILED = "ValidationFailed"
    VALIDATED = "Validated"
    SANDBOX_RUNNING = "SandboxRunning"
    SANDBOX_FAILED = "SandboxFailed"
    SANDBOX_PASSED = "SandboxPassed"
    IN_REVIEW = "InReview"
    CHANGES_REQUESTED = "ChangesRequested"
    REJECTED = "Rejected"
    APPROVED = "Approved"
    DEPLOYED = "Deployed"
    SUPERSEDED = "Superseded"
    RETIRED = "Retired"


S = LifecycleState

TRANSITIONS: dict[tuple[LifecycleState, str], LifecycleState] = {
    (S.SUBMITTED, "validate"): S.VALIDATED,
    (S.SUBMITTED, "validation_fail"): S.VALIDATION_FAILED,
    (S.VALIDATED, "sandbox_start"): S.SANDBOX_RUNNING,
    (S.SANDBOX_RUNNING, "sandbox_pass"): S.SANDBOX_PASSED,
    (S.SANDBOX_RUNNING, "sandbox_fail"): S.SANDBOX_FAILED,
    (S.SANDBOX_PASSED, "assign_reviewer"): S.IN_REVIEW,
    (S.IN_REVIEW, "approve"): S.APPROVED,
    (S.IN_REVIEW, "request_changes"): S.CHANGES_REQUESTED,
    (S.IN_REVIEW, "reject"): S.REJECTED,
    (S.APPROVED, "deploy"): S.DEPLOYED,
    (S.DEPLOYED, "supersede"): S.SUPERSEDED,
    (S.DEPLOYED, "retire"): S.RETIRED,
    (S.APPROVED, "rollback"): S.DEPLOYED,
    (S.SUPERSEDED, "rollback"): S.DEPLOYED,
}

EVENTS: tuple[str, ...] = tuple(sorted({event for (_, event) in TRANSITIONS}))

TERMINAL_STATES = frozenset(
    {S.VALIDATION_FAILED, S.SANDBOX_FAILED, S.REJECTED, S.RETIRED, S.CHANGES_REQUESTED}
)

# States at or past successful validation; the whitelist gate asserts no
# failing-report version ever lands in one of these.
AT_LEAST_VALIDATED = frozenset(
    {
        S.VALIDATED,
        S.SANDBOX_RUNNING,
        S.SANDBOX_PASSED,
        S.IN_REVIEW,
        S.CHANGES_REQUESTED,
        S.APPROVED,
        S.DEPLOYED,
        S.SUPERSEDED,
        S.RETIRED,
    }
)


def next_state(current: LifecycleState, event: str) -> LifecycleState:
    try:
        return TRANSITIONS[(current, event)]
    except KeyError:
        raise IllegalTransition(current.value, event) from None
