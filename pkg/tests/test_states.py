import pytest

from appforge.errors import IllegalTransition
from appforge.workflow import LifecycleState as S
from appforge.workflow import TRANSITIONS, next_state
from appforge.workflow.states import EVENTS, TERMINAL_STATES


def test_happy_path():
    path = [
        (S.SUBMITTED, "validate", S.VALIDATED),
        (S.VALIDATED, "sandbox_start", S.SANDBOX_RUNNING),
        (S.SANDBOX_RUNNING, "sandbox_pass", S.SANDBOX_PASSED),
        (S.SANDBOX_PASSED, "assign_reviewer", S.IN_REVIEW),
        (S.IN_REVIEW, "approve", S.APPROVED),
        (S.APPROVED, "deploy", S.DEPLOYED),
    ]
    for current, event, expected in path:
        assert next_state(current, event) is expected


def test_review_outcomes():
    assert next_state(S.IN_REVIEW, "request_changes") is S.CHANGES_REQUESTED
    assert next_state(S.IN_REVIEW, "reject") is S.REJECTED


def test_deployed_terminal_moves():
    assert next_state(S.DEPLOYED, "supersede") is S.SUPERSEDED
    assert next_state(S.DEPLOYED, "retire") is S.RETIRED


def test_rollback_edges():
    assert next_state(S.SUPERSEDED, "rollback") is S.DEPLOYED
    assert next_state(S.APPROVED, "rollback") is S.DEPLOYED


def test_illegal_transition_carries_context():
    with pytest.raises(IllegalTransition) as exc:
        next_state(S.DEPLOYED, "sandbox_pass")
    assert exc.value.from_state == "Deployed"
    assert exc.value.event == "sandbox_pass"


def test_terminal_states_have_no_outgoing_edges():
    for state in TERMINAL_STATES:
        assert not any(src is state for (src, _) in TRANSITIONS)


def test_every_event_rejected_from_wrong_states():
    for state in S:
        for event in EVENTS:
            if (state, event) in TRANSITIONS:
                assert next_state(state, event) is TRANSITIONS[(state, event)]
            else:
                with pytest.raises(IllegalTransition):
                    next_state(state, event)
