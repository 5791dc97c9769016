"""Exception hierarchy shared by every appforge subsystem.

The four mid-level classes (BadInput, Conflict, NotFound, Forbidden) drive the
HTTP status mapping in the API layer; concrete subclasses carry the structured
fields callers match on.
"""

from __future__ import annotations


class AppforgeError(Exception):
    """Base class for all platform errors."""


class BadInput(AppforgeError):
    """Malformed or out-of-grammar input supplied by a caller."""


class Conflict(AppforgeError):
    """A precondition on current state does not hold."""


class NotFound(AppforgeError):
    """A referenced entity does not exist."""


class Unauthenticated(AppforgeError):
    """No valid credentials were presented."""


class Forbidden(AppforgeError):
    """The authenticated actor lacks the required role or ownership."""


class StorageError(AppforgeError):
    """The durable store refused or failed a commit."""


# --- package name / manifest -------------------------------------------------

class EmptyName(BadInput):
    pass


class IllegalCharacter(BadInput):
    def __init__(self, raw: str, char: str):
        super().__init__(f"illegal character {char!r} in package name {raw!r}")
        self.raw = raw
        self.char = char


class ParseError(BadInput):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicatePackage(BadInput):
    def __init__(self, name: str, line_no: int):
        super().__init__(f"line {line_no}: duplicate package {name!r}")
        self.name = name
        self.line_no = line_no


class UnsupportedEcosystem(BadInput):
    def __init__(self, ecosystem: str):
        super().__init__(f"unsupported ecosystem {ecosystem!r}")
        self.ecosystem = ecosystem


class AlreadyApproved(Conflict):
    pass


class AlreadyPending(Conflict):
    pass


class NotPending(Conflict):
    pass


# --- notebook / app config ---------------------------------------------------

class MalformedDocument(BadInput):
    pass


class UnsupportedVersion(BadInput):
    pass


class NoConfigCell(BadInput):
    pass


class YamlError(BadInput):
    def __init__(self, line: int, reason: str):
        super().__init__(f"yaml line {line}: {reason}")
        self.line = line
        self.reason = reason


class SchemaError(BadInput):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class InvalidConfig(BadInput):
    pass


class UnknownParameter(BadInput):
    def __init__(self, name: str):
        super().__init__(f"unknown parameter {name!r}")
        self.name = name


class ValueOutOfDomain(BadInput):
    def __init__(self, name: str, reason: str):
        super().__init__(f"parameter {name!r}: {reason}")
        self.name = name
        self.reason = reason


class MissingRequired(BadInput):
    def __init__(self, name: str):
        super().__init__(f"parameter {name!r} has no value and no default")
        self.name = name


# --- workflow ----------------------------------------------------------------

class UnknownApp(NotFound):
    pass


class UnknownVersion(NotFound):
    pass


class IllegalTransition(Conflict):
    def __init__(self, from_state: str, event: str):
        super().__init__(f"event {event!r} is not legal from state {from_state}")
        self.from_state = from_state
        self.event = event


class WrongState(Conflict):
    pass


class SelfReview(Conflict):
    pass


class NotAssignedReviewer(Forbidden):
    pass


class NeverApproved(Conflict):
    pass


# --- sandbox -----------------------------------------------------------------

class PolicyWidening(Conflict):
    """A per-app policy override attempted to loosen a platform default."""


class RunnerUnavailable(AppforgeError):
    pass


class ProtocolError(AppforgeError):
    pass


class BuildInProgress(Conflict):
    pass


# --- deployment --------------------------------------------------------------

class EmptyTitle(BadInput):
    pass


class Unsluggable(BadInput):
    pass


class SlugConflict(Conflict):
    pass


class UnknownSlug(NotFound):
    pass
