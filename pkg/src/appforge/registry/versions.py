"""Dotted numeric versions and constraint satisfiability.

Versions are tuples of non-negative integers compared componentwise with
missing components treated as 0, so (2, 1) == (2, 1, 0). Constraints map to
intervals over that order; a constraint set is satisfiable against an
allowed-versions expression iff the interval intersection is non-empty.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import BadInput

OPERATORS = ("==", ">=", "<=", "~=", ">", "<")

_VERSION_RE = re.compile(r"^\d+(\.\d+)*$")


def parse_version(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not _VERSION_RE.match(text):
        raise BadInput(f"not a dotted numeric version: {text!r}")
    return tuple(int(p) for p in text.split("."))


def _pad(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    n = max(len(a), len(b))
    return a + (0,) * (n - len(a)), b + (0,) * (n - len(b))


def compare_versions(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    pa, pb = _pad(a, b)
    return (pa > pb) - (pa < pb)


@dataclass(frozen=True)
class Constraint:
    op: str
    version: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.op}{'.'.join(str(c) for c in self.version)}"


# A bound is (version, inclusive); None means unbounded on that side.
Bound = tuple[tuple[int, ...], bool] | None
Interval = tuple[Bound, Bound]

UNBOUNDED: Interval = (None, None)


def _bump_compatible(version: tuple[int, ...]) -> tuple[int, ...]:
    # upper bound for "~=": increment the next-to-last component and drop the last
    if len(version) >= 2:
        return version[:-2] + (version[-2] + 1,)
    return (version[0] + 1,)


def constraint_interval(c: Constraint) -> Interval:
    v = c.version
    if c.op == "==":
        return ((v, True), (v, True))
    if c.op == ">=":
        return ((v, True), None)
    if c.op == "<=":
        return (None, (v, True))
    if c.op == ">":
        return ((v, False), None)
    if c.op == "<":
        return (None, (v, False))
    if c.op == "~=":
        return ((v, True), (_bump_compatible(v), False))
    raise BadInput(f"unknown operator {c.op!r}")


def _tighter_lower(a: Bound, b: Bound) -> Bound:
    if a is None:
        return b
    if b is None:
        return a
    cmp = compare_versions(a[0], b[0])
    if cmp != 0:
        return a if cmp > 0 else b
    return (a[0], a[1] and b[1])


def _tighter_upper(a: Bound, b: Bound) -> Bound:
    if a is None:
        return b
    if b is None:
        return a
    cmp = compare_versions(a[0], b[0])
    if cmp != 0:
        return a if cmp < 0 else b
    return (a[0], a[1] and b[1])


def intersect(a: Interval, b: Interval) -> Interval:
    return (_tighter_lower(a[0], b[0]), _tighter_upper(a[1], b[1]))


def interval_nonempty(iv: Interval) -> bool:
    lower, upper = iv
    if lower is None or upper is None:
        return True
    cmp = compare_versions(lower[0], upper[0])
    if cmp < 0:
        # the dotted-numeric order is dense: something always fits strictly between
        return True
    if cmp > 0:
        return False
    return lower[1] and upper[1]


_CONSTRAINT_RE = re.compile(r"^(==|>=|<=|~=|>|<)?\s*(\d+(?:\.\d+)*)$")


def parse_constraint_expr(expr: str) -> list[Constraint]:
    """Parse an allowed-versions expression: "any" or comma-separated constraints.

    A bare version means "==". The empty string is treated as "any".
    """
    expr = expr.strip()
    if not expr or expr == "any":
        return []
    constraints = []
    for part in expr.split(","):
        part = part.strip()
        m = _CONSTRAINT_RE.match(part)
        if not m:
            raise BadInput(f"bad version constraint: {part!r}")
        constraints.append(Constraint(m.group(1) or "==", parse_version(m.group(2))))
    return constraints


def constraint_satisfiable(manifest_constraint: Constraint | None, allowed_expr: str) -> bool:
    """True iff some version satisfies both the manifest constraint and the
    registry's allowed-versions expression."""
    iv = UNBOUNDED
    if manifest_constraint is not None:
        iv = intersect(iv, constraint_interval(manifest_constraint))
    for c in parse_constraint_expr(allowed_expr):
        iv = intersect(iv, constraint_interval(c))
    return interval_nonempty(iv)
