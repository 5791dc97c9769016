"""Cross-check a parsed manifest against the curated registry."""

from __future__ import annotations

from typing import Iterable

from ..reports import ValidationReport, Violation
from .manifest import DependencyManifest
from .store import PackageRegistryEntry
from .versions import constraint_satisfiable


def validate_manifest(manifest: DependencyManifest, registry: Iterable[PackageRegistryEntry]) -> ValidationReport:
    """One violation per offending entry, in manifest order.

    An entry passes iff an approved registry row exists for
    (manifest.ecosystem, normalized_name) and the entry's constraint (if any)
    intersects the row's allowed versions. Pure given a registry snapshot.
    """
    by_name = {
        (e.ecosystem, e.normalized_name): e
        for e in registry
        if e.ecosystem == manifest.ecosystem
    }
    violations: list[Violation] = []
    for entry in manifest.entries:
        row = by_name.get((manifest.ecosystem, entry.normalized_name))
        if row is None:
            violations.append(
                Violation(entry.normalized_name, "not_in_registry", "package is not in the curated registry")
            )
        elif row.status == "pending":
            violations.append(
                Violation(entry.normalized_name, "pending_approval", "package approval is still pending")
            )
        elif row.status == "rejected":
            violations.append(
                Violation(entry.normalized_name, "rejected", "package was rejected by review")
            )
        elif not constraint_satisfiable(entry.constraint, row.allowed_versions):
            violations.append(
                Violation(
                    entry.normalized_name,
                    "version_outside_range",
                    f"constraint {entry.constraint} does not intersect allowed versions {row.allowed_versions!r}",
                )
            )
    return ValidationReport(violations=violations)
