"""Curated package registry: manifest parsing, validation, approval requests."""

from .manifest import DependencyManifest, ManifestEntry, parse_manifest, serialize_manifest
from .names import normalize_package_name
from .store import PackageRegistry, PackageRegistryEntry, export_registry_tsv, import_registry_tsv
from .validate import validate_manifest
from .versions import Constraint, constraint_satisfiable, parse_constraint_expr, parse_version

__all__ = [
    "Constraint",
    "DependencyManifest",
    "ManifestEntry",
    "PackageRegistry",
    "PackageRegistryEntry",
    "constraint_satisfiable",
    "export_registry_tsv",
    "import_registry_tsv",
    "normalize_package_name",
    "parse_constraint_expr",
    "parse_manifest",
    "parse_version",
    "serialize_manifest",
    "validate_manifest",
]
