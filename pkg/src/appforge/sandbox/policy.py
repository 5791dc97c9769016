"""Sandbox policy documents.

credentials_mode and filesystem_scope are fixed platform-wide; per-app
overrides may only tighten the defaults — shrink the allowlist, lower the
limits — never loosen them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import BadInput, PolicyWidening

CREDENTIALS_MODE = "read_only"
FILESYSTEM_SCOPE = "workspace_only"


@dataclass(frozen=True)
class SandboxPolicy:
    network_allowlist: tuple[str, ...] = ()
    max_wall_seconds: float = 30.0
    max_memory_mb: int = 1024
    credentials_mode: str = CREDENTIALS_MODE
    filesystem_scope: str = FILESYSTEM_SCOPE

    def __post_init__(self):
        if self.max_wall_seconds <= 0:
            raise BadInput("max_wall_seconds must be positive")
        if self.max_memory_mb <= 0:
            raise BadInput("max_memory_mb must be positive")
        if self.credentials_mode != CREDENTIALS_MODE:
            raise BadInput(f"credentials_mode is fixed to {CREDENTIALS_MODE!r}")
        if self.filesystem_scope != FILESYSTEM_SCOPE:
            raise BadInput(f"filesystem_scope is fixed to {FILESYSTEM_SCOPE!r}")

    def to_doc(self) -> dict:
        return {
            "network_allowlist": list(self.network_allowlist),
            "max_wall_seconds": self.max_wall_seconds,
            "max_memory_mb": self.max_memory_mb,
            "credentials_mode": self.credentials_mode,
            "filesystem_scope": self.filesystem_scope,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "SandboxPolicy":
        return cls(
            network_allowlist=tuple(doc["network_allowlist"]),
            max_wall_seconds=doc["max_wall_seconds"],
            max_memory_mb=doc["max_memory_mb"],
            credentials_mode=doc["credentials_mode"],
            filesystem_scope=doc["filesystem_scope"],
        )


@dataclass
class PolicyOverride:
    """Per-app tightening knobs; None leaves the default untouched."""

    network_allowlist: tuple[str, ...] | None = None
    max_wall_seconds: float | None = None
    max_memory_mb: int | None = None


def merge_policy(default: SandboxPolicy, override: PolicyOverride | None) -> SandboxPolicy:
    if override is None:
        return default
    allowlist = default.network_allowlist
    if override.network_allowlist is not None:
        widened = set(override.network_allowlist) - set(default.network_allowlist)
        if widened:
            raise PolicyWidening(f"override adds hosts beyond the platform default: {sorted(widened)}")
        allowlist = override.network_allowlist
    wall = default.max_wall_seconds
    if override.max_wall_seconds is not None:
        if override.max_wall_seconds > default.max_wall_seconds:
            raise PolicyWidening("override raises max_wall_seconds above the platform default")
        wall = override.max_wall_seconds
    memory = default.max_memory_mb
    if override.max_memory_mb is not None:
        if override.max_memory_mb > default.max_memory_mb:
            raise PolicyWidening("override raises max_memory_mb above the platform default")
        memory = override.max_memory_mb
    return SandboxPolicy(network_allowlist=allowlist, max_wall_seconds=wall, max_memory_mb=memory)
