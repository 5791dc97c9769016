"""In-process policy guards: import allowlist and socket allowlist.

Desk-scale enforcement for the reference runner; production deployments put
container isolation around the process and keep these as a second layer.
"""

from __future__ import annotations

import fnmatch
import socket
import sys
from contextlib import contextmanager


class PolicyImport(Exception):
    def __init__(self, module: str):
        super().__init__(f"import of {module!r} is outside the manifest allowlist")
        self.module = module


class PolicyNetwork(Exception):
    def __init__(self, host: str):
        super().__init__(f"connection to {host!r} is outside the network allowlist")
        self.host = host


def stdlib_names() -> frozenset[str]:
    return frozenset(sys.stdlib_module_names) | {"__future__"}


class ImportGuard:
    """Meta-path finder that rejects imports outside manifest + stdlib."""

    def __init__(self, allowed: frozenset[str]):
        self.allowed = allowed

    def find_spec(self, fullname: str, path=None, target=None):
        top = fullname.split(".")[0]
        if top not in self.allowed:
            raise PolicyImport(top)
        return None  # defer to the regular finders


@contextmanager
def import_allowlist(manifest_names: list[str]):
    allowed = stdlib_names() | {name.replace("-", "_") for name in manifest_names} | set(manifest_names)
    guard = ImportGuard(frozenset(allowed))
    sys.meta_path.insert(0, guard)
    try:
        yield
    finally:
        sys.meta_path.remove(guard)


def _host_allowed(host: str, allowlist: list[str]) -> bool:
    return any(fnmatch.fnmatch(host, pattern) for pattern in allowlist)


@contextmanager
def network_allowlist(patterns: list[str]):
    original_connect = socket.socket.connect
    original_connect_ex = socket.socket.connect_ex
    original_create = socket.create_connection

    def check(address):
        host = address[0] if isinstance(address, tuple) else str(address)
        if not _host_allowed(str(host), patterns):
            raise PolicyNetwork(str(host))

    def guarded_connect(self, address):
        check(address)
        return original_connect(self, address)

    def guarded_connect_ex(self, address):
        check(address)
        return original_connect_ex(self, address)

    def guarded_create(address, *args, **kwargs):
        check(address)
        return original_create(address, *args, **kwargs)

    socket.socket.connect = guarded_connect
    socket.socket.connect_ex = guarded_connect_ex
    socket.create_connection = guarded_create
    try:
        yield
    finally:
        socket.socket.connect = original_connect
        socket.socket.connect_ex = original_connect_ex
        socket.create_connection = original_create
