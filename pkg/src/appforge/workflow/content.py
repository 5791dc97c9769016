"""Content-addressed blob store and the version identity hash.

Blobs are keyed by the SHA-256 of their bytes ("sha256:<hex>"); a version's
identity digest frames notebook and manifest with 8-byte big-endian lengths
so the pair (a, b) never collides with (b, a) or any other split.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from ..errors import NotFound, StorageError


def content_hash(notebook: bytes, manifest: bytes) -> str:
    h = hashlib.sha256()
    h.update(len(notebook).to_bytes(8, "big"))
    h.update(notebook)
    h.update(len(manifest).to_bytes(8, "big"))
    h.update(manifest)
    return h.hexdigest()


class ContentStore:
    def __init__(self, directory: Path | None = None):
        self._directory = Path(directory) if directory else None
        self._blobs: dict[str, bytes] = {}
        if self._directory is not None:
            self._directory.mkdir(parents=True, exist_ok=True)

    def put(self, data: bytes) -> str:
        digest = hashlib.sha256(data).hexdigest()
        ref = f"sha256:{digest}"
        if self._directory is not None:
            path = self._directory / digest
            if not path.exists():
                tmp = path.with_suffix(".tmp")
                try:
                    tmp.write_bytes(data)
                    tmp.rename(path)
                except OSError as exc:
                    raise StorageError(f"blob write failed: {exc}") from exc
        else:
            self._blobs[ref] = data
        return ref

    def get(self, ref: str) -> bytes:
        if not ref.startswith("sha256:"):
            raise NotFound(f"bad content ref {ref!r}")
        if self._directory is not None:
            path = self._directory / ref.split(":", 1)[1]
            if not path.exists():
                raise NotFound(f"no blob for {ref}")
            return path.read_bytes()
        try:
            return self._blobs[ref]
        except KeyError:
            raise NotFound(f"no blob for {ref}") from None

    def verify(self, ref: str) -> bool:
        data = self.get(ref)
        return hashlib.sha256(data).hexdigest() == ref.split(":", 1)[1]
