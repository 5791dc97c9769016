"""User records and bearer-token authentication.

Stands in for enterprise SSO behind a single function boundary; only token
digests are stored, and comparison is constant-time per stored hash.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass

from .errors import BadInput, Unauthenticated
from .persistence import Store

ROLES = ("author", "reviewer", "admin")


def hash_token(token: str) -> str:
    return hashlib.sha256(token.encode("utf-8")).hexdigest()


@dataclass
class UserRecord:
    user_id: str
    display_name: str
    roles: tuple[str, ...]
    token_hash: str

    def to_doc(self) -> dict:
        return {
            "user_id": self.user_id,
            "display_name": self.display_name,
            "roles": list(self.roles),
            "token_hash": self.token_hash,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "UserRecord":
        return cls(
            user_id=doc["user_id"],
            display_name=doc["display_name"],
            roles=tuple(doc["roles"]),
            token_hash=doc["token_hash"],
        )


class UserStore:
    def __init__(self, store: Store):
        self._store = store
        self.users: dict[str, UserRecord] = {}

    def create_user(self, user_id: str, display_name: str, roles: tuple[str, ...], token: str) -> UserRecord:
        bad = set(roles) - set(ROLES)
        if bad:
            raise BadInput(f"unknown roles: {sorted(bad)}")
        if user_id in self.users:
            raise BadInput(f"user {user_id!r} already exists")
        record = UserRecord(user_id=user_id, display_name=display_name, roles=tuple(roles), token_hash=hash_token(token))
        self._store.commit([("users", user_id, record.to_doc())])
        self.users[user_id] = record
        return record

    def get(self, user_id: str) -> UserRecord | None:
        return self.users.get(user_id)

    def authenticate(self, token: str | None) -> UserRecord:
        if not token:
            raise Unauthenticated("missing bearer token")
        presented = hash_token(token)
        matched = None
        for record in self.users.values():
            # compare against every stored hash so timing does not leak which user matched
            if hmac.compare_digest(presented, record.token_hash):
                matched = record
        if matched is None:
            raise Unauthenticated("unknown or revoked token")
        return matched

    def load_from_store(self) -> None:
        self.users = {k: UserRecord.from_doc(d) for k, d in self._store.scan("users").items()}
