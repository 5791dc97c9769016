"""Server entry point: load a platform config, build the app, run uvicorn.

Config file (YAML or JSON):

    base_url: https://apps.department.gov
    data_dir: /var/lib/appforge          # omit for in-memory
    default_policy:
      network_allowlist: []
      max_wall_seconds: 30
      max_memory_mb: 1024
    runner:
      kind: mock                         # or process/http (see README)
    users:
      - {user_id: binita, display_name: Binita, roles: [author], token: tok-binita}
    registry_seed:
      - {ecosystem: pypi, name: pandas, allowed_versions: any}
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import yaml

from ..canonical import utc_now
from ..platform import Platform
from ..registry import PackageRegistryEntry, normalize_package_name
from ..sandbox.policy import SandboxPolicy
from .app import create_app


def platform_from_config(config: dict) -> Platform:
    policy = None
    if "default_policy" in config:
        doc = dict(config["default_policy"])
        policy = SandboxPolicy(
            network_allowlist=tuple(doc.get("network_allowlist", ())),
            max_wall_seconds=doc.get("max_wall_seconds", 30.0),
            max_memory_mb=doc.get("max_memory_mb", 1024),
        )
    data_dir = config.get("data_dir")
    wal_exists = data_dir and (Path(data_dir) / "appforge.wal").exists()
    kwargs = dict(
        base_url=config.get("base_url", "https://apps.department.gov"),
        default_policy=policy,
        default_runner=config.get("runner"),
    )
    if wal_exists:
        platform = Platform.recover(data_dir, **kwargs)
    else:
        platform = Platform(data_dir=data_dir, **kwargs)
    for user in config.get("users", []):
        if platform.users.get(user["user_id"]) is None:
            platform.users.create_user(
                user["user_id"], user.get("display_name", user["user_id"]),
                tuple(user.get("roles", ("author",))), user["token"],
            )
    for row in config.get("registry_seed", []):
        name = normalize_package_name(row["name"])
        if platform.registry.get(row["ecosystem"], name) is None:
            platform.registry.seed(
                PackageRegistryEntry(
                    ecosystem=row["ecosystem"],
                    normalized_name=name,
                    allowed_versions=row.get("allowed_versions", "any"),
                    status="approved",
                    decided_by=row.get("decided_by", "bootstrap"),
                    decided_at=utc_now(),
                    created_at=utc_now(),
                )
            )
    return platform


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    text = Path(path).read_text("utf-8")
    if path.endswith(".json"):
        return json.loads(text)
    return yaml.safe_load(text) or {}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="appforge-server")
    parser.add_argument("--config", help="platform config file (YAML or JSON)")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8400)
    args = parser.parse_args(argv)

    import uvicorn

    platform = platform_from_config(load_config(args.config))
    app = create_app(platform)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
