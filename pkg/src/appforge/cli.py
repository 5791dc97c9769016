"""Command-line client for the appforge HTTP API.

A thin client: every subcommand maps onto the documented endpoints, machine
mode prints one canonical JSON document per result for scripting and golden
tests. Exit codes: 0 success, 1 operation rejected by the server, 2 usage
error, 3 transport failure.

The token comes from APPFORGE_TOKEN or the config file, never from argv.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import httpx

from .canonical import canonical_json
from .workflow.audit import verify_audit_lines

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2
EXIT_TRANSPORT = 3

CONFIG_PATH = Path(os.environ.get("XDG_CONFIG_HOME", Path.home() / ".config")) / "appforge" / "config.json"

# endpoint -> owning subcommand; the coverage test in the suite checks this
# table against the server's ACCESS_TABLE.
COMMAND_ENDPOINTS = {
    ("POST", "/api/apps"): "app create",
    ("GET", "/api/apps"): "app list",
    ("POST", "/api/apps/{app_id}/versions"): "submit",
    ("GET", "/api/apps/{app_id}/versions"): "status",
    ("POST", "/api/versions/{version_id}/assign-reviewer"): "review assign",
    ("POST", "/api/versions/{version_id}/review"): "review decide",
    ("POST", "/api/versions/{version_id}/run"): "run",
    ("POST", "/api/packages/requests"): "registry request",
    ("POST", "/api/packages/{ecosystem}/{name}/decision"): "registry decide",
    ("GET", "/api/registry"): "registry list",
    ("GET", "/api/audit"): "audit export",
    ("POST", "/api/deployments/{slug}/scale"): "deploy scale",
    ("POST", "/api/deployments/{slug}/retire"): "deploy retire",
    ("POST", "/api/apps/{app_id}/rollback"): "deploy rollback",
    ("GET", "/internal/{slug}"): "schema",
    ("POST", "/internal/{slug}/run"): "run",
    ("GET", "/preview/{token}"): "preview show",
    ("POST", "/preview/{token}/run"): "preview run",
}


@dataclass
class CliConfig:
    base_url: str
    token: str | None
    output_mode: str = "human"


def load_cli_config(args: argparse.Namespace) -> CliConfig:
    file_config = {}
    if CONFIG_PATH.exists():
        try:
            file_config = json.loads(CONFIG_PATH.read_text("utf-8"))
        except (OSError, json.JSONDecodeError):
            file_config = {}
    base_url = args.base_url or os.environ.get("APPFORGE_BASE_URL") or file_config.get("base_url") or "http://127.0.0.1:8400"
    token = os.environ.get("APPFORGE_TOKEN") or file_config.get("token")
    return CliConfig(base_url=base_url, token=token, output_mode="machine" if args.machine else "human")


class Client:
    def __init__(self, config: CliConfig, http: httpx.Client | None = None):
        self.config = config
        headers = {"authorization": f"Bearer {config.token}"} if config.token else {}
        self.http = http or httpx.Client(base_url=config.base_url, headers=headers, timeout=60.0)
        if http is not None and config.token:
            self.http.headers["authorization"] = f"Bearer {config.token}"

    def request(self, method: str, path: str, **kwargs) -> httpx.Response:
        return self.http.request(method, path, **kwargs)


def emit(config: CliConfig, doc, human: str | None = None) -> None:
    if config.output_mode == "machine":
        print(canonical_json(doc))
    else:
        print(human if human is not None else json.dumps(doc, indent=2, sort_keys=True))


def check(config: CliConfig, response: httpx.Response, human=None) -> int:
    body = _body_of(response)
    if response.status_code >= 400:
        emit(config, body, human=f"rejected ({response.status_code}): {json.dumps(body)}")
        return EXIT_REJECTED
    emit(config, body, human=human(body) if callable(human) else human)
    return EXIT_OK


def _body_of(response: httpx.Response):
    try:
        return response.json()
    except ValueError:
        return {"text": response.text}


# --- subcommand handlers ---------------------------------------------------------


def cmd_app(client: Client, config: CliConfig, args) -> int:
    if args.app_cmd == "create":
        response = client.request("POST", "/api/apps", json={
            "title": args.title, "description": args.description, "ecosystem": args.ecosystem,
        })
        return check(config, response, human=lambda b: f"created {b['app_id']} ({b['title']})")
    response = client.request("GET", "/api/apps")
    def human(body):
        lines = [f"{a['app_id']}  {a['latest_state'] or '-':<18} {a['title']}" for a in body]
        return "\n".join(lines) if lines else "(no applications)"
    return check(config, response, human=human)


def cmd_submit(client: Client, config: CliConfig, args) -> int:
    files = {
        "notebook": (Path(args.notebook).name, Path(args.notebook).read_bytes()),
        "manifest": (Path(args.manifest).name, Path(args.manifest).read_bytes()),
    }
    response = client.request("POST", f"/api/apps/{args.app}/versions", files=files)
    def human(body):
        lines = [f"version {body['version_no']} -> {body['state']}"]
        manifest_report = (body.get("reports") or {}).get("manifest")
        if manifest_report and manifest_report["violations"]:
            for v in manifest_report["violations"]:
                lines.append(f"  violation: {v['name']} ({v['kind']})")
        for err in (body.get("reports") or {}).get("errors", []):
            lines.append(f"  {err['stage']}: {err['reason']}")
        return "\n".join(lines)
    response_code = check(config, response, human=human)
    if response_code == EXIT_OK and response.json().get("state") in ("ValidationFailed", "SandboxFailed"):
        return EXIT_REJECTED
    return response_code


def cmd_status(client: Client, config: CliConfig, args) -> int:
    response = client.request("GET", f"/api/apps/{args.app}/versions")
    if response.status_code >= 400:
        return check(config, response)
    versions = response.json()
    if args.version is not None:
        versions = [v for v in versions if v["version_no"] == args.version]
        if not versions:
            emit(config, {"error": "UnknownVersion"}, human=f"no version {args.version}")
            return EXIT_REJECTED
    doc = versions if args.version is None else versions[0]
    human = "\n".join(f"v{v['version_no']}  {v['state']:<18} by {v['submitted_by']} at {v['submitted_at']}" for v in versions)
    emit(config, doc, human=human or "(no versions)")
    return EXIT_OK


def cmd_review(client: Client, config: CliConfig, args) -> int:
    if args.review_cmd == "list":
        apps = client.request("GET", "/api/apps")
        if apps.status_code >= 400:
            return check(config, apps)
        pending = []
        for record in apps.json():
            versions = client.request("GET", f"/api/apps/{record['app_id']}/versions")
            for v in versions.json():
                if v["state"] == "InReview":
                    pending.append(v)
        emit(config, pending, human="\n".join(
            f"{v['app_id']}:{v['version_no']} assigned to {v['assigned_reviewer']}" for v in pending
        ) or "(review queue empty)")
        return EXIT_OK
    if args.review_cmd == "assign":
        response = client.request(
            "POST", f"/api/versions/{args.app}:{args.version}/assign-reviewer",
            json={"reviewer": args.reviewer},
        )
        return check(config, response, human=lambda b: f"assigned; preview at {b['preview_url']}")
    action = {"approve": "approve", "request-changes": "request_changes", "reject": "reject"}[args.review_cmd]
    response = client.request(
        "POST", f"/api/versions/{args.app}:{args.version}/review",
        json={"action": action, "comment": args.comment},
    )
    return check(config, response, human=lambda b: f"version {b['version_no']} -> {b['state']}")


def cmd_registry(client: Client, config: CliConfig, args) -> int:
    if args.registry_cmd == "list":
        if args.tsv:
            response = client.request("GET", "/api/registry", params={"format": "tsv"})
            if response.status_code >= 400:
                return check(config, response)
            sys.stdout.write(response.text)
            return EXIT_OK
        response = client.request("GET", "/api/registry")
        def human(body):
            return "\n".join(
                f"{e['ecosystem']:<6} {e['normalized_name']:<24} {e['status']:<9} {e['allowed_versions']}"
                for e in body
            ) or "(registry empty)"
        return check(config, response, human=human)
    if args.registry_cmd == "request":
        response = client.request("POST", "/api/packages/requests", json={
            "ecosystem": args.ecosystem, "name": args.name, "note": args.note,
        })
        return check(config, response, human=lambda b: f"{b['normalized_name']} -> {b['status']}")
    response = client.request(
        "POST", f"/api/packages/{args.ecosystem}/{args.name}/decision",
        json={"decision": args.decision, "allowed_versions": args.allowed_versions},
    )
    return check(config, response, human=lambda b: f"{b['normalized_name']} -> {b['status']}")


def cmd_deploy(client: Client, config: CliConfig, args) -> int:
    if args.deploy_cmd == "rollback":
        response = client.request("POST", f"/api/apps/{args.app}/rollback", json={"version_no": args.version_no})
        return check(config, response, human=lambda b: f"{b['slug']} now serves v{b['version_no']}")
    if args.deploy_cmd == "scale":
        response = client.request("POST", f"/api/deployments/{args.slug}/scale", json={"replicas": args.replicas})
        return check(config, response, human=lambda b: f"{b['slug']} scaled to {b['replicas']} replicas")
    response = client.request("POST", f"/api/deployments/{args.slug}/retire")
    return check(config, response, human=lambda b: f"{b['slug']} retired")


def cmd_audit(client: Client, config: CliConfig, args) -> int:
    response = client.request("GET", "/api/audit", params={"from": args.from_seq})
    if response.status_code >= 400:
        return check(config, response)
    if args.audit_cmd == "export":
        sys.stdout.write(response.text)
        return EXIT_OK
    lines = [line for line in response.text.splitlines() if line]
    ok, first_bad = verify_audit_lines(lines)
    doc = {"ok": ok, "events": len(lines), "first_bad_seq": first_bad}
    emit(config, doc, human=f"chain ok over {len(lines)} events" if ok else f"BROKEN at seq {first_bad}")
    return EXIT_OK if ok else EXIT_REJECTED


def _parse_params(pairs: list[str]) -> dict:
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--param expects k=v, got {pair!r}")
        key, _, raw = pair.partition("=")
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


def _render_run(body) -> str:
    lines = [f"status: {body['status']}"]
    for out in body.get("outputs", []):
        lines.append(f"[cell {out['source_cell_index']}] {out.get('payload_text') or out['payload_ref']}")
    for v in body.get("violations", []):
        lines.append(f"violation: {v['kind']}: {v['detail']}")
    if body.get("log"):
        lines.append(f"log: {body['log']}")
    return "\n".join(lines)


def cmd_run(client: Client, config: CliConfig, args) -> int:
    try:
        params = _parse_params(args.param)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    if args.slug:
        response = client.request("POST", f"/internal/{args.slug}/run", json={"params": params})
    else:
        response = client.request(
            "POST", f"/api/versions/{args.app}:{args.version}/run",
            json={"params": params, "purpose": args.purpose},
        )
    code = check(config, response, human=_render_run)
    if code == EXIT_OK and response.json().get("status") != "success":
        return EXIT_REJECTED
    return code


def cmd_schema(client: Client, config: CliConfig, args) -> int:
    response = client.request("GET", f"/internal/{args.slug}")
    return check(config, response, human=lambda b: b["schema_canonical"])


def cmd_preview(client: Client, config: CliConfig, args) -> int:
    if args.preview_cmd == "show":
        response = client.request("GET", f"/preview/{args.token}")
        return check(config, response, human=lambda b: b["schema_canonical"])
    try:
        params = _parse_params(args.param)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    response = client.request("POST", f"/preview/{args.token}/run", json={"params": params})
    code = check(config, response, human=_render_run)
    if code == EXIT_OK and response.json().get("status") != "success":
        return EXIT_REJECTED
    return code


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="appforge", description="appforge platform client")
    parser.add_argument("--base-url", default=None, help="server base URL (or APPFORGE_BASE_URL)")
    parser.add_argument("--machine", action="store_true", help="print one canonical JSON document per result")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_app = sub.add_parser("app", help="manage applications")
    app_sub = p_app.add_subparsers(dest="app_cmd", required=True)
    p_create = app_sub.add_parser("create")
    p_create.add_argument("--title", required=True)
    p_create.add_argument("--description", default="")
    p_create.add_argument("--ecosystem", default="pypi")
    app_sub.add_parser("list")
    p_app.set_defaults(func=cmd_app)

    p_submit = sub.add_parser("submit", help="submit a notebook + manifest as a new version")
    p_submit.add_argument("--app", required=True)
    p_submit.add_argument("--notebook", required=True)
    p_submit.add_argument("--manifest", required=True)
    p_submit.set_defaults(func=cmd_submit)

    p_status = sub.add_parser("status", help="show version history")
    p_status.add_argument("--app", required=True)
    p_status.add_argument("--version", type=int, default=None)
    p_status.set_defaults(func=cmd_status)

    p_review = sub.add_parser("review", help="review queue and decisions")
    review_sub = p_review.add_subparsers(dest="review_cmd", required=True)
    review_sub.add_parser("list")
    p_assign = review_sub.add_parser("assign")
    p_assign.add_argument("--app", required=True)
    p_assign.add_argument("--version", type=int, required=True)
    p_assign.add_argument("--reviewer", required=True)
    for action in ("approve", "request-changes", "reject"):
        p_action = review_sub.add_parser(action)
        p_action.add_argument("--app", required=True)
        p_action.add_argument("--version", type=int, required=True)
        p_action.add_argument("--comment", default="")
    p_review.set_defaults(func=cmd_review)

    p_registry = sub.add_parser("registry", help="curated package registry")
    registry_sub = p_registry.add_subparsers(dest="registry_cmd", required=True)
    p_list = registry_sub.add_parser("list")
    p_list.add_argument("--tsv", action="store_true", help="tab-separated export format")
    p_request = registry_sub.add_parser("request")
    p_request.add_argument("--ecosystem", default="pypi")
    p_request.add_argument("--name", required=True)
    p_request.add_argument("--note", default="")
    p_decide = registry_sub.add_parser("decide")
    p_decide.add_argument("--ecosystem", default="pypi")
    p_decide.add_argument("--name", required=True)
    p_decide.add_argument("--decision", choices=("approve", "reject"), required=True)
    p_decide.add_argument("--allowed-versions", default="any")
    p_registry.set_defaults(func=cmd_registry)

    p_deploy = sub.add_parser("deploy", help="deployment operations")
    deploy_sub = p_deploy.add_subparsers(dest="deploy_cmd", required=True)
    p_rollback = deploy_sub.add_parser("rollback")
    p_rollback.add_argument("--app", required=True)
    p_rollback.add_argument("--version-no", type=int, required=True)
    p_scale = deploy_sub.add_parser("scale")
    p_scale.add_argument("--slug", required=True)
    p_scale.add_argument("--replicas", type=int, required=True)
    p_retire = deploy_sub.add_parser("retire")
    p_retire.add_argument("--slug", required=True)
    p_deploy.set_defaults(func=cmd_deploy)

    p_audit = sub.add_parser("audit", help="audit chain export and verification")
    audit_sub = p_audit.add_subparsers(dest="audit_cmd", required=True)
    for name in ("export", "verify"):
        p_a = audit_sub.add_parser(name)
        p_a.add_argument("--from-seq", type=int, default=0)
    p_audit.set_defaults(func=cmd_audit)

    p_run = sub.add_parser("run", help="run a deployed app or a version")
    group = p_run.add_mutually_exclusive_group(required=True)
    group.add_argument("--slug")
    group.add_argument("--app")
    p_run.add_argument("--version", type=int)
    p_run.add_argument("--purpose", choices=("preview", "build_check"), default="preview")
    p_run.add_argument("--param", action="append", default=[], metavar="K=V")
    p_run.set_defaults(func=cmd_run)

    p_schema = sub.add_parser("schema", help="fetch a deployed app's widget schema")
    p_schema.add_argument("--slug", required=True)
    p_schema.set_defaults(func=cmd_schema)

    p_preview = sub.add_parser("preview", help="reviewer preview links")
    preview_sub = p_preview.add_subparsers(dest="preview_cmd", required=True)
    p_show = preview_sub.add_parser("show")
    p_show.add_argument("--token", required=True)
    p_prun = preview_sub.add_parser("run")
    p_prun.add_argument("--token", required=True)
    p_prun.add_argument("--param", action="append", default=[], metavar="K=V")
    p_preview.set_defaults(func=cmd_preview)

    return parser


def main(argv: list[str] | None = None, http: httpx.Client | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.cmd == "run" and args.app and args.version is None:
        print("run --app requires --version", file=sys.stderr)
        return EXIT_USAGE
    config = load_cli_config(args)
    client = Client(config, http=http)
    try:
        return args.func(client, config, args)
    except httpx.HTTPError as exc:
        print(f"transport failure: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT


if __name__ == "__main__":
    raise SystemExit(main())
