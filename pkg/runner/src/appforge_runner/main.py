"""Runner entry point.

Default mode serves exactly one request: framed document on stdin, framed
result on stdout, then exit. --http serves POSTs by re-spawning itself in
stdio mode per request, so every execution still gets a fresh process.
"""

from __future__ import annotations

import argparse
import subprocess
import sys
from http.server import BaseHTTPRequestHandler, HTTPServer

from .executor import execute
from .wire import WireError, parse_request, read_framed, write_framed


def run_stdio() -> int:
    try:
        raw = read_framed(sys.stdin.buffer)
        request = parse_request(raw)
    except WireError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return 2
    result = execute(request)
    write_framed(sys.stdout.buffer, result.to_bytes())
    return 0


def _subprocess_run(body: bytes) -> bytes | None:
    """Execute one request in a fresh copy of this runner."""
    frame = len(body).to_bytes(8, "big") + body
    proc = subprocess.run(
        [sys.executable, "-m", "appforge_runner"], input=frame, capture_output=True
    )
    if proc.returncode != 0 or not proc.stdout:
        return None
    payload = proc.stdout
    length = int.from_bytes(payload[:8], "big")
    return payload[8 : 8 + length]


class Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("content-length", 0))
        body = self.rfile.read(length)
        result = _subprocess_run(body)
        if result is None:
            self.send_response(422)
            self.end_headers()
            return
        self.send_response(200)
        self.send_header("content-type", "application/json")
        self.send_header("content-length", str(len(result)))
        self.end_headers()
        self.wfile.write(result)

    def log_message(self, format, *args):
        pass


def run_http(host: str, port: int) -> int:
    server = HTTPServer((host, port), Handler)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="appforge-runner")
    parser.add_argument("--http", action="store_true", help="serve wire requests over HTTP POST")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8451)
    args = parser.parse_args(argv)
    if args.http:
        return run_http(args.host, args.port)
    return run_stdio()


if __name__ == "__main__":
    raise SystemExit(main())
