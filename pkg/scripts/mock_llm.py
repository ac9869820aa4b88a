#!/usr/bin/env python3
"""Deterministic local chat-completions endpoint for offline runs.

Implements POST /chat/completions with the standard request/response shape
and replies by echoing the last user message verbatim, so any flow driven
against it is fully reproducible. Used by the test suite and handy for
demoing `heatcap report`/`heatcap chat` without a real LLM.
"""

from __future__ import annotations

import argparse
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


def reply_for(messages: list[dict]) -> str:
    """Echo the last user message (deterministic by construction)."""
    for msg in reversed(messages):
        if msg.get("role") == "user":
            return msg.get("content", "")
    return ""


class EchoChatHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        if self.path != "/chat/completions":
            self.send_error(404)
            return
        length = int(self.headers.get("Content-Length", 0))
        try:
            payload = json.loads(self.rfile.read(length))
            content = reply_for(payload.get("messages", []))
        except (json.JSONDecodeError, AttributeError):
            self.send_error(400)
            return
        body = json.dumps(
            {"choices": [{"message": {"role": "assistant", "content": content}}]}
        ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, fmt, *args):  # keep test output quiet
        pass


def start_background(port: int = 0) -> tuple[ThreadingHTTPServer, str]:
    """Start the echo server on a daemon thread; returns (server, base_url)."""
    server = ThreadingHTTPServer(("127.0.0.1", port), EchoChatHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, f"http://127.0.0.1:{server.server_address[1]}"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--port", type=int, default=8799)
    args = ap.parse_args()
    server = ThreadingHTTPServer(("127.0.0.1", args.port), EchoChatHandler)
    print(f"mock LLM listening on http://127.0.0.1:{args.port}")
    server.serve_forever()


if __name__ == "__main__":
    main()
