"""HTTP line-stream transport: one POST per batch, NDJSON bodies both ways.

The request body is the handshake line followed by request lines; the
response body is the ack line followed by one response line per request.
An invalid handshake yields HTTP 400 with a single {"error": ...} line.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .protocol import HandshakeError, ScorerImpl, serve_lines


def _make_handler(scorer: ScorerImpl):
    class ScorerHandler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            lines = self.rfile.read(length).decode("utf-8").splitlines()
            try:
                body = ("\n".join(serve_lines(lines, scorer)) + "\n").encode("utf-8")
                status = 200
            except HandshakeError as exc:
                body = (json.dumps({"error": str(exc)}) + "\n").encode("utf-8")
                status = 400
            self.send_response(status)
            self.send_header("Content-Type", "application/x-ndjson")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, *args):  # scoring traffic is not worth logging
            pass

    return ScorerHandler


def make_http_server(scorer: ScorerImpl, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """Bound but not yet serving; port 0 picks a free port."""
    return ThreadingHTTPServer((host, port), _make_handler(scorer))


def serve_http(scorer: ScorerImpl, host: str = "127.0.0.1", port: int = 0) -> int:
    server = make_http_server(scorer, host, port)
    print(f"refscorer: listening on http://{host}:{server.server_port}/", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0
