"""Reference scorer for the rerrfact wire protocol."""

from .adapter import SequenceClassifierAdapter
from .heuristic import heuristic_score, tokenize
from .http_server import make_http_server, serve_http
from .protocol import (
    MAX_INFLIGHT,
    PROTOCOL,
    TASKS,
    HandshakeError,
    serve_lines,
    serve_stdio,
)

__version__ = "0.1.0"
