"""Scorer wire protocol: newline-delimited JSON request/response framing.

Session shape (identical over stdio and HTTP):

1. client -> scorer  {"protocol": "rerrfact-scorer/1", "task": <tag>}
2. scorer -> client  {"ok": true, "max_inflight": 1}
3. client -> scorer  {"id": <int>, "claim": <str>, "context": <str>}  per line
4. scorer -> client  {"id": <int>, "score": <float in [0, 1]>}        per line

A malformed request yields {"id": <id or null>, "error": <msg>} and the
stream continues; an invalid handshake terminates the session with a nonzero
status. Every request line gets exactly one response line.
"""

from __future__ import annotations

import json
import sys
from typing import Callable, IO, Iterable

PROTOCOL = "rerrfact-scorer/1"
TASKS = ("abstract", "rationale", "stance_noinfo", "stance_sr")
MAX_INFLIGHT = 1

ScorerImpl = Callable[[str, str], float]


class HandshakeError(ValueError):
    """First line was not a valid protocol handshake."""


def check_handshake(line: str) -> str:
    """Validate the handshake line; returns the task tag."""
    try:
        handshake = json.loads(line)
    except json.JSONDecodeError as exc:
        raise HandshakeError(f"handshake is not valid JSON: {exc.msg}") from exc
    if not isinstance(handshake, dict):
        raise HandshakeError("handshake must be a JSON object")
    if handshake.get("protocol") != PROTOCOL:
        raise HandshakeError(f"unsupported protocol {handshake.get('protocol')!r}")
    task = handshake.get("task")
    if task not in TASKS:
        raise HandshakeError(f"unknown task {task!r}; expected one of {TASKS}")
    return task


def ack_line() -> str:
    return json.dumps({"ok": True, "max_inflight": MAX_INFLIGHT})


def handle_request(line: str, scorer: ScorerImpl) -> str:
    """One response line per request line; errors are reported, never raised."""
    request_id = None
    try:
        request = json.loads(line)
        if isinstance(request, dict):
            candidate = request.get("id")
            if isinstance(candidate, int) and not isinstance(candidate, bool):
                request_id = candidate
        if not isinstance(request, dict):
            raise ValueError("request must be a JSON object")
        if request_id is None:
            raise ValueError("request needs an integer 'id'")
        claim = request.get("claim")
        context = request.get("context")
        if not isinstance(claim, str) or not isinstance(context, str):
            raise ValueError("request needs string 'claim' and 'context'")
        score = float(scorer(claim, context))
        if not (0.0 <= score <= 1.0):
            raise ValueError(f"scorer produced {score}, outside [0, 1]")
        return json.dumps({"id": request_id, "score": score})
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        message = exc.msg if isinstance(exc, json.JSONDecodeError) else str(exc)
        return json.dumps({"id": request_id, "error": message})


def serve_lines(lines: Iterable[str], scorer: ScorerImpl) -> Iterable[str]:
    """Protocol core: handshake ack followed by one response per request."""
    iterator = iter(lines)
    try:
        first = next(iterator)
    except StopIteration:
        raise HandshakeError("input closed before handshake") from None
    check_handshake(first)
    yield ack_line()
    for line in iterator:
        if not line.strip():
            continue
        yield handle_request(line, scorer)


def serve_stdio(scorer: ScorerImpl, stdin: IO[str], stdout: IO[str]) -> int:
    """Run a session over text streams; returns the process exit status."""
    try:
        for line in serve_lines(stdin, scorer):
            stdout.write(line + "\n")
            stdout.flush()
    except HandshakeError as exc:
        stdout.flush()
        print(f"refscorer: {exc}", file=sys.stderr)
        return 2
    stdout.flush()
    return 0
