"""Client for the scorer wire protocol (newline-delimited JSON).

Session shape, identical over every transport:

1. client -> scorer  {"protocol": "rerrfact-scorer/1", "task": <task tag>}
2. scorer -> client  {"ok": true, "max_inflight": <int >= 1>}
3. client -> scorer  {"id": <int>, "claim": <str>, "context": <str>}   (one per line)
4. scorer -> client  {"id": <int>, "score": <float in [0, 1]>}         (any order)

Transports:

* ``stdio:<command line>``  - spawn the command and keep a persistent session
  over its stdin/stdout.
* ``http://...``            - one POST per batch; the request body is the
  handshake line plus the request lines, the response body is the ack line
  plus the response lines.

Request order within a batch is preserved on the wire; responses may arrive
out of order and are re-matched by id. Any malformed line, out-of-range score,
missing, duplicate, or unknown id is fatal for the batch.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
import time
import urllib.request
from dataclasses import dataclass
from typing import Sequence

PROTOCOL = "rerrfact-scorer/1"
TASKS = ("abstract", "rationale", "stance_noinfo", "stance_sr")
DEFAULT_TIMEOUT = 30.0


class ScorerProtocolError(RuntimeError):
    """The scorer endpoint violated the wire protocol."""


def _handshake_line(task: str) -> str:
    if task not in TASKS:
        raise ScorerProtocolError(f"unknown scorer task {task!r}; expected one of {TASKS}")
    return json.dumps({"protocol": PROTOCOL, "task": task})


def _request_lines(pairs: Sequence[tuple[int, str, str]]) -> list[str]:
    return [
        json.dumps({"id": pair_id, "claim": claim, "context": context}, ensure_ascii=False)
        for pair_id, claim, context in pairs
    ]


def _parse_ack(line: str) -> int:
    try:
        ack = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ScorerProtocolError(f"malformed handshake response: {line!r}") from exc
    if not isinstance(ack, dict) or ack.get("ok") is not True:
        raise ScorerProtocolError(f"scorer refused handshake: {line!r}")
    max_inflight = ack.get("max_inflight")
    if not isinstance(max_inflight, int) or max_inflight < 1:
        raise ScorerProtocolError(f"invalid max_inflight in handshake: {line!r}")
    return max_inflight


def _collect_scores(
    lines: Sequence[str], expected_ids: Sequence[int]
) -> dict[int, float]:
    expected = set(expected_ids)
    if len(expected) != len(expected_ids):
        raise ScorerProtocolError("duplicate request ids within one batch")
    scores: dict[int, float] = {}
    for line in lines:
        try:
            response = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ScorerProtocolError(f"malformed response line: {line!r}") from exc
        if not isinstance(response, dict):
            raise ScorerProtocolError(f"malformed response line: {line!r}")
        if "error" in response:
            raise ScorerProtocolError(f"scorer reported an error: {response['error']}")
        pair_id = response.get("id")
        score = response.get("score")
        if pair_id not in expected:
            raise ScorerProtocolError(f"response for unknown id {pair_id!r}")
        if pair_id in scores:
            raise ScorerProtocolError(f"duplicate response for id {pair_id}")
        if not isinstance(score, (int, float)) or isinstance(score, bool):
            raise ScorerProtocolError(f"non-numeric score for id {pair_id}: {score!r}")
        score = float(score)
        if not (0.0 <= score <= 1.0):
            raise ScorerProtocolError(f"score {score} for id {pair_id} outside [0, 1]")
        scores[pair_id] = score
    missing = expected - scores.keys()
    if missing:
        raise ScorerProtocolError(f"missing responses for ids {sorted(missing)}")
    return scores


class StdioScorerClient:
    """Persistent session with a scorer child process; one batch in flight."""

    def __init__(self, command: str, task: str, timeout: float = DEFAULT_TIMEOUT):
        self.command = command
        self.task = task
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._lock = threading.Lock()

    def _start(self) -> None:
        argv = shlex.split(self.command)
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise ScorerProtocolError(f"cannot start scorer {self.command!r}: {exc}") from exc

        def _pump() -> None:
            assert self._proc is not None and self._proc.stdout is not None
            for line in self._proc.stdout:
                self._lines.put(line.rstrip("\n"))
            self._lines.put(None)

        threading.Thread(target=_pump, daemon=True).start()
        self._send(_handshake_line(self.task))
        _parse_ack(self._read_line(time.monotonic() + self.timeout))

    def _send(self, line: str) -> None:
        assert self._proc is not None and self._proc.stdin is not None
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ScorerProtocolError(f"scorer {self.command!r} closed its input") from exc

    def _read_line(self, deadline: float) -> str:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise ScorerProtocolError(f"scorer {self.command!r} timed out")
        try:
            line = self._lines.get(timeout=remaining)
        except queue.Empty:
            raise ScorerProtocolError(f"scorer {self.command!r} timed out") from None
        if line is None:
            raise ScorerProtocolError(f"scorer {self.command!r} closed its output")
        return line

    def score_batch(self, pairs: Sequence[tuple[int, str, str]]) -> dict[int, float]:
        if not pairs:
            return {}
        with self._lock:
            if self._proc is None:
                self._start()
            for line in _request_lines(pairs):
                self._send(line)
            deadline = time.monotonic() + self.timeout
            lines = [self._read_line(deadline) for _ in pairs]
        return _collect_scores(lines, [pair_id for pair_id, _, _ in pairs])

    def close(self) -> None:
        if self._proc is None:
            return
        try:
            if self._proc.stdin is not None:
                self._proc.stdin.close()
            self._proc.wait(timeout=5)
        except (OSError, subprocess.TimeoutExpired):
            self._proc.kill()
        self._proc = None

    def __enter__(self) -> "StdioScorerClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


class HttpScorerClient:
    """Batch-per-POST client: handshake + requests up, ack + responses down."""

    def __init__(self, url: str, task: str, timeout: float = DEFAULT_TIMEOUT):
        self.url = url
        self.task = task
        self.timeout = timeout
        self._lock = threading.Lock()

    def score_batch(self, pairs: Sequence[tuple[int, str, str]]) -> dict[int, float]:
        if not pairs:
            return {}
        body = "\n".join([_handshake_line(self.task), *_request_lines(pairs)]) + "\n"
        request = urllib.request.Request(
            self.url,
            data=body.encode("utf-8"),
            headers={"Content-Type": "application/x-ndjson"},
            method="POST",
        )
        with self._lock:
            try:
                with urllib.request.urlopen(request, timeout=self.timeout) as response:
                    text = response.read().decode("utf-8")
            except OSError as exc:
                raise ScorerProtocolError(f"scorer {self.url!r} unreachable: {exc}") from exc
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines:
            raise ScorerProtocolError(f"scorer {self.url!r} returned an empty body")
        _parse_ack(lines[0])
        return _collect_scores(lines[1:], [pair_id for pair_id, _, _ in pairs])

    def close(self) -> None:  # symmetry with the stdio client
        pass

    def __enter__(self) -> "HttpScorerClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


@dataclass(frozen=True)
class ScorerEndpoint:
    transport: str  # "stdio" | "http" | "builtin"
    target: str


def parse_endpoint(spec: str) -> ScorerEndpoint:
    """Parse an endpoint string: ``stdio:<command>``, ``http(s)://...``, ``builtin:<name>``."""
    if spec.startswith("stdio:"):
        command = spec[len("stdio:") :].strip()
        if not command:
            raise ScorerProtocolError("empty stdio scorer command")
        return ScorerEndpoint("stdio", command)
    if spec.startswith(("http://", "https://")):
        return ScorerEndpoint("http", spec)
    if spec.startswith("builtin:"):
        return ScorerEndpoint("builtin", spec[len("builtin:") :])
    raise ScorerProtocolError(
        f"unrecognized scorer endpoint {spec!r}; expected stdio:<command>, "
        f"http(s)://<url>, or builtin:<name>"
    )


def open_client(
    endpoint: str | ScorerEndpoint, task: str, timeout: float = DEFAULT_TIMEOUT
) -> StdioScorerClient | HttpScorerClient:
    parsed = parse_endpoint(endpoint) if isinstance(endpoint, str) else endpoint
    if parsed.transport == "stdio":
        return StdioScorerClient(parsed.target, task, timeout)
    if parsed.transport == "http":
        return HttpScorerClient(parsed.target, task, timeout)
    raise ScorerProtocolError(f"endpoint {parsed} has no wire transport")


def score_remote(
    endpoint: str | ScorerEndpoint,
    task: str,
    pairs: Sequence[tuple[int, str, str]],
    timeout: float = DEFAULT_TIMEOUT,
) -> dict[int, float]:
    """Score one batch against an endpoint; returns scores keyed by request id."""
    with open_client(endpoint, task, timeout) as client:
        return client.score_batch(pairs)
