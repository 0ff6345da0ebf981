import json
import threading
import urllib.request

import pytest

from refscorer.heuristic import heuristic_score
from refscorer.http_server import make_http_server

HANDSHAKE = json.dumps({"protocol": "rerrfact-scorer/1", "task": "rationale"})


@pytest.fixture()
def server_url():
    server = make_http_server(heuristic_score)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/"
    server.shutdown()
    server.server_close()


def post(url, body):
    request = urllib.request.Request(
        url, data=body.encode("utf-8"), headers={"Content-Type": "application/x-ndjson"}
    )
    try:
        with urllib.request.urlopen(request, timeout=10) as response:
            return response.status, response.read().decode("utf-8").splitlines()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read().decode("utf-8").splitlines()


def test_batch_post_round_trip(server_url):
    body = "\n".join(
        [
            HANDSHAKE,
            json.dumps({"id": 1, "claim": "a b", "context": "a b"}),
            json.dumps({"id": 2, "claim": "a b", "context": "c d"}),
        ]
    ) + "\n"
    status, lines = post(server_url, body)
    assert status == 200
    assert json.loads(lines[0])["ok"] is True
    assert json.loads(lines[1]) == {"id": 1, "score": 1.0}
    assert json.loads(lines[2]) == {"id": 2, "score": 0.5}


def test_invalid_handshake_is_http_400(server_url):
    status, lines = post(server_url, '{"protocol": "nope"}\n')
    assert status == 400
    assert "error" in json.loads(lines[0])


def test_malformed_request_line_reported_inline(server_url):
    body = HANDSHAKE + "\nnot json at all\n"
    status, lines = post(server_url, body)
    assert status == 200
    response = json.loads(lines[1])
    assert response["id"] is None
    assert "error" in response
