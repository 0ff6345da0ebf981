"""Configurable stdio scorer used to exercise the wire-protocol client.

Usage: python stub_scorer.py MODE
Modes: echo (0.5 for everything), reverse (buffer 2 requests, answer in
reverse order), badscore, dupid, drop (never answers the second request),
garbage (non-JSON line), error (protocol error line), badhandshake.
"""

import json
import sys


def main() -> int:
    mode = sys.argv[1] if len(sys.argv) > 1 else "echo"
    handshake = json.loads(sys.stdin.readline())
    assert handshake.get("protocol") == "rerrfact-scorer/1"
    if mode == "badhandshake":
        print(json.dumps({"ok": False}), flush=True)
        return 1
    print(json.dumps({"ok": True, "max_inflight": 1}), flush=True)

    buffered = []
    count = 0
    for line in sys.stdin:
        request = json.loads(line)
        count += 1
        if mode == "reverse":
            buffered.append(request)
            if len(buffered) == 2:
                for item in reversed(buffered):
                    print(json.dumps({"id": item["id"], "score": 0.25}), flush=True)
                buffered = []
            continue
        if mode == "badscore":
            print(json.dumps({"id": request["id"], "score": 1.5}), flush=True)
        elif mode == "dupid":
            print(json.dumps({"id": request["id"], "score": 0.5}), flush=True)
            print(json.dumps({"id": request["id"], "score": 0.5}), flush=True)
        elif mode == "drop":
            if count == 1:
                print(json.dumps({"id": request["id"], "score": 0.5}), flush=True)
        elif mode == "garbage":
            print("this is not json", flush=True)
        elif mode == "error":
            print(json.dumps({"id": request["id"], "error": "boom"}), flush=True)
        else:  # echo
            print(json.dumps({"id": request["id"], "score": 0.5}), flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
