"""CLI: ``refscorer stdio`` or ``refscorer http [--host H] [--port P]``."""

import argparse
import sys

from .heuristic import heuristic_score
from .http_server import serve_http
from .protocol import serve_stdio


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="refscorer", description=__doc__)
    sub = parser.add_subparsers(dest="transport", required=True)
    sub.add_parser("stdio", help="serve one session over stdin/stdout")
    p_http = sub.add_parser("http", help="serve batches over HTTP POST")
    p_http.add_argument("--host", default="127.0.0.1")
    p_http.add_argument("--port", type=int, default=0)
    args = parser.parse_args(argv)

    if args.transport == "stdio":
        return serve_stdio(heuristic_score, sys.stdin, sys.stdout)
    return serve_http(heuristic_score, args.host, args.port)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
