"""Thin command-line client for the service.

Every subcommand talks to the HTTP API: against a remote server when --server
is given, otherwise against an in-process instance of the app. Exit codes:
0 on success, 1 on runtime failure/divergence, 2 on invalid configuration or
bad requests.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


class ServiceClient:
    """HTTP client; without --server it drives an in-process app over ASGI."""

    def __init__(self, server: str | None = None):
        import httpx

        self._httpx = httpx
        if server:
            self._client = httpx.Client(base_url=server, timeout=30.0)
            self._app = None
        else:
            from .service.app import create_app

            self._app = create_app()
            self._client = None

    def _request(self, method: str, path: str, payload: dict | None = None):
        if self._client is not None:
            return self._client.request(method, path, json=payload)
        import asyncio

        async def go():
            transport = self._httpx.ASGITransport(app=self._app)
            async with self._httpx.AsyncClient(
                    transport=transport, base_url="http://pddlearn") as client:
                return await client.request(method, path, json=payload)

        return asyncio.run(go())

    def post(self, path: str, payload: dict):
        return self._request("POST", path, payload)

    def get(self, path: str):
        return self._request("GET", path)


def _overrides(args: argparse.Namespace) -> dict:
    out = {}
    for key in ("seed", "env", "task", "proposer", "out"):
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value
    return out


def cmd_run(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    resp = client.post("/runs", {"config_path": args.config,
                                 "overrides": _overrides(args)})
    if resp.status_code == 400:
        print(f"invalid config: {resp.json().get('detail')}", file=sys.stderr)
        return EXIT_CONFIG
    if resp.status_code != 200:
        print(f"run submission failed: {resp.status_code} {resp.text}",
              file=sys.stderr)
        return EXIT_RUNTIME
    run_id = resp.json()["run_id"]
    while True:
        status = client.get(f"/runs/{run_id}").json()
        if status["state"] in ("done", "error"):
            break
        time.sleep(args.poll_interval)
    if status["state"] == "error":
        print(f"run failed: {status['error']}", file=sys.stderr)
        return EXIT_RUNTIME
    for report in status["reports"]:
        print(f"{report['env']}/{report['task']} seed={report['seed']} "
              f"success={report['success']} nr={report['nr']} nes={report['nes']} "
              f"f1={report['f1']:.1f} gc={report['gc']:.2f} "
              f"trace={report['trace_path']}")
    summary = status.get("summary") or {}
    if summary:
        print(f"summary: f1={summary.get('mean_f1')} nes={summary.get('mean_nes')} "
              f"success_rate={summary.get('success_rate')} "
              f"-> {summary.get('summary_path')}")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    resp = client.post("/replay", {"trace_path": args.trace})
    if resp.status_code == 400:
        print(f"replay rejected: {resp.json().get('detail')}", file=sys.stderr)
        return EXIT_CONFIG
    body = resp.json()
    if body["ok"]:
        print("replay ok: recorded feedback reproduced exactly")
        return EXIT_OK
    print(f"divergence at iteration {body['iteration']} step {body['step_index']}: "
          f"{body['message']}", file=sys.stderr)
    return EXIT_RUNTIME


def cmd_eval(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    resp = client.post("/eval", {"trace_paths": args.traces,
                                 "threshold": args.threshold})
    if resp.status_code != 200:
        print(f"eval failed: {resp.json().get('detail', resp.text)}", file=sys.stderr)
        return EXIT_CONFIG
    rows = resp.json()["rows"]
    print(f"{'trace':<48} {'f1':>6} {'nr':>4} {'nes':>5} {'gc':>5} success")
    for row in rows:
        print(f"{row['trace_path']:<48} {row['f1']:>6.1f} {row['nr']:>4} "
              f"{row['nes']:>5} {row['gc']:>5.2f} {row['success']}")
    if args.json:
        print(json.dumps(rows, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_print_domain(args: argparse.Namespace) -> int:
    client = ServiceClient(args.server)
    resp = client.post("/print-domain", {"trace_path": args.trace,
                                         "threshold": args.threshold})
    if resp.status_code != 200:
        print(f"print-domain failed: {resp.json().get('detail', resp.text)}",
              file=sys.stderr)
        return EXIT_CONFIG
    print(resp.json()["pddl"], end="")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pddlearn",
        description="Learn PDDL action semantics by acting in symbolic environments")
    parser.add_argument("--server", help="base URL of a running service; "
                        "default runs the service in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a configured experiment")
    run_p.add_argument("--config", required=True, help="YAML run configuration")
    run_p.add_argument("--seed", type=int, help="override: run this single seed")
    run_p.add_argument("--env", help="override: environment id")
    run_p.add_argument("--task", help="override: task id")
    run_p.add_argument("--proposer", choices=("oracle", "heuristic", "llm"),
                       help="override: use this proposer for every role")
    run_p.add_argument("--out", help="override: output directory")
    run_p.add_argument("--poll-interval", type=float, default=0.05,
                       help=argparse.SUPPRESS)
    run_p.set_defaults(func=cmd_run)

    replay_p = sub.add_parser("replay", help="re-execute a recorded trace")
    replay_p.add_argument("trace")
    replay_p.set_defaults(func=cmd_replay)

    eval_p = sub.add_parser("eval", help="recompute metrics from traces")
    eval_p.add_argument("traces", nargs="+")
    eval_p.add_argument("--threshold", type=float, default=0.5)
    eval_p.add_argument("--json", action="store_true")
    eval_p.set_defaults(func=cmd_eval)

    print_p = sub.add_parser("print-domain",
                             help="emit the belief-threshold domain as PDDL")
    print_p.add_argument("trace")
    print_p.add_argument("--threshold", type=float, default=0.5)
    print_p.set_defaults(func=cmd_print_domain)

    serve_p = sub.add_parser("serve", help="run the HTTP service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8321)
    serve_p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
