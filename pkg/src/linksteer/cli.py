"""Command-line interface: serve, request, replay, state, seed-check.

``request`` and ``replay`` default to embedded mode (an in-process system
built from the config); pass --url to talk to a running gateway instead.
Exit codes: 0 Applied/Saturated, 2 Unrecognized, 3 Rejected, 4 Conflicted,
1 anything operational (bad config, connection refused, malformed scenario).
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import httpx

from .gateway import BindFailureError, Config, InvalidConfigError, build_system, load_seed_config, serve
from .orchestrator import MalformedScenarioError
from .store.engine import ParamStore, StoreError

_STATUS_EXIT = {
    "Applied": 0,
    "Saturated": 0,
    "Unrecognized": 2,
    "Rejected": 3,
    "Conflicted": 4,
}


def _load_config(path: Optional[str]) -> Config:
    if path is None:
        return Config()
    return Config.from_file(path)


def _print(doc) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def cmd_serve(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    serve(config)
    return 0


def cmd_request(args: argparse.Namespace) -> int:
    if args.url:
        try:
            response = httpx.post(
                f"{args.url}/api/v1/requests",
                json={"user_id": args.user, "text": args.text},
                timeout=30.0,
            )
            response.raise_for_status()
            outcome = response.json()
        except httpx.HTTPError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    else:
        config = _load_config(args.config)
        orch = build_system(config)
        outcome = orch.handle_request(args.user, args.text).to_dict()
    _print(outcome)
    return _STATUS_EXIT.get(outcome["status"], 1)


def cmd_replay(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    orch = build_system(config)
    outcomes = orch.replay(args.scenario)
    report = {
        "scenario": args.scenario,
        "outcomes": [o.to_dict() for o in outcomes],
        "final_state": json.loads(orch.store.dump().decode("utf-8")),
    }
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
        print(f"wrote {args.report} ({len(outcomes)} outcomes)")
    else:
        _print(report)
    return 0


def cmd_state(args: argparse.Namespace) -> int:
    if args.url:
        try:
            links = httpx.get(f"{args.url}/api/v1/links", timeout=10.0)
            links.raise_for_status()
            _print({"links": links.json()})
        except httpx.HTTPError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        return 0
    config = _load_config(args.config)
    orch = build_system(config)
    _print(json.loads(orch.store.dump().decode("utf-8")))
    return 0


def cmd_seed_check(args: argparse.Namespace) -> int:
    try:
        seed_config = load_seed_config(args.seed)
        store = ParamStore.seed(seed_config)
    except (StoreError, OSError, json.JSONDecodeError) as exc:
        print(f"invalid seed: {exc}", file=sys.stderr)
        return 1
    summary = {
        name: {"columns": len(t.schema.columns), "rows": len(t.rows)}
        for name, t in store.tables.items()
    }
    _print({"ok": True, "tables": summary})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linksteer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP gateway")
    p.add_argument("--config", default=None, help="config JSON path (defaults apply)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("request", help="submit one natural-language request")
    p.add_argument("text")
    p.add_argument("--user", default="u1")
    p.add_argument("--config", default=None)
    p.add_argument("--url", default=None, help="talk to a running gateway instead of embedded mode")
    p.set_defaults(func=cmd_request)

    p = sub.add_parser("replay", help="replay a scenario file deterministically")
    p.add_argument("scenario")
    p.add_argument("--report", default=None, help="write the trajectory report to this path")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("state", help="dump the current store state")
    p.add_argument("--config", default=None)
    p.add_argument("--url", default=None)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("seed-check", help="validate a seed config file")
    p.add_argument("--seed", default=None, help="seed JSON path (default: packaged seed)")
    p.set_defaults(func=cmd_seed_check)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidConfigError, BindFailureError, MalformedScenarioError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
