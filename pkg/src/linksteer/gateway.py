"""Operational surface: configuration, HTTP endpoints, embedded system builder.

Endpoints (all JSON):
    POST /api/v1/requests {user_id, text}      -> RequestOutcome
    GET  /api/v1/links                         -> current links rows
    GET  /api/v1/links/{link_id}               -> one links row
    GET  /api/v1/metrics/history?link_id=N     -> snapshot series
    GET  /api/v1/events?since=N&wait_ms=M      -> long-poll outcome stream
    GET  /healthz                              -> readiness

Every mutation funnels through the orchestrator's single writer.
"""
from __future__ import annotations

import json
import os
import socket
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .intent import RuleBasedBackend, default_linkage, load_lexicon
from .orchestrator import Orchestrator
from .phy import Surrogate
from .remote import RemoteBackendConfig, RemoteIntentBackend, RemoteSqlBackend
from .store.engine import ParamStore


class InvalidConfigError(ValueError):
    pass


class BindFailureError(OSError):
    pass


@dataclass
class Config:
    listen: str = "127.0.0.1:8024"
    seed_file: Optional[str] = None  # None -> packaged default
    anchor_file: Optional[str] = None
    lexicon_file: Optional[str] = None
    depth_bounds: tuple[int, int] = (1, 12)
    conflict_window_ms: float = 250.0
    power_budget_w: float = 1.0
    persistence_log: Optional[str] = None
    audit_log: Optional[str] = None
    remote: RemoteBackendConfig = field(default_factory=RemoteBackendConfig)

    def validate(self) -> None:
        lo, hi = self.depth_bounds
        if not lo < hi:
            raise InvalidConfigError(f"depth_bounds: min {lo} must be < max {hi}")
        if self.conflict_window_ms < 0:
            raise InvalidConfigError("conflict_window_ms must be >= 0")
        if self.power_budget_w <= 0:
            raise InvalidConfigError("power_budget_w must be > 0")
        if self.remote.timeout_ms <= 0:
            raise InvalidConfigError("remote.timeout_ms must be > 0")
        for label, path in (
            ("seed_file", self.seed_file),
            ("anchor_file", self.anchor_file),
            ("lexicon_file", self.lexicon_file),
        ):
            if path is not None and not os.path.exists(path):
                raise InvalidConfigError(f"{label}: no such file: {path}")
        if self.remote.enabled and not os.environ.get(self.remote.auth_env_var):
            raise InvalidConfigError(
                f"remote backend enabled but ${self.remote.auth_env_var} is not set"
            )

    @property
    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen.rpartition(":")
        return host or "127.0.0.1", int(port)

    def to_dict(self) -> dict:
        return {
            "listen": self.listen,
            "seed_file": self.seed_file,
            "anchor_file": self.anchor_file,
            "lexicon_file": self.lexicon_file,
            "depth_bounds": list(self.depth_bounds),
            "conflict_window_ms": self.conflict_window_ms,
            "power_budget_w": self.power_budget_w,
            "persistence_log": self.persistence_log,
            "audit_log": self.audit_log,
            "remote": self.remote.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Config":
        cfg = cls(
            listen=str(doc.get("listen", "127.0.0.1:8024")),
            seed_file=doc.get("seed_file"),
            anchor_file=doc.get("anchor_file"),
            lexicon_file=doc.get("lexicon_file"),
            depth_bounds=tuple(doc.get("depth_bounds", (1, 12))),  # type: ignore[arg-type]
            conflict_window_ms=float(doc.get("conflict_window_ms", 250.0)),
            power_budget_w=float(doc.get("power_budget_w", 1.0)),
            persistence_log=doc.get("persistence_log"),
            audit_log=doc.get("audit_log"),
            remote=RemoteBackendConfig.from_dict(doc.get("remote", {})),
        )
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str) -> "Config":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError as exc:
            raise InvalidConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)


def load_seed_config(path: Optional[str]) -> dict:
    if path is None:
        text = resources.files("linksteer.data").joinpath("seed_default.json").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def build_system(config: Config) -> Orchestrator:
    """Seed the store, calibrate the surrogate and wire the orchestrator."""
    config.validate()
    seed_config = load_seed_config(config.seed_file)
    store = ParamStore.open(seed_config, log_path=config.persistence_log)
    surrogate = Surrogate.from_file(config.anchor_file, depth_bounds=config.depth_bounds)
    linkage = default_linkage()
    lexicon = load_lexicon(config.lexicon_file)
    remote_intent = None
    remote_sql = None
    if config.remote.enabled:
        remote_intent = RemoteIntentBackend(config=config.remote, linkage=linkage)
        remote_sql = RemoteSqlBackend(config=config.remote)
    return Orchestrator(
        store=store,
        surrogate=surrogate,
        linkage=linkage,
        rule_backend=RuleBasedBackend(lexicon=lexicon, linkage=linkage),
        remote_intent_backend=remote_intent,
        remote_sql_backend=remote_sql,
        depth_bounds=config.depth_bounds,
        conflict_window_ms=config.conflict_window_ms,
        power_budget_w=config.power_budget_w,
        audit_log_path=config.audit_log,
    )


class RequestBody(BaseModel):
    user_id: str
    text: str


def build_app(config: Config, orchestrator: Optional[Orchestrator] = None) -> FastAPI:
    orch = orchestrator if orchestrator is not None else build_system(config)
    app = FastAPI(title="linksteer gateway")
    app.state.orchestrator = orch
    app.state.config = config

    def link_rows() -> list[dict]:
        return [dict(r) for r in orch.store.table("links").rows]

    @app.get("/healthz")
    def healthz() -> dict:
        # The app is only constructed after seeding + calibration succeed.
        return {"status": "ok", "links": len(orch.store.table("links").rows)}

    @app.post("/api/v1/requests")
    def submit_request(body: RequestBody) -> dict:
        outcome = orch.handle_request(body.user_id, body.text)
        return outcome.to_dict()

    @app.get("/api/v1/links")
    def get_links() -> list[dict]:
        return link_rows()

    @app.get("/api/v1/links/{link_id}")
    def get_link(link_id: int) -> dict:
        for row in link_rows():
            if row["link_id"] == link_id:
                return row
        raise HTTPException(status_code=404, detail=f"no link {link_id}")

    @app.get("/api/v1/metrics/history")
    def metrics_history(link_id: int) -> list[dict]:
        return [snap.to_dict() for snap in orch.metrics_history(link_id)]

    @app.get("/api/v1/events")
    def events(since: int = 0, wait_ms: int = 0) -> dict:
        found, next_cursor = orch.wait_for_events(since, timeout_s=wait_ms / 1000.0)
        return {"events": [o.to_dict() for o in found], "next": next_cursor}

    console_dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if console_dist.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/console", StaticFiles(directory=console_dist, html=True), name="console")

    return app


def serve(config: Config) -> None:
    """Run the service until interrupted; raises BindFailureError when the
    listen address is unavailable."""
    import uvicorn

    app = build_app(config)
    host, port = config.host_port
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise BindFailureError(f"cannot bind {host}:{port}: {exc}") from exc
    finally:
        probe.close()
    uvicorn.run(app, host=host, port=port, log_level="warning")
