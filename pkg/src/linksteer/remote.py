"""Client for an external chat-completion service (the optional LLM backends).

One request/response exchange per call, temperature-0 semantics requested
but never assumed: every reply is parsed and schema-validated before any
part of the pipeline sees it, and the raw exchange is kept for the audit
trail with the auth token redacted.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from typing import Mapping, Optional

import httpx

from .intent import Intent, SchemaLinkage, validate_remote_intent


class RemoteTimeoutError(RuntimeError):
    pass


class RemoteHttpError(RuntimeError):
    def __init__(self, status: int, body: str):
        self.status = status
        super().__init__(f"HTTP {status}: {body[:200]}")


class SchemaValidationError(ValueError):
    pass


@dataclass
class RemoteBackendConfig:
    enabled: bool = False
    base_url: str = ""
    model: str = ""
    timeout_ms: int = 5000
    auth_env_var: str = "LINKSTEER_API_TOKEN"
    max_concurrency: int = 4

    def to_dict(self) -> dict:
        return {
            "enabled": self.enabled,
            "base_url": self.base_url,
            "model": self.model,
            "timeout_ms": self.timeout_ms,
            "auth_env_var": self.auth_env_var,
            "max_concurrency": self.max_concurrency,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "RemoteBackendConfig":
        return cls(
            enabled=bool(doc.get("enabled", False)),
            base_url=str(doc.get("base_url", "")),
            model=str(doc.get("model", "")),
            timeout_ms=int(doc.get("timeout_ms", 5000)),
            auth_env_var=str(doc.get("auth_env_var", "LINKSTEER_API_TOKEN")),
            max_concurrency=int(doc.get("max_concurrency", 4)),
        )


@dataclass
class PromptBundle:
    """What gets sent: a system instruction plus the user's text."""

    system: str
    user: str


def remote_complete(
    bundle: PromptBundle,
    config: RemoteBackendConfig,
    transport: Optional[httpx.BaseTransport] = None,
    audit: Optional[list] = None,
) -> dict:
    """One chat-completion exchange; returns the reply parsed as JSON.

    Raises RemoteTimeoutError / RemoteHttpError / SchemaValidationError; the
    caller is expected to fall back to the deterministic path on any of
    them.  ``audit``, if given, collects the redacted exchange.
    """
    token = os.environ.get(config.auth_env_var, "")
    payload = {
        "model": config.model,
        "temperature": 0,
        "messages": [
            {"role": "system", "content": bundle.system},
            {"role": "user", "content": bundle.user},
        ],
    }
    try:
        with httpx.Client(
            base_url=config.base_url,
            timeout=config.timeout_ms / 1000.0,
            transport=transport,
            headers={"Authorization": f"Bearer {token}"} if token else {},
        ) as client:
            response = client.post("/chat/completions", json=payload)
    except httpx.TimeoutException as exc:
        raise RemoteTimeoutError(f"no reply within {config.timeout_ms} ms") from exc
    except httpx.HTTPError as exc:
        raise RemoteHttpError(0, str(exc)) from exc
    if audit is not None:
        audit.append({"request": payload, "status": response.status_code, "body": response.text})
    if response.status_code != 200:
        raise RemoteHttpError(response.status_code, response.text)
    try:
        doc = response.json()
        content = doc["choices"][0]["message"]["content"]
        reply = json.loads(content)
    except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
        raise SchemaValidationError(f"reply is not structured JSON: {exc}") from exc
    if not isinstance(reply, dict):
        raise SchemaValidationError("reply must be a JSON object")
    return reply


_INTENT_SYSTEM = (
    "You analyze wireless communication requests. Reply with ONLY a JSON "
    'object {"category": "QoS"|"Security"|"Mobility", "parameter": string, '
    '"direction": "Increase"|"Decrease", "tx_id": int, "rx_id": int}. '
    "Actuatable parameters: encoding_depth (quality up = Increase, latency "
    "down = Decrease), tx_power_w."
)


@dataclass
class RemoteIntentBackend:
    """Intent analysis via the remote service; validated against the
    linkage before anything downstream runs.  In-flight calls are capped at
    config.max_concurrency."""

    config: RemoteBackendConfig
    linkage: SchemaLinkage
    transport: Optional[httpx.BaseTransport] = None
    audit: list = field(default_factory=list)

    name = "remote"

    def __post_init__(self):
        self._gate = threading.Semaphore(max(1, self.config.max_concurrency))

    def analyze(self, text: str, default_target: tuple[int, int]) -> Intent:
        bundle = PromptBundle(
            system=_INTENT_SYSTEM,
            user=f"Default link: transmitter {default_target[0]} and receiver "
            f"{default_target[1]}. Request: {text}",
        )
        with self._gate:
            reply = remote_complete(bundle, self.config, self.transport, self.audit)
        return validate_remote_intent(reply, self.linkage, text)


_SQL_SYSTEM = (
    "You translate a plan into one SQL statement for the schema "
    "links(link_id, tx_id, rx_id, encoding_depth, snr_db, channel, "
    "bandwidth_hz, channel_gain, tx_power_w, noise_psd). Reply with ONLY a "
    'JSON object {"sql": "UPDATE ... ;"} using absolute values.'
)


@dataclass
class RemoteSqlBackend:
    """SQL generation via the remote service; the orchestrator validates the
    statement and falls back to the deterministic emitter on rejection."""

    config: RemoteBackendConfig
    transport: Optional[httpx.BaseTransport] = None
    audit: list = field(default_factory=list)

    def __post_init__(self):
        self._gate = threading.Semaphore(max(1, self.config.max_concurrency))

    def generate_update(self, plan) -> str:
        bundle = PromptBundle(
            system=_SQL_SYSTEM,
            user=(
                f"Set {plan.parameter} = {plan.new_value!r} on the link with "
                f"tx_id = {plan.target[0]} and rx_id = {plan.target[1]}."
            ),
        )
        with self._gate:
            reply = remote_complete(bundle, self.config, self.transport, self.audit)
        if "sql" not in reply or not isinstance(reply["sql"], str):
            raise SchemaValidationError('reply must carry a string "sql" field')
        return reply["sql"]
