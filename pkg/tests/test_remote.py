import json

import httpx
import pytest

from linksteer.intent import Direction, default_linkage
from linksteer.remote import (
    PromptBundle,
    RemoteBackendConfig,
    RemoteHttpError,
    RemoteIntentBackend,
    RemoteSqlBackend,
    RemoteTimeoutError,
    SchemaValidationError,
    remote_complete,
)

CFG = RemoteBackendConfig(enabled=True, base_url="http://llm.test", model="m", timeout_ms=500)


def completion_transport(content: str, status: int = 200):
    def handler(request: httpx.Request) -> httpx.Response:
        body = {"choices": [{"message": {"content": content}}]}
        return httpx.Response(status, json=body if status == 200 else {"error": "x"})

    return httpx.MockTransport(handler)


def test_remote_complete_parses_structured_reply():
    reply = remote_complete(
        PromptBundle("s", "u"),
        CFG,
        transport=completion_transport(json.dumps({"a": 1})),
    )
    assert reply == {"a": 1}


def test_remote_complete_http_error():
    with pytest.raises(RemoteHttpError) as err:
        remote_complete(PromptBundle("s", "u"), CFG, transport=completion_transport("", 503))
    assert err.value.status == 503


def test_remote_complete_timeout():
    def handler(request):
        raise httpx.ConnectTimeout("no route")

    with pytest.raises(RemoteTimeoutError):
        remote_complete(PromptBundle("s", "u"), CFG, transport=httpx.MockTransport(handler))


def test_remote_complete_unstructured_reply():
    with pytest.raises(SchemaValidationError):
        remote_complete(PromptBundle("s", "u"), CFG, transport=completion_transport("not json"))
    with pytest.raises(SchemaValidationError):
        remote_complete(PromptBundle("s", "u"), CFG, transport=completion_transport('"a string"'))


def test_intent_backend_validates_reply():
    good = json.dumps(
        {"category": "QoS", "parameter": "encoding_depth", "direction": "Increase", "tx_id": 1, "rx_id": 2}
    )
    backend = RemoteIntentBackend(
        config=CFG, linkage=default_linkage(), transport=completion_transport(good)
    )
    intent = backend.analyze("improve quality", (1, 2))
    assert intent.direction is Direction.INCREASE
    assert intent.target == (1, 2)


def test_intent_backend_rejects_unknown_parameter():
    bad = json.dumps(
        {"category": "QoS", "parameter": "magic_knob", "direction": "Increase", "tx_id": 1, "rx_id": 2}
    )
    backend = RemoteIntentBackend(
        config=CFG, linkage=default_linkage(), transport=completion_transport(bad)
    )
    with pytest.raises(Exception) as err:
        backend.analyze("improve quality", (1, 2))
    assert "magic_knob" in str(err.value)


def test_sql_backend_returns_sql_field():
    backend = RemoteSqlBackend(
        config=CFG,
        transport=completion_transport(json.dumps({"sql": "UPDATE links SET encoding_depth = 8;"})),
    )

    class Plan:
        parameter = "encoding_depth"
        new_value = 8
        target = (1, 2)

    assert backend.generate_update(Plan()) == "UPDATE links SET encoding_depth = 8;"


def test_auth_token_never_reaches_audit(monkeypatch):
    monkeypatch.setenv("LINKSTEER_API_TOKEN", "super-secret-token")
    audit = []
    captured = {}

    def handler(request: httpx.Request) -> httpx.Response:
        captured["auth"] = request.headers.get("authorization")
        return httpx.Response(200, json={"choices": [{"message": {"content": "{}"}}]})

    remote_complete(
        PromptBundle("s", "u"), CFG, transport=httpx.MockTransport(handler), audit=audit
    )
    assert captured["auth"] == "Bearer super-secret-token"  # sent on the wire
    assert "super-secret-token" not in json.dumps(audit)  # never in the audit trail


def test_concurrency_cap_enforced():
    import threading
    import time

    in_flight = []
    peak = []
    lock = threading.Lock()

    def slow_handler(request: httpx.Request) -> httpx.Response:
        with lock:
            in_flight.append(1)
            peak.append(len(in_flight))
        time.sleep(0.05)
        with lock:
            in_flight.pop()
        good = json.dumps(
            {"category": "QoS", "parameter": "encoding_depth", "direction": "Increase", "tx_id": 1, "rx_id": 2}
        )
        return httpx.Response(200, json={"choices": [{"message": {"content": good}}]})

    config = RemoteBackendConfig(enabled=True, base_url="http://llm.test", model="m", max_concurrency=2)
    backend = RemoteIntentBackend(
        config=config, linkage=default_linkage(), transport=httpx.MockTransport(slow_handler)
    )
    threads = [
        threading.Thread(target=backend.analyze, args=("improve quality", (1, 2))) for _ in range(6)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert max(peak) <= 2
