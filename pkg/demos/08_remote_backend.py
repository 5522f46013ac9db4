"""Plugging a remote completion service into the intent stage.

Uses an in-process mock transport so the demo runs offline; point
RemoteBackendConfig.base_url at any chat-completions endpoint to use a real
model.  Replies are schema-validated against the linkage, and a failing
backend falls back to the rule-based analyzer without dropping the request.
"""
import json

import httpx

from linksteer.gateway import Config, build_system
from linksteer.intent import default_linkage
from linksteer.remote import RemoteBackendConfig, RemoteIntentBackend

config = RemoteBackendConfig(enabled=True, base_url="http://llm.example", model="demo-model")


def well_behaved(request: httpx.Request) -> httpx.Response:
    reply = {
        "category": "QoS",
        "parameter": "encoding_depth",
        "direction": "Increase",
        "tx_id": 1,
        "rx_id": 2,
    }
    return httpx.Response(200, json={"choices": [{"message": {"content": json.dumps(reply)}}]})


backend = RemoteIntentBackend(
    config=config, linkage=default_linkage(), transport=httpx.MockTransport(well_behaved)
)
intent = backend.analyze("Please improve the data transmission quality", (1, 2))
print("remote-analyzed intent:", intent.to_dict())

# A backend that times out: the orchestrator silently falls back.
def unreachable(request: httpx.Request) -> httpx.Response:
    raise httpx.ConnectTimeout("unreachable")


orch = build_system(Config(conflict_window_ms=0))
orch.remote_intent_backend = RemoteIntentBackend(
    config=config, linkage=default_linkage(), transport=httpx.MockTransport(unreachable)
)
out = orch.handle_request("u1", "Please improve the data transmission quality")
print(f"\nwith a dead remote backend -> {out.status}; notes: {out.notes}")
