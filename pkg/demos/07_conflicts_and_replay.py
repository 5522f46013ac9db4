"""Multi-user conflicts, deterministic replay and audit-log recovery."""
import json
import tempfile
from importlib import resources
from pathlib import Path

from linksteer.gateway import Config, build_system, load_seed_config
from linksteer.orchestrator import replay_audit_log
from linksteer.phy import Surrogate

workdir = Path(tempfile.mkdtemp())
audit = workdir / "audit.jsonl"

# Two users pull the same link in opposite directions inside one 250 ms
# window: the first arrival wins, the other is told so.
scenario = workdir / "tug_of_war.jsonl"
scenario.write_text(
    "\n".join(
        json.dumps(r)
        for r in [
            {"t_ms": 0, "user_id": "alice", "text": "Please improve the data transmission quality"},
            {"t_ms": 40, "user_id": "bob", "text": "Please reduce the data transmission latency"},
            {"t_ms": 5000, "user_id": "bob", "text": "Please reduce the data transmission latency"},
        ]
    )
    + "\n"
)

orch = build_system(Config(audit_log=str(audit)))
for out in orch.replay(str(scenario)):
    print(f"t={out.t_ms:6.0f}ms {out.user_id:5s} -> {out.status:10s} {out.reason or ''}")
print("conflict report:", orch.conflicts[0].to_dict())

# Replays are bit-reproducible: same scenario, same outcomes.
again = build_system(Config()).replay(str(scenario))
print("\nsecond replay identical:", [o.to_dict() for o in orch.history] == [o.to_dict() for o in again])

# The audit log alone rebuilds the final store state exactly.
rebuilt = replay_audit_log(load_seed_config(None), str(audit), Surrogate.from_file())
print("audit-log recovery bit-exact:", rebuilt.dump() == orch.store.dump())
