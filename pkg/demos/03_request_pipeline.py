"""End-to-end control loop: request -> intent -> SQL -> plan -> apply -> metrics.

Five consecutive quality requests walk the encoding depth 7 -> 12; accuracy
rises while latency rises with it (the depth trade-off), then the next
request saturates at the maximum depth.
"""
from linksteer.gateway import Config, build_system

orch = build_system(Config(conflict_window_ms=0))

out = orch.handle_request("u1", "Please improve the data transmission quality")
print("request: 'Please improve the data transmission quality'")
print("SQL issued:")
for sql in out.sql_issued:
    print("   ", sql)
print(
    f"status={out.status}  depth {out.plan.current_depth} -> {out.plan.new_depth}  "
    f"accuracy {out.before.accuracy:.4f} -> {out.after.accuracy:.4f}  "
    f"latency {out.before.latency_ms:.4f} -> {out.after.latency_ms:.4f} ms"
)

print("\nfour more quality requests:")
for _ in range(4):
    out = orch.handle_request("u1", "Please improve the data transmission quality")
    print(
        f"  depth={out.after.depth:2d}  accuracy={out.after.accuracy:.4f}  "
        f"latency={out.after.latency_ms:.4f} ms  [{out.status}]"
    )

out = orch.handle_request("u1", "Please improve the data transmission quality")
print(f"\none more at max depth -> {out.status}: {out.reason}")
