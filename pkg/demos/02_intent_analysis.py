"""Rule-based request analysis: categories, parameters, directions."""
from linksteer.intent import (
    MetricCategory,
    NoActuatableParameterError,
    RuleBasedBackend,
    UnrecognizedRequestError,
    coarse_match,
    default_linkage,
    fine_match,
)

backend = RuleBasedBackend()

requests = [
    "Please improve the data transmission quality",
    "Please reduce the data transmission latency",
    "lower the latency please",
    "make the link faster",
    "increase the transmit power between transmitter 1 and receiver 2",
]
for text in requests:
    intent = backend.analyze(text, default_target=(1, 2))
    print(f"{text!r}")
    print(
        f"  -> {intent.category.value} / {intent.parameter} {intent.direction.value} "
        f"target={intent.target} confidence={intent.confidence:.2f}"
    )

# Categories the prototype recognizes but cannot actuate:
print()
for text in ("encrypt my traffic harder", "make my handover smoother"):
    category = coarse_match(text)
    try:
        fine_match(text, category, default_linkage())
    except NoActuatableParameterError as exc:
        print(f"{text!r} -> {category.value}, but: {exc}")

try:
    coarse_match("sing me a song")
except UnrecognizedRequestError as exc:
    print(f"\nout-of-scope request -> {exc}")
assert MetricCategory.QOS.value == "QoS"
