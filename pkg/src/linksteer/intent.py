"""Request analysis: free text -> structured intent.

Two-stage matching: a coarse pass scores the text against a per-category
keyword lexicon (QoS / Security / Mobility), then a fine pass picks the
concrete actuatable parameter and direction inside the winning category.
The rule-based path is a pure function of (text, lexicon, linkage); the
remote backend (see ``remote``) can replace it and is validated against the
same linkage before anything downstream sees its output.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Mapping, Optional, Sequence


class MetricCategory(str, Enum):
    QOS = "QoS"
    SECURITY = "Security"
    MOBILITY = "Mobility"


class Direction(str, Enum):
    INCREASE = "Increase"
    DECREASE = "Decrease"


def flip(direction: Direction) -> Direction:
    return Direction.DECREASE if direction is Direction.INCREASE else Direction.INCREASE


class UnrecognizedRequestError(ValueError):
    """No category keyword scored above threshold."""


class NoActuatableParameterError(ValueError):
    """The category is recognized but actuates nothing in this schema."""


class MalformedRemoteReplyError(ValueError):
    """A remote backend reply failed schema or linkage validation."""


@dataclass(frozen=True)
class LinkageEntry:
    """One user-facing quality and the knob that moves it.

    ``quality_direction`` is the parameter change that improves the quality.
    ``inverting_phrases`` are inverted-scale metric nouns (latency, delay):
    when the request's verb acts on one, its polarity flips, since lowering
    the metric is the improvement.  Desired-state adjectives ("faster",
    "snappy") live in ``phrases`` and do not invert.
    """

    parameter: str
    table: str
    column: str
    quality_direction: Direction
    phrases: tuple[str, ...]
    inverting_phrases: tuple[str, ...] = ()

    @property
    def all_phrases(self) -> tuple[str, ...]:
        return self.phrases + self.inverting_phrases


@dataclass(frozen=True)
class Intent:
    category: MetricCategory
    parameter: str
    direction: Direction
    target: tuple[int, int]  # (tx_id, rx_id)
    confidence: float
    raw_text: str

    def to_dict(self) -> dict:
        return {
            "category": self.category.value,
            "parameter": self.parameter,
            "direction": self.direction.value,
            "tx_id": self.target[0],
            "rx_id": self.target[1],
            "confidence": self.confidence,
            "raw_text": self.raw_text,
        }


class SchemaLinkage:
    """Maps categories to actuatable (parameter, table, column) entries."""

    def __init__(self, entries: Mapping[MetricCategory, Sequence[LinkageEntry]]):
        self.entries = {cat: tuple(entries.get(cat, ())) for cat in MetricCategory}

    def for_category(self, category: MetricCategory) -> tuple[LinkageEntry, ...]:
        return self.entries.get(category, ())

    def find_parameter(self, parameter: str) -> Optional[LinkageEntry]:
        for cat_entries in self.entries.values():
            for entry in cat_entries:
                if entry.parameter == parameter:
                    return entry
        return None

    def validate_against(self, store) -> None:
        """Every (table, column) must exist in the live schema."""
        for cat_entries in self.entries.values():
            for entry in cat_entries:
                store.table(entry.table).schema.column_type(entry.column)


def default_linkage() -> SchemaLinkage:
    qos = (
        LinkageEntry(
            parameter="encoding_depth",
            table="links",
            column="encoding_depth",
            quality_direction=Direction.INCREASE,
            phrases=(
                "quality", "accura", "throughput", "reliab", "fidelity",
                "crisp", "sharp", "clear", "classification", "error",
            ),
        ),
        LinkageEntry(
            parameter="encoding_depth",
            table="links",
            column="encoding_depth",
            quality_direction=Direction.DECREASE,
            phrases=("speed", "fast", "slow", "sluggish", "snappy", "responsive"),
            inverting_phrases=("latency", "delay", "lag", "response time", "wait"),
        ),
        LinkageEntry(
            parameter="tx_power_w",
            table="links",
            column="tx_power_w",
            quality_direction=Direction.INCREASE,
            phrases=("transmit power", "power", "signal strength"),
        ),
    )
    # Security and Mobility are recognized categories but actuate nothing in
    # the prototype schema (only depth and power are wired up).
    return SchemaLinkage({MetricCategory.QOS: qos})


Lexicon = dict[MetricCategory, list[tuple[str, float]]]


def load_lexicon(path: Optional[str] = None) -> Lexicon:
    """Load the coarse-matching lexicon ({category: [{phrase, weight}]})."""
    if path is None:
        text = resources.files("linksteer.data").joinpath("lexicon_default.json").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    doc = json.loads(text)
    lexicon: Lexicon = {}
    for cat_name, rows in doc.items():
        cat = MetricCategory(cat_name)
        lexicon[cat] = [(r["phrase"], float(r["weight"])) for r in rows]
    return lexicon


# Polarity cues; matching is stem-style (word boundary before the cue, free
# suffix) so "higher" matches but the "less" inside "wireless" does not.
_POSITIVE_WORDS = (
    "improve", "increase", "higher", "better", "boost", "raise", "enhance",
    "more", "maxim", "strengthen",
)
_NEGATIVE_WORDS = (
    "reduce", "decrease", "lower", "less", "cut", "drop", "minim", "worse",
    "fewer", "shrink", "degrade",
)

_TARGET_RE = re.compile(r"transmitter\s+(\d+)\s+and\s+receiver\s+(\d+)", re.IGNORECASE)


def _normalize(text: str) -> str:
    return " ".join(text.lower().split())


def _stem_hit(text: str, phrase: str) -> bool:
    return re.search(r"\b" + re.escape(phrase), text) is not None


def _score(text: str, weighted_phrases: Sequence[tuple[str, float]]) -> float:
    return sum(w for phrase, w in weighted_phrases if _stem_hit(text, phrase))


def coarse_match(text: str, lexicon: Optional[Lexicon] = None) -> MetricCategory:
    """Pick the single best metric category for a request.

    Ties break by the fixed priority QoS > Security > Mobility.
    """
    if not text or not text.strip():
        raise UnrecognizedRequestError("empty request")
    if lexicon is None:
        lexicon = load_lexicon()
    normalized = _normalize(text)
    priority = (MetricCategory.QOS, MetricCategory.SECURITY, MetricCategory.MOBILITY)
    best: Optional[MetricCategory] = None
    best_score = 0.0
    for cat in priority:
        score = _score(normalized, lexicon.get(cat, ()))
        if score > best_score:
            best, best_score = cat, score
    if best is None:
        raise UnrecognizedRequestError(f"no category keyword matched: {text!r}")
    return best


def _polarity(text: str) -> int:
    """+1 improve / -1 reduce; defaults to +1 when no cue is present
    (requests are overwhelmingly phrased as improvements)."""
    pos = any(_stem_hit(text, w) for w in _POSITIVE_WORDS)
    neg = any(_stem_hit(text, w) for w in _NEGATIVE_WORDS)
    if neg and not pos:
        return -1
    return 1


def fine_match(
    text: str, category: MetricCategory, linkage: SchemaLinkage
) -> list[tuple[str, Direction]]:
    """Resolve the request to (parameter, direction) pairs within a category.

    Direction combines the request polarity with the entry's improving
    direction; when the verb acts on an inverted-scale metric noun
    (latency/delay), the polarity flips first.  Best-scoring entry first;
    with no phrase hit at all, the category's first-declared entry is
    assumed.
    """
    entries = linkage.for_category(category)
    if not entries:
        raise NoActuatableParameterError(
            f"category {category.value} actuates no parameter in this schema"
        )
    normalized = _normalize(text)
    polarity = _polarity(normalized)
    scored: list[tuple[float, int, LinkageEntry]] = []
    for order, entry in enumerate(entries):
        hits = sum(1.0 for p in entry.all_phrases if _stem_hit(normalized, p))
        if hits > 0:
            scored.append((hits, order, entry))
    if not scored:
        scored = [(0.0, 0, entries[0])]
    scored.sort(key=lambda t: (-t[0], t[1]))
    results = []
    for _, _, entry in scored:
        inverted = any(_stem_hit(normalized, p) for p in entry.inverting_phrases)
        effective = polarity * (-1 if inverted else 1)
        direction = entry.quality_direction if effective > 0 else flip(entry.quality_direction)
        results.append((entry.parameter, direction))
    return results


def parse_target(text: str) -> Optional[tuple[int, int]]:
    m = _TARGET_RE.search(text)
    if m is None:
        return None
    return int(m.group(1)), int(m.group(2))


class RuleBasedBackend:
    """Deterministic analyzer: coarse + fine matching over the lexicon."""

    name = "rule-based"

    def __init__(self, lexicon: Optional[Lexicon] = None, linkage: Optional[SchemaLinkage] = None):
        self.lexicon = lexicon if lexicon is not None else load_lexicon()
        self.linkage = linkage if linkage is not None else default_linkage()

    def reload_lexicon(self, path: Optional[str] = None) -> None:
        self.lexicon = load_lexicon(path)

    def analyze(self, text: str, default_target: tuple[int, int]) -> Intent:
        category = coarse_match(text, self.lexicon)
        matches = fine_match(text, category, self.linkage)
        parameter, direction = matches[0]  # first intent wins
        normalized = _normalize(text)
        weight = _score(normalized, self.lexicon.get(category, ()))
        target = parse_target(text) or default_target
        return Intent(
            category=category,
            parameter=parameter,
            direction=direction,
            target=target,
            confidence=weight / (1.0 + weight),
            raw_text=text,
        )


def validate_remote_intent(
    reply: Mapping[str, object],
    linkage: SchemaLinkage,
    raw_text: str,
) -> Intent:
    """Turn a remote backend reply into an Intent, or raise
    MalformedRemoteReplyError; replies failing validation never reach the
    pipeline."""
    required = {"category", "parameter", "direction", "tx_id", "rx_id"}
    missing = required - set(reply)
    if missing:
        raise MalformedRemoteReplyError(f"reply missing fields {sorted(missing)}")
    try:
        category = MetricCategory(str(reply["category"]))
        direction = Direction(str(reply["direction"]))
    except ValueError as exc:
        raise MalformedRemoteReplyError(str(exc)) from exc
    parameter = str(reply["parameter"])
    allowed = {e.parameter for e in linkage.for_category(category)}
    if parameter not in allowed:
        raise MalformedRemoteReplyError(
            f"parameter {parameter!r} not linked under {category.value}"
        )
    if not isinstance(reply["tx_id"], int) or not isinstance(reply["rx_id"], int):
        raise MalformedRemoteReplyError("tx_id/rx_id must be integers")
    return Intent(
        category=category,
        parameter=parameter,
        direction=direction,
        target=(reply["tx_id"], reply["rx_id"]),
        confidence=1.0,
        raw_text=raw_text,
    )


def analyze(text: str, default_target: tuple[int, int], backend) -> Intent:
    """Analyze a request with the given backend (RuleBasedBackend or a
    remote backend from ``linksteer.remote``)."""
    return backend.analyze(text, default_target)
