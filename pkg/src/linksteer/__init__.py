"""linksteer: natural-language steering of a simulated semantic-communication link.

User requests are analyzed into parameter intents, compiled to SQL against an
in-process parameter store, turned into optimization plans (one-layer depth
steps, or Dinkelbach energy-efficiency power allocation), applied, and
reflected back as accuracy/latency metrics from a calibrated surrogate.
"""

from .intent import (
    Direction,
    Intent,
    MetricCategory,
    RuleBasedBackend,
    SchemaLinkage,
    analyze,
    coarse_match,
    default_linkage,
    fine_match,
    load_lexicon,
)
from .nl2sql import ControlledCommand, parse_controlled, print_controlled, to_select, to_update
from .optimizer import (
    Allocation,
    DepthPlan,
    EEProblem,
    PowerPlan,
    ProblemSplit,
    brute_force_ee,
    classify_params,
    equal_split,
    plan_depth_update,
    solve_ee,
)
from .orchestrator import ConflictReport, Orchestrator, RequestOutcome, replay_audit_log
from .phy import MetricsSnapshot, Surrogate, awgn_channel
from .store import ParamStore, parse_sql, to_sql

__all__ = [
    "Allocation",
    "ConflictReport",
    "ControlledCommand",
    "DepthPlan",
    "Direction",
    "EEProblem",
    "Intent",
    "MetricCategory",
    "MetricsSnapshot",
    "Orchestrator",
    "ParamStore",
    "PowerPlan",
    "ProblemSplit",
    "RequestOutcome",
    "RuleBasedBackend",
    "SchemaLinkage",
    "Surrogate",
    "analyze",
    "awgn_channel",
    "brute_force_ee",
    "classify_params",
    "coarse_match",
    "default_linkage",
    "equal_split",
    "fine_match",
    "load_lexicon",
    "parse_controlled",
    "parse_sql",
    "plan_depth_update",
    "print_controlled",
    "replay_audit_log",
    "solve_ee",
    "to_select",
    "to_sql",
    "to_update",
]

__version__ = "0.1.0"
