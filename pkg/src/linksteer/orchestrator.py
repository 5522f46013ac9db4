"""The control loop: request -> intent -> SELECT -> plan -> UPDATE -> snapshot.

Requests are accepted from any thread; intent analysis runs in the caller's
thread, then the request joins the current conflict window.  A window opens
at its first arrival and closes ``conflict_window_ms`` later; the window
owner drains the batch under the single writer lock, resolves conflicts
(first arrival wins on opposing directions for the same target/parameter)
and applies the survivors in arrival order.  Scenario replay drives the same
batch machinery with the scenario's own timestamps as a virtual clock, which
makes replays bit-reproducible.
"""
from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

from .intent import (
    Direction,
    Intent,
    MalformedRemoteReplyError,
    NoActuatableParameterError,
    RuleBasedBackend,
    SchemaLinkage,
    UnrecognizedRequestError,
    default_linkage,
)
from .nl2sql import to_select, to_update, validate_remote_sql
from .optimizer import (
    Allocation,
    DepthPlan,
    PowerPlan,
    build_ee_problem,
    classify_params,
    plan_depth_update,
    solve_ee,
)
from .phy import MetricsSnapshot, Surrogate, persist_snapshot
from .store.engine import ParamStore, StoreError
from .store.sqlast import to_sql

STATUS_APPLIED = "Applied"
STATUS_SATURATED = "Saturated"
STATUS_REJECTED = "Rejected"
STATUS_CONFLICTED = "Conflicted"
STATUS_UNRECOGNIZED = "Unrecognized"


class MalformedScenarioError(ValueError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"scenario line {line_no}: {message}")


@dataclass
class RequestOutcome:
    request_id: str
    user_id: str
    status: str
    intent: Optional[Intent] = None
    sql_issued: list[str] = field(default_factory=list)
    plan: Union[DepthPlan, Allocation, None] = None
    before: Optional[MetricsSnapshot] = None
    after: Optional[MetricsSnapshot] = None
    reason: Optional[str] = None
    notes: list[str] = field(default_factory=list)
    t_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "request_id": self.request_id,
            "user_id": self.user_id,
            "status": self.status,
            "intent": self.intent.to_dict() if self.intent else None,
            "sql": list(self.sql_issued),
            "plan": self.plan.to_dict() if self.plan is not None else None,
            "before": self.before.to_dict() if self.before else None,
            "after": self.after.to_dict() if self.after else None,
            "reason": self.reason,
            "notes": list(self.notes),
            "t": self.t_ms,
        }


@dataclass
class ConflictReport:
    window_id: int
    request_ids: list[str]
    parameter: str
    directions: list[str]
    resolution: str = "FirstWins"

    def to_dict(self) -> dict:
        return {
            "window_id": self.window_id,
            "request_ids": list(self.request_ids),
            "parameter": self.parameter,
            "directions": list(self.directions),
            "resolution": self.resolution,
        }


@dataclass
class _Pending:
    user_id: str
    text: str
    arrival_ms: float
    intent: Optional[Intent] = None
    status: Optional[str] = None  # pre-resolved (Unrecognized/Rejected at analysis)
    reason: Optional[str] = None
    notes: list[str] = field(default_factory=list)
    done: threading.Event = field(default_factory=threading.Event)
    outcome: Optional[RequestOutcome] = None


class _Window:
    def __init__(self, window_id: int, opened_ms: float):
        self.id = window_id
        self.opened_ms = opened_ms
        self.entries: list[_Pending] = []
        self.closed = False


class Orchestrator:
    """Owns the store's single writer and the request pipeline."""

    def __init__(
        self,
        store: ParamStore,
        surrogate: Surrogate,
        linkage: Optional[SchemaLinkage] = None,
        rule_backend: Optional[RuleBasedBackend] = None,
        remote_intent_backend=None,
        remote_sql_backend=None,
        depth_bounds: tuple[int, int] = (1, 12),
        conflict_window_ms: float = 250.0,
        power_budget_w: float = 1.0,
        audit_log_path: Optional[str] = None,
        clock_ms: Optional[Callable[[], float]] = None,
    ):
        self.store = store
        self.surrogate = surrogate
        self.linkage = linkage or default_linkage()
        self.linkage.validate_against(store)
        self.rule_backend = rule_backend or RuleBasedBackend(linkage=self.linkage)
        self.remote_intent_backend = remote_intent_backend
        self.remote_sql_backend = remote_sql_backend
        self.depth_bounds = depth_bounds
        self.conflict_window_ms = conflict_window_ms
        self.power_budget_w = power_budget_w
        self.audit_log_path = audit_log_path

        t0 = time.monotonic()
        self._clock_ms = clock_ms or (lambda: (time.monotonic() - t0) * 1000.0)
        self._submit_lock = threading.Lock()
        self._write_lock = threading.Lock()
        self._window: Optional[_Window] = None
        self._window_seq = 0
        self._request_seq = 0
        self.history: list[RequestOutcome] = []
        self.conflicts: list[ConflictReport] = []
        self._events = threading.Condition()
        self._baseline: dict[int, MetricsSnapshot] = {}
        self._sync_metrics()

    # --- setup ---

    def _sync_metrics(self) -> None:
        """Bring the metrics table in line with the surrogate for every link
        (inserts missing rows; part of seeding, not logged as SQL)."""
        for row in self.store.table("links").rows:
            snap = self.surrogate.snapshot(row, timestamp=0.0)
            persist_snapshot(snap, self.store)
            self._baseline[snap.link_id] = snap

    def default_target(self) -> tuple[int, int]:
        rows = self.store.table("links").rows
        if rows:
            return int(rows[0]["tx_id"]), int(rows[0]["rx_id"])
        return (1, 2)

    # --- public entry points ---

    def handle_request(self, user_id: str, text: str) -> RequestOutcome:
        """Run the full pipeline for one request; never raises — failures
        come back encoded in the outcome status."""
        entry = _Pending(user_id=user_id, text=text, arrival_ms=self._clock_ms())
        self._analyze_into(entry)
        window = self._join_window(entry)
        if window.entries[0] is entry:
            self._owner_drain(window)
        entry.done.wait()
        assert entry.outcome is not None
        return entry.outcome

    def replay(self, scenario_path: str) -> list[RequestOutcome]:
        """Re-run a scenario file deterministically (virtual clock from the
        records' t_ms); returns outcomes in processing order."""
        records = self._load_scenario(scenario_path)
        outcomes: list[RequestOutcome] = []
        batch: list[_Pending] = []
        window_start: Optional[float] = None
        for t_ms, user_id, text in records:
            if window_start is not None and t_ms >= window_start + self.conflict_window_ms:
                outcomes.extend(self._run_batch(batch))
                batch, window_start = [], None
            if window_start is None:
                window_start = t_ms
            entry = _Pending(user_id=user_id, text=text, arrival_ms=t_ms)
            self._analyze_into(entry)
            batch.append(entry)
        if batch:
            outcomes.extend(self._run_batch(batch))
        return outcomes

    @staticmethod
    def _load_scenario(path: str) -> list[tuple[float, str, str]]:
        records = []
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    doc = json.loads(line)
                    records.append((float(doc["t_ms"]), str(doc["user_id"]), str(doc["text"])))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise MalformedScenarioError(line_no, str(exc)) from exc
        return records

    # --- events / history ---

    def wait_for_events(self, since: int, timeout_s: float = 0.0) -> tuple[list[RequestOutcome], int]:
        """Long-poll helper: outcomes with index >= since, blocking up to
        timeout_s for the first new one."""
        deadline = time.monotonic() + timeout_s
        with self._events:
            while len(self.history) <= since:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                self._events.wait(remaining)
            events = self.history[since:]
            return events, since + len(events)

    def metrics_history(self, link_id: int) -> list[MetricsSnapshot]:
        series = []
        if link_id in self._baseline:
            series.append(self._baseline[link_id])
        for outcome in self.history:
            if (
                outcome.status == STATUS_APPLIED
                and outcome.after is not None
                and outcome.after.link_id == link_id
            ):
                series.append(outcome.after)
        return series

    # --- analysis (runs in the caller's thread) ---

    def _analyze_into(self, entry: _Pending) -> None:
        backend = self.remote_intent_backend
        if backend is not None:
            try:
                entry.intent = backend.analyze(entry.text, self.default_target())
                return
            except Exception as exc:  # remote failures must never kill the pipeline
                entry.notes.append(f"remote intent backend failed ({exc}); using rule-based")
        try:
            entry.intent = self.rule_backend.analyze(entry.text, self.default_target())
        except UnrecognizedRequestError as exc:
            entry.status = STATUS_UNRECOGNIZED
            entry.reason = str(exc)
        except (NoActuatableParameterError, MalformedRemoteReplyError) as exc:
            entry.status = STATUS_REJECTED
            entry.reason = str(exc)

    # --- window machinery (live mode) ---

    def _join_window(self, entry: _Pending) -> _Window:
        with self._submit_lock:
            w = self._window
            if w is None or w.closed or entry.arrival_ms >= w.opened_ms + self.conflict_window_ms:
                if w is not None and not w.closed:
                    w.closed = True  # expired; its owner will drain what it has
                self._window_seq += 1
                w = _Window(self._window_seq, entry.arrival_ms)
                self._window = w
            w.entries.append(entry)
            return w

    def _owner_drain(self, window: _Window) -> None:
        deadline = window.opened_ms + self.conflict_window_ms
        remaining = (deadline - self._clock_ms()) / 1000.0
        if remaining > 0:
            time.sleep(remaining)
        with self._submit_lock:
            window.closed = True
            if self._window is window:
                self._window = None
            entries = list(window.entries)
        self._run_batch(entries, window_id=window.id)

    # --- batch processing (single writer) ---

    def detect_conflicts(
        self, pending: Sequence[tuple[str, Intent]], window_id: int = 0
    ) -> Optional[ConflictReport]:
        """First conflicting group among pending (request_id, intent) pairs:
        >= 2 intents on the same (target, parameter) with opposing
        directions inside one window."""
        groups: dict[tuple[tuple[int, int], str], list[tuple[str, Intent]]] = {}
        for request_id, intent in pending:
            groups.setdefault((intent.target, intent.parameter), []).append(
                (request_id, intent)
            )
        for (_, parameter), members in groups.items():
            directions = {i.direction for _, i in members}
            if len(directions) > 1:
                return ConflictReport(
                    window_id=window_id,
                    request_ids=[rid for rid, _ in members],
                    parameter=parameter,
                    directions=[i.direction.value for _, i in members],
                )
        return None

    def _run_batch(self, entries: list[_Pending], window_id: int = 0) -> list[RequestOutcome]:
        with self._write_lock:
            outcomes = self._process_batch(entries, window_id)
        for entry in entries:
            entry.done.set()
        with self._events:
            self._events.notify_all()
        return outcomes

    def _process_batch(self, entries: list[_Pending], window_id: int) -> list[RequestOutcome]:
        ids = []
        for entry in entries:
            self._request_seq += 1
            ids.append(f"r{self._request_seq:06d}")

        conflicted: set[str] = set()
        analyzable = [
            (rid, e.intent)
            for rid, e in zip(ids, entries)
            if e.intent is not None and e.status is None
        ]
        report = self.detect_conflicts(analyzable, window_id)
        if report is not None:
            self.conflicts.append(report)
            conflicted.update(report.request_ids[1:])  # first arrival wins

        outcomes = []
        for rid, entry in zip(ids, entries):
            if entry.status is not None:
                outcome = RequestOutcome(
                    request_id=rid,
                    user_id=entry.user_id,
                    status=entry.status,
                    reason=entry.reason,
                    notes=entry.notes,
                    t_ms=entry.arrival_ms,
                )
            elif rid in conflicted:
                outcome = RequestOutcome(
                    request_id=rid,
                    user_id=entry.user_id,
                    status=STATUS_CONFLICTED,
                    intent=entry.intent,
                    reason="conflicting request in the same window; first arrival wins",
                    notes=entry.notes,
                    t_ms=entry.arrival_ms,
                )
            else:
                outcome = self._apply(rid, entry)
            outcomes.append(outcome)
            self._audit(outcome)
            entry.outcome = outcome
            self.history.append(outcome)
        return outcomes

    def _apply(self, request_id: str, entry: _Pending) -> RequestOutcome:
        intent = entry.intent
        assert intent is not None
        outcome = RequestOutcome(
            request_id=request_id,
            user_id=entry.user_id,
            status=STATUS_REJECTED,
            intent=intent,
            notes=entry.notes,
            t_ms=entry.arrival_ms,
        )
        try:
            select_sql = to_select(intent, self.linkage)
            result = self.store.execute_text(select_sql)
            outcome.sql_issued.append(select_sql)
            if not result.rows:
                outcome.reason = f"no link with tx_id = {intent.target[0]} and rx_id = {intent.target[1]}"
                return outcome
            row = self._link_row(intent.target, outcome)
            before = self.surrogate.snapshot(row, timestamp=entry.arrival_ms)
            outcome.before = before
            retrieved = {k: v for k, v in row.items() if k not in ("link_id", "tx_id", "rx_id")}
            split = classify_params(
                intent, retrieved, depth_bounds=self.depth_bounds, power_budget_w=self.power_budget_w
            )
            objective = split.objectives[0][0]
            if objective == "energy_efficiency":
                self._apply_power(intent, before, outcome)
            elif objective == "encoding_depth":
                self._apply_depth(intent, row, before, outcome)
            else:
                outcome.reason = f"objective {objective!r} has no apply path"
        except StoreError as exc:
            outcome.status = STATUS_REJECTED
            outcome.reason = f"store error: {exc}"
        except (ValueError, RuntimeError) as exc:
            outcome.status = STATUS_REJECTED
            outcome.reason = str(exc)
        return outcome

    def _link_row(self, target: tuple[int, int], outcome: RequestOutcome) -> dict:
        columns = [c for c, _ in self.store.table("links").schema.columns]
        sql = (
            f"SELECT {', '.join(columns)} FROM links "
            f"WHERE tx_id = {target[0]} AND rx_id = {target[1]};"
        )
        result = self.store.execute_text(sql)
        outcome.sql_issued.append(sql)
        return dict(zip(columns, result.rows[0]))

    def _emit_update(self, plan, outcome: RequestOutcome) -> str:
        """Deterministic UPDATE emission, with the remote SQL backend (if
        configured) allowed to substitute a validated statement."""
        if self.remote_sql_backend is not None:
            try:
                candidate = self.remote_sql_backend.generate_update(plan)
                stmt = validate_remote_sql(candidate, self.linkage)
                return to_sql(stmt)
            except Exception as exc:  # fall back, always
                outcome.notes.append(f"remote SQL rejected ({exc}); using deterministic emitter")
        return to_update(plan, self.linkage)

    def _apply_depth(
        self,
        intent: Intent,
        row: dict,
        before: MetricsSnapshot,
        outcome: RequestOutcome,
    ) -> None:
        plan = plan_depth_update(
            intent.direction,
            int(row["encoding_depth"]),
            bounds=self.depth_bounds,
            target=intent.target,
        )
        outcome.plan = plan
        if plan.saturated:
            outcome.status = STATUS_SATURATED
            outcome.after = before
            outcome.reason = (
                f"encoding depth already at its "
                f"{'maximum' if intent.direction is Direction.INCREASE else 'minimum'}"
            )
            return
        update_sql = self._emit_update(plan, outcome)
        self.store.execute_text(update_sql)
        outcome.sql_issued.append(update_sql)
        row = dict(row, encoding_depth=plan.new_depth)
        after = self.surrogate.snapshot(row, timestamp=before.timestamp)
        metrics_sql = persist_snapshot(after, self.store)
        if metrics_sql:
            outcome.sql_issued.append(metrics_sql)
        outcome.after = after
        outcome.status = STATUS_APPLIED

    def _apply_power(
        self, intent: Intent, before: MetricsSnapshot, outcome: RequestOutcome
    ) -> None:
        rows = [dict(r) for r in self.store.table("links").rows]
        problem = build_ee_problem(rows, self.power_budget_w)
        allocation = solve_ee(problem)
        outcome.plan = allocation
        for row, watts in zip(rows, allocation.powers):
            plan = PowerPlan(target=(int(row["tx_id"]), int(row["rx_id"])), watts=watts)
            update_sql = self._emit_update(plan, outcome)
            self.store.execute_text(update_sql)
            outcome.sql_issued.append(update_sql)
        # Power does not move the surrogate metrics; the store row is the change.
        outcome.after = before
        outcome.status = STATUS_APPLIED

    # --- audit ---

    def _audit(self, outcome: RequestOutcome) -> None:
        if not self.audit_log_path:
            return
        entry = {
            "request_id": outcome.request_id,
            "user_id": outcome.user_id,
            "intent": outcome.intent.to_dict() if outcome.intent else None,
            "sql": list(outcome.sql_issued),
            "status": outcome.status,
            "before": outcome.before.to_dict() if outcome.before else None,
            "after": outcome.after.to_dict() if outcome.after else None,
            "t": outcome.t_ms,
        }
        with open(self.audit_log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


def replay_audit_log(
    seed_config: Mapping, audit_path: str, surrogate: Surrogate
) -> ParamStore:
    """Rebuild a store from the seed config plus the audit log's SQL.

    The result must match the live store byte for byte (see ``dump``); this
    is the recovery path and the audit-completeness check in one.
    """
    store = ParamStore.seed(seed_config)
    for row in store.table("links").rows:
        persist_snapshot(surrogate.snapshot(row, timestamp=0.0), store)
    with open(audit_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            entry = json.loads(line)
            for sql in entry.get("sql", []):
                store.execute_text(sql)
    return store
