"""Surrogate physical layer: encoding depth -> (task accuracy, latency).

The surrogate replaces a trained variable-depth encoder with interpolation
through a small table of calibrated operating points, so the control loop
can be exercised end to end without any model training.  A sample-level
AWGN channel op is included for statistical property tests, and the
``CodecBackend`` protocol marks the seam where a real trained codec could
be plugged in later.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Optional, Protocol, Sequence

import numpy as np

from .store.engine import ParamStore
from .store.sqlast import to_sql
from .store.parser import parse_sql


class DepthOutOfRangeError(ValueError):
    pass


class EmptyInputError(ValueError):
    pass


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class MetricsSnapshot:
    """What the link looks like to the user right now."""

    link_id: int
    accuracy: float
    latency_ms: float
    snr_db: float
    channel: str
    depth: int
    timestamp: float

    def to_dict(self) -> dict:
        return {
            "link_id": self.link_id,
            "accuracy": self.accuracy,
            "latency_ms": self.latency_ms,
            "snr_db": self.snr_db,
            "channel": self.channel,
            "depth": self.depth,
            "timestamp": self.timestamp,
        }


class CodecBackend(Protocol):
    """Anything that can report task accuracy and per-image latency for a
    link state.  The shipped implementation is the calibrated surrogate; a
    trained encoder/decoder pair would satisfy the same interface."""

    def accuracy_at(self, depth: int, snr_db: float, channel: str) -> float: ...

    def latency_at(self, depth: int) -> float: ...


def _interp(x: float, xs: Sequence[float], ys: Sequence[float]) -> float:
    """Piecewise-linear interpolation; extrapolates the first/last segment
    so depths below the lowest anchor keep strictly monotone values."""
    if x <= xs[0]:
        i = 0
    elif x >= xs[-1]:
        i = len(xs) - 2
    else:
        i = max(j for j in range(len(xs) - 1) if xs[j] <= x)
    slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
    return ys[i] + slope * (x - xs[i])


class Surrogate:
    """Maps (encoding_depth, snr_db, channel) to accuracy and latency.

    Calibration pins the table's operating points exactly; intermediate
    depths interpolate linearly.  Accuracy at non-reference SNR is scaled by
    a logistic factor that equals 1 at the reference SNR; Rayleigh applies a
    fixed penalty factor (uncalibrated, demonstrative only).
    """

    SNR_MIDPOINT_DB = 0.0
    SNR_SLOPE_DB = 4.0
    RAYLEIGH_FACTOR = 0.9

    def __init__(
        self,
        anchors: Sequence[tuple[int, float, float]],
        depth_bounds: tuple[int, int] = (1, 12),
        reference_snr_db: float = 20.0,
    ):
        if len(anchors) < 2:
            raise CalibrationError("need at least two anchor rows")
        self.depth_bounds = depth_bounds
        self.reference_snr_db = reference_snr_db
        self._depths = [float(a[0]) for a in anchors]
        self._accuracy = [float(a[1]) for a in anchors]
        self._latency = [float(a[2]) for a in anchors]
        self._exact = {int(a[0]): (float(a[1]), float(a[2])) for a in anchors}
        for name, seq in (("depth", self._depths), ("accuracy", self._accuracy),
                          ("latency", self._latency)):
            if any(b <= a for a, b in zip(seq, seq[1:])):
                raise CalibrationError(f"anchor {name} column must strictly increase")
        for d in range(depth_bounds[0], depth_bounds[1] + 1):
            acc = self._base_accuracy(d)
            if not 0.0 <= acc <= 1.0:
                raise CalibrationError(f"accuracy at depth {d} leaves [0, 1]: {acc}")
            if self.latency_at(d) <= 0.0:
                raise CalibrationError(f"latency at depth {d} is not positive")

    @classmethod
    def from_file(cls, path: Optional[str] = None, depth_bounds: tuple[int, int] = (1, 12)) -> "Surrogate":
        """Load a calibration file; ``null`` accuracy/latency entries are
        filled by linear interpolation between their nearest anchors."""
        if path is None:
            text = resources.files("linksteer.data").joinpath("anchors_default.json").read_text()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        doc = json.loads(text)
        rows = sorted(doc["anchors"], key=lambda r: r["depth"])
        depths = [r["depth"] for r in rows]

        def filled(key: str) -> list[float]:
            known = [(d, r[key]) for d, r in zip(depths, rows) if r[key] is not None]
            if len(known) < 2:
                raise CalibrationError(f"not enough {key} anchors")
            xs = [float(d) for d, _ in known]
            ys = [float(v) for _, v in known]
            return [
                ys[xs.index(float(d))] if float(d) in xs else _interp(float(d), xs, ys)
                for d in depths
            ]

        accuracy = filled("accuracy")
        latency = filled("latency_ms")
        anchors = [(d, a, l) for d, a, l in zip(depths, accuracy, latency)]
        return cls(
            anchors,
            depth_bounds=depth_bounds,
            reference_snr_db=float(doc.get("reference_snr_db", 20.0)),
        )

    def _check_depth(self, depth: int) -> None:
        lo, hi = self.depth_bounds
        if not lo <= depth <= hi:
            raise DepthOutOfRangeError(f"depth {depth} outside [{lo}, {hi}]")

    def _base_accuracy(self, depth: int) -> float:
        if depth in self._exact:
            return self._exact[depth][0]
        return _interp(float(depth), self._depths, self._accuracy)

    def _snr_factor(self, snr_db: float) -> float:
        logistic = lambda x: 1.0 / (1.0 + np.exp(-x))  # noqa: E731
        ref = logistic((self.reference_snr_db - self.SNR_MIDPOINT_DB) / self.SNR_SLOPE_DB)
        return min(1.0, float(logistic((snr_db - self.SNR_MIDPOINT_DB) / self.SNR_SLOPE_DB)) / ref)

    def accuracy_at(self, depth: int, snr_db: float, channel: str) -> float:
        """Task accuracy in [0, 1] for the given link state."""
        self._check_depth(depth)
        if channel not in ("AWGN", "Rayleigh"):
            raise ValueError(f"unknown channel {channel!r}")
        acc = self._base_accuracy(depth) * self._snr_factor(snr_db)
        if channel == "Rayleigh":
            acc *= self.RAYLEIGH_FACTOR
        return acc

    def latency_at(self, depth: int) -> float:
        """Per-image processing latency in ms; depends on depth only."""
        self._check_depth(depth)
        if depth in self._exact:
            return self._exact[depth][1]
        return _interp(float(depth), self._depths, self._latency)

    def snapshot(self, link: Mapping[str, object], timestamp: float) -> MetricsSnapshot:
        """Metrics for one ``links`` row (as returned by the store)."""
        depth = int(link["encoding_depth"])  # type: ignore[arg-type]
        snr = float(link["snr_db"])  # type: ignore[arg-type]
        channel = str(link["channel"])
        return MetricsSnapshot(
            link_id=int(link["link_id"]),  # type: ignore[arg-type]
            accuracy=self.accuracy_at(depth, snr, channel),
            latency_ms=self.latency_at(depth),
            snr_db=snr,
            channel=channel,
            depth=depth,
            timestamp=timestamp,
        )


def snapshot_update_sql(snap: MetricsSnapshot) -> str:
    """Canonical UPDATE that persists a snapshot into the metrics table."""
    stmt = parse_sql(
        "UPDATE metrics SET "
        f"accuracy = {snap.accuracy!r}, "
        f"latency_ms = {snap.latency_ms!r}, "
        f"snr_db = {snap.snr_db!r}, "
        f"channel = '{snap.channel}', "
        f"depth = {snap.depth}, "
        f"t = {float(snap.timestamp)!r} "
        f"WHERE link_id = {snap.link_id};"
    )
    return to_sql(stmt)


def persist_snapshot(snap: MetricsSnapshot, store: ParamStore) -> str:
    """Write the snapshot through the SQL engine; returns the statement
    issued so callers can add it to their audit trail.  Inserts the row at
    engine level if the link has no metrics row yet (seeding case)."""
    metrics = store.table("metrics")
    if not any(r["link_id"] == snap.link_id for r in metrics.rows):
        store.insert_row(
            "metrics",
            {
                "link_id": snap.link_id,
                "accuracy": snap.accuracy,
                "latency_ms": snap.latency_ms,
                "snr_db": snap.snr_db,
                "channel": snap.channel,
                "depth": snap.depth,
                "t": float(snap.timestamp),
            },
        )
        return ""
    sql = snapshot_update_sql(snap)
    store.execute_text(sql)
    return sql


def awgn_channel(symbols: Sequence[float], snr_db: float, seed: int) -> np.ndarray:
    """Add white Gaussian noise at the requested SNR.

    Noise variance is ``signal_power / 10^(snr_db/10)`` with the signal power
    measured from the input itself; the draw is deterministic for a fixed
    seed.
    """
    x = np.asarray(symbols, dtype=float)
    if x.size == 0:
        raise EmptyInputError("no symbols to transmit")
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    signal_power = float(np.mean(x**2))
    noise_var = signal_power / (10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    return x + rng.normal(0.0, np.sqrt(noise_var), size=x.shape)
