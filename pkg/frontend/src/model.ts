/**
 * Console session state: request history (immutable once recorded) and the
 * live metric series for the selected link (strictly time-ordered).
 */
import type { RequestOutcome, Snapshot } from "./api.js";

export interface SeriesPoint {
  t: number;
  value: number;
}

export class ConsoleSession {
  userId = "u1";
  selectedLink = 1;
  cursor = 0; // next events index to poll

  private readonly _history: Readonly<RequestOutcome>[] = [];
  private _accuracy: SeriesPoint[] = [];
  private _latency: SeriesPoint[] = [];

  get history(): readonly Readonly<RequestOutcome>[] {
    return this._history;
  }

  get accuracySeries(): readonly SeriesPoint[] {
    return this._accuracy;
  }

  get latencySeries(): readonly SeriesPoint[] {
    return this._latency;
  }

  /**
   * Record an outcome. Returns "resync" when an Applied outcome arrived out
   * of time order (stream drop/reconnect) and the series must be rebuilt
   * from /metrics/history.
   */
  ingest(outcome: RequestOutcome): "ok" | "resync" {
    this._history.push(Object.freeze({ ...outcome }));
    if (outcome.status !== "Applied" || outcome.after === null) return "ok";
    if (outcome.after.link_id !== this.selectedLink) return "ok";
    return this.appendPoint(outcome.after);
  }

  private appendPoint(snap: Snapshot): "ok" | "resync" {
    const last = this._accuracy[this._accuracy.length - 1];
    if (last !== undefined && snap.timestamp <= last.t) {
      // duplicate delivery is harmless; anything else needs a resync
      const dupe =
        snap.timestamp === last.t &&
        this._accuracy[this._accuracy.length - 1]?.value === snap.accuracy;
      return dupe ? "ok" : "resync";
    }
    this._accuracy.push({ t: snap.timestamp, value: snap.accuracy });
    this._latency.push({ t: snap.timestamp, value: snap.latency_ms });
    return "ok";
  }

  /** Rebuild both series from the canonical snapshot history (backfill). */
  resync(snapshots: Snapshot[]): void {
    const sorted = [...snapshots].sort((a, b) => a.timestamp - b.timestamp);
    this._accuracy = [];
    this._latency = [];
    let lastT = -Infinity;
    for (const snap of sorted) {
      if (snap.link_id !== this.selectedLink || snap.timestamp <= lastT) continue;
      this._accuracy.push({ t: snap.timestamp, value: snap.accuracy });
      this._latency.push({ t: snap.timestamp, value: snap.latency_ms });
      lastT = snap.timestamp;
    }
  }

  selectLink(linkId: number): void {
    this.selectedLink = linkId;
    this._accuracy = [];
    this._latency = [];
  }
}
