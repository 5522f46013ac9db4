import { describe, expect, it } from "vitest";
import type { RequestOutcome, Snapshot } from "../src/api.js";
import { ConsoleSession } from "../src/model.js";

function snap(t: number, accuracy: number, latency: number, linkId = 1): Snapshot {
  return { link_id: linkId, accuracy, latency_ms: latency, snr_db: 20, channel: "AWGN", depth: 7, timestamp: t };
}

function applied(id: string, t: number, accuracy: number, latency: number, linkId = 1): RequestOutcome {
  return {
    request_id: id,
    user_id: "u1",
    status: "Applied",
    intent: null,
    sql: [],
    plan: null,
    before: snap(t - 1, accuracy - 0.01, latency - 1, linkId),
    after: snap(t, accuracy, latency, linkId),
    reason: null,
    notes: [],
    t,
  };
}

describe("ConsoleSession", () => {
  it("appends one point per applied outcome, strictly time-ordered", () => {
    const session = new ConsoleSession();
    expect(session.ingest(applied("r1", 1, 0.7, 110))).toBe("ok");
    expect(session.ingest(applied("r2", 2, 0.75, 120))).toBe("ok");
    expect(session.accuracySeries.map((p) => p.t)).toEqual([1, 2]);
    const ts = session.accuracySeries.map((p) => p.t);
    expect([...ts].sort((a, b) => a - b)).toEqual(ts);
  });

  it("ignores non-applied and other-link outcomes for the series", () => {
    const session = new ConsoleSession();
    session.ingest({ ...applied("r1", 1, 0.7, 110), status: "Saturated" });
    session.ingest(applied("r2", 2, 0.7, 110, 7));
    expect(session.accuracySeries.length).toBe(0);
    expect(session.history.length).toBe(2);
  });

  it("requests a resync on out-of-order points", () => {
    const session = new ConsoleSession();
    session.ingest(applied("r1", 5, 0.7, 110));
    expect(session.ingest(applied("r2", 3, 0.72, 112))).toBe("resync");
  });

  it("treats duplicate deliveries as harmless", () => {
    const session = new ConsoleSession();
    const outcome = applied("r1", 5, 0.7, 110);
    session.ingest(outcome);
    expect(session.ingest(outcome)).toBe("ok");
    expect(session.accuracySeries.length).toBe(1);
  });

  it("history entries are immutable once recorded", () => {
    const session = new ConsoleSession();
    session.ingest(applied("r1", 1, 0.7, 110));
    const entry = session.history[0]!;
    expect(Object.isFrozen(entry)).toBe(true);
    expect(() => {
      (entry as { status: string }).status = "Rejected";
    }).toThrow();
  });

  it("resync rebuilds series sorted and deduplicated", () => {
    const session = new ConsoleSession();
    session.resync([snap(3, 0.75, 120), snap(1, 0.69, 105), snap(3, 0.75, 120), snap(2, 0.72, 112)]);
    expect(session.accuracySeries.map((p) => p.t)).toEqual([1, 2, 3]);
    expect(session.latencySeries.map((p) => p.value)).toEqual([105, 112, 120]);
  });

  it("selecting a link clears the series", () => {
    const session = new ConsoleSession();
    session.ingest(applied("r1", 1, 0.7, 110));
    session.selectLink(2);
    expect(session.accuracySeries.length).toBe(0);
    expect(session.selectedLink).toBe(2);
  });
});
