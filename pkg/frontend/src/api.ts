/**
 * Typed client for the gateway's JSON endpoints (see docs/api.md in the
 * repo root). Every response is shape-checked before it reaches the UI;
 * a malformed reply raises ApiShapeError and changes no state.
 */

export interface LinkRow {
  link_id: number;
  tx_id: number;
  rx_id: number;
  encoding_depth: number;
  snr_db: number;
  channel: string;
  bandwidth_hz: number;
  channel_gain: number;
  tx_power_w: number;
  noise_psd: number;
}

export interface Snapshot {
  link_id: number;
  accuracy: number;
  latency_ms: number;
  snr_db: number;
  channel: string;
  depth: number;
  timestamp: number;
}

export type OutcomeStatus =
  | "Applied"
  | "Saturated"
  | "Rejected"
  | "Conflicted"
  | "Unrecognized";

export interface RequestOutcome {
  request_id: string;
  user_id: string;
  status: OutcomeStatus;
  intent: Record<string, unknown> | null;
  sql: string[];
  plan: Record<string, unknown> | null;
  before: Snapshot | null;
  after: Snapshot | null;
  reason: string | null;
  notes: string[];
  t: number;
}

export interface EventsPage {
  events: RequestOutcome[];
  next: number;
}

export class ApiShapeError extends Error {}

export class HttpError extends Error {
  constructor(readonly status: number, body: string) {
    super(`HTTP ${status}: ${body.slice(0, 200)}`);
  }
}

const STATUSES = new Set(["Applied", "Saturated", "Rejected", "Conflicted", "Unrecognized"]);

function isNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isSnapshot(v: unknown): v is Snapshot {
  if (v === null || typeof v !== "object") return false;
  const s = v as Record<string, unknown>;
  return (
    isNumber(s.link_id) &&
    isNumber(s.accuracy) &&
    isNumber(s.latency_ms) &&
    isNumber(s.depth) &&
    isNumber(s.timestamp) &&
    typeof s.channel === "string"
  );
}

export function asLinkRow(v: unknown): LinkRow {
  const r = v as Record<string, unknown>;
  if (
    v === null ||
    typeof v !== "object" ||
    !isNumber(r.link_id) ||
    !isNumber(r.tx_id) ||
    !isNumber(r.rx_id) ||
    !isNumber(r.encoding_depth) ||
    typeof r.channel !== "string"
  ) {
    throw new ApiShapeError(`not a link row: ${JSON.stringify(v).slice(0, 120)}`);
  }
  return v as LinkRow;
}

export function asOutcome(v: unknown): RequestOutcome {
  const o = v as Record<string, unknown>;
  if (
    v === null ||
    typeof v !== "object" ||
    typeof o.request_id !== "string" ||
    typeof o.user_id !== "string" ||
    typeof o.status !== "string" ||
    !STATUSES.has(o.status) ||
    !Array.isArray(o.sql) ||
    !(o.before === null || isSnapshot(o.before)) ||
    !(o.after === null || isSnapshot(o.after))
  ) {
    throw new ApiShapeError(`not a request outcome: ${JSON.stringify(v).slice(0, 120)}`);
  }
  return v as RequestOutcome;
}

export function asSnapshot(v: unknown): Snapshot {
  if (!isSnapshot(v)) {
    throw new ApiShapeError(`not a snapshot: ${JSON.stringify(v).slice(0, 120)}`);
  }
  return v;
}

export class GatewayClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = globalThis.fetch.bind(globalThis),
  ) {}

  private async getJson(path: string): Promise<unknown> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!response.ok) throw new HttpError(response.status, await response.text());
    return response.json();
  }

  async getLinks(): Promise<LinkRow[]> {
    const body = await this.getJson("/api/v1/links");
    if (!Array.isArray(body)) throw new ApiShapeError("links: expected an array");
    return body.map(asLinkRow);
  }

  async getMetricsHistory(linkId: number): Promise<Snapshot[]> {
    const body = await this.getJson(`/api/v1/metrics/history?link_id=${linkId}`);
    if (!Array.isArray(body)) throw new ApiShapeError("history: expected an array");
    return body.map(asSnapshot);
  }

  async getEvents(since: number, waitMs = 0): Promise<EventsPage> {
    const body = await this.getJson(`/api/v1/events?since=${since}&wait_ms=${waitMs}`);
    const page = body as Record<string, unknown>;
    if (body === null || typeof body !== "object" || !Array.isArray(page.events) || !isNumber(page.next)) {
      throw new ApiShapeError("events: bad page shape");
    }
    return { events: page.events.map(asOutcome), next: page.next };
  }

  /** The console's only mutating call. */
  async postRequest(userId: string, text: string): Promise<RequestOutcome> {
    const response = await this.fetchFn(`${this.baseUrl}/api/v1/requests`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ user_id: userId, text }),
    });
    if (!response.ok) throw new HttpError(response.status, await response.text());
    return asOutcome(await response.json());
  }
}
