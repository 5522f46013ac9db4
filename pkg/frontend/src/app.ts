/**
 * Wiring between the gateway client, session state and the view. All state
 * changes flow through POST /api/v1/requests plus the event stream; nothing
 * is applied optimistically.
 */
import { ApiShapeError, GatewayClient } from "./api.js";
import { ConsoleSession } from "./model.js";
import { ConsoleView } from "./view.js";

export class ConsoleApp {
  readonly session = new ConsoleSession();
  private lastFailedText: string | null = null;

  constructor(
    private readonly client: GatewayClient,
    private readonly view: ConsoleView,
  ) {}

  async init(): Promise<void> {
    await this.refreshLinks();
    const history = await this.client.getMetricsHistory(this.session.selectedLink);
    this.session.resync(history);
    this.session.cursor = (await this.client.getEvents(0)).next;
    this.view.renderCharts(this.session);
    this.view.setConnection("live");
  }

  private async refreshLinks(): Promise<void> {
    this.view.renderLinks(await this.client.getLinks());
  }

  async submit(text: string): Promise<void> {
    if (!text) return;
    try {
      const outcome = await this.client.postRequest(this.session.userId, text);
      this.view.clearToast();
      this.lastFailedText = null;
      // The outcome also arrives on the event stream; record it now for
      // immediate feedback and let ingest() dedupe the stream copy.
      this.ingestAndRender(outcome);
      await this.refreshLinks();
    } catch (error) {
      // No optimistic state: history and charts stay untouched.
      this.lastFailedText = text;
      const message = error instanceof ApiShapeError ? `malformed server reply: ${error.message}` : String(error);
      this.view.showToast(message, true);
    }
  }

  retryLast(): Promise<void> {
    return this.lastFailedText ? this.submit(this.lastFailedText) : Promise.resolve();
  }

  private ingestAndRender(outcome: Parameters<ConsoleSession["ingest"]>[0]): void {
    if (this.session.history.some((o) => o.request_id === outcome.request_id)) return;
    const result = this.session.ingest(outcome);
    if (result === "resync") {
      void this.resyncSeries();
    }
    if (outcome.status === "Conflicted" || outcome.status === "Saturated") {
      this.view.addNotice(outcome.status, outcome.reason ?? "");
    }
    this.view.renderHistory(this.session);
    this.view.renderCharts(this.session);
  }

  private async resyncSeries(): Promise<void> {
    const history = await this.client.getMetricsHistory(this.session.selectedLink);
    this.session.resync(history);
    this.view.renderCharts(this.session);
  }

  /** One event-stream poll; returns how many outcomes arrived. */
  async pollOnce(waitMs = 0): Promise<number> {
    const page = await this.client.getEvents(this.session.cursor, waitMs);
    this.session.cursor = page.next;
    let applied = false;
    for (const outcome of page.events) {
      this.ingestAndRender(outcome);
      applied = applied || outcome.status === "Applied";
    }
    if (applied) await this.refreshLinks();
    return page.events.length;
  }

  /** Long-poll loop with reconnect + backfill on stream drop. */
  async runEventLoop(signal?: AbortSignal): Promise<void> {
    while (!signal?.aborted) {
      try {
        await this.pollOnce(25_000);
        this.view.setConnection("live");
      } catch {
        this.view.setConnection("reconnecting");
        await new Promise((resolve) => setTimeout(resolve, 1_000));
        try {
          await this.resyncSeries();
          await this.refreshLinks();
        } catch {
          // stay in reconnecting state; next iteration retries
        }
      }
    }
  }

  async selectLink(linkId: number): Promise<void> {
    this.session.selectLink(linkId);
    await this.resyncSeries();
  }
}
