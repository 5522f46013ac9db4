/**
 * DOM rendering. The view never talks to the network; it renders state and
 * exposes the elements the app wires events onto.
 */
import type { LinkRow, RequestOutcome } from "./api.js";
import { renderChartSvg } from "./chart.js";
import type { ConsoleSession } from "./model.js";

const PARAM_COLUMNS: (keyof LinkRow)[] = [
  "link_id",
  "tx_id",
  "rx_id",
  "encoding_depth",
  "snr_db",
  "channel",
  "bandwidth_hz",
  "channel_gain",
  "tx_power_w",
  "noise_psd",
];

export function statusBadge(outcome: RequestOutcome): string {
  return `<span class="badge badge-${outcome.status.toLowerCase()}">${outcome.status}</span>`;
}

export function deltaLine(outcome: RequestOutcome): string {
  if (!outcome.before || !outcome.after) return "";
  const accPp = (outcome.after.accuracy - outcome.before.accuracy) * 100;
  const latMs = outcome.after.latency_ms - outcome.before.latency_ms;
  const sign = (v: number) => (v >= 0 ? "+" : "");
  return (
    `<div class="delta">accuracy ${outcome.before.accuracy.toFixed(4)} → ` +
    `${outcome.after.accuracy.toFixed(4)} (${sign(accPp)}${accPp.toFixed(2)} pp), ` +
    `latency ${outcome.before.latency_ms.toFixed(4)} → ` +
    `${outcome.after.latency_ms.toFixed(4)} ms (${sign(latMs)}${latMs.toFixed(4)} ms)</div>`
  );
}

function sqlBlock(outcome: RequestOutcome): string {
  if (outcome.sql.length === 0) return "";
  const rows = outcome.sql.map((s) => `<li><code>${escapeHtml(s)}</code></li>`).join("");
  return `<details class="sql"><summary>SQL issued (${outcome.sql.length})</summary><ul>${rows}</ul></details>`;
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export class ConsoleView {
  constructor(private readonly root: Document) {}

  el<T extends HTMLElement>(id: string): T {
    const node = this.root.getElementById(id);
    if (node === null) throw new Error(`missing element #${id}`);
    return node as T;
  }

  renderHistory(session: ConsoleSession): void {
    const container = this.el<HTMLDivElement>("history");
    container.innerHTML = session.history
      .map((outcome) => {
        const text = outcome.intent ? String(outcome.intent.raw_text ?? "") : "";
        const reason = outcome.reason ? `<div class="reason">${escapeHtml(outcome.reason)}</div>` : "";
        return (
          `<div class="entry entry-${outcome.status.toLowerCase()}" data-request-id="${outcome.request_id}">` +
          `<div class="entry-head">${statusBadge(outcome)}` +
          `<span class="who">${escapeHtml(outcome.user_id)}</span>` +
          `<span class="text">${escapeHtml(text)}</span></div>` +
          deltaLine(outcome) +
          reason +
          sqlBlock(outcome) +
          `</div>`
        );
      })
      .join("");
    container.scrollTop = container.scrollHeight;
  }

  renderCharts(session: ConsoleSession): void {
    renderChartSvg(this.el<HTMLElement>("accuracy-chart") as unknown as SVGElement, session.accuracySeries);
    renderChartSvg(this.el<HTMLElement>("latency-chart") as unknown as SVGElement, session.latencySeries);
  }

  /** The table mirrors the latest /links payload verbatim. */
  renderLinks(rows: LinkRow[]): void {
    const head = `<tr>${PARAM_COLUMNS.map((c) => `<th>${c}</th>`).join("")}</tr>`;
    const body = rows
      .map((row) => `<tr>${PARAM_COLUMNS.map((c) => `<td>${row[c]}</td>`).join("")}</tr>`)
      .join("");
    this.el<HTMLTableElement>("links-table").innerHTML = head + body;

    const select = this.el<HTMLSelectElement>("link-select");
    const current = select.value;
    select.innerHTML = rows
      .map((r) => `<option value="${r.link_id}">link ${r.link_id} (tx ${r.tx_id} → rx ${r.rx_id})</option>`)
      .join("");
    if (current && rows.some((r) => String(r.link_id) === current)) select.value = current;
  }

  addNotice(kind: string, message: string): void {
    const list = this.el<HTMLUListElement>("notice-list");
    const item = this.root.createElement("li");
    item.className = `notice notice-${kind.toLowerCase()}`;
    item.textContent = `[${kind}] ${message}`;
    list.prepend(item);
  }

  showToast(message: string, withRetry: boolean): void {
    const toast = this.el<HTMLDivElement>("toast");
    toast.innerHTML =
      escapeHtml(message) + (withRetry ? ' <button id="retry-button">Retry</button>' : "");
    toast.classList.add("visible");
  }

  clearToast(): void {
    const toast = this.el<HTMLDivElement>("toast");
    toast.innerHTML = "";
    toast.classList.remove("visible");
  }

  setConnection(state: "live" | "reconnecting"): void {
    const node = this.el<HTMLSpanElement>("conn-status");
    node.textContent = state;
    node.className = `conn conn-${state}`;
  }
}
