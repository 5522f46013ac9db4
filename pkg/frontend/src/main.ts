import { GatewayClient } from "./api.js";
import { ConsoleApp } from "./app.js";
import { ConsoleView } from "./view.js";

export function bootstrap(doc: Document, baseUrl: string): ConsoleApp {
  const view = new ConsoleView(doc);
  const app = new ConsoleApp(new GatewayClient(baseUrl), view);

  const form = view.el<HTMLFormElement>("request-form");
  const input = view.el<HTMLInputElement>("request-text");
  const userField = view.el<HTMLInputElement>("user-id");

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    app.session.userId = userField.value || "u1";
    const text = input.value.trim();
    input.value = "";
    void app.submit(text);
  });

  for (const button of doc.querySelectorAll<HTMLButtonElement>("#presets button")) {
    button.addEventListener("click", () => {
      app.session.userId = userField.value || "u1";
      void app.submit(button.dataset.text ?? "");
    });
  }

  view.el<HTMLSelectElement>("link-select").addEventListener("change", (event) => {
    void app.selectLink(Number((event.target as HTMLSelectElement).value));
  });

  // Retry affordance lives inside the toast; delegate clicks.
  view.el<HTMLDivElement>("toast").addEventListener("click", (event) => {
    if ((event.target as HTMLElement).id === "retry-button") void app.retryLast();
  });

  return app;
}

if (typeof window !== "undefined" && typeof document !== "undefined" && document.getElementById("request-form")) {
  const app = bootstrap(document, "");
  void app.init().then(() => app.runEventLoop());
}
