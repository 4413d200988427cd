/**
 * Page shell: landing form, rendering, event wiring.
 *
 * The service base URL comes from the ?api= query parameter and defaults
 * to the page's own origin, so the same build works behind any static
 * file server.
 */

import { HttpEvalApi } from "./api.js";
import { AnnotationApp, escapeHtml, render, type Choice } from "./app.js";

const root = document.getElementById("app") as HTMLElement;
let app: AnnotationApp | null = null;

function defaultApiUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? window.location.origin;
}

function landingForm(): string {
  return [
    `<h1>Translation judgment</h1>`,
    `<p>You will see a sentence and two translations with no system names;`,
    ` pick the better one or call it a tie.</p>`,
    `<form id="landing">`,
    `<label>Service URL <input name="api" value="${escapeHtml(defaultApiUrl())}"></label>`,
    `<label>Session id <input name="session" required></label>`,
    `<label>Your name <input name="annotator" required></label>`,
    `<button type="submit">Start judging</button>`,
    `</form>`,
  ].join("\n");
}

function installAppView(): void {
  if (!app) return;
  root.innerHTML = render(app.view);
}

function startSession(api: string, session: string, annotator: string): void {
  app = new AnnotationApp(new HttpEvalApi(api), session, annotator,
                          installAppView);
  void app.start();
}

root.innerHTML = landingForm();

root.addEventListener("submit", (event) => {
  const form = event.target as HTMLFormElement;
  if (form.id !== "landing") return;
  event.preventDefault();
  const data = new FormData(form);
  startSession(String(data.get("api")), String(data.get("session")),
               String(data.get("annotator")));
});

root.addEventListener("click", (event) => {
  const button = (event.target as HTMLElement).closest("button");
  if (!button || !app) return;
  const choice = button.dataset.choice as Choice | undefined;
  if (choice) void app.judge(choice);
  else if (button.dataset.action === "retry") void app.start();
});

document.addEventListener("keydown", (event) => {
  if (!app || app.view.kind !== "item") return;
  const keys: Record<string, Choice> = { "1": "left", "2": "right", "0": "tie" };
  const choice = keys[event.key];
  if (choice) void app.judge(choice);
});
