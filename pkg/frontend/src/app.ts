/**
 * Annotation flow, kept free of DOM access so the protocol behavior is
 * testable: state transitions live in AnnotationApp, and render() turns a
 * view into an HTML string for the page shell to install.
 *
 * Blinding is structural: views only ever hold the served payload fields
 * (index, source, left, right), never system labels.
 */

import type { EvalApi, NextItem, WireChoice } from "./api.js";

export type Choice = "left" | "right" | "tie";

export const CHOICE_TO_WIRE: Record<Choice, WireChoice> = {
  left: "first",
  right: "second",
  tie: "tie",
};

export type View =
  | { kind: "loading" }
  | { kind: "item"; item: NextItem; busy: boolean; notice: string | null }
  | { kind: "done"; totalJudgments: number | null }
  | { kind: "error"; message: string };

export class AnnotationApp {
  view: View = { kind: "loading" };

  constructor(
    private readonly api: EvalApi,
    readonly session: string,
    readonly annotator: string,
    private readonly onChange: (view: View) => void = () => {},
  ) {}

  private update(view: View): void {
    this.view = view;
    this.onChange(view);
  }

  /** Fetch the next unjudged item; the service decides where we are. */
  async start(): Promise<void> {
    this.update({ kind: "loading" });
    try {
      const next = await this.api.nextItem(this.session, this.annotator);
      if (next.kind === "done") {
        await this.finish();
      } else {
        this.update({ kind: "item", item: next.item, busy: false, notice: null });
      }
    } catch (err) {
      this.update({ kind: "error", message: describe(err) });
    }
  }

  /**
   * Submit one judgment for the displayed item.  While a request is in
   * flight further calls are ignored, so one decision is one request.
   * A 409 (already judged) advances without re-posting; failures keep the
   * current item on screen with a retryable notice.
   */
  async judge(choice: Choice): Promise<void> {
    if (this.view.kind !== "item" || this.view.busy) return;
    const item = this.view.item;
    this.update({ kind: "item", item, busy: true, notice: null });
    try {
      // "created" and "duplicate" both advance; only failures stay put
      await this.api.submitJudgment(
        this.session, item.index, this.annotator, CHOICE_TO_WIRE[choice]);
    } catch (err) {
      this.update({ kind: "item", item, busy: false, notice: describe(err) });
      return;
    }
    await this.start();
  }

  private async finish(): Promise<void> {
    let total: number | null = null;
    try {
      total = (await this.api.tally(this.session)).count;
    } catch {
      // the done state is still correct without the count
    }
    this.update({ kind: "done", totalJudgments: total });
  }
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function render(view: View): string {
  switch (view.kind) {
    case "loading":
      return `<p class="status">Loading…</p>`;
    case "error":
      return [
        `<div class="banner error">Service error: ${escapeHtml(view.message)}</div>`,
        `<button data-action="retry">Retry</button>`,
      ].join("\n");
    case "done": {
      const total = view.totalJudgments === null
        ? ""
        : `<p>The session has ${view.totalJudgments} judgments in total.</p>`;
      return `<div class="done"><h2>All done</h2><p>No items left for you.</p>${total}</div>`;
    }
    case "item": {
      const { item, busy, notice } = view;
      const disabled = busy ? " disabled" : "";
      const failure = notice
        ? `<div class="banner error">Could not record the judgment ` +
          `(${escapeHtml(notice)}). Nothing was saved; please pick again.</div>`
        : "";
      return [
        failure,
        `<p class="progress">You have judged ${item.index} item(s) so far.</p>`,
        `<section class="source"><h3>Original</h3><p>${escapeHtml(item.source)}</p></section>`,
        `<div class="candidates">`,
        `<section class="candidate"><h3>Left</h3><p>${escapeHtml(item.left)}</p></section>`,
        `<section class="candidate"><h3>Right</h3><p>${escapeHtml(item.right)}</p></section>`,
        `</div>`,
        `<div class="controls">`,
        `<button data-choice="left"${disabled}>Left is better (1)</button>`,
        `<button data-choice="tie"${disabled}>Equal quality (0)</button>`,
        `<button data-choice="right"${disabled}>Right is better (2)</button>`,
        `</div>`,
        `<p class="hint">Keyboard: 1 = left, 2 = right, 0 = tie.</p>`,
      ].join("\n");
    }
  }
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
