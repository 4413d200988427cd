/**
 * Thin client for the pairwise evaluation service's HTTP+JSON API.
 *
 * The service is the single source of truth: this layer does no caching
 * and keeps no state beyond the base URL.
 */

export interface NextItem {
  index: number;
  source: string;
  left: string;
  right: string;
}

export type NextResult = { kind: "item"; item: NextItem } | { kind: "done" };

export type WireChoice = "first" | "second" | "tie";

/** "created" for 201; "duplicate" for 409 (someone already judged it). */
export type SubmitResult = "created" | "duplicate";

export interface TallyResult {
  points_a: number;
  points_b: number;
  count: number;
}

export interface EvalApi {
  nextItem(session: string, annotator: string): Promise<NextResult>;
  submitJudgment(
    session: string,
    index: number,
    annotator: string,
    choice: WireChoice,
  ): Promise<SubmitResult>;
  tally(session: string): Promise<TallyResult>;
}

export class HttpEvalApi implements EvalApi {
  constructor(private readonly baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  async nextItem(session: string, annotator: string): Promise<NextResult> {
    const url = `${this.baseUrl}/sessions/${encodeURIComponent(session)}/next` +
      `?annotator=${encodeURIComponent(annotator)}`;
    const resp = await fetch(url);
    if (resp.status === 204) return { kind: "done" };
    if (!resp.ok) throw new Error(`next item failed: HTTP ${resp.status}`);
    return { kind: "item", item: (await resp.json()) as NextItem };
  }

  async submitJudgment(
    session: string,
    index: number,
    annotator: string,
    choice: WireChoice,
  ): Promise<SubmitResult> {
    const url = `${this.baseUrl}/sessions/${encodeURIComponent(session)}/judgments`;
    const resp = await fetch(url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ index, annotator, choice }),
    });
    if (resp.status === 409) return "duplicate";
    if (!resp.ok) throw new Error(`judgment failed: HTTP ${resp.status}`);
    return "created";
  }

  async tally(session: string): Promise<TallyResult> {
    const url = `${this.baseUrl}/sessions/${encodeURIComponent(session)}/tally`;
    const resp = await fetch(url);
    if (!resp.ok) throw new Error(`tally failed: HTTP ${resp.status}`);
    return (await resp.json()) as TallyResult;
  }
}
