/** Client-side session state: fetch, poll, and the blocking answer flow.
 *
 * One active session per controller; all mutation goes through answerFlow,
 * which disables itself while a post is in flight (double-click protection).
 * Rendering state is a pure function of the last fetched view; the
 * controller never infers verdicts or outcomes client-side.
 */

import { ApiError, type Client } from "./api.js";
import type { SessionView, Verdict } from "./types.js";

export type UiState =
  | { phase: "loading" }
  | { phase: "active"; view: SessionView; busy: boolean; toast: string | null }
  | { phase: "lost"; reason: string };

export interface AnswerRecord {
  seq: number;
  atom: string;
  verdict: Verdict;
}

export class SessionController {
  state: UiState = { phase: "loading" };
  history: AnswerRecord[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;
  private listeners: Array<(s: UiState) => void> = [];

  constructor(
    private client: Client,
    private sessionId: string,
    private pollMs = 1000,
  ) {}

  onChange(fn: (s: UiState) => void): void {
    this.listeners.push(fn);
  }

  private setState(s: UiState): void {
    this.state = s;
    for (const fn of this.listeners) fn(s);
  }

  private lost(reason: string): void {
    this.stopPolling();
    this.setState({ phase: "lost", reason });
  }

  async refresh(): Promise<void> {
    try {
      const view = await this.client.getSession(this.sessionId);
      const busy = this.state.phase === "active" ? this.state.busy : false;
      this.setState({ phase: "active", view, busy, toast: null });
    } catch (e) {
      if (e instanceof ApiError && e.status === 404) {
        this.lost("session lost: the server no longer knows this session");
      } else {
        this.lost(`session lost: ${(e as Error).message}`);
      }
    }
  }

  /** Post a verdict and refetch; no-op while a previous post is in flight. */
  async answerFlow(verdict: Verdict): Promise<void> {
    if (this.state.phase !== "active" || this.state.busy) return;
    const view = this.state.view;
    if (view.state !== "awaiting_answer" || view.pending_question === null) return;
    const pending = view.pending_question;
    this.setState({ phase: "active", view, busy: true, toast: null });
    try {
      const next = await this.client.postAnswer(this.sessionId, verdict);
      this.history.push({ seq: pending.seq, atom: pending.atom.text, verdict });
      this.setState({ phase: "active", view: next, busy: false, toast: null });
    } catch (e) {
      if (e instanceof ApiError && e.status === 409) {
        // stale question: someone else advanced the session; refetch
        await this.refresh();
        if (this.state.phase === "active") {
          this.setState({ ...this.state, toast: "question was already answered" });
        }
        return;
      }
      if (e instanceof ApiError && e.status === 404) {
        this.lost("session lost: the server no longer knows this session");
        return;
      }
      this.lost(`session lost: ${(e as Error).message}`);
    }
  }

  startPolling(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => {
      if (this.state.phase === "active" && this.state.busy) return;
      if (
        this.state.phase === "active" &&
        (this.state.view.state === "done" || this.state.view.state === "undecided")
      ) {
        this.stopPolling();
        return;
      }
      void this.refresh();
    }, this.pollMs);
  }

  stopPolling(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
