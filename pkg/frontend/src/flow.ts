/** Session flow state machine: instructions, 18 direct questions, 15 indirect
 * questions, completion. One question per screen, no back navigation. */

import { ApiError, SessionState, SurveyClient } from "./api.js";

export type Screen =
  | { kind: "instructions" }
  | { kind: "direct"; index: number }
  | { kind: "indirect"; index: number }
  | { kind: "done" };

export interface FlowOptions {
  /** Source of randomness for per-question choice-order shuffling. */
  random?: () => number;
}

export class SessionFlow {
  session: SessionState | null = null;
  screen: Screen = { kind: "instructions" };
  /** Pending (unsubmitted) direct selections for the current screen. */
  relatedness: number | null = null;
  similarity: number | null = null;
  /** Pending indirect choice for the current screen. */
  chosen: "id1" | "id2" | null = null;
  /** Display order of the two choices, randomized per question. */
  choiceOrder: ["id1", "id2"] | ["id2", "id1"] = ["id1", "id2"];
  /** Inline message shown when advancing is blocked or a request failed. */
  message: string | null = null;
  busy = false;

  private readonly random: () => number;

  constructor(
    readonly client: SurveyClient,
    readonly participant: string,
    options: FlowOptions = {},
  ) {
    this.random = options.random ?? Math.random;
  }

  /** Create a session, or resume an existing one from server state. */
  async start(sessionId?: string): Promise<void> {
    if (sessionId) {
      try {
        this.session = await this.client.getSession(sessionId);
        this.goTo(this.firstUnanswered());
        return;
      } catch (error) {
        if (!(error instanceof ApiError && error.status === 404)) {
          throw error;
        }
        // Unknown session (e.g. wiped data dir): fall through to a new one.
      }
    }
    this.session = await this.client.createSession(this.participant);
    this.goTo({ kind: "instructions" });
  }

  /** The screen for the first question the server has no answer for. */
  firstUnanswered(): Screen {
    const session = this.requireSession();
    for (const question of session.direct) {
      if (!question.answered) return { kind: "direct", index: question.index };
    }
    for (const question of session.indirect) {
      if (!question.answered) return { kind: "indirect", index: question.index };
    }
    return { kind: "done" };
  }

  beginQuestions(): void {
    this.goTo(this.firstUnanswered());
  }

  progress(): { answered: number; total: number } {
    const session = this.requireSession();
    const answered =
      session.direct.filter((q) => q.answered).length +
      session.indirect.filter((q) => q.answered).length;
    return { answered, total: session.direct.length + session.indirect.length };
  }

  selectRelatedness(value: number): void {
    this.relatedness = value;
    this.message = null;
  }

  selectSimilarity(value: number): void {
    this.similarity = value;
    this.message = null;
  }

  selectChoice(value: "id1" | "id2"): void {
    this.chosen = value;
    this.message = null;
  }

  /** Both scales answered (direct) or exactly one choice made (indirect). */
  canSubmit(): boolean {
    if (this.screen.kind === "direct") {
      return this.relatedness !== null && this.similarity !== null;
    }
    if (this.screen.kind === "indirect") {
      return this.chosen !== null;
    }
    return false;
  }

  /**
   * Submit the current answer. Advances on success and returns true.
   * Validation gaps and rejected submissions set an inline message; network
   * failures keep the answer buffered so submit() can simply be retried.
   */
  async submit(): Promise<boolean> {
    const session = this.requireSession();
    if (this.screen.kind === "direct") {
      if (this.relatedness === null || this.similarity === null) {
        this.message =
          this.relatedness === null
            ? "Please answer the relatedness scale before continuing."
            : "Please answer the substitutability scale before continuing.";
        return false;
      }
      return this.send(
        () =>
          this.client.submitDirect(
            session.session_id,
            (this.screen as { index: number }).index,
            this.relatedness as number,
            this.similarity as number,
          ),
        () => {
          session.direct[(this.screen as { index: number }).index].answered = true;
        },
      );
    }
    if (this.screen.kind === "indirect") {
      if (this.chosen === null) {
        this.message = "Please pick one of the two identifiers.";
        return false;
      }
      return this.send(
        () =>
          this.client.submitIndirect(
            session.session_id,
            (this.screen as { index: number }).index,
            this.chosen as "id1" | "id2",
          ),
        () => {
          session.indirect[(this.screen as { index: number }).index].answered = true;
        },
      );
    }
    return false;
  }

  private async send(
    post: () => Promise<{ state?: string }>,
    markAnswered: () => void,
  ): Promise<boolean> {
    this.busy = true;
    try {
      const result = await post();
      markAnswered();
      if (this.session && (result.state === "complete" || result.state === "in_progress")) {
        this.session.state = result.state;
      }
      this.advance();
      return true;
    } catch (error) {
      if (error instanceof ApiError) {
        if (error.status === 409) {
          // Already recorded (double submit or resumed race): move on.
          markAnswered();
          this.advance();
          return true;
        }
        this.message = error.message;
        return false;
      }
      // Network failure: the selection stays buffered for a retry.
      this.message = "Connection problem; your answer is saved locally. Try again.";
      return false;
    } finally {
      this.busy = false;
    }
  }

  private advance(): void {
    this.goTo(this.firstUnanswered());
  }

  private goTo(screen: Screen): void {
    this.screen = screen;
    this.relatedness = null;
    this.similarity = null;
    this.chosen = null;
    this.message = null;
    if (screen.kind === "indirect") {
      this.choiceOrder = this.random() < 0.5 ? ["id1", "id2"] : ["id2", "id1"];
    }
  }

  private requireSession(): SessionState {
    if (!this.session) {
      throw new Error("flow not started");
    }
    return this.session;
  }
}
