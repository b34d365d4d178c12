/**
 * Review session state machine, independent of the DOM.
 *
 * One annotator, one tab, at most one request in flight: while a decision
 * is being submitted (or the next candidate loaded) further verdicts are
 * ignored, which is what keeps a double-tapped Y from posting twice. A
 * decision that fails on a network error is kept as `pendingDecision`
 * and resubmitted by retry(); it is never silently dropped. A 409 means
 * the protocol rejected the decision (round 2 before round 1) - that one
 * is surfaced as a message instead of retried, since retrying cannot
 * make it valid.
 *
 * Keyboard map: Y/N verdicts, 1/2 round selection, M/A/O overlay
 * toggles, R retry.
 */

import { ApiClient, ApiError, type Candidate, type Progress, type Verdict } from "./api.js";
import { decodeRle, type BitMask } from "./rle.js";

export type Phase = "idle" | "loading" | "showing" | "submitting" | "empty" | "error";

export interface DecodedCandidate {
  info: Candidate;
  modal: BitMask;
  amodal: BitMask;
  occluder: BitMask;
}

export interface OverlayToggles {
  modal: boolean;
  amodal: boolean;
  occluder: boolean;
}

export interface PendingDecision {
  recordId: string;
  round: number;
  verdict: Verdict;
}

export class ReviewSession {
  phase: Phase = "idle";
  round: 1 | 2 = 1;
  candidate: DecodedCandidate | null = null;
  progress: Progress | null = null;
  toggles: OverlayToggles = { modal: true, amodal: true, occluder: false };
  pendingDecision: PendingDecision | null = null;
  message = "";

  constructor(
    private api: ApiClient,
    private annotator: string,
    private onChange: () => void = () => {},
  ) {}

  /** true while a request is in flight; verdict input is disabled then */
  get busy(): boolean {
    return this.phase === "loading" || this.phase === "submitting";
  }

  async start(round: 1 | 2 = 1): Promise<void> {
    this.round = round;
    await this.refreshProgress();
    await this.fetchNext();
  }

  async selectRound(round: 1 | 2): Promise<void> {
    if (this.busy || round === this.round) return;
    this.round = round;
    await this.fetchNext();
  }

  async fetchNext(): Promise<void> {
    this.phase = "loading";
    this.message = "";
    this.onChange();
    try {
      const info = await this.api.nextCandidate(this.round, this.annotator);
      if (info === null) {
        this.candidate = null;
        this.phase = "empty";
        this.message = `round ${this.round} complete - queue is empty`;
      } else {
        this.candidate = {
          info,
          modal: decodeRle(info.modal),
          amodal: decodeRle(info.amodal),
          occluder: decodeRle(info.occluder),
        };
        this.phase = "showing";
      }
    } catch (err) {
      this.phase = "error";
      this.message = describe(err);
    }
    this.onChange();
  }

  async submit(verdict: Verdict): Promise<void> {
    if (this.phase !== "showing" || this.candidate === null) return;
    const decision: PendingDecision = {
      recordId: this.candidate.info.record_id,
      round: this.round,
      verdict,
    };
    await this.send(decision);
  }

  private async send(decision: PendingDecision): Promise<void> {
    this.pendingDecision = decision;
    this.phase = "submitting";
    this.onChange();
    try {
      await this.api.postDecision(decision.recordId, decision.round, decision.verdict, this.annotator);
      this.pendingDecision = null;
      await this.refreshProgress();
      await this.fetchNext();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // ordering violation: not retryable, explain and stay on the candidate
        this.pendingDecision = null;
        this.phase = this.candidate ? "showing" : "error";
        this.message = `decision rejected: ${err.message}`;
      } else {
        this.phase = "error";
        this.message = `submission failed, decision kept for retry: ${describe(err)}`;
      }
      this.onChange();
    }
  }

  /** resubmit a kept decision, or reload the queue after a fetch error */
  async retry(): Promise<void> {
    if (this.busy) return;
    if (this.pendingDecision !== null) {
      await this.send(this.pendingDecision);
    } else {
      await this.fetchNext();
    }
  }

  async refreshProgress(): Promise<void> {
    try {
      this.progress = await this.api.progress();
    } catch {
      // progress is cosmetic; never interrupt the flow for it
    }
    this.onChange();
  }

  toggleOverlay(name: keyof OverlayToggles): void {
    this.toggles[name] = !this.toggles[name];
    this.onChange();
  }

  async handleKey(key: string): Promise<void> {
    switch (key.toLowerCase()) {
      case "y":
        await this.submit("yes");
        break;
      case "n":
        await this.submit("no");
        break;
      case "1":
        await this.selectRound(1);
        break;
      case "2":
        await this.selectRound(2);
        break;
      case "m":
        this.toggleOverlay("modal");
        break;
      case "a":
        this.toggleOverlay("amodal");
        break;
      case "o":
        this.toggleOverlay("occluder");
        break;
      case "r":
        await this.retry();
        break;
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.message} (HTTP ${err.status})`;
  if (err instanceof Error) return err.message;
  return String(err);
}
