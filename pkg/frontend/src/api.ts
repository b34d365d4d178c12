/**
 * Typed client for the curation service HTTP API. The fetch function is
 * injectable so the session logic can be tested against a fake service.
 */

import type { Rle } from "./rle.js";

export interface Candidate {
  record_id: string;
  image_url: string;
  modal: Rle;
  amodal: Rle;
  occluder: Rle;
  occlusion_ratio: number;
  semantic_label: string;
  category: string;
}

export interface RoundProgress {
  pending: number;
  yes: number;
  no: number;
}

export interface Progress {
  rounds: Record<string, RoundProgress>;
  accepted: number;
}

export type Verdict = "yes" | "no";

export interface DecisionAck {
  record_id: string;
  round: number;
  effective_verdict: Verdict;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private fetchFn: FetchLike;

  constructor(
    private baseUrl = "",
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  async nextCandidate(round: number, annotator: string): Promise<Candidate | null> {
    const url = `${this.baseUrl}/api/queue?round=${round}&annotator=${encodeURIComponent(annotator)}`;
    const resp = await this.fetchFn(url);
    if (resp.status === 204) return null;
    if (!resp.ok) throw new ApiError(resp.status, await errorMessage(resp));
    return (await resp.json()) as Candidate;
  }

  async postDecision(
    recordId: string,
    round: number,
    verdict: Verdict,
    annotator: string,
    tags: string[] = [],
  ): Promise<DecisionAck> {
    const url = `${this.baseUrl}/api/records/${encodeURIComponent(recordId)}/decision`;
    const resp = await this.fetchFn(url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ round, verdict, annotator_id: annotator, tags }),
    });
    if (!resp.ok) throw new ApiError(resp.status, await errorMessage(resp));
    return (await resp.json()) as DecisionAck;
  }

  async progress(): Promise<Progress> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/progress`);
    if (!resp.ok) throw new ApiError(resp.status, await errorMessage(resp));
    return (await resp.json()) as Progress;
  }
}

async function errorMessage(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { error?: string };
    if (body && typeof body.error === "string") return body.error;
  } catch {
    // fall through to the status line
  }
  return `request failed with status ${resp.status}`;
}
