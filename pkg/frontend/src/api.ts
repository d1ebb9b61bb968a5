/** Typed fetch client for the review-service endpoints. */

import type {
  CohortReport,
  ConcordanceReport,
  DecisionPayload,
  NextCaseResponse,
  Recommendation,
  SessionSummary,
  StoredDecision,
  TrustSnapshot,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export interface SessionRequest {
  case_ids: string[];
  n_decoys?: number;
  seed?: number;
  blinded?: boolean;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly reviewerId: string = "anonymous",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = {
      method,
      headers: {
        "X-Reviewer-Id": this.reviewerId,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      ...(body !== undefined ? { body: JSON.stringify(body) } : {}),
    };
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = (await response.json()) as { detail?: string };
        if (payload.detail) detail = payload.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  recommendation(slideId: string): Promise<Recommendation> {
    return this.request("GET", `/slides/${encodeURIComponent(slideId)}/recommendation`);
  }

  createSession(body: SessionRequest): Promise<SessionSummary> {
    return this.request("POST", "/sessions", body);
  }

  sessionState(sessionId: string): Promise<SessionSummary> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  nextCase(sessionId: string): Promise<NextCaseResponse> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}/next`);
  }

  submitDecision(sessionId: string, decision: DecisionPayload): Promise<StoredDecision> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/decisions`, decision);
  }

  finalize(sessionId: string): Promise<ConcordanceReport> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/finalize`);
  }

  cohortReport(cohortId: string): Promise<CohortReport> {
    return this.request("GET", `/cohorts/${encodeURIComponent(cohortId)}/report`);
  }

  trust(): Promise<TrustSnapshot> {
    return this.request("GET", "/trust");
  }
}
