/** Thin fetch client for /api/v1/. No caching, no state, no math. */

import type {
  AnswerOption,
  AssessmentSummary,
  CompletionRow,
  ProgressSnapshot,
  Questionnaire,
  RegisterResult,
  Report,
  ResultsResponse,
  SubmitAck,
} from "./types.js";

/** A domain failure the service described; code comes from the body. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** The request never reached a verdict (connection refused, timeout). */
export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`request failed: ${String(cause)}`);
    this.name = "NetworkError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function request<T>(
  fetchImpl: FetchLike,
  url: string,
  token: string,
  init: RequestInit = {},
): Promise<T> {
  let response: Response;
  try {
    response = await fetchImpl(url, {
      ...init,
      headers: {
        Authorization: `Bearer ${token}`,
        ...(init.body ? { "Content-Type": "application/json" } : {}),
      },
    });
  } catch (cause) {
    throw new NetworkError(cause);
  }
  if (!response.ok) {
    let code = "unknown_error";
    let message = `${response.status}`;
    try {
      const body = (await response.json()) as { code?: string; message?: string };
      if (typeof body.code === "string") code = body.code;
      if (typeof body.message === "string") message = body.message;
    } catch {
      // Non-JSON error body; keep the status text.
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

/** Participant-side client: one assessment, one token, three endpoints. */
export class ParticipantApi {
  constructor(
    readonly baseUrl: string,
    readonly assessmentId: string,
    private readonly token: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private url(suffix: string): string {
    return `${this.baseUrl}/api/v1/assessments/${encodeURIComponent(this.assessmentId)}${suffix}`;
  }

  questionnaire(): Promise<Questionnaire> {
    return request(this.fetchImpl, this.url("/questionnaire"), this.token);
  }

  submit(question: string, answer: AnswerOption, process: string): Promise<SubmitAck> {
    return request(this.fetchImpl, this.url("/responses"), this.token, {
      method: "POST",
      body: JSON.stringify({ question, answer, process }),
    });
  }

  completion(): Promise<CompletionRow> {
    return request(this.fetchImpl, this.url("/completion"), this.token);
  }
}

/** Facilitator-side client keyed by the shared secret. */
export class FacilitatorApi {
  constructor(
    readonly baseUrl: string,
    private readonly key: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private url(suffix: string): string {
    return `${this.baseUrl}/api/v1${suffix}`;
  }

  listAssessments(): Promise<{ assessments: AssessmentSummary[] }> {
    return request(this.fetchImpl, this.url("/assessments"), this.key);
  }

  getAssessment(id: string): Promise<AssessmentSummary> {
    return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}`), this.key);
  }

  createAssessment(payload: {
    org_profile: string;
    processes: string[];
    target_level?: number;
    id?: string;
  }): Promise<AssessmentSummary> {
    return request(this.fetchImpl, this.url("/assessments"), this.key, {
      method: "POST",
      body: JSON.stringify(payload),
    });
  }

  register(
    assessmentId: string,
    payload: {
      display_name: string;
      assignments: { process: string; role: string }[];
      participant_id?: string;
    },
  ): Promise<RegisterResult> {
    return request(
      this.fetchImpl,
      this.url(`/assessments/${encodeURIComponent(assessmentId)}/participants`),
      this.key,
      { method: "POST", body: JSON.stringify(payload) },
    );
  }

  open(id: string): Promise<AssessmentSummary> {
    return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/open`), this.key, {
      method: "POST",
    });
  }

  close(id: string): Promise<AssessmentSummary> {
    return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/close`), this.key, {
      method: "POST",
    });
  }

  progress(id: string): Promise<ProgressSnapshot> {
    return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/progress`), this.key);
  }

  results(id: string): Promise<ResultsResponse> {
    return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/results`), this.key);
  }

  buildReport(id: string): Promise<Report> {
    return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/report`), this.key, {
      method: "POST",
    });
  }

  getReport(id: string): Promise<Report> {
    return request(this.fetchImpl, this.url(`/assessments/${encodeURIComponent(id)}/report`), this.key);
  }
}
