/** Typed client for the survey service HTTP+JSON API. */

export interface DirectQuestion {
  index: number;
  id1: string;
  id2: string;
  answered: boolean;
}

export interface IndirectQuestion {
  index: number;
  id1: string;
  id2: string;
  lines: string[];
  answered: boolean;
}

export interface SessionState {
  session_id: string;
  participant: string;
  state: "in_progress" | "complete";
  direct: DirectQuestion[];
  indirect: IndirectQuestion[];
}

export interface SubmitResult {
  ok: boolean;
  state: string;
}

/** Non-2xx response; carries the HTTP status so the flow can distinguish
 * validation errors (400), duplicates (409), and unknown sessions (404). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SurveyClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { error?: string; detail?: unknown };
        detail = body.error ?? JSON.stringify(body.detail ?? body);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(participant: string): Promise<SessionState> {
    return this.request<SessionState>("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ participant }),
    });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request<SessionState>(`/sessions/${sessionId}`);
  }

  submitDirect(
    sessionId: string,
    index: number,
    relatedness: number,
    similarity: number,
  ): Promise<SubmitResult> {
    return this.request<SubmitResult>(`/sessions/${sessionId}/direct/${index}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ relatedness, similarity }),
    });
  }

  submitIndirect(
    sessionId: string,
    index: number,
    chosen: "id1" | "id2",
  ): Promise<SubmitResult> {
    return this.request<SubmitResult>(`/sessions/${sessionId}/indirect/${index}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ chosen }),
    });
  }
}
