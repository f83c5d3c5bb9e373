/** Typed client for the session API. All colors travel as hex strings. */

export interface SessionInfo {
  session_id: string;
  candidate_count: number;
}

export interface QueryPayload {
  query_id: string;
  left: string[];
  right: string[];
  remaining: number;
}

export interface RankedEntry {
  id: string;
  score: number;
  colors: string[];
}

export interface ResultsPayload {
  ranking: RankedEntry[];
  novel: { colors: string[]; reward: number } | null;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    } catch {
      /* keep statusText */
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(private base: string = "") {}

  createSession(seed: string, nQueries?: number): Promise<SessionInfo> {
    const body: Record<string, unknown> = { seed };
    if (nQueries !== undefined) body.n_queries = nQueries;
    return request<SessionInfo>(`${this.base}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getQuery(sessionId: string): Promise<QueryPayload> {
    return request<QueryPayload>(`${this.base}/sessions/${sessionId}/query`);
  }

  postResponse(sessionId: string, queryId: string, choice: 0 | 1 | 2): Promise<{ remaining: number }> {
    return request(`${this.base}/sessions/${sessionId}/responses`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ query_id: queryId, choice }),
    });
  }

  getResults(sessionId: string): Promise<ResultsPayload> {
    return request<ResultsPayload>(`${this.base}/sessions/${sessionId}/results`);
  }
}
