/** Typed client for the dialog service HTTP API. */

export interface OpenGoal {
  role: string;
  var: string;
  sort: string | null;
}

export interface TurnResponse {
  act: string;
  text: string;
  openGoals: OpenGoal[];
  drsBox: string;
}

export interface HistoryEntry {
  turn: number;
  speaker: "user" | "system";
  act: string;
  text: string;
}

export interface SessionState {
  sessionId: string;
  turn: number;
  userConst: string;
  focusTarget: string | null;
  openGoals: OpenGoal[];
  shared: {
    universe: string[];
    plus: Record<string, string[][]>;
    minus: Record<string, string[][]>;
  };
  history: HistoryEntry[];
}

/** Service-reported or transport-level failure, with the envelope's code. */
export class ServiceError extends Error {
  constructor(
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class DialogClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ServiceError("Network", err instanceof Error ? err.message : String(err));
    }
    const body = await resp.json().catch(() => null);
    if (!resp.ok) {
      const code = body?.error?.code ?? `HTTP${resp.status}`;
      const message = body?.error?.message ?? `request failed with status ${resp.status}`;
      throw new ServiceError(code, message);
    }
    return body as T;
  }

  createSession(): Promise<{ sessionId: string }> {
    return this.request("/session", { method: "POST" });
  }

  sendUtterance(sessionId: string, text: string): Promise<TurnResponse> {
    return this.request(`/session/${encodeURIComponent(sessionId)}/utterance`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    });
  }

  getState(sessionId: string): Promise<SessionState> {
    return this.request(`/session/${encodeURIComponent(sessionId)}/state`);
  }
}
