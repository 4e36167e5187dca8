// Typed client for the session service. All engine math happens server
// side; this module only moves documents around.

export type MatrixDoc = {
  rank: number;
  entries: (number | string | null)[];
  heisenberg: number;
};

export type Offset = { classical: number | null; delta: number };

export type StateDoc = {
  id: string;
  matrix: MatrixDoc;
  defect: number | null;
  gap: number[];
  offset: Offset;
  history_length: number;
  trace: string;
  initial_defect: number;
  success: boolean;
};

export type MoveDoc = {
  root: number;
  auto_exponent: number | null;
  legality: boolean;
  predicted_defect?: number | null;
  predicted_gap?: number[];
  error?: string;
};

export type ResidualEntry = {
  index: number;
  matrix: MatrixDoc;
  defect: number;
};

export type StepError = { kind: string; message: string };

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly payload: StepError | { detail?: string },
  ) {
    super(
      "kind" in payload ? payload.kind : payload.detail ?? `status ${status}`,
    );
  }
}

export interface Client {
  createSession(body: {
    matrix?: MatrixDoc;
    residual?: { rank: number; index: number };
  }): Promise<{ id: string }>;
  getState(id: string): Promise<StateDoc>;
  getMoves(id: string): Promise<{ moves: MoveDoc[] }>;
  apply(id: string, root: number, exponent?: number): Promise<StateDoc>;
  undo(id: string): Promise<StateDoc>;
  listResidual(rank: number): Promise<{ rank: number; residual: ResidualEntry[] }>;
}

export class HttpClient implements Client {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const payload = await resp.json();
    if (!resp.ok) {
      throw new ServiceError(resp.status, payload);
    }
    return payload as T;
  }

  createSession(body: {
    matrix?: MatrixDoc;
    residual?: { rank: number; index: number };
  }): Promise<{ id: string }> {
    return this.request("/api/sessions", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getState(id: string): Promise<StateDoc> {
    return this.request(`/api/sessions/${id}/state`);
  }

  getMoves(id: string): Promise<{ moves: MoveDoc[] }> {
    return this.request(`/api/sessions/${id}/moves`);
  }

  apply(id: string, root: number, exponent?: number): Promise<StateDoc> {
    const body: { root: number; exponent?: number } = { root };
    if (exponent !== undefined) body.exponent = exponent;
    return this.request(`/api/sessions/${id}/apply`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  undo(id: string): Promise<StateDoc> {
    return this.request(`/api/sessions/${id}/undo`, { method: "POST" });
  }

  listResidual(rank: number): Promise<{ rank: number; residual: ResidualEntry[] }> {
    return this.request(`/api/residual?rank=${rank}`);
  }
}
