// Thin typed client for the workbench API. All numbers shown in the UI come
// from these responses; the client performs no rating or AHP math.

import type {
  CaseDoc,
  HeatmapDoc,
  IterationDoc,
  MatrixDoc,
  RegisterDoc,
  SessionDoc,
  StepName,
  TieGroupDoc,
  WhatIfDoc,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details: Record<string, unknown> = {},
  ) {
    super(message);
  }

  get isStaleRevision(): boolean {
    return this.code === "StaleRevision";
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : {};
    if (!response.ok) {
      const code = typeof parsed.code === "string" ? parsed.code : `HTTP${response.status}`;
      const message = typeof parsed.message === "string" ? parsed.message : response.statusText;
      throw new ApiError(response.status, code, message, parsed.details ?? {});
    }
    return parsed as T;
  }

  getRegister(): Promise<RegisterDoc> {
    return this.request("GET", "/register");
  }

  getCases(): Promise<{ revision: number; cases: CaseDoc[] }> {
    return this.request("GET", "/cases");
  }

  getCase(caseId: number): Promise<{ revision: number; case: CaseDoc }> {
    return this.request("GET", `/cases/${caseId}`);
  }

  getMatrix(): Promise<{ revision: number; matrix: MatrixDoc }> {
    return this.request("GET", "/matrix");
  }

  getHeatmap(): Promise<HeatmapDoc> {
    return this.request("GET", "/reports/heatmap?format=json");
  }

  getTies(levels?: string): Promise<{ revision: number; groups: TieGroupDoc[] }> {
    const query = levels ? `?levels=${encodeURIComponent(levels)}` : "";
    return this.request("GET", `/ties${query}`);
  }

  whatIf(caseId: number, likelihood: string, severity: string): Promise<WhatIfDoc> {
    const params = new URLSearchParams({
      case: String(caseId),
      likelihood,
      severity,
    });
    return this.request("GET", `/whatif?${params}`);
  }

  createCase(
    payload: Record<string, unknown>,
    revision: number,
  ): Promise<{ revision: number; case: CaseDoc }> {
    return this.request("POST", "/cases", { ...payload, revision });
  }

  recordStep(
    caseId: number,
    step: StepName,
    payload: Record<string, unknown>,
    revision: number,
  ): Promise<{ revision: number; case: CaseDoc; rating?: string }> {
    return this.request("POST", `/cases/${caseId}/steps/${step.toLowerCase()}`, {
      ...payload,
      revision,
    });
  }

  openIteration(
    cadenceDays: number,
    revision: number,
  ): Promise<{ revision: number; iteration: IterationDoc; warning: string | null }> {
    return this.request("POST", "/iterations", { cadence_days: cadenceDays, revision });
  }

  closeIteration(
    overrides: { case_id: number; justification: string }[],
    revision: number,
  ): Promise<{ revision: number; iteration: IterationDoc }> {
    return this.request("POST", "/iterations/close", { overrides, revision });
  }

  createSession(
    cases: number[],
    criteria: string[],
    revision: number,
  ): Promise<{ revision: number; session: SessionDoc }> {
    return this.request("POST", "/ahp/sessions", { cases, criteria, revision });
  }

  getSession(sessionId: number): Promise<{ revision: number; session: SessionDoc }> {
    return this.request("GET", `/ahp/sessions/${sessionId}`);
  }

  getSessions(): Promise<{ revision: number; sessions: SessionDoc[] }> {
    return this.request("GET", "/ahp/sessions");
  }

  judge(
    sessionId: number,
    matrix: string,
    i: number, // 1-based upper-triangle indices
    j: number,
    value: string,
    revision: number,
  ): Promise<{ revision: number; session: SessionDoc }> {
    return this.request("PUT", `/ahp/sessions/${sessionId}/judgments`, {
      matrix,
      i,
      j,
      value,
      revision,
    });
  }

  completeSession(
    sessionId: number,
    overrides: Record<string, string>,
    revision: number,
  ): Promise<{ revision: number; session: SessionDoc }> {
    return this.request("POST", `/ahp/sessions/${sessionId}/complete`, { overrides, revision });
  }
}
