/** Thin typed client for the prediction service. Rejections (4xx with an
 * `accepted`/`reason` body) are returned as values so the UI can show them
 * inline; transport failures and unexpected statuses throw. */

import type {
  CaseResponse,
  EventPayload,
  GoalsResponse,
  IngestResponse,
  PredictionResponse,
  RecommendationResponse,
  Scalar,
  SchemaResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

/** The service surface the console consumes. */
export interface ServiceApi {
  getCase(caseId: string): Promise<CaseResponse>;
  postEvent(caseId: string, payload: EventPayload): Promise<IngestResponse>;
  getPrediction(caseId: string, goal: string): Promise<PredictionResponse>;
  getRecommendation(caseId: string, goal: string): Promise<RecommendationResponse>;
  postWhatIf(
    caseId: string,
    goal: string,
    attributes: Record<string, Scalar | null>,
  ): Promise<PredictionResponse>;
  getSchema(): Promise<SchemaResponse>;
  getGoals(): Promise<GoalsResponse>;
}

export class ApiClient implements ServiceApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.url(path));
    const body = await response.json();
    if (!response.ok) {
      throw new ServiceError(body.error ?? response.statusText, response.status);
    }
    return body as T;
  }

  private async sendJson<T>(method: string, path: string, payload: unknown): Promise<T> {
    const response = await this.fetchFn(this.url(path), {
      method,
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    const body = await response.json();
    if (!response.ok && body.accepted === undefined) {
      throw new ServiceError(body.error ?? response.statusText, response.status);
    }
    return body as T;
  }

  getCase(caseId: string): Promise<CaseResponse> {
    return this.getJson(`/cases/${encodeURIComponent(caseId)}`);
  }

  postEvent(caseId: string, payload: EventPayload): Promise<IngestResponse> {
    return this.sendJson("POST", `/cases/${encodeURIComponent(caseId)}/events`, payload);
  }

  endCase(caseId: string): Promise<{ closed: boolean }> {
    return this.sendJson("POST", `/cases/${encodeURIComponent(caseId)}/end`, {});
  }

  getPrediction(caseId: string, goal: string): Promise<PredictionResponse> {
    return this.getJson(
      `/cases/${encodeURIComponent(caseId)}/prediction?goal=${encodeURIComponent(goal)}`,
    );
  }

  getRecommendation(caseId: string, goal: string): Promise<RecommendationResponse> {
    return this.getJson(
      `/cases/${encodeURIComponent(caseId)}/recommendation?goal=${encodeURIComponent(goal)}`,
    );
  }

  postWhatIf(
    caseId: string,
    goal: string,
    attributes: Record<string, Scalar | null>,
  ): Promise<PredictionResponse> {
    return this.sendJson(
      "POST",
      `/cases/${encodeURIComponent(caseId)}/whatif?goal=${encodeURIComponent(goal)}`,
      { attributes },
    );
  }

  getSchema(): Promise<SchemaResponse> {
    return this.getJson("/schema");
  }

  getGoals(): Promise<GoalsResponse> {
    return this.getJson("/goals");
  }
}
