/** Thin typed client for the reqrank HTTP API.

The client performs no domain computation: it serializes requests,
deserializes responses, and converts the server's error envelope
into ApiError. Every number the UI shows originates in a response.
*/

import type {
  AddRequirementsResponse,
  CreateProjectRequest,
  IncorporateOptions,
  IncorporateResponse,
  LikelihoodsResponse,
  PutRatingsResponse,
  RankingResponse,
  RatingInput,
  ReportResponse,
  RequirementInput,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly field: string | null;

  constructor(status: number, code: string, message: string, field: string | null) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.field = field;
  }

  /** Stale expected_revision; the caller should reload before retrying. */
  get isConflict(): boolean {
    return this.status === 409;
  }
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (!response.ok) {
      const envelope = (payload as { error?: { code?: string; message?: string; field?: string | null } } | null)?.error;
      throw new ApiError(
        response.status,
        envelope?.code ?? "http_error",
        envelope?.message ?? `HTTP ${response.status}`,
        envelope?.field ?? null,
      );
    }
    return payload as T;
  }

  createProject(body: CreateProjectRequest): Promise<RankingResponse> {
    return this.request("POST", "/projects", body);
  }

  getRanking(projectId: string): Promise<RankingResponse> {
    return this.request("GET", `/projects/${encodeURIComponent(projectId)}/ranking`);
  }

  addRequirements(
    projectId: string,
    requirements: RequirementInput[],
    expectedRevision?: number,
  ): Promise<AddRequirementsResponse> {
    return this.request("POST", `/projects/${encodeURIComponent(projectId)}/requirements`, {
      requirements,
      ...(expectedRevision === undefined ? {} : { expected_revision: expectedRevision }),
    });
  }

  putRatings(
    projectId: string,
    ratings: RatingInput[],
    expectedRevision?: number,
  ): Promise<PutRatingsResponse> {
    return this.request("PUT", `/projects/${encodeURIComponent(projectId)}/ratings`, {
      ratings,
      ...(expectedRevision === undefined ? {} : { expected_revision: expectedRevision }),
    });
  }

  getLikelihoods(projectId: string, requirementId: string): Promise<LikelihoodsResponse> {
    const pid = encodeURIComponent(projectId);
    const rid = encodeURIComponent(requirementId);
    return this.request("GET", `/projects/${pid}/requirements/${rid}/likelihoods`);
  }

  incorporate(projectId: string, options: IncorporateOptions = {}): Promise<IncorporateResponse> {
    return this.request("POST", `/projects/${encodeURIComponent(projectId)}/incorporate`, options);
  }

  getReport(projectId: string): Promise<ReportResponse> {
    return this.request("GET", `/projects/${encodeURIComponent(projectId)}/report`);
  }
}
