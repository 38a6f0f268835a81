/**
 * Typed client for the /v1 API.
 *
 * Every request goes through one guard that refuses any URL whose
 * origin differs from the configured service base, so posture data can
 * only ever travel to the loopback service the page was configured
 * with.
 */

import type {
  BaselinePayload,
  ForecastPayload,
  LecResponse,
  ModelPayload,
  Posture,
  PostureChange,
  WhatIfResponse,
} from "./types";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly origin: string;

  constructor(
    baseUrl: string = window.location.origin,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {
    this.origin = new URL(baseUrl).origin;
  }

  /** Resolve a path against the base and refuse foreign origins. */
  private guardedUrl(path: string): string {
    const url = new URL(path, this.origin);
    if (url.origin !== this.origin) {
      throw new ApiError(0, `refusing request to foreign origin ${url.origin}`);
    }
    return url.toString();
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.guardedUrl(path), init);
    let body: unknown;
    try {
      body = await response.json();
    } catch {
      throw new ApiError(response.status, `service returned a non-JSON response`);
    }
    if (!response.ok) {
      const message =
        typeof body === "object" && body !== null && "error" in body
          ? String((body as { error: { message?: string } }).error.message ?? "request failed")
          : "request failed";
      throw new ApiError(response.status, message);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  getModel(): Promise<ModelPayload> {
    return this.request<ModelPayload>("/v1/model");
  }

  getBaseline(): Promise<BaselinePayload> {
    return this.request<BaselinePayload>("/v1/baseline");
  }

  getLec(thresholdsUsd: number[]): Promise<LecResponse> {
    const parameter = thresholdsUsd.join(",");
    return this.request<LecResponse>(`/v1/lec?thresholds=${parameter}`);
  }

  postForecast(maturities: Posture): Promise<ForecastPayload> {
    return this.post<ForecastPayload>("/v1/forecast", { maturities });
  }

  postWhatIf(
    maturities: Posture,
    variants: { changes: PostureChange[] }[],
  ): Promise<WhatIfResponse> {
    return this.post<WhatIfResponse>("/v1/whatif", { maturities, variants });
  }
}
