/** Typed client for the engine service. Every successful call returns the
 * parsed body alongside a RawDoc so panes can render verbatim tokens. */

import { RawDoc } from "./rawjson";
import type {
  ComparisonDoc,
  EditDoc,
  EquilibriumDoc,
  HealthDoc,
  JobDoc,
  MatrixDoc,
  ScenarioDoc,
  ScoreDoc,
  SweepResultDoc,
  ViolationDoc,
} from "./types";

export interface ApiResult<T> {
  status: number;
  data: T;
  raw: RawDoc;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: ViolationDoc[] = [],
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface SweepAxisDoc {
  name: string;
  values: (number | string)[];
}

export class ServiceClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  health(): Promise<ApiResult<HealthDoc>> {
    return this.request("GET", "/health");
  }

  createScenario(doc: ScenarioDoc): Promise<ApiResult<{ id: string }>> {
    return this.request("POST", "/scenarios", doc);
  }

  getScenario(id: string): Promise<ApiResult<ScenarioDoc>> {
    return this.request("GET", `/scenarios/${id}`);
  }

  listScenarios(): Promise<ApiResult<{ scenarios: string[] }>> {
    return this.request("GET", "/scenarios");
  }

  matrix(id: string, signal?: AbortSignal): Promise<ApiResult<MatrixDoc>> {
    return this.request("POST", `/scenarios/${id}/matrix`, undefined, signal);
  }

  equilibrium(id: string, body: object = {}, signal?: AbortSignal): Promise<ApiResult<EquilibriumDoc>> {
    return this.request("POST", `/scenarios/${id}/equilibrium`, body, signal);
  }

  counterfactual(id: string, edit: EditDoc, signal?: AbortSignal): Promise<ApiResult<ComparisonDoc>> {
    return this.request("POST", `/scenarios/${id}/counterfactual`, edit, signal);
  }

  score(id: string, body: object = {}, signal?: AbortSignal): Promise<ApiResult<ScoreDoc>> {
    return this.request("POST", `/scenarios/${id}/score`, body, signal);
  }

  startSweep(id: string, axes: SweepAxisDoc[], settings?: object): Promise<ApiResult<{ job_id: string }>> {
    const body: Record<string, unknown> = { axes };
    if (settings) body.settings = settings;
    return this.request("POST", `/scenarios/${id}/sweep`, body);
  }

  getJob(jobId: string): Promise<ApiResult<JobDoc>> {
    return this.request("GET", `/jobs/${jobId}`);
  }

  getResult(resultId: string): Promise<ApiResult<SweepResultDoc>> {
    return this.request("GET", `/results/${resultId}`);
  }

  /** Poll a sweep job until done/failed; reports progress along the way. */
  async pollJob(
    jobId: string,
    opts: { intervalMs?: number; timeoutMs?: number; onProgress?: (job: JobDoc) => void } = {},
  ): Promise<JobDoc> {
    const interval = opts.intervalMs ?? 250;
    const deadline = Date.now() + (opts.timeoutMs ?? 120_000);
    for (;;) {
      const { data: job } = await this.getJob(jobId);
      opts.onProgress?.(job);
      if (job.state === "done") return job;
      if (job.state === "failed") throw new ApiError(500, "job_failed", job.error ?? "sweep job failed");
      if (Date.now() > deadline) throw new ApiError(408, "job_timeout", `job ${jobId} still ${job.state}`);
      await sleep(interval);
    }
  }

  private async request<T>(method: string, path: string, body?: unknown, signal?: AbortSignal): Promise<ApiResult<T>> {
    const init: RequestInit = { method, signal: signal ?? null };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    if (!response.ok) {
      let code = "error";
      let message = text || response.statusText;
      let details: ViolationDoc[] = [];
      try {
        const parsed = JSON.parse(text) as { code?: string; message?: string; details?: ViolationDoc[] };
        code = parsed.code ?? code;
        message = parsed.message ?? message;
        details = parsed.details ?? [];
      } catch {
        // non-JSON error body: keep raw text as the message
      }
      throw new ApiError(response.status, code, message, details);
    }
    const raw = new RawDoc(text);
    return { status: response.status, data: raw.value as T, raw };
  }
}

/** One in-flight request per pane: beginning a new request aborts the old. */
export class LatestRequest {
  private controller: AbortController | null = null;

  begin(): AbortSignal {
    this.controller?.abort();
    this.controller = new AbortController();
    return this.controller.signal;
  }

  cancel(): void {
    this.controller?.abort();
    this.controller = null;
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
