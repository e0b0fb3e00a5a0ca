/**
 * Thin typed client for the risk service. All service access goes through
 * this module; nothing else in the UI talks to the network.
 */

import type {
  ActionPayload,
  AssessResponse,
  CommitResponse,
  DeltaPayload,
  GraphPayload,
  PropagateResponse,
  RootCausesResponse,
  SnapshotListResponse,
  SnapshotPayload,
  WhatifResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

interface AssessOptions {
  thresholds?: Record<string, number>;
  topK?: number;
  perspective?: string;
  concept?: string;
}

function query(params: Record<string, string | number | undefined>): string {
  const parts = Object.entries(params)
    .filter(([, v]) => v !== undefined)
    .map(([k, v]) => `${encodeURIComponent(k)}=${encodeURIComponent(String(v))}`);
  return parts.length ? `?${parts.join("&")}` : "";
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const detail =
        body && typeof body.detail === "string"
          ? body.detail
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: payload === undefined ? "POST" : "POST",
      headers: { "content-type": "application/json" },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
  }

  putModel(modelId: string, model: unknown): Promise<{ version: number }> {
    return this.request(`/models/${encodeURIComponent(modelId)}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(model),
    });
  }

  getGraph(modelId: string): Promise<GraphPayload> {
    return this.request(`/models/${encodeURIComponent(modelId)}/graph`);
  }

  propagate(
    modelId: string,
    options: { snapshot?: boolean; label?: string } = {},
  ): Promise<PropagateResponse> {
    const q = query({
      snapshot: options.snapshot ? "true" : undefined,
      label: options.label,
    });
    return this.post(`/models/${encodeURIComponent(modelId)}/propagate${q}`, undefined);
  }

  assess(modelId: string, options: AssessOptions = {}): Promise<AssessResponse> {
    const params: Record<string, string | number | undefined> = {
      top_k: options.topK,
      perspective: options.perspective,
      concept: options.concept,
    };
    for (const [name, value] of Object.entries(options.thresholds ?? {})) {
      params[`threshold.${name}`] = value;
    }
    return this.request(`/models/${encodeURIComponent(modelId)}/assess${query(params)}`);
  }

  rootCauses(
    modelId: string,
    nodeId: string,
    perspective?: string,
  ): Promise<RootCausesResponse> {
    const q = query({ perspective });
    return this.request(
      `/models/${encodeURIComponent(modelId)}/nodes/${encodeURIComponent(nodeId)}/root-causes${q}`,
    );
  }

  whatif(modelId: string, actions: ActionPayload[]): Promise<WhatifResponse> {
    return this.post(`/models/${encodeURIComponent(modelId)}/whatif`, { actions });
  }

  commit(
    modelId: string,
    actions: ActionPayload[],
    version: number,
  ): Promise<CommitResponse> {
    return this.post(`/models/${encodeURIComponent(modelId)}/whatif/commit`, {
      actions,
      version,
    });
  }

  listSnapshots(): Promise<SnapshotListResponse> {
    return this.request("/snapshots");
  }

  getSnapshot(snapshotId: string): Promise<SnapshotPayload> {
    return this.request(`/snapshots/${encodeURIComponent(snapshotId)}`);
  }

  diffSnapshots(idA: string, idB: string): Promise<DeltaPayload> {
    return this.request(
      `/snapshots/${encodeURIComponent(idA)}/diff/${encodeURIComponent(idB)}`,
    );
  }
}
