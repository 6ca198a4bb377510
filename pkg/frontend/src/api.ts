import type { ExtractResponse, SiteRow } from './types.js';

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly code?: string,
  ) {
    super(message);
  }
}

async function asJson(resp: Response): Promise<any> {
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    const err = body?.error ?? {};
    throw new ApiError(err.message ?? `HTTP ${resp.status}`, resp.status, err.code);
  }
  return body;
}

/** Thin client over the extraction service's JSON API. */
export class ApiClient {
  constructor(readonly baseUrl: string = '') {}

  async listDatasets(): Promise<string[]> {
    const body = await asJson(await fetch(`${this.baseUrl}/api/datasets`));
    return body.datasets ?? [];
  }

  async extract(
    dataset: string,
    rank: number,
    clusters: number,
    seed = 0,
  ): Promise<ExtractResponse> {
    const resp = await fetch(`${this.baseUrl}/api/extract`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ dataset, rank, clusters, seed }),
    });
    return asJson(resp);
  }

  async sites(runId: string, pattern?: number): Promise<SiteRow[]> {
    const suffix = pattern === undefined ? '' : `&pattern=${pattern}`;
    const resp = await fetch(
      `${this.baseUrl}/api/sites?run=${encodeURIComponent(runId)}${suffix}`,
    );
    return (await asJson(resp)).sites ?? [];
  }
}
