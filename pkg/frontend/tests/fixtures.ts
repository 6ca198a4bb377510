import type { ExtractResponse, PatternReport } from '../src/types.js';

const MODE_NAMES = [
  'crime_a', 'crime_a_period', 'crime_b', 'crime_b_period',
  'social', 'bus', 'flow',
];
const MODE_SIZES = [4, 5, 4, 5, 4, 4, 4];

/** Deterministic 7-mode report with the requested number of patterns; site
 * counts differ per pattern so count assertions are meaningful. */
export function fixtureReport(clusters: number, rank = 3): PatternReport {
  const patterns = [];
  const sites = [];
  let siteSerial = 0;
  for (let p = 0; p < clusters; p++) {
    const ids = MODE_SIZES.map((size, k) => 1 + ((p + k) % size));
    const siteCount = 2 + p;
    patterns.push({
      index: p,
      ids,
      labels: ids.map((id, k) => `${MODE_NAMES[k]}=${id}`),
      weight: 100 - p,
      site_count: siteCount,
    });
    for (let s = 0; s < siteCount; s++) {
      sites.push({
        site_id: `s${String(siteSerial++).padStart(3, '0')}`,
        lat: -23.5 - 0.01 * p - 0.001 * s,
        lon: -46.6 - 0.01 * s,
        pattern: p,
        cell: ids.map((id) => id - 1),
      });
    }
  }
  return {
    version: 1,
    run_id: `fixture-${rank}-${clusters}`,
    dataset: 'fixture',
    modes: MODE_NAMES.map((name, k) => ({
      name,
      kind: 'binned-count',
      size: MODE_SIZES[k]!,
      labels: Array.from({ length: MODE_SIZES[k]! }, (_, i) => `b${i + 1}`),
    })),
    patterns,
    sites,
    n_sites: sites.length,
    diagnostics: [],
  };
}

export function fixtureExtractResponse(
  clusters: number,
  rank = 3,
): ExtractResponse {
  const report = fixtureReport(clusters, rank);
  return { run_id: report.run_id, status: 'done', report };
}

type FetchCall = { url: string; init?: RequestInit };

/** fetch stub playing a fixture extraction service; records every call. */
export function installFixtureService(options?: {
  failExtracts?: boolean;
  delayByCall?: number[];
}) {
  const calls: FetchCall[] = [];
  let extractCount = 0;
  const jsonResponse = (status: number, body: unknown) =>
    new Response(JSON.stringify(body), {
      status,
      headers: { 'Content-Type': 'application/json' },
    });

  const impl = async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    calls.push({ url, init });
    if (url.endsWith('/api/datasets')) {
      return jsonResponse(200, { datasets: ['fixture'], schema_version: 1 });
    }
    if (url.endsWith('/api/extract')) {
      const order = extractCount++;
      const delay = options?.delayByCall?.[order] ?? 0;
      if (delay) {
        await new Promise((resolve) => setTimeout(resolve, delay));
      }
      if (options?.failExtracts) {
        return jsonResponse(500, {
          error: { code: 'pipeline-failure', message: 'boom' },
        });
      }
      const body = JSON.parse(String(init?.body ?? '{}'));
      return jsonResponse(
        200,
        fixtureExtractResponse(body.clusters ?? 3, body.rank ?? 3),
      );
    }
    if (url.includes('/api/sites')) {
      const parsed = new URL(url, 'http://fixture');
      const run = parsed.searchParams.get('run') ?? '';
      const clusters = Number(run.split('-')[2] ?? 3);
      const report = fixtureReport(clusters);
      const pattern = parsed.searchParams.get('pattern');
      const sites =
        pattern === null
          ? report.sites
          : report.sites.filter((s) => s.pattern === Number(pattern));
      return jsonResponse(200, { run_id: run, sites, schema_version: 1 });
    }
    return jsonResponse(404, { error: { code: 'not-found', message: url } });
  };

  globalThis.fetch = impl as typeof fetch;
  return { calls };
}
