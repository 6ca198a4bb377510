// Wire types mirroring the pattern-report JSON served by the backend.

export interface ModeInfo {
  name: string;
  kind: string;
  size: number;
  labels: string[];
}

export interface ReportPattern {
  index: number;
  ids: number[];
  labels: string[];
  weight: number;
  site_count: number;
}

export interface SiteRow {
  site_id: string;
  lat: number;
  lon: number;
  pattern: number;
  cell: number[];
}

export interface PatternReport {
  version: number;
  run_id: string;
  dataset: string;
  modes: ModeInfo[];
  patterns: ReportPattern[];
  sites: SiteRow[];
  n_sites: number;
  diagnostics: string[];
}

export interface ExtractResponse {
  run_id: string;
  status: string;
  report: PatternReport;
}

export interface RadarPolygon {
  axes: string[];
  values: number[]; // per-axis, normalized into (0, 1]
  color: string;
  siteCount: number;
  patternIndex: number;
}

export interface MapMarker {
  lat: number;
  lon: number;
  pattern: number;
  color: string;
  siteId: string;
}
