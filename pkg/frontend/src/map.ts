import { patternColor } from './colors.js';
import type { MapMarker, PatternReport } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';
const SIZE = 420;
const PAD = 16;

export function buildMarkers(report: PatternReport): MapMarker[] {
  return report.sites.map((s) => ({
    lat: s.lat,
    lon: s.lon,
    pattern: s.pattern,
    color: patternColor(s.pattern),
    siteId: s.site_id,
  }));
}

function projector(markers: MapMarker[]) {
  const lats = markers.map((m) => m.lat);
  const lons = markers.map((m) => m.lon);
  const latMin = Math.min(...lats);
  const latMax = Math.max(...lats);
  const lonMin = Math.min(...lons);
  const lonMax = Math.max(...lons);
  const span = (lo: number, hi: number) => (hi - lo === 0 ? 1 : hi - lo);
  return (m: MapMarker): [number, number] => [
    PAD + ((m.lon - lonMin) / span(lonMin, lonMax)) * (SIZE - 2 * PAD),
    // north up: higher latitude renders higher
    SIZE - PAD - ((m.lat - latMin) / span(latMin, latMax)) * (SIZE - 2 * PAD),
  ];
}

/** Scatter of sites colored by pattern; a selected pattern filters the
 * markers to exactly its sites, deselecting restores the full set. */
export function renderMapView(
  root: HTMLElement,
  markers: MapMarker[],
  selected: number | null,
): void {
  root.textContent = '';
  const visible =
    selected === null ? markers : markers.filter((m) => m.pattern === selected);
  if (visible.length === 0) {
    const empty = document.createElement('div');
    empty.className = 'map-empty';
    empty.textContent =
      selected === null
        ? 'no sites to show'
        : `pattern ${selected} has no sites`;
    root.appendChild(empty);
    return;
  }
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', `0 0 ${SIZE} ${SIZE}`);
  svg.setAttribute('width', String(SIZE));
  svg.setAttribute('height', String(SIZE));
  svg.setAttribute('class', 'map-canvas');
  const project = projector(markers); // frame fixed by the full marker set
  for (const marker of visible) {
    const [x, y] = project(marker);
    const dot = document.createElementNS(SVG_NS, 'circle');
    dot.setAttribute('cx', x.toFixed(2));
    dot.setAttribute('cy', y.toFixed(2));
    dot.setAttribute('r', '4');
    dot.setAttribute('fill', marker.color);
    dot.setAttribute('class', 'map-marker');
    dot.dataset.pattern = String(marker.pattern);
    dot.dataset.siteId = marker.siteId;
    const tooltip = document.createElementNS(SVG_NS, 'title');
    tooltip.textContent = `${marker.siteId} (pattern ${marker.pattern})`;
    dot.appendChild(tooltip);
    svg.appendChild(dot);
  }
  root.appendChild(svg);
}
