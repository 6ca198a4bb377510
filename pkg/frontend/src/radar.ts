import { patternColor } from './colors.js';
import type { PatternReport, RadarPolygon } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';
const SIZE = 160;
const CENTER = SIZE / 2;
const RADIUS = SIZE / 2 - 18;

/** One polygon per pattern; axis k is the signature ID scaled by the mode
 * size, so every value lands in (0, 1]. */
export function buildRadarPolygons(report: PatternReport): RadarPolygon[] {
  const axes = report.modes.map((m) => m.name);
  return report.patterns.map((p) => ({
    axes,
    values: p.ids.map((id, k) => id / report.modes[k]!.size),
    color: patternColor(p.index),
    siteCount: p.site_count,
    patternIndex: p.index,
  }));
}

function vertex(angleIndex: number, total: number, r: number): [number, number] {
  const angle = (2 * Math.PI * angleIndex) / total - Math.PI / 2;
  return [CENTER + r * Math.cos(angle), CENTER + r * Math.sin(angle)];
}

function radarSvg(polygon: RadarPolygon, selected: boolean): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', `0 0 ${SIZE} ${SIZE}`);
  svg.setAttribute('width', String(SIZE));
  svg.setAttribute('height', String(SIZE));
  const n = polygon.axes.length;
  for (const frac of [1.0, 0.5]) {
    const grid = document.createElementNS(SVG_NS, 'polygon');
    grid.setAttribute(
      'points',
      polygon.axes
        .map((_, k) => vertex(k, n, RADIUS * frac).join(','))
        .join(' '),
    );
    grid.setAttribute('class', 'radar-grid');
    grid.setAttribute('fill', 'none');
    grid.setAttribute('stroke', '#ccc');
    svg.appendChild(grid);
  }
  const shape = document.createElementNS(SVG_NS, 'polygon');
  shape.setAttribute(
    'points',
    polygon.values
      .map((v, k) => vertex(k, n, RADIUS * v).join(','))
      .join(' '),
  );
  shape.setAttribute('class', 'radar-polygon');
  shape.setAttribute('fill', polygon.color);
  shape.setAttribute('fill-opacity', selected ? '0.6' : '0.3');
  shape.setAttribute('stroke', polygon.color);
  shape.dataset.pattern = String(polygon.patternIndex);
  svg.appendChild(shape);
  polygon.axes.forEach((name, k) => {
    const [x, y] = vertex(k, n, RADIUS + 9);
    const label = document.createElementNS(SVG_NS, 'text');
    label.setAttribute('x', String(x));
    label.setAttribute('y', String(y));
    label.setAttribute('class', 'radar-axis-label');
    label.setAttribute('text-anchor', 'middle');
    label.setAttribute('font-size', '7');
    label.textContent = name;
    svg.appendChild(label);
  });
  return svg;
}

/** Render every pattern as a selectable radar card. */
export function renderPatternsView(
  root: HTMLElement,
  polygons: RadarPolygon[],
  selected: number | null,
  onSelect: (pattern: number) => void,
): void {
  root.textContent = '';
  for (const polygon of polygons) {
    const card = document.createElement('div');
    card.className =
      'pattern-card' + (selected === polygon.patternIndex ? ' selected' : '');
    card.dataset.pattern = String(polygon.patternIndex);
    card.appendChild(radarSvg(polygon, selected === polygon.patternIndex));
    const caption = document.createElement('div');
    caption.className = 'pattern-caption';
    caption.textContent =
      `pattern ${polygon.patternIndex} — ${polygon.siteCount} sites`;
    card.appendChild(caption);
    card.addEventListener('click', () => onSelect(polygon.patternIndex));
    root.appendChild(card);
  }
}
