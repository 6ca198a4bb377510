import { ApiClient } from './api.js';
import { buildMarkers, renderMapView } from './map.js';
import { buildRadarPolygons, renderPatternsView } from './radar.js';
import type { PatternReport } from './types.js';

interface AppState {
  datasets: string[];
  dataset: string | null;
  rank: number;
  clusters: number;
  report: PatternReport | null;
  selectedPattern: number | null;
  busy: boolean;
  error: string | null;
  requestToken: number;
}

/** Control menu + map view + patterns view, wired to the extraction API.
 * Every parameter change triggers a re-extraction; only the newest
 * in-flight response is applied (stale ones are dropped by token). */
export class ExplorerApp {
  readonly state: AppState = {
    datasets: [],
    dataset: null,
    rank: 3,
    clusters: 3,
    report: null,
    selectedPattern: null,
    busy: false,
    error: null,
    requestToken: 0,
  };

  private controls: HTMLElement;
  private status: HTMLElement;
  private mapRoot: HTMLElement;
  private patternsRoot: HTMLElement;

  constructor(
    readonly root: HTMLElement,
    readonly client: ApiClient,
  ) {
    root.textContent = '';
    this.controls = this.section('control-menu');
    this.status = this.section('status-bar');
    const views = document.createElement('div');
    views.className = 'views';
    this.mapRoot = document.createElement('div');
    this.mapRoot.className = 'map-view';
    this.patternsRoot = document.createElement('div');
    this.patternsRoot.className = 'patterns-view';
    views.append(this.mapRoot, this.patternsRoot);
    root.appendChild(views);
  }

  private section(className: string): HTMLElement {
    const el = document.createElement('div');
    el.className = className;
    this.root.appendChild(el);
    return el;
  }

  async start(): Promise<void> {
    this.state.datasets = await this.client.listDatasets();
    this.state.dataset = this.state.datasets[0] ?? null;
    this.renderControls();
    this.renderStatus();
    if (this.state.dataset) {
      await this.extract();
    }
  }

  /** Validate and apply a control change; invalid values never reach the
   * service. */
  async controlChange(
    patch: Partial<Pick<AppState, 'dataset' | 'rank' | 'clusters'>>,
  ): Promise<void> {
    const rank = patch.rank ?? this.state.rank;
    const clusters = patch.clusters ?? this.state.clusters;
    if (!Number.isInteger(rank) || rank < 1) {
      this.state.error = `rank must be a positive integer, got ${rank}`;
      this.renderStatus();
      return;
    }
    if (!Number.isInteger(clusters) || clusters < 1) {
      this.state.error = `clusters must be a positive integer, got ${clusters}`;
      this.renderStatus();
      return;
    }
    Object.assign(this.state, patch);
    await this.extract();
  }

  async extract(): Promise<void> {
    if (!this.state.dataset) {
      return;
    }
    const token = ++this.state.requestToken;
    this.state.busy = true;
    this.state.error = null;
    this.renderStatus();
    try {
      const resp = await this.client.extract(
        this.state.dataset,
        this.state.rank,
        this.state.clusters,
      );
      if (token !== this.state.requestToken) {
        return; // superseded by a newer request
      }
      this.state.report = resp.report;
      this.state.selectedPattern = null;
    } catch (err) {
      if (token !== this.state.requestToken) {
        return;
      }
      // keep the previous report on screen, surface the failure inline
      this.state.error = err instanceof Error ? err.message : String(err);
    } finally {
      if (token === this.state.requestToken) {
        this.state.busy = false;
        this.renderStatus();
        this.renderViews();
      }
    }
  }

  selectPattern(index: number): void {
    this.state.selectedPattern =
      this.state.selectedPattern === index ? null : index;
    this.renderViews();
  }

  renderViews(): void {
    const report = this.state.report;
    if (!report) {
      return;
    }
    renderMapView(
      this.mapRoot,
      buildMarkers(report),
      this.state.selectedPattern,
    );
    renderPatternsView(
      this.patternsRoot,
      buildRadarPolygons(report),
      this.state.selectedPattern,
      (i) => this.selectPattern(i),
    );
  }

  private renderControls(): void {
    this.controls.textContent = '';
    const select = document.createElement('select');
    select.className = 'control-dataset';
    for (const name of this.state.datasets) {
      const option = document.createElement('option');
      option.value = name;
      option.textContent = name;
      select.appendChild(option);
    }
    select.addEventListener('change', () => {
      void this.controlChange({ dataset: select.value });
    });
    const rank = this.numberInput('control-rank', this.state.rank, (v) => {
      void this.controlChange({ rank: v });
    });
    const clusters = this.numberInput(
      'control-clusters',
      this.state.clusters,
      (v) => {
        void this.controlChange({ clusters: v });
      },
    );
    this.controls.append(
      this.labeled('dataset', select),
      this.labeled('core rank', rank),
      this.labeled('pattern clusters', clusters),
    );
  }

  private numberInput(
    className: string,
    value: number,
    onChange: (v: number) => void,
  ): HTMLInputElement {
    const input = document.createElement('input');
    input.type = 'number';
    input.min = '1';
    input.step = '1';
    input.className = className;
    input.value = String(value);
    input.addEventListener('change', () => onChange(Number(input.value)));
    return input;
  }

  private labeled(text: string, control: HTMLElement): HTMLElement {
    const wrap = document.createElement('label');
    wrap.className = 'control-field';
    const span = document.createElement('span');
    span.textContent = text;
    wrap.append(span, control);
    return wrap;
  }

  private renderStatus(): void {
    this.status.textContent = '';
    if (this.state.busy) {
      const busy = document.createElement('span');
      busy.className = 'busy-indicator';
      busy.textContent = 'extracting…';
      this.status.appendChild(busy);
    }
    if (this.state.error) {
      const error = document.createElement('span');
      error.className = 'error-box';
      error.textContent = this.state.error;
      this.status.appendChild(error);
    }
  }
}
