/*
 * Controller binding the API client to a View. All metric values flow
 * from server replies into render models; the controller never derives
 * numbers of its own. Mutations follow the stale-then-Run contract: a
 * line toggle creates a scenario carrying the full off-line set (one
 * request), reads stay stale until Run recomputes.
 */

import { AchillesReply, ApiClient, ApiError, Mutation, ZoneMetrics } from "./api.js";
import { PanelMode, Store, toggledOff } from "./state.js";
import {
  HeelHighlight,
  MapModel,
  OverlayModel,
  PanelModel,
  choroplethModel,
  heelOverlayModel,
  panelModel,
} from "./render.js";

export interface PanelSet {
  intensity: PanelModel;
  redundancy: PanelModel;
  connectivity: PanelModel;
}

export interface LineEntry {
  line: string;
  on: boolean;
}

/* The DOM adapter implements this; tests substitute a recorder. */
export interface View {
  renderMap(model: MapModel): void;
  renderPanels(panels: PanelSet, active: PanelMode): void;
  renderLineMenu(lines: LineEntry[]): void;
  renderOverlay(overlay: OverlayModel | null): void;
  showWitness(highlight: HeelHighlight | null): void;
  showBanner(message: string | null): void;
  setRunEnabled(enabled: boolean): void;
  setBusy(busy: boolean): void;
}

export class App {
  private zones: string[] = [];
  private lines: string[] = [];
  private values = new Map<string, number>();
  private metricsByZone = new Map<string, ZoneMetrics>();
  private overlay: OverlayModel | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly view: View,
    readonly store: Store = new Store(),
  ) {}

  /** Base-network bootstrap: zone/line universe, then a fresh base view. */
  async init(): Promise<void> {
    const index = await this.api.network();
    this.zones = index.zones;
    this.lines = index.layers;
    this.renderLineMenu();
    await this.refresh();
  }

  async toggleLine(line: string): Promise<void> {
    if (!this.lines.includes(line)) return; // unknown lines are not toggleable
    const prevOff = this.store.get().offLines;
    const nextOff = toggledOff(this.store.get(), line);
    this.store.patch({ offLines: nextOff });
    this.renderLineMenu();
    const mutations: Mutation[] = nextOff.map((l) => ({
      kind: "remove-layer",
      layer: l,
    }));
    try {
      const summary = await this.api.createScenario(mutations);
      this.store.patch({ scenarioId: summary.id, stale: summary.stale, banner: null });
      this.view.showBanner(null);
      this.view.setRunEnabled(true);
    } catch (err) {
      this.store.patch({ offLines: prevOff });
      this.renderLineMenu();
      this.banner(err);
    }
  }

  /** Recompute (when a scenario is active), then repaint everything. */
  async run(): Promise<void> {
    const state = this.store.get();
    if (state.busy) return; // one in-flight recompute at a time
    this.store.patch({ busy: true });
    this.view.setBusy(true);
    try {
      const scenario = state.scenarioId;
      if (scenario !== null) {
        await this.api.recompute(scenario);
      }
      await this.refresh();
      if (this.store.get().heelOverlay) {
        await this.fetchOverlay();
      }
      this.store.patch({ stale: false, banner: null });
      this.view.showBanner(null);
    } catch (err) {
      this.banner(err); // stale view stays on screen
    } finally {
      this.store.patch({ busy: false });
      this.view.setBusy(false);
    }
  }

  async revealHeels(): Promise<void> {
    if (this.store.get().stale) {
      this.store.patch({ banner: "scenario changed: press Run first" });
      this.view.showBanner("scenario changed: press Run first");
      return;
    }
    this.store.patch({ heelOverlay: true });
    try {
      await this.fetchOverlay();
      this.store.patch({ banner: null });
      this.view.showBanner(null);
    } catch (err) {
      this.store.patch({ heelOverlay: false });
      if (err instanceof ApiError && err.status === 409) {
        this.store.patch({ banner: "scenario changed: press Run first" });
        this.view.showBanner("scenario changed: press Run first");
        return;
      }
      this.banner(err);
    }
  }

  hideHeels(): void {
    this.overlay = null;
    this.store.patch({ heelOverlay: false });
    this.view.renderOverlay(null);
    this.renderMap();
  }

  selectZone(zone: string | null): void {
    this.store.patch({ selectedZone: zone });
    this.renderPanels();
  }

  setPanelMode(mode: PanelMode): void {
    this.store.patch({ panelMode: mode });
    this.renderPanels();
  }

  /** A click on a highlighted zone surfaces its witness. */
  inspectHighlight(zone: string): void {
    const hit = this.overlay?.highlights.find((h) => h.zone === zone) ?? null;
    this.view.showWitness(hit);
  }

  private scenarioParam(): string | undefined {
    return this.store.get().scenarioId ?? undefined;
  }

  /** Refetch every zone's metrics for the active scenario and repaint. */
  private async refresh(): Promise<void> {
    const scenario = this.scenarioParam();
    const fetched = await Promise.all(
      this.zones.map(async (zone) => {
        try {
          return [zone, await this.api.zoneMetrics(zone, scenario)] as const;
        } catch (err) {
          if (err instanceof ApiError && err.status === 404) {
            return [zone, null] as const; // absent zones render neutral
          }
          throw err;
        }
      }),
    );
    this.values = new Map();
    this.metricsByZone = new Map();
    for (const [zone, metrics] of fetched) {
      if (metrics === null) continue;
      this.values.set(zone, metrics.mean_connectivity);
      this.metricsByZone.set(zone, metrics);
    }
    this.renderMap();
    this.renderPanels();
  }

  private async fetchOverlay(): Promise<void> {
    const reply: AchillesReply = await this.api.achilles(this.scenarioParam());
    this.overlay = heelOverlayModel(reply);
    this.view.renderOverlay(this.overlay);
    this.renderMap();
  }

  private renderMap(): void {
    const highlighted = new Set(
      this.store.get().heelOverlay && this.overlay
        ? this.overlay.highlights.map((h) => h.zone)
        : [],
    );
    this.view.renderMap(choroplethModel(this.zones, this.values, highlighted));
  }

  private renderPanels(): void {
    const state = this.store.get();
    const zone = state.selectedZone;
    const metrics = zone === null ? null : this.metricsByZone.get(zone) ?? null;
    const panels: PanelSet = {
      intensity: panelModel(zone, metrics, "intensity"),
      redundancy: panelModel(zone, metrics, "redundancy"),
      connectivity: panelModel(zone, metrics, "connectivity"),
    };
    this.view.renderPanels(panels, state.panelMode);
  }

  private renderLineMenu(): void {
    const off = new Set(this.store.get().offLines);
    this.view.renderLineMenu(this.lines.map((line) => ({ line, on: !off.has(line) })));
  }

  private banner(err: unknown): void {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    this.store.patch({ banner: message });
    this.view.showBanner(message);
  }
}
