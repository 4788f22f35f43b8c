/*
 * Test doubles: a routing fake for the fetch seam and a recording View.
 * The fake serves a small two-line corridor fixture; the interesting
 * assertion everywhere is that what the View receives equals what the
 * fake served, byte for byte.
 */

import { FetchLike } from "../src/api.js";
import { HeelHighlight, MapModel, OverlayModel, PanelModel } from "../src/render.js";
import { LineEntry, PanelSet, View } from "../src/app.js";
import { PanelMode } from "../src/state.js";

export interface Call {
  key: string; // "METHOD /path"
  url: URL;
  body: unknown;
}

export type Handler = (
  url: URL,
  body: unknown,
) => { status?: number; body: unknown };

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export class FakeServer {
  calls: Call[] = [];

  constructor(private readonly handlers: Record<string, Handler>) {}

  fetch: FetchLike = async (input, init) => {
    const url = new URL(input);
    const method = init?.method ?? "GET";
    const key = `${method} ${url.pathname}`;
    const body =
      typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    this.calls.push({ key, url, body });
    const handler = this.handlers[key];
    if (handler === undefined) {
      return jsonResponse(
        { status: 404, code: "no-route", message: `no route ${key}` },
        404,
      );
    }
    const reply = handler(url, body);
    return jsonResponse(reply.body, reply.status ?? 200);
  };

  callsSince(mark: number): Call[] {
    return this.calls.slice(mark);
  }
}

export class FakeView implements View {
  maps: MapModel[] = [];
  panelSets: { panels: PanelSet; active: PanelMode }[] = [];
  menus: LineEntry[][] = [];
  overlays: (OverlayModel | null)[] = [];
  witnesses: (HeelHighlight | null)[] = [];
  banners: (string | null)[] = [];
  runEnabled: boolean[] = [];
  busyStates: boolean[] = [];

  renderMap(model: MapModel): void {
    this.maps.push(model);
  }
  renderPanels(panels: PanelSet, active: PanelMode): void {
    this.panelSets.push({ panels, active });
  }
  renderLineMenu(lines: LineEntry[]): void {
    this.menus.push(lines);
  }
  renderOverlay(overlay: OverlayModel | null): void {
    this.overlays.push(overlay);
  }
  showWitness(highlight: HeelHighlight | null): void {
    this.witnesses.push(highlight);
  }
  showBanner(message: string | null): void {
    this.banners.push(message);
  }
  setRunEnabled(enabled: boolean): void {
    this.runEnabled.push(enabled);
  }
  setBusy(busy: boolean): void {
    this.busyStates.push(busy);
  }

  get lastMap(): MapModel {
    return this.maps[this.maps.length - 1];
  }
  get lastPanels(): { panels: PanelSet; active: PanelMode } {
    return this.panelSets[this.panelSets.length - 1];
  }
  get lastMenu(): LineEntry[] {
    return this.menus[this.menus.length - 1];
  }
  get lastBanner(): string | null {
    return this.banners[this.banners.length - 1];
  }
}

/* -- corridor fixture ----------------------------------------------------- */

export const ZONES = ["Z0", "Z1", "Z2", "Z3"];
export const LINES = ["east", "loop"];

// arbitrary but distinct numbers; tests only check pass-through
export const BASE_MEANS: Record<string, number> = {
  Z0: 4.25,
  Z1: 3.5,
  Z2: 6.75,
  Z3: 1.5,
};

export const SCENARIO_MEANS: Record<string, number> = {
  Z0: 2.0,
  Z1: 1.25,
  Z2: 3.5,
  Z3: 0.0,
};

export function zoneMetricsBody(zone: string, scenario: string): unknown {
  const means = scenario === "base" ? BASE_MEANS : SCENARIO_MEANS;
  return {
    zone,
    scenario,
    fingerprint: `fp-${scenario}`,
    heel:
      zone === "Z3"
        ? {
            zone,
            value: 2.0e6,
            witness: {
              layer: "loop",
              edge: ["Z2", "Z3", "loop"],
              disconnected: 2,
              min_connectivity: 1e-6,
            },
          }
        : null,
    relevance: { east: 0.5, loop: 0.25 },
    pairs: [
      {
        zone: "Z1",
        connectivity: means[zone],
        intensity: { east: 7.5, loop: 0.5 },
        redundancy: { east: 0.125, loop: 0.0 },
      },
    ],
    mean_connectivity: means[zone],
  };
}

export const RANKING = [
  {
    zone: "Z3",
    value: 2.0e6,
    witness: {
      layer: "loop",
      edge: ["Z2", "Z3", "loop"],
      disconnected: 2,
      min_connectivity: 1e-6,
    },
  },
  {
    zone: "Z1",
    value: 5.5e5,
    witness: {
      layer: "east",
      edge: ["Z0", "Z1", "east"],
      disconnected: 1,
      min_connectivity: 2.0,
    },
  },
];

export function corridorHandlers(): Record<string, Handler> {
  const handlers: Record<string, Handler> = {
    "GET /network": () => ({
      body: {
        scenario: "base",
        fingerprint: "fp-base",
        stale: false,
        zones: ZONES,
        layers: LINES,
        geometry_zones: [],
      },
    }),
    "POST /scenario": () => ({
      status: 201,
      body: {
        id: "s1",
        base_fingerprint: "fp-base",
        fingerprint: "fp-s1",
        mutations: 1,
        stale: true,
        zones: 4,
        layers: 1,
        edges: 1,
      },
    }),
    "POST /scenario/s1/recompute": () => ({
      body: {
        id: "s1",
        base_fingerprint: "fp-base",
        fingerprint: "fp-s1",
        mutations: 1,
        stale: false,
        zones: 4,
        layers: 1,
        edges: 1,
        achilles: "Z3",
      },
    }),
    "GET /achilles": (url) => ({
      body: {
        scenario: url.searchParams.get("scenario") ?? "base",
        achilles: "Z3",
        ranking: RANKING,
      },
    }),
  };
  for (const zone of ZONES) {
    handlers[`GET /area/${zone}/metrics`] = (url) => ({
      body: zoneMetricsBody(zone, url.searchParams.get("scenario") ?? "base"),
    });
  }
  return handlers;
}
