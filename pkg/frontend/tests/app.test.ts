/*
 * Controller behavior against a fully mocked service: displayed values
 * must equal the mocked replies, a toggle is exactly one request, and
 * the heel overlay mirrors the mocked ranking.
 */

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import {
  BASE_MEANS,
  FakeServer,
  FakeView,
  LINES,
  RANKING,
  SCENARIO_MEANS,
  ZONES,
  corridorHandlers,
  zoneMetricsBody,
} from "./helpers.js";

async function bootedApp(
  overrides: Record<string, (typeof corridorHandlers extends () => infer R ? R : never)[string]> = {},
) {
  const server = new FakeServer({ ...corridorHandlers(), ...overrides });
  const view = new FakeView();
  const app = new App(new ApiClient("http://test", server.fetch), view);
  await app.init();
  return { server, view, app };
}

describe("init", () => {
  it("paints every zone with exactly the mocked mean", async () => {
    const { view } = await bootedApp();
    const cells = view.lastMap.cells;
    expect(cells.map((c) => c.zone)).toEqual(ZONES);
    for (const cell of cells) {
      expect(cell.value).toBe(BASE_MEANS[cell.zone]);
      expect(cell.neutral).toBe(false);
    }
    expect(view.lastMap.legend).toEqual({ min: 1.5, max: 6.75 });
    expect(view.lastMenu).toEqual(LINES.map((line) => ({ line, on: true })));
  });

  it("renders a zone without metrics as neutral", async () => {
    const { view } = await bootedApp({
      "GET /area/Z3/metrics": () => ({
        status: 404,
        body: { status: 404, code: "unknown-zone", message: "no zone 'Z3'" },
      }),
    });
    const cell = view.lastMap.cells.find((c) => c.zone === "Z3");
    expect(cell).toMatchObject({ value: null, neutral: true, shade: 0 });
  });
});

describe("panels", () => {
  it("shows only numbers taken verbatim from the metrics reply", async () => {
    const { view, app } = await bootedApp();
    app.selectZone("Z2");
    const { panels } = view.lastPanels;
    const served = zoneMetricsBody("Z2", "base") as {
      pairs: {
        zone: string;
        connectivity: number;
        intensity: Record<string, number>;
        redundancy: Record<string, number>;
      }[];
      mean_connectivity: number;
    };
    const pair = served.pairs[0];

    expect(panels.connectivity.rows).toEqual([
      { pair: pair.zone, layer: null, value: pair.connectivity },
    ]);
    expect(panels.connectivity.summary).toEqual({
      label: "mean connectivity",
      value: served.mean_connectivity,
    });
    expect(panels.intensity.rows).toEqual([
      { pair: "Z1", layer: "east", value: pair.intensity.east },
      { pair: "Z1", layer: "loop", value: pair.intensity.loop },
    ]);
    expect(panels.redundancy.rows).toEqual([
      { pair: "Z1", layer: "east", value: pair.redundancy.east },
      { pair: "Z1", layer: "loop", value: pair.redundancy.loop },
    ]);
  });

  it("empties when no zone is selected", async () => {
    const { view, app } = await bootedApp();
    app.selectZone(null);
    expect(view.lastPanels.panels.connectivity.empty).toBe(true);
    expect(view.lastPanels.panels.connectivity.rows).toEqual([]);
  });

  it("switching mode re-renders with the new active panel", async () => {
    const { view, app } = await bootedApp();
    app.setPanelMode("redundancy");
    expect(view.lastPanels.active).toBe("redundancy");
  });
});

describe("toggle_line", () => {
  it("issues exactly one request carrying the full off-set", async () => {
    const { server, view, app } = await bootedApp();
    const mark = server.calls.length;
    await app.toggleLine("east");
    const calls = server.callsSince(mark);
    expect(calls).toHaveLength(1);
    expect(calls[0].key).toBe("POST /scenario");
    expect(calls[0].body).toEqual({
      mutations: [{ kind: "remove-layer", layer: "east" }],
    });
    expect(app.store.get().scenarioId).toBe("s1");
    expect(app.store.get().stale).toBe(true);
    expect(view.lastMenu).toEqual([
      { line: "east", on: false },
      { line: "loop", on: true },
    ]);
    expect(view.runEnabled.at(-1)).toBe(true);
  });

  it("off then on returns the mutation list to its prior state", async () => {
    const { server, app } = await bootedApp();
    await app.toggleLine("east");
    const mark = server.calls.length;
    await app.toggleLine("east");
    const calls = server.callsSince(mark);
    expect(calls).toHaveLength(1);
    expect(calls[0].body).toEqual({ mutations: [] });
    expect(app.store.get().offLines).toEqual([]);
  });

  it("reverts the toggle and shows a banner when the API rejects", async () => {
    const { view, app } = await bootedApp({
      "POST /scenario": () => ({
        status: 500,
        body: { status: 500, code: "boom", message: "scenario store down" },
      }),
    });
    await app.toggleLine("east");
    expect(app.store.get().offLines).toEqual([]);
    expect(view.lastMenu).toEqual(LINES.map((line) => ({ line, on: true })));
    expect(view.lastBanner).toBe("boom: scenario store down");
  });

  it("ignores lines the network does not have", async () => {
    const { server, app } = await bootedApp();
    const mark = server.calls.length;
    await app.toggleLine("ghost-line");
    expect(server.callsSince(mark)).toHaveLength(0);
  });
});

describe("run", () => {
  it("recomputes, then repaints from the scenario's mocked values", async () => {
    const { server, view, app } = await bootedApp();
    await app.toggleLine("east");
    app.selectZone("Z0");
    const mark = server.calls.length;
    await app.run();
    const calls = server.callsSince(mark);
    expect(calls[0].key).toBe("POST /scenario/s1/recompute");
    for (const call of calls.slice(1)) {
      expect(call.url.searchParams.get("scenario")).toBe("s1");
    }
    for (const cell of view.lastMap.cells) {
      expect(cell.value).toBe(SCENARIO_MEANS[cell.zone]);
    }
    expect(view.lastPanels.panels.connectivity.summary?.value).toBe(
      SCENARIO_MEANS.Z0,
    );
    expect(app.store.get().stale).toBe(false);
  });

  it("on the base scenario skips recompute and just refreshes", async () => {
    const { server, app } = await bootedApp();
    const mark = server.calls.length;
    await app.run();
    const keys = server.callsSince(mark).map((c) => c.key);
    expect(keys.every((k) => k.startsWith("GET /area/"))).toBe(true);
  });

  it("surfaces a recompute failure and keeps the stale view", async () => {
    const { view, app } = await bootedApp({
      "POST /scenario/s1/recompute": () => ({
        status: 409,
        body: { status: 409, code: "stale-scenario", message: "changed" },
      }),
    });
    await app.toggleLine("east");
    const mapsBefore = view.maps.length;
    await app.run();
    expect(view.maps.length).toBe(mapsBefore); // nothing repainted
    expect(app.store.get().stale).toBe(true);
    expect(view.lastBanner).toBe("stale-scenario: changed");
  });
});

describe("reveal_heels", () => {
  it("highlights exactly the zones in the mocked ranking, in order", async () => {
    const { view, app } = await bootedApp();
    await app.revealHeels();
    const overlay = view.overlays.at(-1);
    expect(overlay?.highlights.map((h) => h.zone)).toEqual(
      RANKING.map((r) => r.zone),
    );
    expect(overlay?.highlights.map((h) => h.value)).toEqual(
      RANKING.map((r) => r.value),
    );
    const highlighted = view.lastMap.cells
      .filter((c) => c.highlighted)
      .map((c) => c.zone);
    expect(highlighted.sort()).toEqual([...RANKING.map((r) => r.zone)].sort());
  });

  it("prompts for Run instead of fetching when the view is stale", async () => {
    const { server, app, view } = await bootedApp();
    await app.toggleLine("east");
    const mark = server.calls.length;
    await app.revealHeels();
    expect(server.callsSince(mark)).toHaveLength(0);
    expect(view.lastBanner).toBe("scenario changed: press Run first");
  });

  it("clicking a highlight surfaces the mocked witness", async () => {
    const { view, app } = await bootedApp();
    await app.revealHeels();
    app.inspectHighlight("Z3");
    expect(view.witnesses.at(-1)).toMatchObject({
      zone: "Z3",
      witness: RANKING[0].witness,
    });
    app.inspectHighlight("Z0"); // not highlighted
    expect(view.witnesses.at(-1)).toBeNull();
  });

  it("hide clears the overlay and the map highlights", async () => {
    const { view, app } = await bootedApp();
    await app.revealHeels();
    app.hideHeels();
    expect(view.overlays.at(-1)).toBeNull();
    expect(view.lastMap.cells.every((c) => !c.highlighted)).toBe(true);
  });
});
