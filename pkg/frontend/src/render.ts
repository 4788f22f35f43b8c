/*
 * Pure render models. Nothing here touches the DOM or computes metrics:
 * values pass through from API replies, the only arithmetic is min/max
 * scaling so the view can pick colors.
 */

import { AchillesReply, HeelScore, ZoneMetrics } from "./api.js";
import { PanelMode } from "./state.js";

export interface MapCell {
  zone: string;
  value: number | null; // server-provided mean connectivity
  neutral: boolean; // no snapshot value for this zone
  shade: number; // 0..1 position on the color ramp, 0 when neutral
  highlighted: boolean;
}

export interface Legend {
  min: number;
  max: number;
}

export interface MapModel {
  cells: MapCell[];
  legend: Legend | null; // null when every zone is neutral
}

export function choroplethModel(
  zones: readonly string[],
  values: ReadonlyMap<string, number>,
  highlighted: ReadonlySet<string> = new Set(),
): MapModel {
  const present = zones.filter((z) => values.has(z));
  let legend: Legend | null = null;
  if (present.length > 0) {
    const vs = present.map((z) => values.get(z) as number);
    legend = { min: Math.min(...vs), max: Math.max(...vs) };
  }
  const cells = zones.map((zone) => {
    const value = values.has(zone) ? (values.get(zone) as number) : null;
    return {
      zone,
      value,
      neutral: value === null,
      shade: shadeOf(value, legend),
      highlighted: highlighted.has(zone),
    };
  });
  return { cells, legend };
}

function shadeOf(value: number | null, legend: Legend | null): number {
  if (value === null || legend === null) return 0;
  // all-equal values collapse to one color
  if (legend.max === legend.min) return 1;
  return (value - legend.min) / (legend.max - legend.min);
}

export interface PanelRow {
  pair: string; // the other zone of the pair
  layer: string | null; // null on connectivity rows (c is cross-layer)
  value: number;
}

export interface PanelModel {
  mode: PanelMode;
  zone: string | null;
  rows: PanelRow[];
  summary: { label: string; value: number } | null;
  empty: boolean;
}

export function panelModel(
  zone: string | null,
  metrics: ZoneMetrics | null,
  mode: PanelMode,
): PanelModel {
  if (zone === null || metrics === null) {
    return { mode, zone, rows: [], summary: null, empty: true };
  }
  const rows: PanelRow[] = [];
  for (const pair of metrics.pairs) {
    if (mode === "connectivity") {
      rows.push({ pair: pair.zone, layer: null, value: pair.connectivity });
      continue;
    }
    const byLayer = mode === "intensity" ? pair.intensity : pair.redundancy;
    for (const layer of Object.keys(byLayer).sort()) {
      rows.push({ pair: pair.zone, layer, value: byLayer[layer] });
    }
  }
  const summary =
    mode === "connectivity"
      ? { label: "mean connectivity", value: metrics.mean_connectivity }
      : null;
  return { mode, zone, rows, summary, empty: rows.length === 0 };
}

export interface HeelHighlight {
  zone: string;
  value: number;
  rank: number; // 1-based, API order
  witness: HeelScore["witness"];
}

export interface OverlayModel {
  achilles: string | null;
  highlights: HeelHighlight[];
}

export function heelOverlayModel(reply: AchillesReply): OverlayModel {
  const highlights = reply.ranking
    .filter((score) => score.value > 0)
    .map((score, i) => ({
      zone: score.zone,
      value: score.value,
      rank: i + 1,
      witness: score.witness,
    }));
  return { achilles: reply.achilles, highlights };
}
