/*
 * DOM adapter for the View interface. Pure presentation: it draws the
 * models it is handed and forwards interactions to the controller. Zones
 * render as a grid of tiles shaded by the model's 0..1 ramp position;
 * geometry fidelity is a non-goal here.
 */

import { LineEntry, PanelSet, View } from "./app.js";
import { HeelHighlight, MapModel, OverlayModel } from "./render.js";
import { PanelMode } from "./state.js";

export interface Handlers {
  onSelectZone(zone: string): void;
  onToggleLine(line: string): void;
  onRun(): void;
  onRevealHeels(): void;
  onPanelMode(mode: PanelMode): void;
  onInspect(zone: string): void;
}

const MODES: PanelMode[] = ["intensity", "redundancy", "connectivity"];

export class DomView implements View {
  private readonly map: HTMLElement;
  private readonly panels: HTMLElement;
  private readonly menu: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly overlayBox: HTMLElement;
  private readonly witnessBox: HTMLElement;
  private readonly runButton: HTMLButtonElement;
  private highlighted = new Set<string>();

  constructor(
    root: HTMLElement,
    private readonly handlers: Handlers,
  ) {
    root.innerHTML = `
      <div class="banner" hidden></div>
      <div class="layout">
        <div class="map"></div>
        <aside class="side">
          <h2>Lines</h2>
          <div class="menu"></div>
          <button class="run">Run</button>
          <button class="reveal">Reveal heels</button>
          <div class="overlay-list"></div>
          <div class="witness" hidden></div>
        </aside>
      </div>
      <div class="panels"></div>`;
    this.map = root.querySelector(".map") as HTMLElement;
    this.panels = root.querySelector(".panels") as HTMLElement;
    this.menu = root.querySelector(".menu") as HTMLElement;
    this.banner = root.querySelector(".banner") as HTMLElement;
    this.overlayBox = root.querySelector(".overlay-list") as HTMLElement;
    this.witnessBox = root.querySelector(".witness") as HTMLElement;
    this.runButton = root.querySelector(".run") as HTMLButtonElement;
    this.runButton.addEventListener("click", () => handlers.onRun());
    (root.querySelector(".reveal") as HTMLElement).addEventListener("click", () =>
      handlers.onRevealHeels(),
    );
  }

  renderMap(model: MapModel): void {
    this.highlighted = new Set(
      model.cells.filter((c) => c.highlighted).map((c) => c.zone),
    );
    this.map.innerHTML = "";
    for (const cell of model.cells) {
      const tile = document.createElement("div");
      tile.className = "tile";
      tile.dataset.zone = cell.zone;
      tile.style.background = cell.neutral
        ? "#d7d7d7"
        : rampColor(cell.shade);
      if (cell.highlighted) tile.classList.add("heel");
      tile.title =
        cell.value === null ? `${cell.zone}: no data` : `${cell.zone}: ${cell.value}`;
      tile.textContent = cell.zone;
      tile.addEventListener("click", () => {
        this.handlers.onSelectZone(cell.zone);
        if (this.highlighted.has(cell.zone)) this.handlers.onInspect(cell.zone);
      });
      this.map.appendChild(tile);
    }
    const legend = document.createElement("div");
    legend.className = "legend";
    legend.textContent = model.legend
      ? `mean connectivity ${model.legend.min} .. ${model.legend.max}`
      : "no data";
    this.map.appendChild(legend);
  }

  renderPanels(panels: PanelSet, active: PanelMode): void {
    this.panels.innerHTML = "";
    for (const mode of MODES) {
      const model = panels[mode];
      const box = document.createElement("section");
      box.className = mode === active ? "panel active" : "panel";
      const head = document.createElement("h3");
      head.textContent = model.zone ? `${mode} of ${model.zone}` : mode;
      head.addEventListener("click", () => this.handlers.onPanelMode(mode));
      box.appendChild(head);
      if (model.empty) {
        const note = document.createElement("p");
        note.textContent = "no connected pairs";
        box.appendChild(note);
      }
      for (const row of model.rows) {
        const line = document.createElement("div");
        line.className = "row";
        line.textContent =
          row.layer === null
            ? `${row.pair}: ${row.value}`
            : `${row.pair} via ${row.layer}: ${row.value}`;
        box.appendChild(line);
      }
      if (model.summary) {
        const sum = document.createElement("div");
        sum.className = "summary";
        sum.textContent = `${model.summary.label}: ${model.summary.value}`;
        box.appendChild(sum);
      }
      this.panels.appendChild(box);
    }
  }

  renderLineMenu(lines: LineEntry[]): void {
    this.menu.innerHTML = "";
    for (const entry of lines) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = entry.on;
      box.addEventListener("change", () => this.handlers.onToggleLine(entry.line));
      label.appendChild(box);
      label.appendChild(document.createTextNode(entry.line));
      this.menu.appendChild(label);
    }
  }

  renderOverlay(overlay: OverlayModel | null): void {
    this.overlayBox.innerHTML = "";
    if (overlay === null) return;
    for (const h of overlay.highlights) {
      const row = document.createElement("div");
      row.className = "heel-row";
      row.textContent = `#${h.rank} ${h.zone}: ${h.value}`;
      row.addEventListener("click", () => this.handlers.onInspect(h.zone));
      this.overlayBox.appendChild(row);
    }
  }

  showWitness(highlight: HeelHighlight | null): void {
    if (highlight === null || highlight.witness === null) {
      this.witnessBox.hidden = true;
      this.witnessBox.textContent = "";
      return;
    }
    const w = highlight.witness;
    this.witnessBox.hidden = false;
    this.witnessBox.textContent =
      `${highlight.zone}: cutting ${w.edge[0]}-${w.edge[1]} on ${w.layer} ` +
      `strands ${w.disconnected} zone(s)`;
  }

  showBanner(message: string | null): void {
    this.banner.hidden = message === null;
    this.banner.textContent = message ?? "";
  }

  setRunEnabled(enabled: boolean): void {
    this.runButton.disabled = !enabled;
  }

  setBusy(busy: boolean): void {
    this.runButton.disabled = busy;
    document.body.classList.toggle("busy", busy);
  }
}

function rampColor(shade: number): string {
  // light amber to deep red, matching the "hotter = better connected" map
  const r = 255;
  const g = Math.round(235 - 180 * shade);
  const b = Math.round(205 - 190 * shade);
  return `rgb(${r}, ${g}, ${b})`;
}
