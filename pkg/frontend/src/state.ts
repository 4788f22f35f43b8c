/*
 * Single mutable view state with change notification. The invariant this
 * store protects: the set of toggled-off lines always mirrors the active
 * scenario's mutation list, and `stale` is true whenever mutations exist
 * that no recompute has covered yet.
 */

export type PanelMode = "intensity" | "redundancy" | "connectivity";

export interface ViewState {
  selectedZone: string | null;
  scenarioId: string | null; // null = the server's read-only base
  offLines: string[]; // lines currently toggled off, sorted
  panelMode: PanelMode;
  heelOverlay: boolean;
  stale: boolean;
  banner: string | null;
  busy: boolean;
}

export type Listener = (state: ViewState) => void;

export function initialState(): ViewState {
  return {
    selectedZone: null,
    scenarioId: null,
    offLines: [],
    panelMode: "connectivity",
    heelOverlay: false,
    stale: false,
    banner: null,
    busy: false,
  };
}

export class Store {
  private state: ViewState = initialState();
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  patch(partial: Partial<ViewState>): ViewState {
    this.state = { ...this.state, ...partial };
    for (const fn of this.listeners) fn(this.state);
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }
}

export function isLineOn(state: ViewState, line: string): boolean {
  return !state.offLines.includes(line);
}

/** offLines with `line` flipped, kept sorted for stable comparisons. */
export function toggledOff(state: ViewState, line: string): string[] {
  const off = new Set(state.offLines);
  if (off.has(line)) {
    off.delete(line);
  } else {
    off.add(line);
  }
  return [...off].sort();
}
