/*
 * Typed client for the resilience service. Every method maps to one
 * endpoint and returns the parsed JSON shape; error replies carry a
 * {status, code, message} envelope which surfaces here as ApiError.
 */

export interface HealthInfo {
  status: string;
  zones: number;
  layers: number;
  edges: number;
}

export interface NetworkIndex {
  scenario: string;
  fingerprint: string;
  stale: boolean;
  zones: string[];
  layers: string[];
  geometry_zones: string[];
}

export interface HeelWitness {
  layer: string;
  edge: [string, string, string];
  disconnected: number;
  min_connectivity: number;
}

export interface HeelScore {
  zone: string;
  value: number;
  witness: HeelWitness | null;
}

export interface PairValue {
  zone: string;
  connectivity: number;
  intensity: Record<string, number>;
  redundancy: Record<string, number>;
}

export interface ZoneMetrics {
  zone: string;
  scenario: string;
  fingerprint: string;
  heel: HeelScore | null;
  relevance: Record<string, number>;
  pairs: PairValue[];
  mean_connectivity: number;
}

export interface ScenarioSummary {
  id: string;
  base_fingerprint: string;
  fingerprint: string;
  mutations: number;
  stale: boolean;
  zones: number;
  layers: number;
  edges: number;
  achilles?: string | null;
}

export interface DiffRow {
  key: string[];
  a: number | null;
  b: number | null;
  delta: number;
}

export interface SnapshotDiff {
  fingerprint_a: string;
  fingerprint_b: string;
  pairs: DiffRow[];
  relevance: DiffRow[];
  heels: DiffRow[];
  zones_only_in_a: string[];
  zones_only_in_b: string[];
  achilles_a: string | null;
  achilles_b: string | null;
}

export interface AchillesReply {
  scenario: string;
  achilles: string | null;
  ranking: HeelScore[];
}

export interface PercolationCurve {
  strategy: { order: string; recompute: string };
  points: [number, number][];
  removal_log: [string, string, string][];
}

export interface PercolationReply {
  status: "done" | "running" | "failed";
  scenario: string;
  job: string | null;
  curve?: PercolationCurve;
  error?: string;
}

export type Mutation =
  | { kind: "remove-layer"; layer: string }
  | { kind: "remove-zone"; zone: string }
  | { kind: "remove-stop"; layer: string; stop: string }
  | { kind: "remove-edge"; u: string; v: string; layer: string }
  | { kind: "flood"; zones: string[] }
  | { kind: "add-layer"; line: { id: string; stops: [string, number, number][] } };

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      if (body && typeof body.code === "string") {
        throw new ApiError(body.status ?? response.status, body.code, body.message ?? "");
      }
      throw new ApiError(response.status, "http-error", response.statusText);
    }
    return body as T;
  }

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
  }

  health(): Promise<HealthInfo> {
    return this.request("/health");
  }

  network(scenario?: string): Promise<NetworkIndex> {
    return this.request(`/network${scenarioQuery(scenario)}`);
  }

  services(zone: string, scenario?: string): Promise<string[]> {
    return this.request(`/area/${zone}/services${scenarioQuery(scenario)}`);
  }

  geometry(zone: string): Promise<ZoneFeature> {
    return this.request(`/area/${zone}/geometry`);
  }

  zoneMetrics(zone: string, scenario?: string): Promise<ZoneMetrics> {
    return this.request(`/area/${zone}/metrics${scenarioQuery(scenario)}`);
  }

  createScenario(mutations: Mutation[] = []): Promise<ScenarioSummary> {
    return this.post("/scenario", { mutations });
  }

  addMutations(id: string, mutations: Mutation[]): Promise<ScenarioSummary> {
    return this.post(`/scenario/${id}/mutations`, { mutations });
  }

  recompute(id: string): Promise<ScenarioSummary> {
    return this.post(`/scenario/${id}/recompute`);
  }

  diff(id: string, against = "base"): Promise<SnapshotDiff> {
    return this.request(`/scenario/${id}/diff?against=${encodeURIComponent(against)}`);
  }

  achilles(scenario?: string, n?: number): Promise<AchillesReply> {
    const params = new URLSearchParams();
    if (scenario !== undefined) params.set("scenario", scenario);
    if (n !== undefined) params.set("n", String(n));
    const qs = params.toString();
    return this.request(`/achilles${qs ? `?${qs}` : ""}`);
  }

  percolation(body: {
    scenario?: string;
    order?: string;
    recompute?: string;
    sample_points?: number;
  }): Promise<PercolationReply> {
    return this.post("/percolation", body);
  }

  percolationJob(jobId: string): Promise<PercolationReply> {
    return this.request(`/percolation/${jobId}`);
  }
}

function scenarioQuery(scenario?: string): string {
  return scenario === undefined ? "" : `?scenario=${encodeURIComponent(scenario)}`;
}

// GeoJSON Feature, just the parts the map cares about
export interface ZoneFeature {
  type: "Feature";
  properties: { id: string; name: string; neighbors: string[] };
  geometry: { type: string; coordinates: unknown };
}
