"""Connectivity metrics over the multiplex network.

Four quantities build on each other: connection intensity (per-layer flow
scaled by shared-neighbor overlap), layer relevance (how much of a zone's
reach one layer carries), connection redundancy (parallel routes discounted
by each endpoint's dependence on the layer), and global connectivity (the
redundancy-boosted sum of intensities). On top of those sits the heel score:
how many zones an attacker strands by cutting a zone's weakest line, relative
to that zone's weakest connection.

All functions are pure; `compute_snapshot` batches the whole table with one
component decomposition per layer instead of per (zone, layer) query.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    FlatGraph,
    InvalidInputError,
    LayerId,
    UrbanMultiplexNetwork,
    ZoneId,
    component_sizes,
    flatten,
    neighbors,
    reachable_count,
)

WEIGHT_MODES = ("count", "share")


@dataclass(frozen=True)
class MetricConfig:
    """Knobs shared by every metric run.

    weight_mode: "count" uses raw flows, "share" normalizes each edge by the
    pair's total flow across layers. epsilon floors the heel denominator so
    zones whose weakest connection is 0 get a large finite score, not inf.
    """

    weight_mode: str = "count"
    epsilon: float = 1e-6

    def __post_init__(self) -> None:
        if self.weight_mode not in WEIGHT_MODES:
            raise InvalidInputError(f"unknown weight_mode {self.weight_mode!r}")
        if not self.epsilon > 0:
            raise InvalidInputError("epsilon must be positive")


DEFAULT_CONFIG = MetricConfig()


@dataclass(frozen=True)
class PairConnectivity:
    """Connectivity of one zone pair with its per-layer breakdown.

    intensity/redundancy only list layers holding an edge for this pair;
    every other layer contributes exactly 0.
    """

    u: ZoneId
    v: ZoneId
    connectivity: float
    intensity: tuple[tuple[LayerId, float], ...]
    redundancy: tuple[tuple[LayerId, float], ...]


@dataclass(frozen=True)
class LayerRelevanceScore:
    zone: ZoneId
    layer: LayerId
    value: float


@dataclass(frozen=True)
class HeelWitness:
    """The cut that realizes a zone's heel score."""

    layer: LayerId
    edge: tuple[ZoneId, ZoneId, LayerId]
    disconnected: int
    min_connectivity: float


@dataclass(frozen=True)
class HeelScore:
    zone: ZoneId
    value: float
    witness: Optional[HeelWitness]

    def to_json_dict(self) -> dict:
        return {
            "zone": self.zone,
            "value": self.value,
            "witness": None
            if self.witness is None
            else {
                "layer": self.witness.layer,
                "edge": list(self.witness.edge),
                "disconnected": self.witness.disconnected,
                "min_connectivity": self.witness.min_connectivity,
            },
        }


@dataclass(frozen=True)
class Histogram:
    """Equal-width histogram; empty (no edges, no counts) when no values."""

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    def to_json_dict(self) -> dict:
        return {"bin_edges": list(self.bin_edges), "counts": list(self.counts)}


@dataclass(frozen=True)
class MetricSnapshot:
    """Full metric table for one network state, tagged with its fingerprint."""

    fingerprint: str
    weight_mode: str
    epsilon: float
    pairs: tuple[PairConnectivity, ...]
    relevance: tuple[LayerRelevanceScore, ...]
    heels: tuple[HeelScore, ...]
    achilles: Optional[ZoneId]

    _pair_index: dict = field(default_factory=dict, compare=False, repr=False)
    _heel_index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_pair_index", {(p.u, p.v): p for p in self.pairs}
        )
        object.__setattr__(self, "_heel_index", {h.zone: h for h in self.heels})

    def pair(self, u: ZoneId, v: ZoneId) -> Optional[PairConnectivity]:
        if u > v:
            u, v = v, u
        return self._pair_index.get((u, v))

    def connectivity(self, u: ZoneId, v: ZoneId) -> float:
        p = self.pair(u, v)
        return p.connectivity if p is not None else 0.0

    def heel(self, zone: ZoneId) -> Optional[HeelScore]:
        return self._heel_index.get(zone)

    def to_json_dict(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "weight_mode": self.weight_mode,
            "epsilon": self.epsilon,
            "pairs": [
                {
                    "u": p.u,
                    "v": p.v,
                    "connectivity": p.connectivity,
                    "intensity": dict(p.intensity),
                    "redundancy": dict(p.redundancy),
                }
                for p in self.pairs
            ],
            "relevance": [
                {"zone": r.zone, "layer": r.layer, "value": r.value}
                for r in self.relevance
            ],
            "heels": [h.to_json_dict() for h in self.heels],
            "achilles": self.achilles,
        }


# -- single-value entry points ------------------------------------------------


def _effective_weight(
    net: UrbanMultiplexNetwork, u: ZoneId, v: ZoneId, layer: LayerId, mode: str
) -> float:
    w = net.edge_weight(u, v, layer)
    if mode == "count":
        return w
    total = sum(net.edge_weight(u, v, m) for m in net.layers_connecting(u, v))
    if total == 0:
        return 0.0
    return w / total


def connection_intensity(
    net: UrbanMultiplexNetwork,
    u: ZoneId,
    v: ZoneId,
    layer: LayerId,
    config: MetricConfig = DEFAULT_CONFIG,
) -> float:
    """Edge weight scaled by the endpoints' shared-neighbor fraction on the layer.

    Zero when either endpoint has no neighbors on the layer.
    """
    gu = neighbors(net, u, layer)
    gv = neighbors(net, v, layer)
    m = min(len(gu), len(gv))
    if m == 0:
        return 0.0
    return _effective_weight(net, u, v, layer, config.weight_mode) * len(gu & gv) / m


def layer_relevance(net: UrbanMultiplexNetwork, u: ZoneId, layer: LayerId) -> float:
    """Fraction of u's multiplex reach that disappears without the layer.

    0 for isolated zones, 1 when the layer is u's only connection to the rest.
    """
    net.require_layer(layer)
    n_all = reachable_count(net, u, net.layers)
    if n_all == 0:
        return 0.0
    n_without = reachable_count(net, u, [l for l in net.layers if l != layer])
    return 1.0 - n_without / n_all


def connection_redundancy(
    net: UrbanMultiplexNetwork, u: ZoneId, v: ZoneId, layer: LayerId
) -> float:
    """Parallel-route count between u and v, discounted by how replaceable
    the layer is for each endpoint and normalized by the layer count."""
    net.require_zone(u)
    net.require_zone(v)
    net.require_layer(layer)
    lr_u = layer_relevance(net, u, layer)
    lr_v = layer_relevance(net, v, layer)
    multiplicity = len(net.layers_connecting(u, v))
    return (1.0 - lr_u) * (1.0 - lr_v) * multiplicity / len(net.layers)


def global_connectivity(
    net: UrbanMultiplexNetwork,
    u: ZoneId,
    v: ZoneId,
    config: MetricConfig = DEFAULT_CONFIG,
) -> float:
    """Sum over layers of intensity boosted by redundancy: h * (1 + r)."""
    net.require_zone(u)
    net.require_zone(v)
    total = 0.0
    for l in net.layers_connecting(u, v):
        h = connection_intensity(net, u, v, l, config)
        if h != 0.0:
            total += h * (1.0 + connection_redundancy(net, u, v, l))
    return total


# -- batched tables ------------------------------------------------------------


def pair_connectivity_map(
    net: UrbanMultiplexNetwork, config: MetricConfig = DEFAULT_CONFIG
) -> dict:
    """Global connectivity for every connected pair, keyed by canonical (u, v).

    Batched: equivalent to calling global_connectivity per pair, much cheaper.
    """
    relevance = _relevance_table(net)
    return {
        pair: p.connectivity
        for pair, p in _pair_table(net, config, relevance).items()
    }


def _relevance_table(net: UrbanMultiplexNetwork) -> dict:
    """LR for every (zone, layer), one component decomposition per layer."""
    pairs_by_layers = net.pair_layer_map()
    sizes_all = component_sizes(flatten(net))
    table: dict[tuple[ZoneId, LayerId], float] = {}
    for l in net.layers:
        kept = frozenset(
            pair for pair, ls in pairs_by_layers.items() if ls != (l,)
        )
        sizes_without = component_sizes(FlatGraph(nodes=net.zones, edges=kept))
        for u in net.zones:
            n_all = sizes_all[u] - 1
            if n_all == 0:
                table[(u, l)] = 0.0
            else:
                table[(u, l)] = 1.0 - (sizes_without[u] - 1) / n_all
    return table


def _pair_table(net: UrbanMultiplexNetwork, config: MetricConfig, relevance: dict) -> dict:
    """PairConnectivity for every connected pair, keyed by (u, v)."""
    mode = config.weight_mode
    layer_count = len(net.layers)
    out: dict[tuple[ZoneId, ZoneId], PairConnectivity] = {}
    for u, v in net.connected_pairs():
        connecting = net.layers_connecting(u, v)
        multiplicity = len(connecting)
        intensities = []
        redundancies = []
        total = 0.0
        for l in connecting:
            gu = net.layer_neighbors(u, l)
            gv = net.layer_neighbors(v, l)
            m = min(len(gu), len(gv))
            h = 0.0
            if m != 0:
                h = _effective_weight(net, u, v, l, mode) * len(gu & gv) / m
            r = (
                (1.0 - relevance[(u, l)])
                * (1.0 - relevance[(v, l)])
                * multiplicity
                / layer_count
            )
            intensities.append((l, h))
            redundancies.append((l, r))
            if h != 0.0:
                total += h * (1.0 + r)
        out[(u, v)] = PairConnectivity(
            u=u,
            v=v,
            connectivity=total,
            intensity=tuple(intensities),
            redundancy=tuple(redundancies),
        )
    return out


def _merged_adjacency(net: UrbanMultiplexNetwork) -> dict:
    """Zone -> set of zones adjacent on any layer."""
    merged: dict[ZoneId, set] = {z: set() for z in net.zones}
    for u, v in net.connected_pairs():
        merged[u].add(v)
        merged[v].add(u)
    return merged


def _reach_size_without_edge(
    net: UrbanMultiplexNetwork,
    merged: dict,
    source: ZoneId,
    a: ZoneId,
    b: ZoneId,
) -> int:
    """|closure of source| after deleting edge (a, b, layer), without copying
    the network: the merged graph loses the a-b link only when no other layer
    connects the pair. Caller already knows whether that is the case (pass
    a == b to disable blocking)."""
    seen = {source}
    queue = [source]
    while queue:
        node = queue.pop()
        for nxt in merged[node]:
            if nxt in seen:
                continue
            if (node == a and nxt == b) or (node == b and nxt == a):
                continue
            seen.add(nxt)
            queue.append(nxt)
    return len(seen)


def _heel_for_zone(
    net: UrbanMultiplexNetwork,
    merged: dict,
    u: ZoneId,
    config: MetricConfig,
    pair_connectivity,
) -> HeelScore:
    """pair_connectivity: callable (u, v) -> c for adjacent pairs."""
    direct = merged[u]
    if not direct:
        return HeelScore(zone=u, value=0.0, witness=None)
    conn = {v: pair_connectivity(u, v) for v in direct}
    raw_min = min(conn.values())
    denom = max(raw_min, config.epsilon)
    zone_count = len(net.zones)
    best_value = None
    best_witness = None
    for l in net.layers:
        gamma = net.layer_neighbors(u, l)
        if not gamma:
            continue
        vstar = min(sorted(gamma), key=lambda v: (conn[v], v))
        # the merged graph keeps the u-vstar link when another layer also
        # connects the pair; block the step only on a single-layer link
        if len(net.layers_connecting(u, vstar)) == 1:
            block_a, block_b = u, vstar
        else:
            block_a = block_b = u
        stranded = zone_count - _reach_size_without_edge(
            net, merged, u, block_a, block_b
        )
        value = stranded / denom
        if best_value is None or value > best_value:
            a, b = (u, vstar) if u < vstar else (vstar, u)
            best_value = value
            best_witness = HeelWitness(
                layer=l,
                edge=(a, b, l),
                disconnected=stranded,
                min_connectivity=raw_min,
            )
    return HeelScore(zone=u, value=best_value, witness=best_witness)


def _achilles_from_heels(heels) -> Optional[ZoneId]:
    best = None
    for h in heels:
        if h.value > 0.0 and (best is None or h.value > best.value):
            best = h
    return best.zone if best is not None else None


def heelness(
    net: UrbanMultiplexNetwork, u: ZoneId, config: MetricConfig = DEFAULT_CONFIG
) -> HeelScore:
    """Heel score of one zone.

    For each layer serving u, delete u's weakest-by-connectivity edge on it
    (ties to the smallest zone id) and count the zones u can no longer reach;
    the score is the worst such count divided by u's weakest direct
    connectivity, floored at epsilon. First layer in id order wins ties.
    """
    net.require_zone(u)
    return _heel_for_zone(
        net,
        _merged_adjacency(net),
        u,
        config,
        lambda a, b: global_connectivity(net, a, b, config),
    )


def compute_snapshot(
    net: UrbanMultiplexNetwork, config: MetricConfig = DEFAULT_CONFIG
) -> MetricSnapshot:
    """Every pair connectivity, layer relevance, and heel score, plus the
    achilles zone, in one batched pass."""
    relevance = _relevance_table(net)
    pairs = _pair_table(net, config, relevance)
    merged = _merged_adjacency(net)

    def conn(a: ZoneId, b: ZoneId) -> float:
        return pairs[(a, b) if a < b else (b, a)].connectivity

    heels = tuple(
        _heel_for_zone(net, merged, u, config, conn) for u in net.zones
    )
    relevance_scores = tuple(
        LayerRelevanceScore(zone=u, layer=l, value=relevance[(u, l)])
        for u in net.zones
        for l in net.layers
    )
    return MetricSnapshot(
        fingerprint=net.fingerprint(),
        weight_mode=config.weight_mode,
        epsilon=config.epsilon,
        pairs=tuple(pairs[k] for k in sorted(pairs)),
        relevance=relevance_scores,
        heels=heels,
        achilles=_achilles_from_heels(heels),
    )


def achilles_heel(
    net: UrbanMultiplexNetwork, config: MetricConfig = DEFAULT_CONFIG
) -> Optional[HeelScore]:
    """The zone with the highest positive heel score (smallest id on ties),
    or None when no zone has a positive score."""
    snapshot = compute_snapshot(net, config)
    if snapshot.achilles is None:
        return None
    return snapshot.heel(snapshot.achilles)


def heel_ranking(
    net: UrbanMultiplexNetwork, n: int, config: MetricConfig = DEFAULT_CONFIG
) -> list[HeelScore]:
    """Top-n zones by heel score, positive scores only, ties by zone id."""
    if n < 0:
        raise InvalidInputError("ranking size must be non-negative")
    snapshot = compute_snapshot(net, config)
    positive = [h for h in snapshot.heels if h.value > 0.0]
    positive.sort(key=lambda h: (-h.value, h.zone))
    return positive[:n]


def connectivity_distribution(
    net: UrbanMultiplexNetwork, bins: int, config: MetricConfig = DEFAULT_CONFIG
) -> Histogram:
    """Histogram of positive pair connectivities over equal-width bins.

    Values at the degenerate top edge (all values equal) land in the last bin.
    """
    if bins < 1:
        raise InvalidInputError("need at least one bin")
    relevance = _relevance_table(net)
    pairs = _pair_table(net, config, relevance)
    values = sorted(p.connectivity for p in pairs.values() if p.connectivity > 0.0)
    if not values:
        return Histogram(bin_edges=(), counts=())
    lo, hi = values[0], values[-1]
    width = (hi - lo) / bins
    counts = [0] * bins
    for v in values:
        idx = bins - 1 if width == 0 else min(int((v - lo) / width), bins - 1)
        counts[idx] += 1
    edges = tuple(lo + width * i for i in range(bins)) + (hi,)
    return Histogram(bin_edges=edges, counts=tuple(counts))
