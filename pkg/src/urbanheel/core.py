"""Urban multiplex network data model and structural primitives.

The network is an edge-labeled multigraph over urban zones: each layer is
one transit line, and a labeled edge (u, v, layer) carries the person flow
between the two zones on that line. Edges are undirected and stored once
under canonical ordering u < v. Network values are immutable; mutating
operations return new states so callers can hold several states at once
(percolation sweeps, scenario rollback).
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

ZoneId = str
LayerId = str


class NotFoundError(LookupError):
    """An id (zone, layer, edge) does not exist in the network."""


class InvalidInputError(ValueError):
    """An operation was called with structurally invalid input."""


@dataclass(frozen=True, order=True)
class LabeledEdge:
    """Undirected edge between two zones on one layer, with flow weight."""

    u: ZoneId
    v: ZoneId
    layer: LayerId
    weight: float = 0.0

    def __post_init__(self) -> None:
        if self.u == self.v:
            raise InvalidInputError(f"self-loop edge on zone {self.u!r}")
        if self.u > self.v:
            raise InvalidInputError(
                f"edge endpoints not in canonical order: {self.u!r} > {self.v!r}"
            )
        if self.weight < 0:
            raise InvalidInputError(f"negative edge weight {self.weight!r}")

    @classmethod
    def make(cls, u: ZoneId, v: ZoneId, layer: LayerId, weight: float = 0.0) -> "LabeledEdge":
        """Build an edge, swapping endpoints into canonical order."""
        if u > v:
            u, v = v, u
        return cls(u, v, layer, float(weight))

    @property
    def key(self) -> tuple[ZoneId, ZoneId, LayerId]:
        return (self.u, self.v, self.layer)


@dataclass(frozen=True)
class UrbanMultiplexNetwork:
    """Immutable multiplex network: zones, layers, canonical labeled edges.

    Construction validates all structural invariants (endpoints and layers
    known, no duplicate (u, v, layer) triples). Derived adjacency indexes
    are built once and excluded from equality/hash.
    """

    zones: tuple[ZoneId, ...]
    layers: tuple[LayerId, ...]
    edges: tuple[LabeledEdge, ...]

    _weights: dict = field(default_factory=dict, compare=False, repr=False)
    _adjacency: dict = field(default_factory=dict, compare=False, repr=False)
    _pair_layers: dict = field(default_factory=dict, compare=False, repr=False)
    _zone_set: frozenset = field(default_factory=frozenset, compare=False, repr=False)
    _fingerprint: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.zones:
            raise InvalidInputError("a network needs at least one zone")
        if list(self.zones) != sorted(set(self.zones)):
            raise InvalidInputError("zones must be sorted and unique")
        if list(self.layers) != sorted(set(self.layers)):
            raise InvalidInputError("layers must be sorted and unique")
        zone_set = frozenset(self.zones)
        object.__setattr__(self, "_zone_set", zone_set)
        layer_set = set(self.layers)
        weights: dict[tuple[ZoneId, ZoneId, LayerId], float] = {}
        adjacency: dict[LayerId, dict[ZoneId, set[ZoneId]]] = {l: {} for l in self.layers}
        pair_layers: dict[tuple[ZoneId, ZoneId], list[LayerId]] = {}
        for e in self.edges:
            if e.u not in zone_set or e.v not in zone_set:
                raise InvalidInputError(f"edge {e.key} references unknown zone")
            if e.layer not in layer_set:
                raise InvalidInputError(f"edge {e.key} references unknown layer")
            if e.key in weights:
                raise InvalidInputError(f"duplicate edge {e.key}")
            weights[e.key] = e.weight
            adjacency[e.layer].setdefault(e.u, set()).add(e.v)
            adjacency[e.layer].setdefault(e.v, set()).add(e.u)
            pair_layers.setdefault((e.u, e.v), []).append(e.layer)
        object.__setattr__(self, "_weights", weights)
        object.__setattr__(self, "_adjacency", adjacency)
        object.__setattr__(
            self,
            "_pair_layers",
            {pair: tuple(sorted(ls)) for pair, ls in pair_layers.items()},
        )

    @classmethod
    def build(
        cls,
        zones: Iterable[ZoneId],
        layers: Iterable[LayerId],
        edges: Iterable[tuple[ZoneId, ZoneId, LayerId, float] | LabeledEdge] = (),
    ) -> "UrbanMultiplexNetwork":
        """Canonicalize raw input (unsorted ids, unordered endpoints) and build."""
        canon = []
        for e in edges:
            if isinstance(e, LabeledEdge):
                canon.append(e)
            else:
                u, v, layer, weight = e
                canon.append(LabeledEdge.make(u, v, layer, weight))
        return cls(
            zones=tuple(sorted(set(zones))),
            layers=tuple(sorted(set(layers))),
            edges=tuple(sorted(canon)),
        )

    # -- lookups ----------------------------------------------------------

    def require_zone(self, u: ZoneId) -> None:
        if u not in self._zone_set:
            raise NotFoundError(f"unknown zone {u!r}")

    def require_layer(self, l: LayerId) -> None:
        if l not in self._adjacency:
            raise NotFoundError(f"unknown layer {l!r}")

    def has_edge(self, u: ZoneId, v: ZoneId, layer: LayerId) -> bool:
        if u > v:
            u, v = v, u
        return (u, v, layer) in self._weights

    def edge_weight(self, u: ZoneId, v: ZoneId, layer: LayerId) -> float:
        """Weight of edge (u, v, layer); 0.0 when the edge does not exist."""
        if u > v:
            u, v = v, u
        return self._weights.get((u, v, layer), 0.0)

    def layers_connecting(self, u: ZoneId, v: ZoneId) -> tuple[LayerId, ...]:
        """Sorted layers holding an edge between u and v (the adjacency tensor row)."""
        if u > v:
            u, v = v, u
        return self._pair_layers.get((u, v), ())

    def connected_pairs(self) -> tuple[tuple[ZoneId, ZoneId], ...]:
        """All canonical zone pairs sharing at least one layer edge, sorted."""
        return tuple(sorted(self._pair_layers))

    def pair_layer_map(self) -> Mapping:
        """Read-only view: canonical pair -> sorted tuple of connecting layers."""
        return self._pair_layers

    def layer_neighbors(self, u: ZoneId, layer: LayerId) -> frozenset:
        return frozenset(self._adjacency[layer].get(u, ()))

    def multi_neighbors(self, u: ZoneId) -> tuple[ZoneId, ...]:
        """Sorted zones adjacent to u on any layer."""
        out: set[ZoneId] = set()
        for l in self.layers:
            out |= self._adjacency[l].get(u, set())
        return tuple(sorted(out))

    def fingerprint(self) -> str:
        """Stable hash of the full structure (zones, layers, weighted edges)."""
        if not self._fingerprint:
            payload = json.dumps(
                {
                    "zones": list(self.zones),
                    "layers": list(self.layers),
                    "edges": [[e.u, e.v, e.layer, e.weight] for e in self.edges],
                },
                separators=(",", ":"),
                sort_keys=True,
            )
            digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
            self._fingerprint.append(digest)
        return self._fingerprint[0]

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "zones": list(self.zones),
            "layers": list(self.layers),
            "edges": [[e.u, e.v, e.layer, e.weight] for e in self.edges],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "UrbanMultiplexNetwork":
        try:
            zones = data["zones"]
            layers = data["layers"]
            edges = data["edges"]
        except KeyError as exc:
            raise InvalidInputError(f"network JSON missing key {exc}") from exc
        return cls.build(zones, layers, [tuple(e) for e in edges])


@dataclass(frozen=True)
class ReachabilitySet:
    """Zones reachable from a source over a chosen layer subset (source included)."""

    source: ZoneId
    members: frozenset

    def __post_init__(self) -> None:
        if self.source not in self.members:
            raise InvalidInputError("reachability set must contain its source")

    def sorted_members(self) -> tuple[ZoneId, ...]:
        return tuple(sorted(self.members))


@dataclass(frozen=True)
class FlatGraph:
    """Simple undirected graph over zones (single-layer projection)."""

    nodes: tuple[ZoneId, ...]
    edges: frozenset

    _adjacency: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        adjacency: dict[ZoneId, set[ZoneId]] = {n: set() for n in self.nodes}
        for u, v in self.edges:
            adjacency[u].add(v)
            adjacency[v].add(u)
        object.__setattr__(self, "_adjacency", adjacency)

    def neighbors(self, u: ZoneId) -> set:
        return self._adjacency[u]


# -- operations -------------------------------------------------------------


def neighbors(net: UrbanMultiplexNetwork, u: ZoneId, layer: LayerId) -> frozenset:
    """Zones adjacent to u on the given layer; never contains u."""
    net.require_zone(u)
    net.require_layer(layer)
    return net.layer_neighbors(u, layer)


def _closure(net: UrbanMultiplexNetwork, u: ZoneId, layer_ids: Sequence[LayerId]) -> set:
    seen = {u}
    queue = deque([u])
    adjacency = [net._adjacency[l] for l in layer_ids]
    while queue:
        node = queue.popleft()
        for adj in adjacency:
            for nxt in adj.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return seen


def reachable_set(
    net: UrbanMultiplexNetwork, u: ZoneId, layer_ids: Iterable[LayerId]
) -> ReachabilitySet:
    """Breadth-first closure from u over edges whose layer is in layer_ids."""
    net.require_zone(u)
    ids = sorted(set(layer_ids))
    for l in ids:
        net.require_layer(l)
    return ReachabilitySet(source=u, members=frozenset(_closure(net, u, ids)))


def reachable_count(
    net: UrbanMultiplexNetwork, u: ZoneId, layer_ids: Iterable[LayerId]
) -> int:
    """Number of OTHER zones reachable from u over the layer subset."""
    return len(reachable_set(net, u, layer_ids).members) - 1


def flatten(net: UrbanMultiplexNetwork) -> FlatGraph:
    """Single-layer projection: an edge wherever any layer has one."""
    return FlatGraph(nodes=net.zones, edges=frozenset(net.connected_pairs()))


def largest_component_size(graph: FlatGraph) -> int:
    """Node count of the maximum connected component."""
    if not graph.nodes:
        raise InvalidInputError("largest_component_size needs a non-empty graph")
    return max(component_sizes(graph).values())


def component_sizes(graph: FlatGraph) -> dict:
    """Size of each node's connected component, for every node."""
    sizes: dict[ZoneId, int] = {}
    seen: set[ZoneId] = set()
    for start in graph.nodes:
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nxt in graph.neighbors(node):
                if nxt not in comp:
                    comp.add(nxt)
                    queue.append(nxt)
        seen |= comp
        for node in comp:
            sizes[node] = len(comp)
    return sizes


def remove_edge(
    net: UrbanMultiplexNetwork, u: ZoneId, v: ZoneId, layer: LayerId
) -> UrbanMultiplexNetwork:
    """New network without edge (u, v, layer); the original is untouched."""
    if u > v:
        u, v = v, u
    if not net.has_edge(u, v, layer):
        raise NotFoundError(f"no edge ({u!r}, {v!r}, {layer!r})")
    kept = tuple(e for e in net.edges if e.key != (u, v, layer))
    return UrbanMultiplexNetwork(zones=net.zones, layers=net.layers, edges=kept)
