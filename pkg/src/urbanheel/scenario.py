"""What-if scenarios: ordered mutations applied to a base network.

A scenario is the base network's fingerprint plus a mutation list; applying
a mutation yields a new immutable state whose metric snapshot is dropped
(stale) until recomputed. Removal mutations only ever delete edges or zones,
so reachability is monotone non-increasing along a scenario; add-layer is
the one growth operation and refuses to shadow an existing layer id.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

from .core import (
    InvalidInputError,
    LabeledEdge,
    LayerId,
    NotFoundError,
    UrbanMultiplexNetwork,
    ZoneId,
    remove_edge,
)
from .ingest import IngestError, LineStop, TransitLine, ZoneGeometry
from .metrics import (
    DEFAULT_CONFIG,
    MetricConfig,
    MetricSnapshot,
    compute_snapshot,
)

KINDS = (
    "remove-layer",
    "add-layer",
    "remove-zone",
    "remove-stop",
    "remove-edge",
    "flood",
)


class ConflictError(Exception):
    """The mutation contradicts the current state (duplicate layer id)."""


class MissingContextError(Exception):
    """The mutation needs dataset context (geometry, stop lists) the engine
    was not given."""


@dataclass(frozen=True)
class Mutation:
    """One edit. Use the classmethod constructors; fields not used by the
    kind stay None."""

    kind: str
    layer: Optional[LayerId] = None
    zone: Optional[ZoneId] = None
    stop: Optional[str] = None
    u: Optional[ZoneId] = None
    v: Optional[ZoneId] = None
    line: Optional[TransitLine] = None
    zones: Optional[tuple[ZoneId, ...]] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown mutation kind {self.kind!r}")

    @classmethod
    def remove_layer(cls, layer: LayerId) -> "Mutation":
        return cls(kind="remove-layer", layer=layer)

    @classmethod
    def add_layer(cls, line: TransitLine) -> "Mutation":
        return cls(kind="add-layer", line=line)

    @classmethod
    def remove_zone(cls, zone: ZoneId) -> "Mutation":
        return cls(kind="remove-zone", zone=zone)

    @classmethod
    def remove_stop(cls, layer: LayerId, stop: str) -> "Mutation":
        return cls(kind="remove-stop", layer=layer, stop=stop)

    @classmethod
    def remove_edge(cls, u: ZoneId, v: ZoneId, layer: LayerId) -> "Mutation":
        if u > v:
            u, v = v, u
        return cls(kind="remove-edge", u=u, v=v, layer=layer)

    @classmethod
    def flood(cls, zones) -> "Mutation":
        return cls(kind="flood", zones=tuple(sorted(set(zones))))

    def to_json_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "remove-layer":
            out["layer"] = self.layer
        elif self.kind == "add-layer":
            assert self.line is not None
            out["line"] = {
                "id": self.line.id,
                "stops": [[s.stop_id, s.lon, s.lat] for s in self.line.stops],
            }
        elif self.kind == "remove-zone":
            out["zone"] = self.zone
        elif self.kind == "remove-stop":
            out["layer"] = self.layer
            out["stop"] = self.stop
        elif self.kind == "remove-edge":
            out["u"] = self.u
            out["v"] = self.v
            out["layer"] = self.layer
        elif self.kind == "flood":
            out["zones"] = list(self.zones or ())
        return out

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Mutation":
        if not isinstance(data, Mapping):
            raise InvalidInputError("mutation must be an object")
        kind = data.get("kind")

        def need(key: str) -> str:
            value = data.get(key)
            if not isinstance(value, str) or not value:
                raise InvalidInputError(f"{kind}: missing or invalid {key!r}")
            return value

        if kind == "remove-layer":
            return cls.remove_layer(need("layer"))
        if kind == "add-layer":
            raw = data.get("line")
            if not isinstance(raw, Mapping):
                raise InvalidInputError("add-layer: missing line object")
            stops_raw = raw.get("stops")
            if not isinstance(stops_raw, Sequence) or isinstance(stops_raw, str):
                raise InvalidInputError("add-layer: line.stops must be a list")
            try:
                stops = tuple(
                    LineStop(str(s[0]), float(s[1]), float(s[2])) for s in stops_raw
                )
                line = TransitLine(id=str(raw["id"]), stops=stops)
            except (KeyError, IndexError, TypeError, ValueError, IngestError) as exc:
                raise InvalidInputError(f"add-layer: malformed line: {exc}") from exc
            return cls.add_layer(line)
        if kind == "remove-zone":
            return cls.remove_zone(need("zone"))
        if kind == "remove-stop":
            return cls.remove_stop(need("layer"), need("stop"))
        if kind == "remove-edge":
            return cls.remove_edge(need("u"), need("v"), need("layer"))
        if kind == "flood":
            zones = data.get("zones")
            if (
                not isinstance(zones, Sequence)
                or isinstance(zones, str)
                or not zones
                or not all(isinstance(z, str) for z in zones)
            ):
                raise InvalidInputError("flood: zones must be a non-empty list")
            return cls.flood(zones)
        raise InvalidInputError(f"unknown mutation kind {kind!r}")


@dataclass(frozen=True)
class ScenarioState:
    """Base fingerprint + mutations applied so far + the resulting network.
    snapshot is None (or fingerprint-mismatched) while stale."""

    base_fingerprint: str
    mutations: tuple[Mutation, ...]
    network: UrbanMultiplexNetwork
    snapshot: Optional[MetricSnapshot] = None

    @property
    def stale(self) -> bool:
        return self.snapshot is None or (
            self.snapshot.fingerprint != self.network.fingerprint()
        )


# -- diffs ----------------------------------------------------------------------


@dataclass(frozen=True)
class ValueDelta:
    """One metric value in two snapshots; None marks 'absent on that side'."""

    key: tuple
    a: Optional[float]
    b: Optional[float]

    @property
    def delta(self) -> float:
        left = 0.0 if self.a is None else self.a
        right = 0.0 if self.b is None else self.b
        return right - left


@dataclass(frozen=True)
class SnapshotDiff:
    """Per-key deltas between snapshot a and snapshot b (delta = b - a)."""

    fingerprint_a: str
    fingerprint_b: str
    pairs: tuple[ValueDelta, ...]
    relevance: tuple[ValueDelta, ...]
    heels: tuple[ValueDelta, ...]
    zones_only_in_a: tuple[ZoneId, ...]
    zones_only_in_b: tuple[ZoneId, ...]
    achilles_a: Optional[ZoneId]
    achilles_b: Optional[ZoneId]

    def to_json_dict(self) -> dict:
        def rows(deltas: tuple) -> list:
            return [
                {"key": list(d.key), "a": d.a, "b": d.b, "delta": d.delta}
                for d in deltas
            ]

        return {
            "fingerprint_a": self.fingerprint_a,
            "fingerprint_b": self.fingerprint_b,
            "pairs": rows(self.pairs),
            "relevance": rows(self.relevance),
            "heels": rows(self.heels),
            "zones_only_in_a": list(self.zones_only_in_a),
            "zones_only_in_b": list(self.zones_only_in_b),
            "achilles_a": self.achilles_a,
            "achilles_b": self.achilles_b,
        }


def diff_snapshots(a: MetricSnapshot, b: MetricSnapshot) -> SnapshotDiff:
    """Deltas (b - a) for pair connectivity, layer relevance, and heel scores,
    over the union of keys; zones on one side only are flagged."""

    def table(rows_a: dict, rows_b: dict) -> tuple:
        keys = sorted(set(rows_a) | set(rows_b))
        return tuple(
            ValueDelta(key=k, a=rows_a.get(k), b=rows_b.get(k)) for k in keys
        )

    pairs = table(
        {(p.u, p.v): p.connectivity for p in a.pairs},
        {(p.u, p.v): p.connectivity for p in b.pairs},
    )
    relevance = table(
        {(r.zone, r.layer): r.value for r in a.relevance},
        {(r.zone, r.layer): r.value for r in b.relevance},
    )
    heels = table(
        {(h.zone,): h.value for h in a.heels},
        {(h.zone,): h.value for h in b.heels},
    )
    zones_a = {h.zone for h in a.heels}
    zones_b = {h.zone for h in b.heels}
    return SnapshotDiff(
        fingerprint_a=a.fingerprint,
        fingerprint_b=b.fingerprint,
        pairs=pairs,
        relevance=relevance,
        heels=heels,
        zones_only_in_a=tuple(sorted(zones_a - zones_b)),
        zones_only_in_b=tuple(sorted(zones_b - zones_a)),
        achilles_a=a.achilles,
        achilles_b=b.achilles,
    )


# -- engine ----------------------------------------------------------------------


class ScenarioEngine:
    """Applies mutations to states derived from one base network.

    Dataset context (zone geometries, stop assignments, line stop lists,
    pair flows) is optional; mutations that need a missing piece raise
    MissingContextError instead of guessing.
    """

    def __init__(
        self,
        base: UrbanMultiplexNetwork,
        config: MetricConfig = DEFAULT_CONFIG,
        *,
        zones: Sequence[ZoneGeometry] = (),
        lines: Optional[Mapping[str, TransitLine]] = None,
        assignment: Optional[Mapping[str, ZoneId]] = None,
        pair_flows: Optional[Mapping[tuple, float]] = None,
        weight_mode: Optional[str] = None,
    ) -> None:
        self.base = base
        self.config = config
        self.zones = tuple(zones)
        self.lines = dict(lines or {})
        self.assignment = dict(assignment or {})
        self.pair_flows = dict(pair_flows or {})
        self.weight_mode = weight_mode or config.weight_mode

    def new_state(self) -> ScenarioState:
        return ScenarioState(
            base_fingerprint=self.base.fingerprint(),
            mutations=(),
            network=self.base,
            snapshot=None,
        )

    def recompute(self, state: ScenarioState) -> ScenarioState:
        """State with a fresh snapshot; returns the input if already fresh."""
        if not state.stale:
            return state
        return replace(state, snapshot=compute_snapshot(state.network, self.config))

    def apply(self, state: ScenarioState, mutation: Mutation) -> ScenarioState:
        handler = {
            "remove-layer": self._remove_layer,
            "add-layer": self._add_layer,
            "remove-zone": self._remove_zone,
            "remove-stop": self._remove_stop,
            "remove-edge": self._remove_edge,
            "flood": self._flood,
        }[mutation.kind]
        network = handler(state, mutation)
        return ScenarioState(
            base_fingerprint=state.base_fingerprint,
            mutations=state.mutations + (mutation,),
            network=network,
            snapshot=None,
        )

    def apply_all(self, state: ScenarioState, mutations) -> ScenarioState:
        for m in mutations:
            state = self.apply(state, m)
        return state

    # -- handlers ---------------------------------------------------------

    def _remove_layer(self, state: ScenarioState, m: Mutation) -> UrbanMultiplexNetwork:
        net = state.network
        net.require_layer(m.layer)
        return UrbanMultiplexNetwork(
            zones=net.zones,
            layers=tuple(l for l in net.layers if l != m.layer),
            edges=tuple(e for e in net.edges if e.layer != m.layer),
        )

    def _zone_of_stop(self, stop: LineStop) -> Optional[ZoneId]:
        known = self.assignment.get(stop.stop_id)
        if known is not None:
            return known
        if not self.zones:
            raise MissingContextError(
                f"no zone geometry to place stop {stop.stop_id!r}"
            )
        hit = None
        for zone in self.zones:
            if zone.contains(stop.lon, stop.lat):
                if hit is None or zone.id < hit:
                    hit = zone.id
        return hit

    def _covered_zones(self, stops, net: UrbanMultiplexNetwork) -> list:
        present = set(net.zones)
        covered = set()
        for stop in stops:
            z = self._zone_of_stop(stop)
            if z is not None and z in present:
                covered.add(z)
        return sorted(covered)

    def _add_layer(self, state: ScenarioState, m: Mutation) -> UrbanMultiplexNetwork:
        net = state.network
        line = m.line
        assert line is not None
        if line.id in net.layers:
            raise ConflictError(f"layer {line.id!r} already exists")
        covered = self._covered_zones(line.stops, net)
        new_edges = []
        for i, u in enumerate(covered):
            for v in covered[i + 1 :]:
                flow = self.pair_flows.get((u, v), 0.0)
                if self.weight_mode == "share":
                    weight = flow / (len(net.layers_connecting(u, v)) + 1)
                else:
                    weight = flow
                new_edges.append(LabeledEdge(u, v, line.id, weight))
        return UrbanMultiplexNetwork.build(
            zones=net.zones,
            layers=net.layers + (line.id,),
            edges=net.edges + tuple(new_edges),
        )

    def _remove_zone(self, state: ScenarioState, m: Mutation) -> UrbanMultiplexNetwork:
        net = state.network
        net.require_zone(m.zone)
        if len(net.zones) == 1:
            raise ConflictError("cannot remove the last zone")
        return UrbanMultiplexNetwork(
            zones=tuple(z for z in net.zones if z != m.zone),
            layers=net.layers,
            edges=tuple(e for e in net.edges if m.zone not in (e.u, e.v)),
        )

    def _effective_stops(self, state: ScenarioState, layer: LayerId) -> tuple:
        """The layer's stop list after every earlier mutation of this scenario."""
        base_line = None
        removed: list[str] = []
        for m in state.mutations:
            if m.kind == "add-layer" and m.line is not None and m.line.id == layer:
                base_line = m.line
                removed = []
            elif m.kind == "remove-stop" and m.layer == layer:
                removed.append(m.stop)
        if base_line is None:
            base_line = self.lines.get(layer)
        if base_line is None:
            raise MissingContextError(f"no stop list known for layer {layer!r}")
        gone = set(removed)
        return tuple(s for s in base_line.stops if s.stop_id not in gone)

    def _remove_stop(self, state: ScenarioState, m: Mutation) -> UrbanMultiplexNetwork:
        net = state.network
        net.require_layer(m.layer)
        stops = self._effective_stops(state, m.layer)
        if all(s.stop_id != m.stop for s in stops):
            raise NotFoundError(f"layer {m.layer!r} has no stop {m.stop!r}")
        remaining = tuple(s for s in stops if s.stop_id != m.stop)
        covered = set(self._covered_zones(remaining, net))
        kept = tuple(
            e
            for e in net.edges
            if e.layer != m.layer or (e.u in covered and e.v in covered)
        )
        return UrbanMultiplexNetwork(zones=net.zones, layers=net.layers, edges=kept)

    def _remove_edge(self, state: ScenarioState, m: Mutation) -> UrbanMultiplexNetwork:
        assert m.u is not None and m.v is not None and m.layer is not None
        return remove_edge(state.network, m.u, m.v, m.layer)

    def _flood(self, state: ScenarioState, m: Mutation) -> UrbanMultiplexNetwork:
        net = state.network
        flooded = set(m.zones or ())
        missing = sorted(flooded - set(net.zones))
        if missing:
            raise NotFoundError(f"flood names unknown zones: {missing}")
        return UrbanMultiplexNetwork(
            zones=net.zones,
            layers=net.layers,
            edges=tuple(
                e for e in net.edges if e.u not in flooded and e.v not in flooded
            ),
        )
