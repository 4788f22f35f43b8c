"""Dataset ingestion: zone polygons, transit lines, flow tables, flood masks.

Turns raw files into a multiplex network: stops are spatially joined to
zones, each line becomes a layer whose zones form a clique, and clique edges
are weighted with the origin-destination flows of a chosen hour window.
Input problems split two ways: structural damage (bad geometry, malformed
rows, negative counts) raises IngestError naming the offending line, while
expected noise (stops outside every zone, flows naming unknown zones,
intra-zone flows) is counted in the IngestReport and skipped.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from itertools import combinations
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

from .core import LayerId, UrbanMultiplexNetwork, ZoneId


class IngestError(Exception):
    """Structurally broken input data."""


Point = tuple[float, float]
Ring = tuple[Point, ...]
Polygon = tuple[Ring, ...]  # outer ring first, then holes
HourWindow = tuple[int, int]  # inclusive start/end hour


# -- geometry primitives ------------------------------------------------------


def _point_on_segment(px: float, py: float, a: Point, b: Point) -> bool:
    ax, ay = a
    bx, by = b
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    if cross != 0.0:
        return False
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def _ring_boundary_hit(px: float, py: float, ring: Ring) -> bool:
    return any(
        _point_on_segment(px, py, ring[i], ring[i + 1]) for i in range(len(ring) - 1)
    )


def _ring_crossings(px: float, py: float, ring: Ring) -> int:
    """Crossings of the +x ray from (px, py) with the ring, for even-odd."""
    hits = 0
    for i in range(len(ring) - 1):
        ax, ay = ring[i]
        bx, by = ring[i + 1]
        if (ay > py) != (by > py):
            x_at = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < x_at:
                hits += 1
    return hits


def polygon_contains(polygon: Polygon, px: float, py: float) -> bool:
    """Boundary-inclusive even-odd containment over all rings."""
    crossings = 0
    for ring in polygon:
        if _ring_boundary_hit(px, py, ring):
            return True
        crossings += _ring_crossings(px, py, ring)
    return crossings % 2 == 1


def _polygon_bbox(polygon: Polygon) -> tuple[float, float, float, float]:
    xs = [p[0] for ring in polygon for p in ring]
    ys = [p[1] for ring in polygon for p in ring]
    return (min(xs), min(ys), max(xs), max(ys))


def _bbox_contains(bbox, px: float, py: float) -> bool:
    return bbox[0] <= px <= bbox[2] and bbox[1] <= py <= bbox[3]


def _bbox_overlap(a, b) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


def _ring_centroid(ring: Ring) -> Point:
    """Shoelace centroid; falls back to the vertex mean for zero-area rings."""
    area2 = 0.0
    cx = 0.0
    cy = 0.0
    for i in range(len(ring) - 1):
        ax, ay = ring[i]
        bx, by = ring[i + 1]
        w = ax * by - bx * ay
        area2 += w
        cx += (ax + bx) * w
        cy += (ay + by) * w
    if area2 == 0.0:
        pts = ring[:-1]
        return (sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts))
    return (cx / (3.0 * area2), cy / (3.0 * area2))


def _validate_ring(ring: Sequence, zone_id: str) -> Ring:
    if len(ring) < 4:
        raise IngestError(f"zone {zone_id!r}: ring has fewer than 4 points")
    pts = tuple((float(x), float(y)) for x, y in ring)
    if pts[0] != pts[-1]:
        raise IngestError(f"zone {zone_id!r}: ring is not closed")
    return pts


# -- value types ---------------------------------------------------------------


@dataclass(frozen=True)
class ZoneGeometry:
    """One zone: id, display name, one or more polygons with optional holes."""

    id: ZoneId
    name: str
    polygons: tuple[Polygon, ...]

    _bbox: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.polygons:
            raise IngestError(f"zone {self.id!r} has no polygons")
        boxes = [_polygon_bbox(p) for p in self.polygons]
        bbox = (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )
        object.__setattr__(self, "_bbox", bbox)

    @property
    def bbox(self) -> tuple:
        return self._bbox

    def contains(self, lon: float, lat: float) -> bool:
        if not _bbox_contains(self._bbox, lon, lat):
            return False
        return any(polygon_contains(poly, lon, lat) for poly in self.polygons)

    def centroid(self) -> Point:
        """Centroid of the largest polygon's outer ring."""
        outer_rings = [poly[0] for poly in self.polygons]
        best = max(outer_rings, key=_ring_area)
        return _ring_centroid(best)

    def geometry_json(self) -> dict:
        def rings(poly: Polygon) -> list:
            return [[list(p) for p in ring] for ring in poly]

        if len(self.polygons) == 1:
            return {"type": "Polygon", "coordinates": rings(self.polygons[0])}
        return {
            "type": "MultiPolygon",
            "coordinates": [rings(poly) for poly in self.polygons],
        }


def _ring_area(ring: Ring) -> float:
    area2 = 0.0
    for i in range(len(ring) - 1):
        ax, ay = ring[i]
        bx, by = ring[i + 1]
        area2 += ax * by - bx * ay
    return abs(area2) / 2.0


class LineStop(NamedTuple):
    stop_id: str
    lon: float
    lat: float


@dataclass(frozen=True)
class TransitLine:
    """One scheduled line and its ordered stops."""

    id: LayerId
    stops: tuple[LineStop, ...]

    def __post_init__(self) -> None:
        if len(self.stops) < 2:
            raise IngestError(f"line {self.id!r} has fewer than 2 stops")
        ids = [s.stop_id for s in self.stops]
        if len(set(ids)) != len(ids):
            raise IngestError(f"line {self.id!r} lists a stop twice")


class FlowRecord(NamedTuple):
    origin: str
    destination: str
    hour: int
    count: float


@dataclass(frozen=True)
class FloodMask:
    """Zones to flood, either named directly or drawn as polygons."""

    zone_ids: Optional[tuple[ZoneId, ...]] = None
    polygons: Optional[tuple[Polygon, ...]] = None

    def __post_init__(self) -> None:
        if (self.zone_ids is None) == (self.polygons is None):
            raise IngestError("flood mask needs either zone ids or polygons")


@dataclass
class IngestReport:
    """Everything skipped, dropped, or noteworthy during one ingest run."""

    weight_mode: str = "count"
    window: Optional[HourWindow] = None
    zones: int = 0
    lines: int = 0
    stops: int = 0
    unassigned_stops: list = field(default_factory=list)
    empty_layers: list = field(default_factory=list)
    flow_rows: int = 0
    rows_in_window: int = 0
    dropped_intra_rows: int = 0
    unknown_zone_rows: int = 0
    edges: int = 0
    flooded_zones: list = field(default_factory=list)
    flow_in_window: float = 0.0
    flow_on_network: float = 0.0
    attributed_weight: float = 0.0
    generated_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def to_json_dict(self) -> dict:
        return {
            "generated_at": self.generated_at,
            "config": {
                "weight_mode": self.weight_mode,
                "window": list(self.window) if self.window else None,
            },
            "counts": {
                "zones": self.zones,
                "lines": self.lines,
                "stops": self.stops,
                "unassigned_stops": len(self.unassigned_stops),
                "empty_layers": len(self.empty_layers),
                "flow_rows": self.flow_rows,
                "rows_in_window": self.rows_in_window,
                "dropped_intra_rows": self.dropped_intra_rows,
                "unknown_zone_rows": self.unknown_zone_rows,
                "edges": self.edges,
                "flooded_zones": len(self.flooded_zones),
            },
            "unassigned_stops": sorted(self.unassigned_stops),
            "empty_layers": sorted(self.empty_layers),
            "flooded_zones": sorted(self.flooded_zones),
            "attribution": {
                "flow_in_window": self.flow_in_window,
                "flow_on_network": self.flow_on_network,
                "attributed_weight": self.attributed_weight,
            },
        }


@dataclass
class IngestResult:
    """Network plus the side data later stages (scenarios, service) need."""

    network: UrbanMultiplexNetwork
    zones: tuple[ZoneGeometry, ...]
    lines: tuple[TransitLine, ...]
    assignment: dict
    line_zones: dict
    pair_flows: dict
    report: IngestReport
    weight_mode: str
    window: HourWindow
    flood_zones: tuple[ZoneId, ...] = ()


# -- loaders -------------------------------------------------------------------


def _read_json(path: Path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise IngestError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise IngestError(f"{path}: invalid JSON: {exc}") from exc


def parse_zone_geometry(zone_id: str, name: str, geom: dict) -> ZoneGeometry:
    """Build a ZoneGeometry from a GeoJSON Polygon/MultiPolygon geometry."""
    gtype = geom.get("type")
    coords = geom.get("coordinates")
    if gtype == "Polygon":
        raw_polys = [coords]
    elif gtype == "MultiPolygon":
        raw_polys = coords
    else:
        raise IngestError(
            f"zone {zone_id!r} has geometry {gtype!r},"
            " expected Polygon or MultiPolygon"
        )
    polygons = tuple(
        tuple(_validate_ring(ring, zone_id) for ring in poly) for poly in raw_polys
    )
    return ZoneGeometry(id=zone_id, name=name, polygons=polygons)


def load_zones(path) -> list[ZoneGeometry]:
    """GeoJSON FeatureCollection of Polygon/MultiPolygon zones, sorted by id.

    Each feature needs properties.id; properties.name defaults to the id.
    """
    data = _read_json(Path(path))
    if not isinstance(data, dict) or data.get("type") != "FeatureCollection":
        raise IngestError(f"{path}: expected a GeoJSON FeatureCollection")
    zones: dict[str, ZoneGeometry] = {}
    for feature in data.get("features", []):
        props = feature.get("properties") or {}
        zone_id = props.get("id")
        if zone_id is None:
            raise IngestError(f"{path}: feature without properties.id")
        zone_id = str(zone_id)
        if zone_id in zones:
            raise IngestError(f"{path}: duplicate zone id {zone_id!r}")
        try:
            zones[zone_id] = parse_zone_geometry(
                zone_id, str(props.get("name", zone_id)), feature.get("geometry") or {}
            )
        except IngestError as exc:
            raise IngestError(f"{path}: {exc}") from None
    if not zones:
        raise IngestError(f"{path}: no zones found")
    return [zones[k] for k in sorted(zones)]


LINES_HEADER = ["line_id", "stop_id", "seq", "lon", "lat"]


def _open_csv(path: Path):
    try:
        return open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise IngestError(f"no such file: {path}") from None


def load_lines_csv(path) -> list[TransitLine]:
    """Stop sequences, one row per (line, stop): line_id,stop_id,seq,lon,lat."""
    path = Path(path)
    rows: dict[str, dict[int, LineStop]] = {}
    with _open_csv(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != LINES_HEADER:
            raise IngestError(f"{path}: expected header {','.join(LINES_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise IngestError(f"{path}:{lineno}: expected 5 columns")
            line_id, stop_id, seq_s, lon_s, lat_s = row
            try:
                seq = int(seq_s)
                stop = LineStop(stop_id, float(lon_s), float(lat_s))
            except ValueError:
                raise IngestError(f"{path}:{lineno}: malformed row") from None
            per_line = rows.setdefault(line_id, {})
            if seq in per_line:
                raise IngestError(
                    f"{path}:{lineno}: duplicate seq {seq} on line {line_id!r}"
                )
            per_line[seq] = stop
    return [
        TransitLine(id=line_id, stops=tuple(stops[s] for s in sorted(stops)))
        for line_id, stops in sorted(rows.items())
    ]


def load_gtfs(dir_path) -> list[TransitLine]:
    """Minimal GTFS subset: routes, trips, stop_times, stops. One line per
    route; its stop order follows the route's trips in trip-id order, each
    stop kept at first appearance."""
    base = Path(dir_path)

    def read_table(name: str, required: Sequence) -> list:
        fpath = base / name
        with _open_csv(fpath) as fh:
            reader = csv.DictReader(fh)
            cols = reader.fieldnames or []
            missing = [c for c in required if c not in cols]
            if missing:
                raise IngestError(f"{fpath}: missing columns {missing}")
            return list(reader)

    routes = read_table("routes.txt", ["route_id"])
    trips = read_table("trips.txt", ["route_id", "trip_id"])
    stop_times = read_table("stop_times.txt", ["trip_id", "stop_id", "stop_sequence"])
    stops_rows = read_table("stops.txt", ["stop_id", "stop_lat", "stop_lon"])

    try:
        coords = {
            r["stop_id"]: (float(r["stop_lon"]), float(r["stop_lat"]))
            for r in stops_rows
        }
    except ValueError:
        raise IngestError(f"{base}/stops.txt: malformed coordinates") from None
    by_trip: dict[str, list] = {}
    for r in stop_times:
        try:
            seq = int(r["stop_sequence"])
        except ValueError:
            raise IngestError(f"{base}/stop_times.txt: malformed stop_sequence") from None
        by_trip.setdefault(r["trip_id"], []).append((seq, r["stop_id"]))
    trips_by_route: dict[str, list] = {}
    for r in trips:
        trips_by_route.setdefault(r["route_id"], []).append(r["trip_id"])

    lines = []
    for route in sorted({r["route_id"] for r in routes}):
        ordered: list[LineStop] = []
        seen: set[str] = set()
        for trip_id in sorted(trips_by_route.get(route, [])):
            for _seq, stop_id in sorted(by_trip.get(trip_id, [])):
                if stop_id in seen:
                    continue
                if stop_id not in coords:
                    raise IngestError(
                        f"{base}: stop {stop_id!r} missing from stops.txt"
                    )
                seen.add(stop_id)
                lon, lat = coords[stop_id]
                ordered.append(LineStop(stop_id, lon, lat))
        if ordered:
            lines.append(TransitLine(id=route, stops=tuple(ordered)))
    if not lines:
        raise IngestError(f"{base}: no usable routes")
    return lines


FLOWS_HEADER = ["origin", "destination", "hour", "count"]


def load_flows(path, report: Optional[IngestReport] = None) -> list[FlowRecord]:
    """Hourly origin-destination counts. Intra-zone rows are dropped (and
    counted on the report); negative or malformed rows are errors."""
    path = Path(path)
    out: list[FlowRecord] = []
    with _open_csv(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != FLOWS_HEADER:
            raise IngestError(f"{path}: expected header {','.join(FLOWS_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise IngestError(f"{path}:{lineno}: expected 4 columns")
            origin, destination, hour_s, count_s = row
            try:
                hour = int(hour_s)
                count = float(count_s)
            except ValueError:
                raise IngestError(f"{path}:{lineno}: malformed row") from None
            if not 0 <= hour <= 23:
                raise IngestError(f"{path}:{lineno}: hour {hour} outside 0..23")
            if count < 0:
                raise IngestError(f"{path}:{lineno}: negative count {count_s}")
            if origin == destination:
                if report is not None:
                    report.dropped_intra_rows += 1
                continue
            out.append(FlowRecord(origin, destination, hour, count))
            if report is not None:
                report.flow_rows += 1
    if report is not None:
        report.flow_rows += report.dropped_intra_rows
    return out


def load_flood_mask(path) -> FloodMask:
    """GeoJSON polygons, or a plain newline-delimited list of zone ids."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise IngestError(f"no such file: {path}") from None
    stripped = text.strip()
    if not stripped:
        raise IngestError(f"{path}: empty flood mask")
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{path}: invalid JSON: {exc}") from exc
        polygons = tuple(_flood_polygons(data, path))
        if not polygons:
            raise IngestError(f"{path}: no polygons in flood mask")
        return FloodMask(polygons=polygons)
    ids = tuple(sorted({line.strip() for line in stripped.splitlines() if line.strip()}))
    return FloodMask(zone_ids=ids)


def _flood_polygons(data: dict, path) -> list:
    kind = data.get("type")
    if kind == "FeatureCollection":
        geoms = [f.get("geometry") or {} for f in data.get("features", [])]
    elif kind == "Feature":
        geoms = [data.get("geometry") or {}]
    else:
        geoms = [data]
    polygons = []
    for geom in geoms:
        gtype = geom.get("type")
        if gtype == "Polygon":
            raw = [geom["coordinates"]]
        elif gtype == "MultiPolygon":
            raw = geom["coordinates"]
        else:
            raise IngestError(f"{path}: flood geometry {gtype!r} is not a polygon")
        for poly in raw:
            polygons.append(tuple(_validate_ring(ring, "<flood>") for ring in poly))
    return polygons


# -- spatial join and network construction --------------------------------------


def assign_stops_to_zones(
    zones: Sequence[ZoneGeometry],
    lines: Sequence[TransitLine],
    report: Optional[IngestReport] = None,
) -> dict:
    """stop_id -> zone id for every distinct stop. Boundary points count as
    inside; a stop on a shared boundary goes to the smallest zone id. Stops
    outside every zone are reported, not errors."""
    coords: dict[str, Point] = {}
    for line in lines:
        for stop in line.stops:
            prev = coords.get(stop.stop_id)
            if prev is not None and prev != (stop.lon, stop.lat):
                raise IngestError(
                    f"stop {stop.stop_id!r} appears with conflicting coordinates"
                )
            coords[stop.stop_id] = (stop.lon, stop.lat)
    assignment: dict[str, ZoneId] = {}
    unassigned = []
    for stop_id in sorted(coords):
        lon, lat = coords[stop_id]
        hit = None
        for zone in zones:
            if zone.contains(lon, lat):
                if hit is None or zone.id < hit:
                    hit = zone.id
        if hit is None:
            unassigned.append(stop_id)
        else:
            assignment[stop_id] = hit
    if report is not None:
        report.stops = len(coords)
        report.unassigned_stops = unassigned
    return assignment


def aggregate_pair_flows(
    flows: Iterable[FlowRecord],
    window: HourWindow,
    known_zones: Iterable[ZoneId],
    report: Optional[IngestReport] = None,
) -> dict:
    """Sum both directions of in-window flows onto canonical zone pairs.
    Rows naming zones absent from the zone file are counted and skipped."""
    start, end = window
    if not (0 <= start <= end <= 23):
        raise IngestError(f"bad hour window {window!r}")
    known = set(known_zones)
    pair_flows: dict[tuple[ZoneId, ZoneId], float] = {}
    in_window = 0
    total = 0.0
    unknown = 0
    for rec in flows:
        if not start <= rec.hour <= end:
            continue
        in_window += 1
        if rec.origin not in known or rec.destination not in known:
            unknown += 1
            continue
        pair = (
            (rec.origin, rec.destination)
            if rec.origin < rec.destination
            else (rec.destination, rec.origin)
        )
        pair_flows[pair] = pair_flows.get(pair, 0.0) + rec.count
        total += rec.count
    if report is not None:
        report.rows_in_window = in_window
        report.unknown_zone_rows = unknown
        report.flow_in_window = total
        report.window = window
    return pair_flows


def build_network(
    zones: Sequence[ZoneGeometry],
    lines: Sequence[TransitLine],
    flows: Iterable[FlowRecord],
    window: HourWindow,
    weight_mode: str = "count",
    report: Optional[IngestReport] = None,
) -> IngestResult:
    """Spatial join, flow aggregation, and clique construction in one pass.

    Every zone becomes a node and every line a layer, even when isolated or
    empty, so |V| and |L| reflect the dataset. In count mode each connecting
    layer carries the pair's full flow; in share mode the flow is split
    evenly across the pair's connecting layers.
    """
    if weight_mode not in ("count", "share"):
        raise IngestError(f"unknown weight_mode {weight_mode!r}")
    if report is None:
        report = IngestReport()
    report.weight_mode = weight_mode
    report.zones = len(zones)
    report.lines = len(lines)

    assignment = assign_stops_to_zones(zones, lines, report)
    zone_ids = [z.id for z in zones]
    pair_flows = aggregate_pair_flows(flows, window, zone_ids, report)

    line_zones: dict[LayerId, tuple[ZoneId, ...]] = {}
    empty = []
    for line in lines:
        covered = sorted(
            {assignment[s.stop_id] for s in line.stops if s.stop_id in assignment}
        )
        line_zones[line.id] = tuple(covered)
        if len(covered) < 2:
            empty.append(line.id)
    report.empty_layers = empty

    multiplicity: dict[tuple[ZoneId, ZoneId], int] = {}
    for covered in line_zones.values():
        for pair in combinations(covered, 2):
            multiplicity[pair] = multiplicity.get(pair, 0) + 1

    edges = []
    attributed = 0.0
    for line in lines:
        for pair in combinations(line_zones[line.id], 2):
            flow = pair_flows.get(pair, 0.0)
            if weight_mode == "share":
                weight = flow / multiplicity[pair]
            else:
                weight = flow
            edges.append((pair[0], pair[1], line.id, weight))
            attributed += weight

    network = UrbanMultiplexNetwork.build(
        zones=zone_ids, layers=[l.id for l in lines], edges=edges
    )
    report.edges = len(network.edges)
    report.flow_on_network = sum(
        flow for pair, flow in pair_flows.items() if pair in multiplicity
    )
    report.attributed_weight = attributed
    return IngestResult(
        network=network,
        zones=tuple(zones),
        lines=tuple(lines),
        assignment=assignment,
        line_zones=line_zones,
        pair_flows=pair_flows,
        report=report,
        weight_mode=weight_mode,
        window=window,
    )


def resolve_flood_zones(
    mask: FloodMask, zones: Sequence[ZoneGeometry]
) -> tuple[ZoneId, ...]:
    """Zone ids hit by the mask. Direct ids must all exist. A polygon mask
    floods a zone when the zone's centroid falls inside a flood polygon or a
    flood polygon vertex falls inside the zone (after a bbox prefilter)."""
    if mask.zone_ids is not None:
        known = {z.id for z in zones}
        missing = [z for z in mask.zone_ids if z not in known]
        if missing:
            raise IngestError(f"flood mask names unknown zones: {missing}")
        return tuple(sorted(mask.zone_ids))
    flood_polys = mask.polygons or ()
    poly_boxes = [_polygon_bbox(p) for p in flood_polys]
    flooded = []
    for zone in zones:
        candidates = [
            p for p, box in zip(flood_polys, poly_boxes) if _bbox_overlap(zone.bbox, box)
        ]
        if not candidates:
            continue
        cx, cy = zone.centroid()
        hit = any(polygon_contains(p, cx, cy) for p in candidates)
        if not hit:
            for poly in candidates:
                if any(zone.contains(x, y) for ring in poly for x, y in ring):
                    hit = True
                    break
        if hit:
            flooded.append(zone.id)
    return tuple(sorted(flooded))


def ingest_dataset(
    zones_path,
    lines_path,
    flows_path,
    window: HourWindow,
    weight_mode: str = "count",
    flood_path=None,
) -> IngestResult:
    """End-to-end ingest from file paths. lines_path may be a stop-sequence
    CSV or a GTFS directory."""
    report = IngestReport(weight_mode=weight_mode, window=window)
    zones = load_zones(zones_path)
    if Path(lines_path).is_dir():
        lines = load_gtfs(lines_path)
    else:
        lines = load_lines_csv(lines_path)
    flows = load_flows(flows_path, report)
    result = build_network(zones, lines, flows, window, weight_mode, report)
    if flood_path is not None:
        mask = load_flood_mask(flood_path)
        result.flood_zones = resolve_flood_zones(mask, zones)
        report.flooded_zones = list(result.flood_zones)
    return result


# -- bundle serialization --------------------------------------------------------

BUNDLE_FORMAT = "umn-network/1"


def save_bundle(result: IngestResult, out_dir) -> tuple[Path, Path]:
    """Write network.json (graph + context) and report.json into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    net_path = out / "network.json"
    report_path = out / "report.json"
    payload = {
        "format": BUNDLE_FORMAT,
        "weight_mode": result.weight_mode,
        "window": list(result.window),
        **result.network.to_json_dict(),
        "context": {
            "zone_names": {z.id: z.name for z in result.zones},
            "zone_geometries": {z.id: z.geometry_json() for z in result.zones},
            "lines": {
                line.id: [[s.stop_id, s.lon, s.lat] for s in line.stops]
                for line in result.lines
            },
            "line_zones": {k: list(v) for k, v in result.line_zones.items()},
            "pair_flows": [[u, v, f] for (u, v), f in sorted(result.pair_flows.items())],
            "flood_zones": list(result.flood_zones),
        },
    }
    net_path.write_text(json.dumps(payload, indent=1), encoding="utf-8")
    report_path.write_text(
        json.dumps(result.report.to_json_dict(), indent=1), encoding="utf-8"
    )
    return net_path, report_path


@dataclass
class LoadedBundle:
    """network.json parsed back: the graph plus whatever context survived."""

    network: UrbanMultiplexNetwork
    weight_mode: str
    window: Optional[HourWindow]
    zone_names: dict
    zone_geometries: dict
    lines: dict
    line_zones: dict
    pair_flows: dict
    flood_zones: tuple


def load_bundle(path) -> LoadedBundle:
    data = _read_json(Path(path))
    if data.get("format") != BUNDLE_FORMAT:
        raise IngestError(f"{path}: not a {BUNDLE_FORMAT} file")
    network = UrbanMultiplexNetwork.from_json_dict(data)
    ctx = data.get("context") or {}
    lines = {
        line_id: TransitLine(
            id=line_id,
            stops=tuple(LineStop(s[0], float(s[1]), float(s[2])) for s in stops),
        )
        for line_id, stops in (ctx.get("lines") or {}).items()
    }
    pair_flows = {
        (u, v) if u < v else (v, u): float(f)
        for u, v, f in (ctx.get("pair_flows") or [])
    }
    window = data.get("window")
    return LoadedBundle(
        network=network,
        weight_mode=data.get("weight_mode", "count"),
        window=tuple(window) if window else None,
        zone_names=ctx.get("zone_names") or {},
        zone_geometries=ctx.get("zone_geometries") or {},
        lines=lines,
        line_zones={k: tuple(v) for k, v in (ctx.get("line_zones") or {}).items()},
        pair_flows=pair_flows,
        flood_zones=tuple(ctx.get("flood_zones") or ()),
    )
