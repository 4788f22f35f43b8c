"""HTTP JSON API over the network, metrics, scenarios, and percolation.

One process serves one base dataset. Scenarios are in-memory states keyed
by short ids; "base" is always present and read-only. Mutating a scenario
marks it stale, and every metric read of a stale scenario answers 409 until
an explicit recompute, so clients can never silently read numbers that do
not match the network they asked about. The base scenario is the exception:
it cannot drift, so its snapshot is computed lazily on first read.

All errors use one envelope: {"status": int, "code": str, "message": str}.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Optional

from fastapi import Body, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .core import InvalidInputError, NotFoundError, UrbanMultiplexNetwork
from .ingest import IngestResult, LoadedBundle, parse_zone_geometry
from .metrics import MetricConfig
from .percolation import RemovalStrategy, percolate
from .scenario import (
    ConflictError,
    MissingContextError,
    Mutation,
    ScenarioEngine,
    ScenarioState,
    diff_snapshots,
)

BASE_SCENARIO = "base"


class ApiError(Exception):
    """Error with a wire shape: status code, machine code, human message."""

    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message

    def to_json_dict(self) -> dict:
        return {"status": self.status, "code": self.code, "message": self.message}


@dataclass
class Settings:
    """Service knobs; epsilon and weight_mode feed the metric config
    (weight_mode None defers to the dataset)."""

    weight_mode: Optional[str] = None
    epsilon: float = 1e-6
    async_edge_threshold: int = 5000
    cors_origins: tuple = ("*",)
    default_top: int = 10


@dataclass
class ServiceData:
    """Everything the app needs about the base dataset. Context fields may
    be empty when serving a bare network (tests, synthetic graphs)."""

    network: UrbanMultiplexNetwork
    weight_mode: str = "count"
    zone_names: dict = dc_field(default_factory=dict)
    zone_geometries: dict = dc_field(default_factory=dict)  # zone -> GeoJSON geometry
    lines: dict = dc_field(default_factory=dict)  # line id -> TransitLine
    line_zones: dict = dc_field(default_factory=dict)
    pair_flows: dict = dc_field(default_factory=dict)

    @classmethod
    def from_network(
        cls, network: UrbanMultiplexNetwork, weight_mode: str = "count"
    ) -> "ServiceData":
        return cls(network=network, weight_mode=weight_mode)

    @classmethod
    def from_bundle(cls, bundle: LoadedBundle) -> "ServiceData":
        return cls(
            network=bundle.network,
            weight_mode=bundle.weight_mode,
            zone_names=dict(bundle.zone_names),
            zone_geometries=dict(bundle.zone_geometries),
            lines=dict(bundle.lines),
            line_zones={k: tuple(v) for k, v in bundle.line_zones.items()},
            pair_flows=dict(bundle.pair_flows),
        )

    @classmethod
    def from_result(cls, result: IngestResult) -> "ServiceData":
        return cls(
            network=result.network,
            weight_mode=result.weight_mode,
            zone_names={z.id: z.name for z in result.zones},
            zone_geometries={z.id: z.geometry_json() for z in result.zones},
            lines={line.id: line for line in result.lines},
            line_zones=dict(result.line_zones),
            pair_flows=dict(result.pair_flows),
        )


def create_app(data: ServiceData, settings: Optional[Settings] = None) -> FastAPI:
    settings = settings or Settings()
    config = MetricConfig(
        weight_mode=settings.weight_mode or data.weight_mode,
        epsilon=settings.epsilon,
    )
    geometries = tuple(
        parse_zone_geometry(zid, data.zone_names.get(zid, zid), geom)
        for zid, geom in sorted(data.zone_geometries.items())
    )
    engine = ScenarioEngine(
        data.network,
        config,
        zones=geometries,
        lines=data.lines,
        pair_flows=data.pair_flows,
        weight_mode=config.weight_mode,
    )
    store: dict[str, ScenarioState] = {BASE_SCENARIO: engine.new_state()}
    lock = threading.Lock()
    jobs: dict[str, dict] = {}
    executor = ThreadPoolExecutor(max_workers=2)

    app = FastAPI(title="urbanheel", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(settings.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    # -- error envelope ----------------------------------------------------

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content=exc.to_json_dict())

    @app.exception_handler(RequestValidationError)
    async def _validation(_req: Request, exc: RequestValidationError) -> JSONResponse:
        err = ApiError(400, "bad-request", str(exc.errors()[:1]))
        return JSONResponse(status_code=400, content=err.to_json_dict())

    @app.exception_handler(StarletteHTTPException)
    async def _http(_req: Request, exc: StarletteHTTPException) -> JSONResponse:
        err = ApiError(exc.status_code, "http-error", str(exc.detail))
        return JSONResponse(status_code=exc.status_code, content=err.to_json_dict())

    # -- helpers -----------------------------------------------------------

    def get_state(scenario_id: str) -> ScenarioState:
        with lock:
            state = store.get(scenario_id)
        if state is None:
            raise ApiError(404, "unknown-scenario", f"no scenario {scenario_id!r}")
        return state

    def fresh_state(scenario_id: str) -> ScenarioState:
        """State with a usable snapshot; 409 when the caller must recompute."""
        state = get_state(scenario_id)
        if not state.stale:
            return state
        if scenario_id == BASE_SCENARIO:
            state = engine.recompute(state)
            with lock:
                store[BASE_SCENARIO] = state
            return state
        raise ApiError(
            409,
            "stale-scenario",
            f"scenario {scenario_id!r} changed since its last recompute",
        )

    def apply_mutations(state: ScenarioState, raw_list) -> ScenarioState:
        for raw in raw_list:
            try:
                mutation = Mutation.from_json_dict(raw)
                state = engine.apply(state, mutation)
            except InvalidInputError as exc:
                raise ApiError(400, "bad-mutation", str(exc)) from exc
            except MissingContextError as exc:
                raise ApiError(400, "missing-context", str(exc)) from exc
            except NotFoundError as exc:
                raise ApiError(404, "unknown-target", str(exc)) from exc
            except ConflictError as exc:
                raise ApiError(409, "conflict", str(exc)) from exc
        return state

    def state_summary(scenario_id: str, state: ScenarioState) -> dict:
        return {
            "id": scenario_id,
            "base_fingerprint": state.base_fingerprint,
            "fingerprint": state.network.fingerprint(),
            "mutations": len(state.mutations),
            "stale": state.stale,
            "zones": len(state.network.zones),
            "layers": len(state.network.layers),
            "edges": len(state.network.edges),
        }

    def mutation_list(payload) -> list:
        if payload is None:
            return []
        if not isinstance(payload, dict):
            raise ApiError(400, "bad-request", "body must be a JSON object")
        if "mutations" in payload:
            muts = payload["mutations"]
            if not isinstance(muts, list):
                raise ApiError(400, "bad-request", "mutations must be a list")
            return muts
        if "kind" in payload:
            return [payload]
        return []

    # -- routes ------------------------------------------------------------

    @app.get("/health")
    def health() -> dict:
        net = data.network
        return {
            "status": "ok",
            "zones": len(net.zones),
            "layers": len(net.layers),
            "edges": len(net.edges),
        }

    @app.get("/network")
    def network_index(scenario: str = Query(BASE_SCENARIO)) -> dict:
        # structural read: works on stale scenarios, the map and the line
        # menu must render before anyone presses Run
        state = get_state(scenario)
        net = state.network
        return {
            "scenario": scenario,
            "fingerprint": net.fingerprint(),
            "stale": state.stale,
            "zones": list(net.zones),
            "layers": list(net.layers),
            "geometry_zones": sorted(
                z for z in net.zones if z in data.zone_geometries
            ),
        }

    @app.get("/area/{zone_id}/services")
    def area_services(zone_id: str, scenario: str = Query(BASE_SCENARIO)) -> list:
        state = get_state(scenario)
        net = state.network
        if zone_id not in net.zones:
            raise ApiError(404, "unknown-zone", f"no zone {zone_id!r}")
        if scenario == BASE_SCENARIO and data.line_zones:
            return sorted(
                line for line, zs in data.line_zones.items() if zone_id in zs
            )
        return sorted(
            l for l in net.layers if net.layer_neighbors(zone_id, l)
        )

    @app.get("/area/{zone_id}/geometry")
    def area_geometry(zone_id: str) -> dict:
        if zone_id not in data.network.zones:
            raise ApiError(404, "unknown-zone", f"no zone {zone_id!r}")
        geom = data.zone_geometries.get(zone_id)
        if geom is None:
            raise ApiError(404, "no-geometry", f"no geometry for zone {zone_id!r}")
        return {
            "type": "Feature",
            "properties": {
                "id": zone_id,
                "name": data.zone_names.get(zone_id, zone_id),
                "neighbors": list(data.network.multi_neighbors(zone_id)),
            },
            "geometry": geom,
        }

    @app.get("/area/{zone_id}/metrics")
    def area_metrics(zone_id: str, scenario: str = Query(BASE_SCENARIO)) -> dict:
        state = fresh_state(scenario)
        net = state.network
        if zone_id not in net.zones:
            raise ApiError(404, "unknown-zone", f"no zone {zone_id!r}")
        snapshot = state.snapshot
        assert snapshot is not None
        heel = snapshot.heel(zone_id)
        pairs = [
            {
                "zone": p.v if p.u == zone_id else p.u,
                "connectivity": p.connectivity,
                "intensity": dict(p.intensity),
                "redundancy": dict(p.redundancy),
            }
            for p in snapshot.pairs
            if zone_id in (p.u, p.v)
        ]
        pairs.sort(key=lambda row: row["zone"])
        mean = (
            sum(row["connectivity"] for row in pairs) / len(pairs) if pairs else 0.0
        )
        return {
            "zone": zone_id,
            "scenario": scenario,
            "fingerprint": snapshot.fingerprint,
            "heel": heel.to_json_dict() if heel else None,
            "relevance": {
                r.layer: r.value for r in snapshot.relevance if r.zone == zone_id
            },
            "pairs": pairs,
            "mean_connectivity": mean,
        }

    @app.post("/scenario", status_code=201)
    def create_scenario(payload: Optional[dict] = Body(default=None)) -> dict:
        state = apply_mutations(engine.new_state(), mutation_list(payload))
        scenario_id = uuid.uuid4().hex[:12]
        with lock:
            store[scenario_id] = state
        return state_summary(scenario_id, state)

    @app.post("/scenario/{scenario_id}/mutations")
    def add_mutations(
        scenario_id: str, payload: Optional[dict] = Body(default=None)
    ) -> dict:
        if scenario_id == BASE_SCENARIO:
            raise ApiError(409, "base-readonly", "the base scenario is read-only")
        state = get_state(scenario_id)
        muts = mutation_list(payload)
        if not muts:
            raise ApiError(400, "bad-request", "no mutations in body")
        state = apply_mutations(state, muts)
        with lock:
            store[scenario_id] = state
        return state_summary(scenario_id, state)

    @app.post("/scenario/{scenario_id}/recompute")
    def recompute(scenario_id: str) -> dict:
        state = get_state(scenario_id)
        state = engine.recompute(state)
        with lock:
            store[scenario_id] = state
        summary = state_summary(scenario_id, state)
        assert state.snapshot is not None
        summary["achilles"] = state.snapshot.achilles
        return summary

    @app.get("/scenario/{scenario_id}/diff")
    def diff(scenario_id: str, against: str = Query(BASE_SCENARIO)) -> dict:
        ours = fresh_state(scenario_id)
        theirs = fresh_state(against)
        assert theirs.snapshot is not None and ours.snapshot is not None
        return diff_snapshots(theirs.snapshot, ours.snapshot).to_json_dict()

    @app.get("/achilles")
    def achilles(
        scenario: str = Query(BASE_SCENARIO),
        n: Optional[int] = Query(None, ge=0),
    ) -> dict:
        state = fresh_state(scenario)
        snapshot = state.snapshot
        assert snapshot is not None
        top = settings.default_top if n is None else n
        ranking = [h for h in snapshot.heels if h.value > 0.0]
        ranking.sort(key=lambda h: (-h.value, h.zone))
        return {
            "scenario": scenario,
            "achilles": snapshot.achilles,
            "ranking": [h.to_json_dict() for h in ranking[:top]],
        }

    def run_percolation(
        net: UrbanMultiplexNetwork, strategy: RemovalStrategy, sample_points
    ) -> dict:
        curve = percolate(net, strategy, config)
        out = curve.to_json_dict()
        if sample_points is not None:
            out["points"] = [list(p) for p in curve.sampled_points(sample_points)]
        else:
            out["points"] = [list(p) for p in out["points"]]
        return out

    @app.post("/percolation")
    def percolation(payload: Optional[dict] = Body(default=None)) -> JSONResponse:
        body = payload or {}
        scenario = body.get("scenario", BASE_SCENARIO)
        state = get_state(scenario)
        try:
            strategy = RemovalStrategy(
                order=body.get("order", "weak-first"),
                recompute=body.get("recompute", "after-each-removal"),
            )
        except InvalidInputError as exc:
            raise ApiError(400, "bad-strategy", str(exc)) from exc
        sample_points = body.get("sample_points")
        if sample_points is not None and (
            not isinstance(sample_points, int) or sample_points < 2
        ):
            raise ApiError(400, "bad-request", "sample_points must be an int >= 2")
        net = state.network
        if len(net.edges) <= settings.async_edge_threshold:
            return JSONResponse(
                status_code=200,
                content={
                    "status": "done",
                    "scenario": scenario,
                    "job": None,
                    "curve": run_percolation(net, strategy, sample_points),
                },
            )
        job_id = uuid.uuid4().hex[:12]
        with lock:
            jobs[job_id] = {"status": "running", "scenario": scenario}

        def work() -> None:
            try:
                curve = run_percolation(net, strategy, sample_points)
                with lock:
                    jobs[job_id] = {
                        "status": "done",
                        "scenario": scenario,
                        "curve": curve,
                    }
            except Exception as exc:  # report, don't kill the worker
                with lock:
                    jobs[job_id] = {
                        "status": "failed",
                        "scenario": scenario,
                        "error": str(exc),
                    }

        executor.submit(work)
        return JSONResponse(
            status_code=202,
            content={"status": "running", "scenario": scenario, "job": job_id},
        )

    @app.get("/percolation/{job_id}")
    def percolation_job(job_id: str) -> dict:
        with lock:
            job = jobs.get(job_id)
        if job is None:
            raise ApiError(404, "unknown-job", f"no percolation job {job_id!r}")
        return dict(job)

    return app
