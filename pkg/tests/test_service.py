"""API surface: envelopes, scenario lifecycle, and percolation jobs."""

import time

import pytest
from fastapi.testclient import TestClient

from urbanheel.core import UrbanMultiplexNetwork
from urbanheel.service import ServiceData, Settings, create_app

from conftest import build_n1


def square_geom(x0: float) -> dict:
    return {
        "type": "Polygon",
        "coordinates": [
            [[x0, 0.0], [x0 + 1.0, 0.0], [x0 + 1.0, 1.0], [x0, 1.0], [x0, 0.0]]
        ],
    }


@pytest.fixture
def client() -> TestClient:
    return TestClient(create_app(ServiceData.from_network(build_n1())))


@pytest.fixture
def rich_client() -> TestClient:
    net = UrbanMultiplexNetwork.build(
        ["Z0", "Z1", "Z2", "Z3"],
        ["east", "loop"],
        [
            ("Z0", "Z1", "east", 15.0),
            ("Z0", "Z2", "east", 8.0),
            ("Z1", "Z2", "east", 6.0),
            ("Z2", "Z3", "loop", 10.0),
        ],
    )
    data = ServiceData(
        network=net,
        weight_mode="count",
        zone_names={f"Z{i}": f"Area {i}" for i in range(4)},
        zone_geometries={f"Z{i}": square_geom(float(i)) for i in range(4)},
        line_zones={"east": ("Z0", "Z1", "Z2"), "loop": ("Z2", "Z3")},
        pair_flows={("Z0", "Z1"): 15.0, ("Z0", "Z2"): 8.0, ("Z1", "Z2"): 6.0},
    )
    return TestClient(create_app(data))


def make_scenario(client: TestClient, *mutations) -> str:
    resp = client.post("/scenario", json={"mutations": list(mutations)})
    assert resp.status_code == 201
    return resp.json()["id"]


def test_health(client):
    body = client.get("/health").json()
    assert body == {"status": "ok", "zones": 4, "layers": 2, "edges": 4}


def test_network_index(rich_client):
    body = rich_client.get("/network").json()
    assert body["zones"] == ["Z0", "Z1", "Z2", "Z3"]
    assert body["layers"] == ["east", "loop"]
    assert body["geometry_zones"] == ["Z0", "Z1", "Z2", "Z3"]
    assert body["scenario"] == "base"

    # structural view follows the scenario even before any recompute
    sid = make_scenario(rich_client, {"kind": "remove-layer", "layer": "loop"})
    body = rich_client.get("/network", params={"scenario": sid}).json()
    assert body["layers"] == ["east"] and body["stale"] is True
    assert rich_client.get("/network", params={"scenario": "nope"}).status_code == 404


def test_services_from_adjacency(client):
    assert client.get("/area/C/services").json() == ["l1", "l2"]
    assert client.get("/area/D/services").json() == ["l2"]
    resp = client.get("/area/Q/services")
    assert resp.status_code == 404
    assert resp.json() == {
        "status": 404,
        "code": "unknown-zone",
        "message": "no zone 'Q'",
    }


def test_services_prefer_line_coverage_context(rich_client):
    # Z3 touches the loop line even though context and adjacency agree here;
    # the context answer also covers zones a line passes without edges
    assert rich_client.get("/area/Z2/services").json() == ["east", "loop"]
    sid = make_scenario(rich_client, {"kind": "remove-layer", "layer": "east"})
    resp = rich_client.get("/area/Z2/services", params={"scenario": sid})
    assert resp.json() == ["loop"]


def test_geometry_feature(rich_client):
    body = rich_client.get("/area/Z1/geometry").json()
    assert body["type"] == "Feature"
    assert body["properties"] == {
        "id": "Z1",
        "name": "Area 1",
        "neighbors": ["Z0", "Z2"],
    }
    assert body["geometry"]["type"] == "Polygon"
    assert rich_client.get("/area/Q/geometry").status_code == 404


def test_geometry_missing_for_bare_network(client):
    resp = client.get("/area/A/geometry")
    assert resp.status_code == 404
    assert resp.json()["code"] == "no-geometry"


def test_base_metrics_lazy_compute(client):
    body = client.get("/area/C/metrics").json()
    assert body["zone"] == "C" and body["scenario"] == "base"
    assert body["heel"]["value"] == pytest.approx(1.0e6)
    assert body["heel"]["witness"]["layer"] == "l2"
    assert body["relevance"]["l1"] == pytest.approx(2.0 / 3.0)
    assert body["relevance"]["l2"] == pytest.approx(1.0 / 3.0)
    assert [p["zone"] for p in body["pairs"]] == ["A", "B", "D"]
    # each pair row carries the per-layer breakdown behind its c value
    assert body["pairs"][0]["intensity"] == {"l1": pytest.approx(4.0)}
    assert body["pairs"][0]["redundancy"] == {"l1": pytest.approx(0.0)}
    assert body["pairs"][2] == {
        "zone": "D",
        "connectivity": 0.0,
        "intensity": {"l2": 0.0},
        "redundancy": {"l2": 0.0},
    }
    assert body["mean_connectivity"] == pytest.approx(7.0 / 3.0)
    assert client.get("/area/Q/metrics").status_code == 404


def test_scenario_lifecycle_and_staleness(client):
    sid = make_scenario(client)
    # fresh scenario has no snapshot yet: reads must demand a recompute
    resp = client.get("/area/C/metrics", params={"scenario": sid})
    assert resp.status_code == 409 and resp.json()["code"] == "stale-scenario"

    resp = client.post(f"/scenario/{sid}/recompute")
    assert resp.status_code == 200
    assert resp.json()["achilles"] == "D"
    assert not resp.json()["stale"]

    resp = client.post(
        f"/scenario/{sid}/mutations", json={"kind": "remove-zone", "zone": "D"}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["mutations"] == 1 and body["stale"] and body["zones"] == 3

    resp = client.get("/achilles", params={"scenario": sid})
    assert resp.status_code == 409
    resp = client.post(f"/scenario/{sid}/recompute")
    assert resp.json()["achilles"] is None  # no zone strands anyone now


def test_scenario_error_envelopes(client):
    assert client.get("/area/C/metrics", params={"scenario": "nope"}).status_code == 404

    resp = client.post("/scenario/base/mutations", json={"kind": "remove-zone", "zone": "D"})
    assert resp.status_code == 409 and resp.json()["code"] == "base-readonly"

    sid = make_scenario(client)
    resp = client.post(f"/scenario/{sid}/mutations", json={})
    assert resp.status_code == 400 and resp.json()["code"] == "bad-request"

    resp = client.post(f"/scenario/{sid}/mutations", json={"kind": "warp"})
    assert resp.status_code == 400 and resp.json()["code"] == "bad-mutation"

    resp = client.post(
        f"/scenario/{sid}/mutations", json={"kind": "remove-layer", "layer": "l9"}
    )
    assert resp.status_code == 404 and resp.json()["code"] == "unknown-target"

    resp = client.post(
        f"/scenario/{sid}/mutations",
        json={
            "kind": "add-layer",
            "line": {"id": "l1", "stops": [["s1", 0.5, 0.5], ["s2", 1.5, 0.5]]},
        },
    )
    assert resp.status_code == 409 and resp.json()["code"] == "conflict"

    resp = client.post(
        f"/scenario/{sid}/mutations",
        json={
            "kind": "add-layer",
            "line": {"id": "new", "stops": [["s1", 0.5, 0.5], ["s2", 1.5, 0.5]]},
        },
    )
    assert resp.status_code == 400 and resp.json()["code"] == "missing-context"


def test_create_scenario_with_initial_mutations(client):
    resp = client.post(
        "/scenario",
        json={"mutations": [{"kind": "remove-edge", "u": "C", "v": "D", "layer": "l2"}]},
    )
    assert resp.status_code == 201
    body = resp.json()
    assert body["mutations"] == 1 and body["edges"] == 3 and body["stale"]


def test_diff_against_base(client):
    sid = make_scenario(client, {"kind": "remove-zone", "zone": "D"})
    client.post(f"/scenario/{sid}/recompute")
    body = client.get(f"/scenario/{sid}/diff").json()
    assert body["zones_only_in_a"] == ["D"]  # a = the base side
    assert body["zones_only_in_b"] == []
    assert body["achilles_a"] == "D" and body["achilles_b"] is None
    heel_c = next(r for r in body["heels"] if r["key"] == ["C"])
    assert heel_c["delta"] == pytest.approx(-1.0e6)


def test_diff_requires_fresh_snapshot(client):
    sid = make_scenario(client, {"kind": "remove-zone", "zone": "D"})
    assert client.get(f"/scenario/{sid}/diff").status_code == 409


def test_achilles_ranking_and_top_n(client):
    body = client.get("/achilles").json()
    assert body["achilles"] == "D"
    assert [h["zone"] for h in body["ranking"]] == ["D", "C"]
    body = client.get("/achilles", params={"n": 1}).json()
    assert [h["zone"] for h in body["ranking"]] == ["D"]
    resp = client.get("/achilles", params={"n": -1})
    assert resp.status_code == 400 and resp.json()["code"] == "bad-request"


def test_percolation_sync(client):
    resp = client.post("/percolation", json={"order": "weak-first"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "done" and body["job"] is None
    points = body["curve"]["points"]
    assert points[0] == [0.0, 1.0]
    assert points[-1] == [1.0, 0.25]

    resp = client.post("/percolation", json={"order": "sideways"})
    assert resp.status_code == 400 and resp.json()["code"] == "bad-strategy"
    resp = client.post("/percolation", json={"sample_points": 1})
    assert resp.status_code == 400
    resp = client.post("/percolation", json={"scenario": "nope"})
    assert resp.status_code == 404


def test_percolation_async_job():
    app = create_app(
        ServiceData.from_network(build_n1()), Settings(async_edge_threshold=0)
    )
    client = TestClient(app)
    resp = client.post("/percolation", json={"sample_points": 3})
    assert resp.status_code == 202
    body = resp.json()
    assert body["status"] == "running" and body["job"]
    job = body["job"]
    for _ in range(100):
        body = client.get(f"/percolation/{job}").json()
        if body["status"] != "running":
            break
        time.sleep(0.05)
    assert body["status"] == "done"
    points = body["curve"]["points"]
    assert len(points) == 3
    assert points[0] == [0.0, 1.0] and points[-1] == [1.0, 0.25]

    assert client.get("/percolation/nope").status_code == 404


def test_cors_header_present(client):
    resp = client.get("/health", headers={"Origin": "http://localhost:5173"})
    assert resp.headers.get("access-control-allow-origin") == "*"
