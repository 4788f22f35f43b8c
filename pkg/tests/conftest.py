"""Shared fixtures: hand-built reference networks and random generators."""

from __future__ import annotations

import random
from itertools import combinations

import pytest

from urbanheel.core import UrbanMultiplexNetwork


def as_raw(net: UrbanMultiplexNetwork):
    """Convert to the bare triple the brute-force reference operates on."""
    return (
        list(net.zones),
        list(net.layers),
        {e.key: e.weight for e in net.edges},
    )


def build_n1() -> UrbanMultiplexNetwork:
    """Four zones: a weighted triangle on one layer plus a pendant zone D
    hanging off C on a second layer. Hand-derived values (count mode):
    c(A,B)=6, c(A,C)=4, c(B,C)=3, c(C,D)=0; the pendant makes D the most
    fragile zone (H(D)=3e6 with the default epsilon) ahead of C (1e6)."""
    return UrbanMultiplexNetwork.build(
        zones=["A", "B", "C", "D"],
        layers=["l1", "l2"],
        edges=[
            ("A", "B", "l1", 12.0),
            ("A", "C", "l1", 8.0),
            ("B", "C", "l1", 6.0),
            ("C", "D", "l2", 10.0),
        ],
    )


@pytest.fixture
def n1() -> UrbanMultiplexNetwork:
    return build_n1()


def clique_edges(zones, layer, weight_of) -> list:
    return [
        (u, v, layer, float(weight_of(u, v))) for u, v in combinations(sorted(zones), 2)
    ]


def build_bridge_net(
    left: int = 4, right: int = 4, rng: random.Random | None = None
) -> UrbanMultiplexNetwork:
    """Two cliques on their own layers joined by a single bridge edge on a
    third layer. The bridge pair has no shared neighbors on its layer, so its
    connectivity is 0 and cutting it splits the network in half."""
    rng = rng or random.Random(0)
    za = [f"A{i}" for i in range(left)]
    zb = [f"B{i}" for i in range(right)]
    weight = lambda u, v: rng.randint(1, 20)
    edges = clique_edges(za, "LA", weight) + clique_edges(zb, "LB", weight)
    edges.append((za[-1], zb[0], "XB", float(rng.randint(1, 20))))
    return UrbanMultiplexNetwork.build(za + zb, ["LA", "LB", "XB"], edges)


@pytest.fixture
def bridge_net() -> UrbanMultiplexNetwork:
    return build_bridge_net()


def build_all_clique(size: int = 5) -> UrbanMultiplexNetwork:
    """Fully connected on both layers: no single cut strands anything."""
    zones = [f"Z{i}" for i in range(size)]
    edges = clique_edges(zones, "L0", lambda u, v: 5) + clique_edges(
        zones, "L1", lambda u, v: 3
    )
    return UrbanMultiplexNetwork.build(zones, ["L0", "L1"], edges)


def random_network(
    rng: random.Random,
    max_zones: int = 5,
    max_layers: int = 3,
    edge_prob: float = 0.45,
    max_weight: int = 10,
) -> UrbanMultiplexNetwork:
    """Small random multiplex; integer weights (0 allowed) and possibly
    empty layers or isolated zones, to hit the degenerate metric branches."""
    zone_count = rng.randint(2, max_zones)
    layer_count = rng.randint(1, max_layers)
    zones = [f"Z{i}" for i in range(zone_count)]
    layers = [f"L{i}" for i in range(layer_count)]
    edges = []
    for layer in layers:
        for u, v in combinations(zones, 2):
            if rng.random() < edge_prob:
                edges.append((u, v, layer, float(rng.randint(0, max_weight))))
    return UrbanMultiplexNetwork.build(zones, layers, edges)
