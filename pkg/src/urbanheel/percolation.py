"""Targeted edge-removal sweeps.

Edges are ranked by the connectivity of their endpoint pair and removed one
at a time, weakest or strongest first; after each removal the relative size
of the giant component (on the flattened graph) is recorded. Open question
the curves answer: does the network degrade faster when an attacker snips
the fragile periphery or the strong trunk lines first?
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional

from .core import (
    InvalidInputError,
    LabeledEdge,
    UrbanMultiplexNetwork,
    flatten,
    largest_component_size,
    remove_edge,
)
from .metrics import DEFAULT_CONFIG, MetricConfig, pair_connectivity_map

ORDERS = ("weak-first", "strong-first")
MODES = ("after-each-removal", "static-ranking")


@dataclass(frozen=True)
class RemovalStrategy:
    """How the sweep picks its next edge.

    order: remove the weakest or the strongest remaining pair first.
    recompute: re-rank on the surviving network after every removal, or keep
    the ranking computed on the intact network.
    """

    order: str = "weak-first"
    recompute: str = "after-each-removal"

    def __post_init__(self) -> None:
        if self.order not in ORDERS:
            raise InvalidInputError(f"unknown removal order {self.order!r}")
        if self.recompute not in MODES:
            raise InvalidInputError(f"unknown recompute mode {self.recompute!r}")


@dataclass(frozen=True)
class PercolationCurve:
    """(fraction_removed, relative_giant) samples plus the removal order."""

    points: tuple[tuple[float, float], ...]
    strategy: RemovalStrategy
    removal_log: tuple[LabeledEdge, ...]

    def sampled_points(self, n: int) -> list[tuple[float, float]]:
        """At most n points, always keeping the first and the last."""
        if n < 2:
            raise InvalidInputError("need at least two sample points")
        if len(self.points) <= n:
            return list(self.points)
        last = len(self.points) - 1
        idx = sorted({round(i * last / (n - 1)) for i in range(n)})
        return [self.points[i] for i in idx]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("fraction_removed,relative_giant\n")
        for f, g in self.points:
            buf.write(f"{f!r},{g!r}\n")
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "strategy": {
                "order": self.strategy.order,
                "recompute": self.strategy.recompute,
            },
            "points": [[f, g] for f, g in self.points],
            "removal_log": [[e.u, e.v, e.layer] for e in self.removal_log],
        }


def rank_edges(
    net: UrbanMultiplexNetwork, config: MetricConfig = DEFAULT_CONFIG
) -> list[LabeledEdge]:
    """All edges, ascending by their pair's connectivity; ties fall back to
    the canonical (u, v, layer) triple so the order is total."""
    conn = pair_connectivity_map(net, config)
    return sorted(net.edges, key=lambda e: (conn[(e.u, e.v)], e.key))


def _next_edge(
    net: UrbanMultiplexNetwork, strategy: RemovalStrategy, config: MetricConfig
) -> LabeledEdge:
    conn = pair_connectivity_map(net, config)
    if strategy.order == "weak-first":
        return min(net.edges, key=lambda e: (conn[(e.u, e.v)], e.key))
    return min(net.edges, key=lambda e: (-conn[(e.u, e.v)], e.key))


def percolate(
    net: UrbanMultiplexNetwork,
    strategy: RemovalStrategy = RemovalStrategy(),
    config: MetricConfig = DEFAULT_CONFIG,
) -> PercolationCurve:
    """Remove every edge per the strategy, recording the giant-component
    fraction after each step. The curve starts at fraction 0 on the intact
    network and ends with all edges gone (relative giant 1/|zones|)."""
    total_edges = len(net.edges)
    zone_count = len(net.zones)
    points = [(0.0, largest_component_size(flatten(net)) / zone_count)]
    log: list[LabeledEdge] = []
    if total_edges == 0:
        return PercolationCurve(
            points=tuple(points), strategy=strategy, removal_log=()
        )
    static_order: list[LabeledEdge] = []
    if strategy.recompute == "static-ranking":
        conn = pair_connectivity_map(net, config)
        if strategy.order == "weak-first":
            static_order = sorted(net.edges, key=lambda e: (conn[(e.u, e.v)], e.key))
        else:
            static_order = sorted(net.edges, key=lambda e: (-conn[(e.u, e.v)], e.key))
    current = net
    for step in range(1, total_edges + 1):
        if strategy.recompute == "static-ranking":
            edge = static_order[step - 1]
        else:
            edge = _next_edge(current, strategy, config)
        current = remove_edge(current, edge.u, edge.v, edge.layer)
        log.append(edge)
        giant = largest_component_size(flatten(current)) / zone_count
        points.append((step / total_edges, giant))
    return PercolationCurve(
        points=tuple(points), strategy=strategy, removal_log=tuple(log)
    )


def first_disruption(curve: PercolationCurve, threshold: float) -> Optional[float]:
    """First removed fraction at which the giant component has lost more than
    `threshold` of the zones: the smallest f with g(f) < 1 - threshold.
    None when the sweep never gets that far down."""
    if not 0.0 <= threshold <= 1.0:
        raise InvalidInputError("threshold must lie in [0, 1]")
    cutoff = 1.0 - threshold
    for f, g in curve.points:
        if g < cutoff:
            return f
    return None
