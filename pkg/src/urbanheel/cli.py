"""Command line interface: ingest, metrics, percolate, serve.

Exit codes: 0 success, 1 usage problems, 2 broken input data, 3 runtime
failures. Data errors are anything the loaders reject (malformed rows,
unknown ids, bad geometry); everything else unexpected is runtime.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .core import InvalidInputError, NotFoundError
from .ingest import IngestError, ingest_dataset, load_bundle, save_bundle
from .metrics import MetricConfig, compute_snapshot
from .percolation import RemovalStrategy, first_disruption, percolate
from .service import ServiceData, Settings, create_app

WINDOW_HELP = "inclusive hour window, e.g. 7-9 or a single hour like 8"


def parse_window(text: str) -> tuple[int, int]:
    parts = text.split("-")
    try:
        if len(parts) == 1:
            start = end = int(parts[0])
        elif len(parts) == 2:
            start, end = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise click.BadParameter(f"cannot parse hour window {text!r}") from None
    if not 0 <= start <= end <= 23:
        raise click.BadParameter(f"hour window {text!r} outside 0..23")
    return (start, end)


def _metric_config(bundle_mode: str, weight_mode, epsilon: float) -> MetricConfig:
    return MetricConfig(weight_mode=weight_mode or bundle_mode, epsilon=epsilon)


@click.group()
def cli() -> None:
    """Transport network resilience toolkit."""


@cli.command("ingest")
@click.option("--zones", "zones_path", required=True, type=click.Path(), help="zone polygons (GeoJSON)")
@click.option("--lines", "lines_path", required=True, type=click.Path(), help="stop-sequence CSV, or a GTFS directory")
@click.option("--flows", "flows_path", required=True, type=click.Path(), help="origin,destination,hour,count CSV")
@click.option("--hours", default="0-23", show_default=True, help=WINDOW_HELP)
@click.option("--weight-mode", type=click.Choice(["count", "share"]), default="count", show_default=True)
@click.option("--flood", "flood_path", type=click.Path(), default=None, help="flood mask: GeoJSON polygons or newline-delimited zone ids")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="output directory for network.json and report.json")
def ingest_cmd(zones_path, lines_path, flows_path, hours, weight_mode, flood_path, out_dir) -> None:
    """Build a network bundle from raw files."""
    window = parse_window(hours)
    result = ingest_dataset(
        zones_path, lines_path, flows_path, window, weight_mode, flood_path
    )
    net_path, report_path = save_bundle(result, out_dir)
    r = result.report
    click.echo(
        f"zones={r.zones} lines={r.lines} stops={r.stops}"
        f" unassigned={len(r.unassigned_stops)} empty_layers={len(r.empty_layers)}"
    )
    click.echo(
        f"flow rows={r.flow_rows} in_window={r.rows_in_window}"
        f" intra_dropped={r.dropped_intra_rows} unknown_zones={r.unknown_zone_rows}"
    )
    click.echo(f"edges={r.edges} flooded_zones={len(r.flooded_zones)}")
    click.echo(f"wrote {net_path}")
    click.echo(f"wrote {report_path}")


@cli.command("metrics")
@click.option("--network", "network_path", required=True, type=click.Path(), help="network.json bundle")
@click.option("--weight-mode", type=click.Choice(["count", "share"]), default=None, help="override the bundle's weight mode")
@click.option("--epsilon", default=1e-6, show_default=True)
@click.option("--top", default=10, show_default=True, help="heel ranking size to print")
@click.option("--out", "out_path", type=click.Path(), default=None, help="write the full snapshot JSON here")
def metrics_cmd(network_path, weight_mode, epsilon, top, out_path) -> None:
    """Compute the metric snapshot for a network bundle."""
    bundle = load_bundle(network_path)
    config = _metric_config(bundle.weight_mode, weight_mode, epsilon)
    snapshot = compute_snapshot(bundle.network, config)
    positive = [h for h in snapshot.heels if h.value > 0.0]
    positive.sort(key=lambda h: (-h.value, h.zone))
    if snapshot.achilles is None:
        click.echo("achilles: none (no positive heel scores)")
    else:
        worst = positive[0]
        click.echo(f"achilles: {snapshot.achilles} (score {worst.value:.6g})")
    for h in positive[:top]:
        witness = h.witness
        assert witness is not None
        click.echo(
            f"  {h.zone}: {h.value:.6g}"
            f" cut={witness.edge[0]}-{witness.edge[1]}@{witness.layer}"
            f" strands={witness.disconnected}"
        )
    if out_path is not None:
        Path(out_path).write_text(
            json.dumps(snapshot.to_json_dict(), indent=1), encoding="utf-8"
        )
        click.echo(f"wrote {out_path}")


def _points_csv(points) -> str:
    lines = ["fraction_removed,relative_giant"]
    lines += [f"{f!r},{g!r}" for f, g in points]
    return "\n".join(lines) + "\n"


@cli.command("percolate")
@click.option("--network", "network_path", required=True, type=click.Path(), help="network.json bundle")
@click.option("--order", type=click.Choice(["weak-first", "strong-first"]), default="weak-first", show_default=True)
@click.option("--recompute", "recompute_mode", type=click.Choice(["after-each-removal", "static-ranking"]), default="after-each-removal", show_default=True)
@click.option("--weight-mode", type=click.Choice(["count", "share"]), default=None, help="override the bundle's weight mode")
@click.option("--epsilon", default=1e-6, show_default=True)
@click.option("--grid", default=None, type=int, help="downsample the printed/CSV curve to this many points")
@click.option("--out", "csv_path", type=click.Path(), default=None, help="write the curve as CSV here")
@click.option("--json-out", "json_path", type=click.Path(), default=None, help="write curve + removal log as JSON here")
def percolate_cmd(network_path, order, recompute_mode, weight_mode, epsilon, grid, csv_path, json_path) -> None:
    """Run an edge-removal sweep on a network bundle."""
    if grid is not None and grid < 2:
        raise click.BadParameter("--grid needs at least 2 points")
    bundle = load_bundle(network_path)
    config = _metric_config(bundle.weight_mode, weight_mode, epsilon)
    strategy = RemovalStrategy(order=order, recompute=recompute_mode)
    curve = percolate(bundle.network, strategy, config)
    shown = curve.points if grid is None else curve.sampled_points(grid)
    click.echo(f"points={len(curve.points)} (showing {len(shown)})")
    for threshold in (0.03, 0.5):
        hit = first_disruption(curve, threshold)
        label = "never" if hit is None else f"{hit:.6g}"
        click.echo(f"first_disruption({threshold}) = {label}")
    if csv_path is not None:
        Path(csv_path).write_text(_points_csv(shown), encoding="utf-8")
        click.echo(f"wrote {csv_path}")
    if json_path is not None:
        payload = curve.to_json_dict()
        payload["config"] = {
            "weight_mode": config.weight_mode,
            "epsilon": config.epsilon,
        }
        Path(json_path).write_text(json.dumps(payload, indent=1), encoding="utf-8")
        click.echo(f"wrote {json_path}")


@cli.command("serve")
@click.option("--network", "network_path", required=True, type=click.Path(), help="network.json bundle")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--weight-mode", type=click.Choice(["count", "share"]), default=None, help="override the bundle's weight mode")
@click.option("--epsilon", default=1e-6, show_default=True)
@click.option("--cors", default="*", show_default=True, help="comma-separated allowed origins")
def serve_cmd(network_path, host, port, weight_mode, epsilon, cors) -> None:
    """Serve the HTTP API for a network bundle."""
    import uvicorn

    bundle = load_bundle(network_path)
    data = ServiceData.from_bundle(bundle)
    settings = Settings(
        weight_mode=weight_mode,
        epsilon=epsilon,
        cors_origins=tuple(cors.split(",")),
    )
    app = create_app(data, settings)
    click.echo(f"serving {network_path} on {host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main(argv=None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:  # --help and friends
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (IngestError, NotFoundError, InvalidInputError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except Exception as exc:  # anything else is a runtime failure
        click.echo(f"error: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
