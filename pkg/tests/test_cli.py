"""End-to-end CLI runs through main(), checking exit codes and artifacts."""

import json

import pytest

from urbanheel.cli import main, parse_window

from synthdata import write_tiny_dataset


@pytest.fixture
def dataset(tmp_path):
    return write_tiny_dataset(tmp_path / "raw")


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_window():
    assert parse_window("7-9") == (7, 9)
    assert parse_window("8") == (8, 8)
    for bad in ("9-7", "7-25", "a-b", "1-2-3", ""):
        with pytest.raises(Exception):
            parse_window(bad)


def test_pipeline_ingest_metrics_percolate(tmp_path, capsys, dataset):
    out_dir = tmp_path / "bundle"
    code, out, _ = run(
        capsys,
        "ingest",
        "--zones", str(dataset["zones_path"]),
        "--lines", str(dataset["lines_path"]),
        "--flows", str(dataset["flows_path"]),
        "--hours", "7-9",
        "--out", str(out_dir),
    )
    assert code == 0
    assert "zones=4 lines=2 stops=5" in out
    assert (out_dir / "network.json").exists()
    assert (out_dir / "report.json").exists()

    snap_path = tmp_path / "snapshot.json"
    code, out, _ = run(
        capsys,
        "metrics",
        "--network", str(out_dir / "network.json"),
        "--out", str(snap_path),
    )
    assert code == 0
    assert "achilles: Z3" in out
    assert "cut=Z2-Z3@loop" in out
    snapshot = json.loads(snap_path.read_text())
    assert snapshot["achilles"] == "Z3"
    assert snapshot["weight_mode"] == "count"

    csv_path = tmp_path / "curve.csv"
    json_path = tmp_path / "curve.json"
    code, out, _ = run(
        capsys,
        "percolate",
        "--network", str(out_dir / "network.json"),
        "--out", str(csv_path),
        "--json-out", str(json_path),
    )
    assert code == 0
    assert "first_disruption(0.5)" in out
    rows = csv_path.read_text().strip().splitlines()
    assert rows[0] == "fraction_removed,relative_giant"
    assert rows[1].startswith("0.0,")
    assert rows[-1].startswith("1.0,")
    payload = json.loads(json_path.read_text())
    assert payload["strategy"] == {
        "order": "weak-first",
        "recompute": "after-each-removal",
    }
    assert payload["config"]["weight_mode"] == "count"
    assert len(payload["removal_log"]) == len(payload["points"]) - 1


def test_percolate_grid_downsamples(tmp_path, capsys, dataset):
    out_dir = tmp_path / "bundle"
    run(
        capsys,
        "ingest",
        "--zones", str(dataset["zones_path"]),
        "--lines", str(dataset["lines_path"]),
        "--flows", str(dataset["flows_path"]),
        "--hours", "7-9",
        "--out", str(out_dir),
    )
    csv_path = tmp_path / "curve.csv"
    code, out, _ = run(
        capsys,
        "percolate",
        "--network", str(out_dir / "network.json"),
        "--grid", "3",
        "--out", str(csv_path),
    )
    assert code == 0
    assert "(showing 3)" in out
    assert len(csv_path.read_text().strip().splitlines()) == 4  # header + 3


def test_usage_errors_exit_1(capsys):
    code, _, err = run(capsys, "ingest", "--no-such-flag")
    assert code == 1
    code, _, err = run(capsys, "percolate", "--network", "x.json", "--grid", "1")
    assert code == 1 and "at least 2" in err
    code, _, _ = run(
        capsys,
        "ingest",
        "--zones", "z", "--lines", "l", "--flows", "f",
        "--hours", "9-7",
        "--out", "o",
    )
    assert code == 1


def test_data_errors_exit_2(tmp_path, capsys, dataset):
    code, _, err = run(
        capsys,
        "metrics",
        "--network", str(tmp_path / "missing.json"),
    )
    assert code == 2

    bad_flows = tmp_path / "flows.csv"
    bad_flows.write_text("origin,destination,hour,count\nZ0,Z1,8,-3\n")
    code, _, err = run(
        capsys,
        "ingest",
        "--zones", str(dataset["zones_path"]),
        "--lines", str(dataset["lines_path"]),
        "--flows", str(bad_flows),
        "--out", str(tmp_path / "bundle"),
    )
    assert code == 2 and "negative" in err

    not_bundle = tmp_path / "junk.json"
    not_bundle.write_text("{\"format\": \"something-else\"}")
    code, _, _ = run(capsys, "metrics", "--network", str(not_bundle))
    assert code == 2


def test_help_exits_0(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    assert "ingest" in out and "percolate" in out
    code, out, _ = run(capsys, "metrics", "--help")
    assert code == 0
