import json
import os

import numpy as np
import pytest

from ldplab import benchmarks as bench
from ldplab import cli
from ldplab.errors import ParseError, ValidationError


@pytest.fixture
def pair_file(tmp_path):
    path = tmp_path / "pair.json"
    cli.write_measure(bench.diagonal_pair_measure(), str(path))
    return str(path)


def test_load_measure_roundtrip(tmp_path, pair_file):
    meas = cli.load_measure(pair_file)
    assert len(meas.atoms) == 2
    again = tmp_path / "again.json"
    cli.write_measure(meas, str(again))
    meas2 = cli.load_measure(str(again))
    assert [a.label for a in meas.atoms] == [a.label for a in meas2.atoms]
    for a, b in zip(meas.atoms, meas2.atoms):
        assert a.weight == b.weight
        np.testing.assert_array_equal(a.matrix, b.matrix)


def test_load_measure_bad_weights(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "dim": 2,
        "atoms": [
            {"label": "A", "weight": 0.5, "matrix": [[1, 0], [0, 1]]},
            {"label": "B", "weight": 0.4, "matrix": [[2, 0], [0, 1]]},
        ],
    }))
    with pytest.raises(ValidationError):
        cli.load_measure(str(path))


def test_load_measure_duplicate_labels(tmp_path):
    path = tmp_path / "dup.json"
    path.write_text(json.dumps({
        "dim": 2,
        "atoms": [
            {"label": "A", "weight": 0.5, "matrix": [[1, 0], [0, 1]]},
            {"label": "A", "weight": 0.5, "matrix": [[2, 0], [0, 1]]},
        ],
    }))
    with pytest.raises(ValidationError):
        cli.load_measure(str(path))


def test_load_measure_parse_errors(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        cli.load_measure(str(path))
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"atoms": []}))
    with pytest.raises(ParseError):
        cli.load_measure(str(missing))


def test_load_measure_renormalizes_tiny_drift(tmp_path):
    path = tmp_path / "drift.json"
    w = 0.5 + 1e-10
    path.write_text(json.dumps({
        "dim": 2,
        "atoms": [
            {"label": "A", "weight": w, "matrix": [[1, 0], [0, 1]]},
            {"label": "B", "weight": w, "matrix": [[2, 0], [0, 1]]},
        ],
    }))
    meas = cli.load_measure(str(path))
    assert sum(a.weight for a in meas.atoms) == pytest.approx(1.0, abs=1e-15)


def test_simulate_identity(tmp_path):
    from ldplab.walk import make_measure

    path = tmp_path / "id.json"
    cli.write_measure(make_measure(2, [("I", np.eye(2), 1.0)]), str(path))
    code = cli.main([
        "simulate", "--measure", str(path), "--n", "5", "--samples", "10",
        "--out", str(tmp_path),
    ])
    assert code == 0
    rows = (tmp_path / "simulate.csv").read_text().strip().splitlines()
    assert rows[0] == "stream,kappa1,kappa2"
    for row in rows[1:]:
        _, k1, k2 = row.split(",")
        assert float(k1) == 0.0 and float(k2) == 0.0


def test_rate_csv_and_report(tmp_path, pair_file):
    code = cli.main([
        "rate", "--measure", pair_file, "--n", "10", "--grid", "3.0:3.5:0.05",
        "--out", str(tmp_path),
    ])
    assert code == 0
    report = json.loads((tmp_path / "rate_report.json").read_text())
    assert report["method"] == "ExactEnumeration"
    assert report["seed"] == 0
    assert report["version"]
    assert "wallClockSeconds" in report
    header = (tmp_path / "rate.csv").read_text().splitlines()[0]
    assert header == "point,value,ciHalfWidth,flag"


def test_rate_rerun_byte_identical(tmp_path, pair_file):
    args = [
        "rate", "--measure", pair_file, "--n", "10", "--samples", "2000",
        "--grid", "3.0:3.5:0.05", "--seed", "4", "--out", str(tmp_path),
    ]
    assert cli.main(args) == 0
    first = (tmp_path / "rate.csv").read_bytes()
    assert cli.main(args) == 0
    assert (tmp_path / "rate.csv").read_bytes() == first
    # worker count does not change the data either
    assert cli.main(args + ["--workers", "4"]) == 0
    assert (tmp_path / "rate.csv").read_bytes() == first


def test_missing_measure_exits_1(tmp_path):
    code = cli.main([
        "rate", "--measure", str(tmp_path / "nope.json"), "--n", "5",
        "--grid", "0:1:0.5", "--out", str(tmp_path),
    ])
    assert code == 1
    err = json.loads((tmp_path / "error.json").read_text())
    assert err["error"] == "ParseError"


def test_bad_grid_spec_exits_1(tmp_path, pair_file):
    code = cli.main([
        "rate", "--measure", pair_file, "--n", "5", "--grid", "junk",
        "--out", str(tmp_path),
    ])
    assert code == 1


def test_spectrum_command(tmp_path, pair_file):
    code = cli.main([
        "spectrum", "--measure", pair_file, "--nmax", "6", "--out", str(tmp_path),
    ])
    assert code == 0
    report = json.loads((tmp_path / "spectrum_report.json").read_text())
    np.testing.assert_allclose(report["deepestHull"], [3.0, 3.5], atol=1e-9)


def test_jsr_command(tmp_path, pair_file):
    code = cli.main([
        "jsr", "--measure", pair_file, "--depth", "3", "--out", str(tmp_path),
    ])
    assert code == 0
    report = json.loads((tmp_path / "jsr_report.json").read_text())
    assert report["lower"] == pytest.approx(3.5, abs=1e-9)
    assert report["upper"] == pytest.approx(3.5, abs=1e-9)
    assert report["subUpper"] == pytest.approx(3.0, abs=1e-9)


def test_certify_command(tmp_path):
    from ldplab.walk import make_measure

    path = tmp_path / "schottky.json"
    g1, g2 = bench.schottky_pair()
    cli.write_measure(
        make_measure(2, [("g1", g1, 0.5), ("g2", g2, 0.5)]), str(path)
    )
    code = cli.main([
        "certify", "--measure", str(path), "--r", "0.1", "--eps", "0.05",
        "--samples", "500", "--out", str(tmp_path),
    ])
    assert code == 0
    report = json.loads((tmp_path / "certify_report.json").read_text())
    assert report["schottky"]["verdict"] is True
    assert report["members"]["g1"]["verdict"] is True


def test_example_boundary_command(tmp_path):
    code = cli.main([
        "example-boundary", "--k", "2", "--n", "8", "--nmax", "7",
        "--out", str(tmp_path),
    ])
    assert code == 0
    report = json.loads((tmp_path / "example_boundary_report.json").read_text())
    assert report["truncatedEndpoint"] == pytest.approx(3.5)
    assert report["spectrumRightEndpoint"] == pytest.approx(3.5, abs=0.05)
    assert report["interiorRateAt3"] <= report["minAtomWeightBound"] + 1e-9


def test_out_env_override(tmp_path, pair_file, monkeypatch):
    target = tmp_path / "envdir"
    monkeypatch.setenv("LDPLAB_OUT", str(target))
    code = cli.main([
        "rate", "--measure", pair_file, "--n", "6", "--grid", "3.0:3.5:0.1",
        "--out", str(tmp_path),
    ])
    assert code == 0
    assert (target / "rate.csv").exists()
