import json

import numpy as np
import pytest

from trackagg.cli import main
from trackagg.io import read_csv


def _files_equal(a, b):
    return a.read_bytes() == b.read_bytes()


def test_generate_deterministic(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        assert main(["generate", "--seed", "3", "-n", "3", "--out", str(d)]) == 0
    for name in ("truth.csv", "track_00.csv", "track_02.csv", "manifest.json"):
        assert _files_equal(d1 / name, d2 / name)
    manifest = json.loads((d1 / "manifest.json").read_text())
    assert len(manifest["noise_stack"]) == 3
    assert manifest["files"][0] == "truth.csv"


def test_generate_zero_amplitude_equals_truth(tmp_path):
    cfg = {"noise_stack": [{"amplitude_m": 0.0, "kernel": "dirac"}]}
    out = tmp_path / "z"
    assert main(["generate", "--seed", "1", "-n", "2", "--out", str(out),
                 "--config", json.dumps(cfg)]) == 0
    assert _files_equal(out / "truth.csv", out / "track_00.csv") or \
        np.array_equal(read_csv(out / "truth.csv").xy, read_csv(out / "track_00.csv").xy)


def test_generate_expected_point_density(tmp_path):
    out = tmp_path / "g"
    assert main(["generate", "--shape", "straight", "--length", "300",
                 "--seed", "2", "-n", "5", "--out", str(out)]) == 0
    truth = read_csv(out / "truth.csv")
    assert 90 <= len(truth) <= 110  # ~3 m spacing over 300 m


def test_aggregate_single_input_is_identity(tmp_path):
    gen = tmp_path / "gen"
    main(["generate", "--seed", "4", "-n", "1", "--out", str(gen)])
    agg = tmp_path / "agg"
    assert main(["aggregate", str(gen / "track_00.csv"), "--out", str(agg)]) == 0
    assert np.array_equal(read_csv(agg / "aggregate.csv").xy,
                          read_csv(gen / "track_00.csv").xy)
    report = json.loads((agg / "report.json").read_text())
    assert report["termination"] == "CONVERGED"


def test_pipeline_smoke(tmp_path):
    gen, agg, ev = tmp_path / "gen", tmp_path / "agg", tmp_path / "eval"
    assert main(["generate", "--seed", "5", "-n", "5", "--out", str(gen)]) == 0
    inputs = sorted(str(p) for p in gen.glob("track_*.csv"))
    assert main(["aggregate", *inputs, "--out", str(agg)]) == 0
    assert main(["evaluate", str(agg / "aggregate.csv"), str(gen / "truth.csv"),
                 "--out", str(ev)]) == 0
    report = json.loads((ev / "evaluation.json").read_text())
    assert report["rmse_m"] > 0.0
    svg = (ev / "evaluation.svg").read_text()
    assert svg.lstrip().startswith("<?xml")
    assert (ev / "evaluation.csv").read_text().startswith("rmse_m,")


def test_counterexample_command(tmp_path, capsys):
    out = tmp_path / "ce"
    assert main(["counterexample", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "termination=CYCLE_DETECTED" in printed and "period=2" in printed
    report = json.loads((out / "counterexample.json").read_text())
    assert report["termination"] == "CYCLE_DETECTED"
    assert report["cycle_period"] == 2


def test_experiment_and_plot_regeneration(tmp_path):
    spec = {"shapes": ["straight"], "sizes": [3, 5], "replications": 1,
            "configs": [{"match_mode": "frechet"}, {"match_mode": "dtw_l2"}]}
    out = tmp_path / "xp"
    assert main(["experiment", "--config", json.dumps(spec), "--seed", "11",
                 "--out", str(out)]) == 0
    csv_text = (out / "results.csv").read_text()
    assert csv_text.count("\n") == 1 + 1 * 2 * 1 * 2  # header + cells
    out2 = tmp_path / "xp2"
    assert main(["plot", str(out / "results.csv"), "--out", str(out2)]) == 0
    for name in ("rmse_vs_size.svg", "shape_deviation_vs_size.svg"):
        assert _files_equal(out / name, out2 / name)


def test_data_error_exit_code(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1.0,oops\n")
    assert main(["aggregate", str(bad), "--out", str(tmp_path / "o")]) == 3
    assert main(["aggregate", str(tmp_path / "missing.csv"),
                 "--out", str(tmp_path / "o")]) == 3


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_gpx_input_accepted(tmp_path):
    gpx = tmp_path / "in.gpx"
    gpx.write_text('<gpx><trk><trkseg>'
                   '<trkpt lat="45.0" lon="5.0"/><trkpt lat="45.001" lon="5.0"/>'
                   '<trkpt lat="45.002" lon="5.0"/>'
                   '</trkseg></trk></gpx>')
    agg = tmp_path / "agg"
    assert main(["aggregate", str(gpx), "--out", str(agg)]) == 0
    assert len(read_csv(agg / "aggregate.csv")) == 3
