import numpy as np
import pytest

from trackagg.evaluation import (CSV_COLUMNS, EvaluationReport, evaluate,
                                 quality_directed, quality_symmetric,
                                 rmse_pointwise, shape_deviation)
from trackagg.geometry import Trajectory, resample


def _line(y=0.0, n=11, step=1.0):
    return Trajectory(np.column_stack([np.arange(n) * step, np.full(n, y)]))


def test_identical_tracks_score_zero():
    tr = _line()
    rep = evaluate(tr, tr)
    assert rep.rmse_m == 0.0
    assert rep.q_forward_m == 0.0 and rep.q_backward_m == 0.0
    assert rep.q_symmetric_m == 0.0
    assert rep.shape_deviation_m < 1e-9


def test_constant_offset_line():
    a, b = _line(0.0), _line(2.0)
    assert rmse_pointwise(a, b) == pytest.approx(2.0, abs=1e-6)
    assert quality_directed(a, b) == pytest.approx(2.0, abs=1e-12)
    assert quality_symmetric(a, b) == pytest.approx(2.0, abs=1e-12)
    # a pure translation is removed by the similarity alignment
    assert shape_deviation(a, b) < 1e-9


def test_quality_directed_is_rms_of_nearest():
    a = Trajectory(np.array([[0.0, 1.0], [10.0, 3.0]]))
    b = _line(0.0, n=11, step=1.0)
    assert quality_directed(a, b) == pytest.approx(np.sqrt((1.0 + 9.0) / 2.0), abs=1e-12)


def test_rmse_pointwise_matches_hand_rolled_oracle():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = Trajectory(np.cumsum(rng.normal(size=(15, 2)), axis=0))
        b = Trajectory(np.cumsum(rng.normal(size=(9, 2)), axis=0))
        ra = resample(a, 1000).xy
        rb = resample(b, 1000).xy
        oracle = np.sqrt(np.mean(np.sum((ra - rb) ** 2, axis=1)))
        assert rmse_pointwise(a, b) == pytest.approx(oracle, abs=1e-9)


def test_shape_deviation_invariant_to_similarity():
    rng = np.random.default_rng(4)
    truth = Trajectory(np.cumsum(rng.normal(size=(40, 2)), axis=0))
    wig = Trajectory(truth.xy + rng.normal(scale=0.05, size=truth.xy.shape))
    base = shape_deviation(wig, truth)
    theta = 1.1
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    moved = Trajectory(3.0 * wig.xy @ R.T + [100.0, -50.0])
    assert shape_deviation(moved, truth) == pytest.approx(base, abs=1e-6)


def test_report_serialization():
    rep = evaluate(_line(0.0), _line(1.0), metadata={"run": 1})
    d = rep.to_dict()
    assert list(d)[:-1] == CSV_COLUMNS
    assert EvaluationReport.from_dict(d) == rep
    row = rep.to_csv_row()
    assert len(row.split(",")) == len(CSV_COLUMNS)
