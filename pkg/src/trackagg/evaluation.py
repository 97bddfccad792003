"""Aggregation quality against ground truth.

Three views: index-paired RMSE after uniform arc-length resampling,
nearest-neighbour quality in both directions, and shape deviation (the
symmetric quality after similarity alignment, which strips position error
and leaves geometry error).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Trajectory, affine_align, pairwise_distances, resample

CSV_COLUMNS = ["rmse_m", "shape_deviation_m", "q_forward_m", "q_backward_m",
               "q_symmetric_m", "resample_npts"]


@dataclass(frozen=True)
class EvaluationReport:
    rmse_m: float
    shape_deviation_m: float
    q_forward_m: float
    q_backward_m: float
    q_symmetric_m: float
    resample_npts: int
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {c: getattr(self, c) for c in CSV_COLUMNS}
        d["metadata"] = self.metadata
        return d

    def to_csv_row(self) -> str:
        return ",".join(repr(getattr(self, c)) for c in CSV_COLUMNS)

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationReport":
        return cls(**{c: d[c] for c in CSV_COLUMNS}, metadata=d.get("metadata", {}))


def quality_directed(T1: Trajectory, T2: Trajectory) -> float:
    """RMS of the distance from each vertex of T1 to its nearest vertex of T2."""
    d = pairwise_distances(T1.xy, T2.xy)
    return float(np.sqrt((d.min(axis=1) ** 2).mean()))


def quality_symmetric(T1: Trajectory, T2: Trajectory) -> float:
    return 0.5 * (quality_directed(T1, T2) + quality_directed(T2, T1))


def rmse_pointwise(agg: Trajectory, truth: Trajectory, npts: int = 1000) -> float:
    """Index-paired RMSE after resampling both curves to npts points.

    Truncation to the common length is kept for robustness even though the
    sizes match after resampling.
    """
    a = resample(agg, npts).xy
    b = resample(truth, npts).xy
    m = min(len(a), len(b))
    return float(np.sqrt(((a[:m] - b[:m]) ** 2).sum(axis=1).mean()))


def shape_deviation(agg: Trajectory, truth: Trajectory, npts: int = 1000) -> float:
    """Symmetric nearest-neighbour quality after similarity alignment."""
    aligned = affine_align(agg, truth)
    a = resample(aligned, npts)
    b = resample(truth, npts)
    return quality_symmetric(a, b)


def evaluate(agg: Trajectory, truth: Trajectory, npts: int = 1000, metadata: dict | None = None) -> EvaluationReport:
    return EvaluationReport(
        rmse_m=rmse_pointwise(agg, truth, npts),
        shape_deviation_m=shape_deviation(agg, truth, npts),
        q_forward_m=quality_directed(agg, truth),
        q_backward_m=quality_directed(truth, agg),
        q_symmetric_m=quality_symmetric(agg, truth),
        resample_npts=npts,
        metadata=metadata or {},
    )
