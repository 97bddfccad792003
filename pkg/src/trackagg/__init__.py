"""trackagg: GNSS trajectory aggregation, simulation, and evaluation."""

from .geometry import (GeometryError, Norm, Trajectory, affine_align,
                       curvilinear_abscissa, pairwise_distances,
                       point_distance, resample, similarity_fit)
from .matching import (Component, Matching, MatchLink, connected_components,
                       dtw_match, frechet_match, nn_match)
from .miaa import (AggMode, AggregationResult, MasterMode, MatchMode,
                   MiaaConfig, RepresentMode, Termination, aggregate_point,
                   anchor, geometric_median, marginal_median, mean_l2,
                   miaa_run, miaa_step, min_covering_circle, select_master)
from .noisesim import (Kernel, KernelKind, NoiseDirection, NoiseLayer,
                       SimulationError, TrackShape, apply_noise_stack,
                       build_covariance, cholesky_factor, generate_base_track,
                       kernel_eval, noise_track, sample_correlated)
from .evaluation import (EvaluationReport, evaluate, quality_directed,
                         quality_symmetric, rmse_pointwise, shape_deviation)
from .io import DataError, parse_gpx, read_csv, write_csv, write_gpx
from .experiment import ExperimentSpec, run_cell, run_sweep, write_results

__version__ = "0.1.0"

__all__ = [
    "GeometryError", "Norm", "Trajectory", "affine_align",
    "curvilinear_abscissa", "pairwise_distances", "point_distance",
    "resample", "similarity_fit",
    "Component", "Matching", "MatchLink", "connected_components",
    "dtw_match", "frechet_match", "nn_match",
    "AggMode", "AggregationResult", "MasterMode", "MatchMode", "MiaaConfig",
    "RepresentMode", "Termination", "aggregate_point", "anchor",
    "geometric_median", "marginal_median", "mean_l2", "miaa_run", "miaa_step",
    "min_covering_circle", "select_master",
    "Kernel", "KernelKind", "NoiseDirection", "NoiseLayer", "SimulationError",
    "TrackShape", "apply_noise_stack", "build_covariance", "cholesky_factor",
    "generate_base_track", "kernel_eval", "noise_track", "sample_correlated",
    "EvaluationReport", "evaluate", "quality_directed", "quality_symmetric",
    "rmse_pointwise", "shape_deviation",
    "DataError", "parse_gpx", "read_csv", "write_csv", "write_gpx",
    "ExperimentSpec", "run_cell", "run_sweep", "write_results",
    "__version__",
]
