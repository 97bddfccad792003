"""Synthetic GNSS tracks and correlated positioning error.

Error realizations are drawn as y = A x with x i.i.d. standard normal and
A the Cholesky factor of a stationary covariance matrix built from a
kernel over curvilinear abscissas. Layers (datum drift, GNSS error, white
noise) compose by repeated application.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .geometry import Trajectory, curvilinear_abscissa, resample


class SimulationError(ValueError):
    pass


class KernelKind(enum.Enum):
    DIRAC = "dirac"
    EXPONENTIAL = "exponential"
    GAUSSIAN = "gaussian"
    TRIANGULAR = "triangular"
    SINC = "sinc"


class NoiseDirection(enum.Enum):
    BOTH_AXES = "both_axes"
    ORTHOGONAL = "orthogonal"


@dataclass(frozen=True)
class Kernel:
    kind: KernelKind
    scope: float = 1.0  # meters; ignored for DIRAC

    def __post_init__(self):
        if self.kind is not KernelKind.DIRAC and not (np.isfinite(self.scope) and self.scope > 0):
            raise SimulationError("kernel scope must be finite and positive")


@dataclass(frozen=True)
class NoiseLayer:
    amplitude: float  # meters, marginal standard deviation
    kernel: Kernel
    direction: NoiseDirection = NoiseDirection.BOTH_AXES

    def __post_init__(self):
        if not (np.isfinite(self.amplitude) and self.amplitude >= 0):
            raise SimulationError("amplitude must be finite and >= 0")

    def to_dict(self) -> dict:
        return {
            "amplitude_m": self.amplitude,
            "kernel": self.kernel.kind.value,
            "scope_m": self.kernel.scope,
            "direction": self.direction.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseLayer":
        return cls(
            amplitude=float(d["amplitude_m"]),
            kernel=Kernel(KernelKind(str(d["kernel"]).lower()), float(d.get("scope_m", 1.0))),
            direction=NoiseDirection(str(d.get("direction", "both_axes")).lower()),
        )


def kernel_eval(kernel: Kernel, h) -> np.ndarray:
    """Correlation at separation h >= 0 meters; every kind is 1 at h = 0."""
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise SimulationError("separation must be non-negative")
    if kernel.kind is KernelKind.DIRAC:
        return np.where(h == 0.0, 1.0, 0.0)
    u = h / kernel.scope
    if kernel.kind is KernelKind.EXPONENTIAL:
        return np.exp(-u)
    if kernel.kind is KernelKind.GAUSSIAN:
        return np.exp(-(u ** 2))
    if kernel.kind is KernelKind.TRIANGULAR:
        return np.maximum(0.0, 1.0 - u)
    return np.sinc(u)  # sin(pi u) / (pi u), 1 at u = 0


def build_covariance(layer: NoiseLayer, abscissas) -> np.ndarray:
    """Sigma_ij = amplitude^2 * gamma(|s_j - s_i|), plus a diagonal jitter
    of 1e-10 * amplitude^2 so a Cholesky factor always exists."""
    s = np.asarray(abscissas, dtype=float)
    if np.any(np.diff(s) <= 0):
        raise SimulationError("abscissas must be strictly increasing")
    h = np.abs(s[None, :] - s[:, None])
    sigma = layer.amplitude ** 2 * kernel_eval(layer.kernel, h)
    sigma[np.diag_indices_from(sigma)] += 1e-10 * layer.amplitude ** 2
    return sigma


def cholesky_factor(sigma: np.ndarray) -> np.ndarray:
    """Lower-triangular A with A A^T = sigma; raises naming the failing pivot."""
    try:
        return scipy.linalg.cholesky(np.asarray(sigma, dtype=float), lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SimulationError(f"covariance factorization failed: {exc}") from exc


def sample_correlated(A: np.ndarray, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """y = A x with x i.i.d. standard normal; (n,) or (n, size)."""
    n = A.shape[0]
    shape = (n,) if size is None else (n, size)
    return A @ rng.standard_normal(shape)


def _vertex_normals(traj: Trajectory) -> np.ndarray:
    """Unit normal at each vertex: normal of the bisector of the adjacent
    segments, endpoints from their single adjacent segment."""
    d = np.diff(traj.xy, axis=0)
    d = d / np.linalg.norm(d, axis=1, keepdims=True)
    tangents = np.empty_like(traj.xy)
    tangents[0] = d[0]
    tangents[-1] = d[-1]
    if len(traj) > 2:
        mid = d[:-1] + d[1:]
        norms = np.linalg.norm(mid, axis=1, keepdims=True)
        # A hairpin makes the bisector vanish; fall back to the incoming segment.
        bad = norms[:, 0] < 1e-12
        mid[bad] = d[:-1][bad]
        norms[bad] = np.linalg.norm(mid[bad], axis=1, keepdims=True)
        tangents[1:-1] = mid / norms
    return np.column_stack([-tangents[:, 1], tangents[:, 0]])


def noise_track(traj: Trajectory, layer: NoiseLayer, rng: np.random.Generator) -> Trajectory:
    """Add one correlated noise layer to a trajectory.

    BOTH_AXES draws two independent realizations (x first, then y);
    ORTHOGONAL draws one and applies it along the local vertex normals.
    """
    if layer.amplitude == 0.0:
        return traj
    s = curvilinear_abscissa(traj)
    A = cholesky_factor(build_covariance(layer, s))
    if layer.direction is NoiseDirection.BOTH_AXES:
        dx = sample_correlated(A, rng)
        dy = sample_correlated(A, rng)
        disp = np.column_stack([dx, dy])
    else:
        disp = _vertex_normals(traj) * sample_correlated(A, rng)[:, None]
    return Trajectory(traj.xy + disp, traj.t, traj.ident)


def apply_noise_stack(traj: Trajectory, layers: list[NoiseLayer], rng: np.random.Generator) -> Trajectory:
    for layer in layers:
        traj = noise_track(traj, layer, rng)
    return traj


class TrackShape(enum.Enum):
    STRAIGHT = "straight"
    MODERATE = "moderate"
    SWITCHBACKS = "switchbacks"


_HEADING_STEP_SD = {
    TrackShape.STRAIGHT: 0.02,
    TrackShape.MODERATE: 0.1,
    TrackShape.SWITCHBACKS: 0.08,
}
_STEP_M = 3.0


def generate_base_track(shape: TrackShape, length_target: float, rng: np.random.Generator) -> Trajectory:
    """Random ground-truth path of the requested character, ~length_target m.

    Paths are heading random walks with a shape-specific turn rate;
    switchbacks additionally get a strong orthogonal sinc-kernel
    perturbation that folds the path into periodic hairpins. The result is
    rescaled to the target length and resampled to ~3 m vertex spacing.
    """
    if length_target <= 0:
        raise SimulationError("length_target must be positive")
    nsteps = max(2, int(round(length_target / _STEP_M)))
    headings = np.cumsum(rng.normal(0.0, _HEADING_STEP_SD[shape], nsteps))
    steps = _STEP_M * np.column_stack([np.cos(headings), np.sin(headings)])
    xy = np.vstack([[0.0, 0.0], np.cumsum(steps, axis=0)])
    traj = Trajectory(xy)
    if shape is TrackShape.SWITCHBACKS:
        layer = NoiseLayer(20.0, Kernel(KernelKind.SINC, 20.0), NoiseDirection.ORTHOGONAL)
        traj = noise_track(traj, layer, rng)
    scale = length_target / traj.length
    traj = Trajectory(traj.xy * scale)
    return resample(traj, max(2, int(round(traj.length / _STEP_M)) + 1))
