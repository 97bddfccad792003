"""Planar trajectory primitives: points, polylines, norms, resampling, alignment.

Coordinates are assumed to live in a planar metric CRS (meters). No geodesy
happens here; see `trackagg.io` for the GPX projection.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class GeometryError(ValueError):
    """Raised for degenerate geometry (zero length, collinear fits, ...)."""


class Norm(enum.Enum):
    L1 = 1
    L2 = 2
    LINF = "inf"


@dataclass(frozen=True)
class Trajectory:
    """Ordered polyline of 2D positions with optional timestamps.

    `xy` is an (n, 2) float array, n >= 2. If `t` is given it must be
    non-decreasing and the same length as `xy`.
    """

    xy: np.ndarray
    t: np.ndarray | None = None
    ident: str = ""

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise GeometryError(f"expected (n, 2) coordinates, got shape {xy.shape}")
        if xy.shape[0] < 2:
            raise GeometryError("a trajectory needs at least 2 points")
        if not np.all(np.isfinite(xy)):
            raise GeometryError("non-finite coordinate")
        object.__setattr__(self, "xy", xy)
        if self.t is not None:
            t = np.asarray(self.t, dtype=float)
            if t.shape != (xy.shape[0],):
                raise GeometryError("timestamp array length mismatch")
            if np.any(np.diff(t) < 0):
                raise GeometryError("timestamps must be non-decreasing")
            object.__setattr__(self, "t", t)
        xy.setflags(write=False)

    @classmethod
    def from_points(cls, points, t=None, ident: str = "") -> "Trajectory":
        """Build a trajectory, dropping exactly-duplicated consecutive points.

        Duplicate removal keeps the abscissa strictly increasing, which the
        matching and resampling code relies on.
        """
        xy = np.asarray(points, dtype=float).reshape(-1, 2)
        keep = np.ones(len(xy), dtype=bool)
        keep[1:] = np.any(xy[1:] != xy[:-1], axis=1)
        if t is not None:
            t = np.asarray(t, dtype=float)[keep]
        return cls(xy[keep], t, ident)

    def __len__(self) -> int:
        return self.xy.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return self.xy.shape == other.xy.shape and bool(np.all(self.xy == other.xy))

    def __hash__(self) -> int:
        return hash(self.xy.tobytes())

    @property
    def length(self) -> float:
        return float(curvilinear_abscissa(self)[-1])

    def translated(self, v) -> "Trajectory":
        return Trajectory(self.xy + np.asarray(v, dtype=float), self.t, self.ident)


def point_distance(a, b, norm: Norm = Norm.L2) -> float:
    """Distance between two 2D points under the given norm. Timestamps ignored."""
    a = np.asarray(a, dtype=float)[:2]
    b = np.asarray(b, dtype=float)[:2]
    d = np.abs(a - b)
    if norm is Norm.L1:
        return float(d[0] + d[1])
    if norm is Norm.L2:
        return float(np.hypot(d[0], d[1]))
    return float(max(d[0], d[1]))


def pairwise_distances(P: np.ndarray, Q: np.ndarray, norm: Norm = Norm.L2) -> np.ndarray:
    """(|P|, |Q|) distance matrix under `norm`."""
    diff = np.abs(P[:, None, :] - Q[None, :, :])
    if norm is Norm.L1:
        return diff.sum(axis=2)
    if norm is Norm.L2:
        return np.sqrt((diff ** 2).sum(axis=2))
    return diff.max(axis=2)


def curvilinear_abscissa(traj: Trajectory) -> np.ndarray:
    """Arc-length coordinate of each vertex; s[0] = 0, strictly increasing."""
    seg = np.linalg.norm(np.diff(traj.xy, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(seg)])


def resample(traj: Trajectory, npts: int) -> Trajectory:
    """Resample to `npts` vertices at equal arc-length spacing.

    Endpoints are preserved exactly; interior vertices are linear
    interpolations along the original segments.
    """
    if npts < 2:
        raise GeometryError("resample needs npts >= 2")
    s = curvilinear_abscissa(traj)
    total = s[-1]
    if total <= 0.0:
        raise GeometryError("cannot resample a zero-length trajectory")
    target = np.linspace(0.0, total, npts)
    x = np.interp(target, s, traj.xy[:, 0])
    y = np.interp(target, s, traj.xy[:, 1])
    x[-1], y[-1] = traj.xy[-1]
    x[0], y[0] = traj.xy[0]
    return Trajectory(np.column_stack([x, y]), ident=traj.ident)


def similarity_fit(src: np.ndarray, dst: np.ndarray):
    """Least-squares similarity transform (rotation, uniform scale, translation)
    mapping point set `src` onto `dst` (index-paired), Umeyama's closed form.

    Returns (scale, R, t) with dst ~ scale * src @ R.T + t.
    """
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    mu_s = src.mean(axis=0)
    mu_d = dst.mean(axis=0)
    cs = src - mu_s
    cd = dst - mu_d
    cov = cd.T @ cs / len(src)
    U, D, Vt = np.linalg.svd(cov)
    # Rank d-1 (collinear sets) is still well-posed with the determinant
    # correction below; only a fully degenerate cross-covariance is fatal.
    if D[0] <= 1e-12:
        raise GeometryError("degenerate point sets: similarity fit is rank-deficient")
    S = np.eye(2)
    if np.linalg.det(U) * np.linalg.det(Vt) < 0:
        S[1, 1] = -1.0
    R = U @ S @ Vt
    var_s = (cs ** 2).sum() / len(src)
    scale = float(np.trace(np.diag(D) @ S) / var_s)
    t = mu_d - scale * R @ mu_s
    return scale, R, t


def affine_align(moving: Trajectory, reference: Trajectory, npts: int = 200) -> Trajectory:
    """Align `moving` onto `reference` with a least-squares similarity transform.

    Correspondences come from resampling both curves to `npts` points and
    pairing by index. The fitted transform is applied to the original
    vertices of `moving`.
    """
    src = resample(moving, npts).xy
    dst = resample(reference, npts).xy
    scale, R, t = similarity_fit(src, dst)
    return Trajectory(scale * moving.xy @ R.T + t, moving.t, moving.ident)
