"""The modular iterative aggregation engine.

Each iteration matches every trajectory against the current master,
reduces each connected component to one representative per master index,
aggregates the representatives, optionally anchors the result to existing
positions, and feeds the aggregate back in as the next master.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .geometry import Norm, Trajectory, curvilinear_abscissa
from .matching import Component, Matching, connected_components, dtw_match, frechet_match, nn_match


class MasterMode(enum.Enum):
    MEDIAN_LENGTH = "median_length"
    MIN_SUM_DISTANCE = "min_sum_distance"
    RANDOM = "random"


class MatchMode(enum.Enum):
    DTW_L1 = "dtw_l1"
    DTW_L2 = "dtw_l2"
    FRECHET = "frechet"
    NEAREST_NEIGHBOUR = "nearest_neighbour"


class RepresentMode(enum.Enum):
    BARYCENTRE = "barycentre"
    MEDIAN_TIME = "median_time"
    FURTHEST = "furthest"


class AggMode(enum.Enum):
    MARGINAL_MEDIAN = "marginal_median"
    GEOMETRIC_MEDIAN = "geometric_median"
    MEAN_L2 = "mean_l2"
    MIN_COVERING_CIRCLE = "min_covering_circle"


class Termination(enum.Enum):
    CONVERGED = "CONVERGED"
    CYCLE_DETECTED = "CYCLE_DETECTED"
    ITER_MAX = "ITER_MAX"


@dataclass(frozen=True)
class MiaaConfig:
    master_mode: MasterMode = MasterMode.MEDIAN_LENGTH
    match_mode: MatchMode = MatchMode.FRECHET
    represent_mode: RepresentMode = RepresentMode.BARYCENTRE
    agg_mode: AggMode = AggMode.MARGINAL_MEDIAN
    anchor: bool = False
    threshold: float = 0.01
    iter_max: int = 25
    seed: int | None = None

    def __post_init__(self):
        if not (np.isfinite(self.threshold) and self.threshold > 0):
            raise ValueError("threshold must be finite and positive")
        if self.iter_max < 1:
            raise ValueError("iter_max must be >= 1")
        if self.master_mode is MasterMode.RANDOM and self.seed is None:
            raise ValueError("master_mode RANDOM requires a seed")

    def to_dict(self) -> dict:
        return {
            "master_mode": self.master_mode.value,
            "match_mode": self.match_mode.value,
            "represent_mode": self.represent_mode.value,
            "agg_mode": self.agg_mode.value,
            "anchor": self.anchor,
            "threshold": self.threshold,
            "iter_max": self.iter_max,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MiaaConfig":
        kw = dict(d)
        for key, enum_cls in (
            ("master_mode", MasterMode),
            ("match_mode", MatchMode),
            ("represent_mode", RepresentMode),
            ("agg_mode", AggMode),
        ):
            if key in kw and not isinstance(kw[key], enum_cls):
                kw[key] = enum_cls(str(kw[key]).lower())
        return cls(**kw)


@dataclass(frozen=True)
class AggregationResult:
    aggregated: Trajectory
    iterations: int
    termination: Termination
    per_iteration_deltas: list[float]
    masters: list[Trajectory]
    cycle_period: int | None = None


# --- master selection ---------------------------------------------------

def select_master(collection: list[Trajectory], mode: MasterMode, seed: int | None = None) -> int:
    if not collection:
        raise ValueError("empty collection")
    if mode is MasterMode.MEDIAN_LENGTH:
        lengths = np.array([t.length for t in collection])
        return int(np.argmin(np.abs(lengths - np.median(lengths))))
    if mode is MasterMode.MIN_SUM_DISTANCE:
        from .evaluation import quality_symmetric

        n = len(collection)
        sums = np.zeros(n)
        for a in range(n):
            for b in range(a + 1, n):
                q = quality_symmetric(collection[a], collection[b])
                sums[a] += q
                sums[b] += q
        return int(np.argmin(sums))
    if seed is None:
        raise ValueError("RANDOM master selection requires a seed")
    return int(np.random.default_rng(seed).integers(0, len(collection)))


# --- representatives ----------------------------------------------------

def representative(component: Component, X: Trajectory, R: Trajectory, mode: RepresentMode) -> np.ndarray:
    idxs = component.traj_indices
    if len(idxs) == 1:
        return X.xy[idxs[0]].copy()
    pts = X.xy[list(idxs)]
    if mode is RepresentMode.BARYCENTRE:
        return pts.mean(axis=0)
    if mode is RepresentMode.MEDIAN_TIME:
        # Timestamps are monotone in index order, so the lower-median index
        # is the lower-median timestamp as well.
        return X.xy[idxs[(len(idxs) - 1) // 2]].copy()
    rj = R.xy[component.master_indices[0]]
    d = np.linalg.norm(pts - rj, axis=1)
    return pts[int(np.argmax(d))].copy()


# --- aggregation operators ----------------------------------------------

def marginal_median(points: np.ndarray) -> np.ndarray:
    return np.median(points, axis=0)


def mean_l2(points: np.ndarray) -> np.ndarray:
    return points.mean(axis=0)


def geometric_median(points: np.ndarray, tol: float = 1e-9, max_iter: int = 10000) -> np.ndarray:
    """Weiszfeld iteration for the point minimizing the sum of L2 distances.

    When the iterate lands on an input point, the subgradient optimality
    condition decides whether to stop there or to nudge off and continue.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) == 1:
        return pts[0].copy()
    y = pts.mean(axis=0)
    obj = np.linalg.norm(pts - y, axis=1).sum()
    for _ in range(max_iter):
        d = np.linalg.norm(pts - y, axis=1)
        on = d < 1e-12
        if on.any():
            others = pts[~on]
            do = np.linalg.norm(others - y, axis=1)
            grad = ((others - y) / do[:, None]).sum(axis=0)
            if np.linalg.norm(grad) <= on.sum() + 1e-12:
                return y
            y = y + 1e-9 * grad / np.linalg.norm(grad)
            d = np.linalg.norm(pts - y, axis=1)
        w = 1.0 / d
        y_new = (pts * w[:, None]).sum(axis=0) / w.sum()
        obj_new = np.linalg.norm(pts - y_new, axis=1).sum()
        if obj_new > obj + 1e-9 * (1.0 + obj):
            raise AssertionError("Weiszfeld objective increased")
        step = np.linalg.norm(y_new - y)
        y, obj = y_new, obj_new
        if step < tol:
            break
    return y


def _circle_two(a, b):
    c = (a + b) / 2.0
    return c, float(np.linalg.norm(a - c))


def _circle_three(a, b, c):
    # Circumcenter computed in coordinates relative to `a` so the result is
    # exactly translation-equivariant.
    ab = b - a
    ac = c - a
    d = 2.0 * (ab[0] * ac[1] - ab[1] * ac[0])
    if d == 0.0:
        return None
    ux = (ac[1] * (ab @ ab) - ab[1] * (ac @ ac)) / d
    uy = (ab[0] * (ac @ ac) - ac[0] * (ab @ ab)) / d
    center = a + np.array([ux, uy])
    return center, float(np.hypot(ux, uy))


def _in_circle(circle, p, eps=1e-9):
    c, r = circle
    return np.linalg.norm(p - c) <= r * (1.0 + 1e-12) + eps


def min_covering_circle(points: np.ndarray, shuffle_seed: int = 0):
    """Smallest enclosing circle (Welzl, incremental form on a seeded shuffle).

    Returns (center, radius). The minimum circle is unique, so the result
    does not depend on the shuffle.
    """
    pts = [p for p in np.asarray(points, dtype=float)]
    order = np.random.default_rng(shuffle_seed).permutation(len(pts))
    pts = [pts[k] for k in order]
    circle = (pts[0].copy(), 0.0)
    for i, p in enumerate(pts):
        if _in_circle(circle, p, eps=1e-12):
            continue
        circle = (p.copy(), 0.0)
        for k, q in enumerate(pts[:i]):
            if _in_circle(circle, q, eps=1e-12):
                continue
            circle = _circle_two(p, q)
            for s in pts[:k]:
                if _in_circle(circle, s, eps=1e-12):
                    continue
                cand = _circle_three(p, q, s)
                if cand is not None:
                    circle = cand
    return circle


def aggregate_point(reps: np.ndarray, mode: AggMode) -> np.ndarray:
    reps = np.atleast_2d(np.asarray(reps, dtype=float))
    if len(reps) == 1:
        return reps[0].copy()
    if mode is AggMode.MARGINAL_MEDIAN:
        return marginal_median(reps)
    if mode is AggMode.MEAN_L2:
        return mean_l2(reps)
    if mode is AggMode.GEOMETRIC_MEDIAN:
        return geometric_median(reps)
    return min_covering_circle(reps)[0]


def anchor(candidate: np.ndarray, anchor_set: np.ndarray) -> np.ndarray:
    """Snap `candidate` to the nearest member of `anchor_set` (L2).

    Exact distance ties go to the earliest entry, so list order matters.
    """
    anchor_set = np.atleast_2d(np.asarray(anchor_set, dtype=float))
    if len(anchor_set) == 0:
        raise ValueError("empty anchor set")
    d2 = ((anchor_set - np.asarray(candidate, dtype=float)) ** 2).sum(axis=1)
    return anchor_set[int(np.argmin(d2))].copy()


# --- the iteration ------------------------------------------------------

def _match(X: Trajectory, R: Trajectory, mode: MatchMode) -> Matching:
    if mode is MatchMode.DTW_L1:
        return dtw_match(X, R, Norm.L2, p=1)
    if mode is MatchMode.DTW_L2:
        return dtw_match(X, R, Norm.L2, p=2)
    if mode is MatchMode.FRECHET:
        return frechet_match(X, R)
    return nn_match(X, R)


def _components_by_master(matching: Matching, X: Trajectory, R: Trajectory) -> list[Component]:
    """One component per master index.

    Ordered matchings decompose into connected components; for the
    nearest-neighbour matching the per-master-index link groups play the
    same role.
    """
    m = len(R)
    if matching.ordered:
        by_j: list[Component | None] = [None] * m
        for comp in connected_components(matching):
            for j in comp.master_indices:
                by_j[j] = comp
        return by_j  # every j covered: ordered matchings have no isolated vertex
    groups: list[list[int]] = [[] for _ in range(m)]
    for i, j in matching.links:
        groups[j].append(i)
    return [Component((j,), tuple(sorted(set(g)))) for j, g in enumerate(groups)]


def miaa_step(master: Trajectory, collection: list[Trajectory], config: MiaaConfig) -> Trajectory:
    """One aggregation pass: match, select representatives, aggregate, anchor."""
    if not collection:
        raise ValueError("empty collection")
    m = len(master)
    comps = []
    for X in collection:
        matching = _match(X, master, config.match_mode)
        comps.append(_components_by_master(matching, X, master))

    out = np.empty((m, 2))
    for j in range(m):
        reps = np.array([
            representative(comps[t][j], collection[t], master, config.represent_mode)
            for t in range(len(collection))
        ])
        agg = aggregate_point(reps, config.agg_mode)
        if config.anchor:
            candidates = [master.xy[j]]
            for t, X in enumerate(collection):
                candidates.extend(X.xy[i] for i in comps[t][j].traj_indices)
            agg = anchor(agg, np.array(candidates))
        out[j] = agg
    return Trajectory(out, ident="aggregate")


def _rms_delta(a: Trajectory, b: Trajectory) -> float:
    return float(np.sqrt(((a.xy - b.xy) ** 2).sum(axis=1).mean()))


def miaa_run(collection: list[Trajectory], config: MiaaConfig) -> AggregationResult:
    """Iterate miaa_step until convergence, a cycle, or the iteration cap."""
    if not collection:
        raise ValueError("empty collection")
    idx = select_master(collection, config.master_mode, config.seed)
    master = collection[idx]
    masters = [master]
    seen = {master.xy.tobytes(): 0}
    deltas: list[float] = []

    for _ in range(config.iter_max):
        agg = miaa_step(master, collection, config)
        deltas.append(_rms_delta(agg, master))
        masters.append(agg)
        if deltas[-1] < config.threshold:
            return AggregationResult(agg, len(deltas), Termination.CONVERGED, deltas, masters)
        key = agg.xy.tobytes()
        if key in seen:
            first = seen[key]
            period = len(masters) - 1 - first
            # Return the cycle member with the smallest delta to its
            # predecessor; ties go to the earliest member.
            members = [(deltas[k - 1], masters[k]) for k in range(first + 1, len(masters))]
            best = min(d for d, _ in members)
            chosen = next(t for d, t in members if d == best)
            return AggregationResult(chosen, len(deltas), Termination.CYCLE_DETECTED,
                                     deltas, masters, cycle_period=period)
        seen[key] = len(masters) - 1
        master = agg
    return AggregationResult(masters[-1], len(deltas), Termination.ITER_MAX, deltas, masters)
