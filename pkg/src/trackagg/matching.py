"""Bipartite matchings between a trajectory and the master polyline.

Ordered matchings (DTW, discrete Fréchet) come out of an O(nm) dynamic
program; the nearest-neighbour matching ignores ordering. Connected
components of the matching graph are the unit from which representatives
are later drawn.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

from .geometry import Norm, Trajectory, pairwise_distances


class MatchLink(NamedTuple):
    i: int  # index into the trajectory X
    j: int  # index into the master R


@dataclass(frozen=True)
class Matching:
    links: tuple[MatchLink, ...]
    ordered: bool
    n: int  # |X|
    m: int  # |R|
    cost: float = 0.0      # DP objective (sum d^p, or minimax for Fréchet)
    distance: float = 0.0  # cost^(1/p), or the Fréchet distance

    def validate(self) -> None:
        covered_i = {l.i for l in self.links}
        covered_j = {l.j for l in self.links}
        if covered_i != set(range(self.n)) or covered_j != set(range(self.m)):
            raise ValueError("matching has an isolated vertex")
        if self.ordered:
            if MatchLink(0, 0) not in self.links or MatchLink(self.n - 1, self.m - 1) not in self.links:
                raise ValueError("ordered matching must link endpoints together")
            ls = sorted(self.links)
            for (i, j), (k, l) in zip(ls, ls[1:]):
                if i < k and j > l:
                    raise ValueError(f"crossing links ({i},{j}) and ({k},{l})")


@dataclass(frozen=True)
class Component:
    master_indices: tuple[int, ...]
    traj_indices: tuple[int, ...]


# DP move codes used during backtracking. Preference among cost ties:
# diagonal, then master-advance, then trajectory-advance.
_DIAG, _LEFT, _UP = 0, 1, 2


@njit(cache=True)
def _accumulate_sum(d):
    n, m = d.shape
    C = np.empty((n, m))
    C[0, 0] = d[0, 0]
    for j in range(1, m):
        C[0, j] = C[0, j - 1] + d[0, j]
    for i in range(1, n):
        C[i, 0] = C[i - 1, 0] + d[i, 0]
        for j in range(1, m):
            best = C[i - 1, j - 1]
            if C[i, j - 1] < best:
                best = C[i, j - 1]
            if C[i - 1, j] < best:
                best = C[i - 1, j]
            C[i, j] = d[i, j] + best
    return C


@njit(cache=True)
def _accumulate_minimax(d):
    n, m = d.shape
    C = np.empty((n, m))
    C[0, 0] = d[0, 0]
    for j in range(1, m):
        C[0, j] = max(C[0, j - 1], d[0, j])
    for i in range(1, n):
        C[i, 0] = max(C[i - 1, 0], d[i, 0])
        for j in range(1, m):
            best = C[i - 1, j - 1]
            if C[i, j - 1] < best:
                best = C[i, j - 1]
            if C[i - 1, j] < best:
                best = C[i - 1, j]
            C[i, j] = max(d[i, j], best)
    return C


def _backtrack(C: np.ndarray) -> list[MatchLink]:
    n, m = C.shape
    i, j = n - 1, m - 1
    links = [MatchLink(i, j)]
    while i or j:
        moves = []
        if i and j:
            moves.append((_DIAG, C[i - 1, j - 1]))
        if j:
            moves.append((_LEFT, C[i, j - 1]))
        if i:
            moves.append((_UP, C[i - 1, j]))
        best = min(c for _, c in moves)
        move = next(mv for mv, c in moves if c == best)
        if move == _DIAG:
            i, j = i - 1, j - 1
        elif move == _LEFT:
            j -= 1
        else:
            i -= 1
        links.append(MatchLink(i, j))
    links.reverse()
    return links


def dtw_match(X: Trajectory, R: Trajectory, norm: Norm = Norm.L2, p: int = 1) -> Matching:
    """Optimal ordered matching minimizing the sum of link distances^p."""
    if p < 1:
        raise ValueError("p must be >= 1")
    d = pairwise_distances(X.xy, R.xy, norm) ** p
    C = _accumulate_sum(d)
    links = _backtrack(C)
    cost = float(C[-1, -1])
    return Matching(tuple(links), True, len(X), len(R), cost, cost ** (1.0 / p))


def frechet_match(X: Trajectory, R: Trajectory, norm: Norm = Norm.L2) -> Matching:
    """Ordered matching realizing the discrete Fréchet distance.

    The minimax DP fixes the distance; among minimax-optimal matchings the
    realized link set minimizes the sum of link distances, which makes it
    deterministic.
    """
    d = pairwise_distances(X.xy, R.xy, norm)
    F = float(_accumulate_minimax(d)[-1, -1])
    # Min-sum DP restricted to cells within the Fréchet band.
    allowed = d <= F * (1.0 + 1e-12) + 1e-300
    d2 = np.where(allowed, d, np.inf)
    C = _accumulate_sum(d2)
    links = _backtrack(C)
    return Matching(tuple(links), True, len(X), len(R), F, F)


def nn_match(X: Trajectory, R: Trajectory, norm: Norm = Norm.L2) -> Matching:
    """Unordered nearest-neighbour matching.

    Every point of X links to its nearest master point; master points left
    unmatched then link to their nearest trajectory point, so no vertex is
    isolated. Ordering constraints are not enforced.
    """
    d = pairwise_distances(X.xy, R.xy, norm)
    jstar = d.argmin(axis=1)
    links = [MatchLink(i, int(j)) for i, j in enumerate(jstar)]
    missing = sorted(set(range(len(R))) - set(jstar.tolist()))
    istar = d.argmin(axis=0)
    links += [MatchLink(int(istar[j]), j) for j in missing]
    return Matching(tuple(links), False, len(X), len(R))


def connected_components(matching: Matching, nX: int | None = None, nR: int | None = None) -> list[Component]:
    """Connected components of the bipartite graph (X, R, links).

    Returned in increasing order of smallest master index.
    """
    n = matching.n if nX is None else nX
    m = matching.m if nR is None else nR
    parent = list(range(n + m))

    def find(a: int) -> int:
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    for i, j in matching.links:
        ra, rb = find(i), find(n + j)
        if ra != rb:
            parent[rb] = ra

    groups: dict[int, tuple[list[int], list[int]]] = {}
    for i, j in matching.links:
        g = groups.setdefault(find(i), ([], []))
        if i not in g[0]:
            g[0].append(i)
        if j not in g[1]:
            g[1].append(j)
    comps = [
        Component(tuple(sorted(js)), tuple(sorted(is_)))
        for is_, js in groups.values()
    ]
    comps.sort(key=lambda c: c.master_indices[0])
    return comps
