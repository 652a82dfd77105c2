"""Bipartite costs, optimal matchings, and the worst-case rendezvous bound."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from agcvg import kernels

TMAX_MODES = ("nearest", "bottleneck", "min_cost_max_edge")


@dataclass(frozen=True, eq=False)
class BipartiteCosts:
    cost: np.ndarray
    unit: str = "m"

    def __post_init__(self):
        c = np.array(self.cost, dtype=np.float64, copy=True)
        if c.ndim != 2:
            raise ValueError(f"cost matrix must be 2-D, got shape {c.shape}")
        if not np.isfinite(c).all() or (c < 0).any():
            raise ValueError("costs must be finite and >= 0")
        c.setflags(write=False)
        object.__setattr__(self, "cost", c)

    @property
    def left_size(self):
        return self.cost.shape[0]

    @property
    def right_size(self):
        return self.cost.shape[1]


@dataclass(frozen=True)
class Assignment:
    pairs: tuple
    total_cost: float
    max_edge_cost: float

    @classmethod
    def from_pairs(cls, pairs, cost):
        pairs = tuple(sorted((int(i), int(j)) for i, j in pairs))
        vals = [cost[i, j] for i, j in pairs]
        return cls(pairs, float(sum(vals)), float(max(vals)) if vals else 0.0)

    def unmatched_left(self, left_size):
        used = {i for i, _ in self.pairs}
        return [i for i in range(left_size) if i not in used]

    def unmatched_right(self, right_size):
        used = {j for _, j in self.pairs}
        return [j for j in range(right_size) if j not in used]


def sample_indices(n, k):
    """``k`` evenly spaced indices into ``range(n)``, keeping both endpoints."""
    if k >= n:
        return np.arange(n)
    if k == 1:
        return np.array([0])
    return np.floor(np.linspace(0, n - 1, k) + 0.5).astype(np.int64)


def build_waypoint_costs(path_a, path_g, max_points=None):
    """xy distances between waypoints of two paths, sides equalized by down-sampling."""
    a = np.asarray(path_a.waypoints if hasattr(path_a, "waypoints") else path_a, dtype=np.float64)
    g = np.asarray(path_g.waypoints if hasattr(path_g, "waypoints") else path_g, dtype=np.float64)
    if len(a) == 0 or len(g) == 0:
        raise ValueError("both paths must have at least one waypoint")
    k = min(len(a), len(g))
    if max_points is not None:
        k = min(k, max_points)
    a = a[sample_indices(len(a), k)]
    g = g[sample_indices(len(g), k)]
    diff = a[:, None, :] - g[None, :, :]
    return BipartiteCosts(np.hypot(diff[..., 0], diff[..., 1]), unit="m")


def _solve(cost):
    if cost.shape[0] <= cost.shape[1]:
        cols = kernels.hungarian(cost)
        return [(i, int(j)) for i, j in enumerate(cols)]
    rows = kernels.hungarian(cost.T)
    return [(int(i), j) for j, i in enumerate(rows)]


def min_cost_matching(costs):
    """Maximum-cardinality matching of minimum total cost."""
    c = costs.cost
    if c.size == 0:
        return Assignment((), 0.0, 0.0)
    return Assignment.from_pairs(_solve(c), c)


def bottleneck_matching(costs):
    """Maximum-cardinality matching minimizing the largest matched cost.

    Binary search over distinct edge costs with a cardinality check; among the
    bottleneck-optimal matchings the one of least total cost is returned.
    """
    c = costs.cost
    if c.size == 0:
        return Assignment((), 0.0, 0.0)
    need = min(c.shape)
    values = np.unique(c)
    lo, hi = 0, len(values) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        match = kernels.max_matching(c <= values[mid])
        if np.count_nonzero(match >= 0) == need:
            hi = mid
        else:
            lo = mid + 1
    threshold = values[lo]
    big = float(c.max()) * (need + 1) + 1.0
    pairs = _solve(np.where(c <= threshold, c, big))
    return Assignment.from_pairs(pairs, c)


def rendezvous_bound(path_a, path_g, speed_a, mode="nearest", max_points=500):
    """Worst-case one-way rendezvous flight time ``t_max`` in seconds.

    ``nearest``: largest distance from any aerial waypoint to its closest
    ground waypoint. The matching modes use the largest matched edge of the
    waypoint-level bottleneck / min-cost assignment, on at most ``max_points``
    sampled waypoints per side.
    """
    if not speed_a > 0:
        raise ValueError("speed must be > 0")
    if mode == "nearest":
        d, _ = kernels.max_min_dist(path_a.waypoints, path_g.waypoints)
        return d / speed_a
    if mode == "bottleneck":
        return bottleneck_matching(build_waypoint_costs(path_a, path_g, max_points)).max_edge_cost / speed_a
    if mode == "min_cost_max_edge":
        return min_cost_matching(build_waypoint_costs(path_a, path_g, max_points)).max_edge_cost / speed_a
    raise ValueError(f"unknown t_max mode {mode!r}; expected one of {TMAX_MODES}")
