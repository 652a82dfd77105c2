"""Seeded random scenarios for property tests, benchmarks and the comparison suite."""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from agcvg import assignment
from agcvg.grid_world import (AERIAL, GROUND, EnergyModel, GridMap, RegionMask, Scenario,
                              VehicleParams, grid_shape_for)
from agcvg.planner import coverage_paths

LAYOUTS = ("full", "strip", "corridor", "blocks")


def random_obstacles(rng, h, w, density, max_tries=50):
    """Random rectangles over ~``density`` of the map, free space kept connected."""
    for _ in range(max_tries):
        occ = np.zeros((h, w), bool)
        target = density * h * w
        while occ.sum() < target:
            rh = int(rng.integers(1, max(2, h // 4) + 1))
            rw = int(rng.integers(1, max(2, w // 4) + 1))
            r = int(rng.integers(0, h - rh + 1))
            c = int(rng.integers(0, w - rw + 1))
            trial = occ.copy()
            trial[r:r + rh, c:c + rw] = True
            if trial.sum() > density * h * w + max(rh * rw, 1) / 2 and occ.sum() > 0:
                break
            occ = trial
        labels, n = ndimage.label(~occ)
        if n == 0:
            continue
        sizes = ndimage.sum(np.ones_like(labels), labels, index=np.arange(1, n + 1))
        keep = labels == 1 + int(np.argmax(sizes))
        occ = ~keep
        if occ.mean() <= density + 1e-12:
            return occ
    return np.zeros((h, w), bool)


def _region(rng, free, layout):
    h, w = free.shape
    m = np.zeros_like(free)
    if layout == "full":
        m[:] = True
    elif layout == "strip":              # horizontal band
        lo = int(rng.integers(0, max(1, h // 2)))
        m[lo:lo + max(2, h // 3)] = True
    elif layout == "corridor":           # L-shaped road: one row and one column
        r = int(rng.integers(0, h))
        c = int(rng.integers(0, w))
        m[r, :] = True
        m[:, c] = True
    elif layout == "blocks":
        for _ in range(int(rng.integers(2, 5))):
            bh, bw = int(rng.integers(2, max(3, h // 2))), int(rng.integers(2, max(3, w // 2)))
            r, c = int(rng.integers(0, h - bh + 1)), int(rng.integers(0, w - bw + 1))
            m[r:r + bh, c:c + bw] = True
    else:
        raise ValueError(f"unknown layout {layout!r}")
    m &= free
    if not m.any():
        m = free.copy()
    return m


def endurance_for(scenario_like, k, paths=None):
    """Endurance (s) whose aerial budget splits the aerial path into ``k`` clusters."""
    pa, pg = paths if paths is not None else coverage_paths(scenario_like)
    t_max = assignment.rendezvous_bound(pa, pg, scenario_like.aerial.speed)
    budget = pa.total_length / (k - 0.5) if k > 1 else pa.total_length * 1.5 + 1.0
    e = scenario_like.energy
    return budget / scenario_like.aerial.speed + 2 * t_max + e.takeoff_time + e.landing_time


def random_scenario(rng, size=(10, 30), density=(0.0, 0.2), clusters=(2, 6), resolution=1.0,
                    layouts=None, ground_layouts=None, name=""):
    """One random valid scenario; ``clusters`` sets the aerial cluster count range.

    ``layouts`` / ``ground_layouts`` restrict the region shapes drawn for the
    aerial and ground masks (both default to every layout).
    """
    h = int(rng.integers(size[0], size[1] + 1))
    w = int(rng.integers(size[0], size[1] + 1))
    occ = random_obstacles(rng, h, w, float(rng.uniform(*density)))
    free = ~occ
    layouts = layouts or LAYOUTS
    ground_layouts = ground_layouts or layouts
    am = _region(rng, free, layouts[int(rng.integers(len(layouts)))])
    gm = _region(rng, free, ground_layouts[int(rng.integers(len(ground_layouts)))])
    fa = resolution * float(rng.choice([1.0, 2.0, 3.0]))
    aerial = VehicleParams(fa, float(rng.uniform(1.0, 2.0)), AERIAL)
    ground = VehicleParams(resolution, float(rng.uniform(0.3, 1.0)), GROUND)
    grid = GridMap(w, h, resolution, occ)
    probe = Scenario(grid, RegionMask(am), RegionMask(gm), aerial, ground, EnergyModel(1e9),
                     name=name)
    k = int(rng.integers(clusters[0], clusters[1] + 1))
    return Scenario(grid, RegionMask(am), RegionMask(gm), aerial, ground,
                    EnergyModel(endurance_for(probe, k)), name=name)


def scenario_batch(seed, n, **kwargs):
    rng = np.random.default_rng(seed)
    return [random_scenario(rng, name=f"random_{seed}_{i:03d}", **kwargs) for i in range(n)]


def comparison_suite(seed=0, n=11, min_rendezvous=3, max_draws=500):
    """The first ``n`` draws on which both strategies find a plan with at least
    ``min_rendezvous`` recharges. Draws mix sizes, resolutions and layouts; the
    filter never looks at the overhead gap.
    """
    from agcvg import planner

    rng = np.random.default_rng(seed)
    out = []
    for i in range(max_draws):
        res = float(rng.choice([0.5, 1.0]))
        sc = random_scenario(rng, size=(12, 30), clusters=(3, 6), resolution=res,
                             name=f"suite_{len(out):02d}")
        paths = coverage_paths(sc)
        try:
            plans = [planner.plan(sc, s, paths=paths) for s in planner.STRATEGIES]
        except planner.InfeasibleError:
            continue
        if min(p.n_rendezvous for p in plans) >= min_rendezvous:
            out.append(sc)
            if len(out) == n:
                break
    return out


def field_scenario(width_m, height_m, resolution, endurance, aerial_footprint,
                   ground_footprint=1.0, name="field"):
    """Open field swept by the UAV; the UGV drives an L-shaped road along the
    left edge and the far end. Both vehicles at 1 m/s, UAV pad 1 m ahead of
    the UGV.
    """
    w, h = grid_shape_for(width_m, height_m, resolution)
    road = max(1, int(round(ground_footprint / resolution)))
    gm = np.zeros((h, w), bool)
    gm[:, :road] = True
    gm[-road:, :] = True
    return Scenario(GridMap(w, h, resolution, np.zeros((h, w), bool)),
                    RegionMask(np.ones((h, w), bool)), RegionMask(gm),
                    VehicleParams(aerial_footprint, 1.0, AERIAL),
                    VehicleParams(ground_footprint, 1.0, GROUND),
                    EnergyModel(endurance), launch_offset=(0.0, 1.0), name=name)


FIELD_LARGE = dict(width_m=10.0, height_m=25.0, resolution=0.5, endurance=90.0,
                   aerial_footprint=2.0, name="field_large")
FIELD_SMALL = dict(width_m=6.4, height_m=10.0, resolution=0.4, endurance=45.0,
                   aerial_footprint=1.2, name="field_small")
