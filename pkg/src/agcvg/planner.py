"""Budget clustering, cluster matching and UAV path assembly.

Two strategies share the pipeline up to clustering:

* ``agcvg``: min-cost matching between aerial and ground clusters. Aerial
  clusters are flown in the order of their matched ground cluster along the
  UGV path and rendezvous at that cluster's end.
* ``greedy``: aerial clusters in path order. After each one the UAV flies to
  the closest reachable ground-cluster endpoint, recharges, and flies back to
  where it left the coverage path.

Timing model shared with the simulator: after a recharge (or at launch) the
UAV may stay docked on the UGV, consuming nothing, and take off later at any
UGV waypoint up to the rendezvous. Before the first flight the UAV sits on
its launch pad; when the pad offset is zero the pad is the UGV itself and the
UAV starts docked. Takeoff and landing durations are reserved
out of the endurance and do not count as flight. Hovering while waiting for the
UGV drains energy at the flight rate. The UGV follows its path monotonically
and stands still while the UAV lands and recharges.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from agcvg import assignment
from agcvg.bcd import CoveragePath, plan_coverage
from agcvg.frames import ugv_offset_to_planner
from agcvg.grid_world import AERIAL, GROUND

BUDGET_FORMULAS = ("T_minus_2tmax", "T_minus_tmax")
STRATEGIES = ("agcvg", "greedy")
ACTIONS = ("cover", "transit", "rendezvous", "dock")
EPS = 1e-9
CUT_RTOL = 1e-13
MAX_REPAIRS = 400


class InfeasibleError(RuntimeError):
    """No energy-feasible plan exists under the current parameters."""

    def __init__(self, message, budget=None, leg=None):
        self.budget = budget
        self.leg = leg
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class PathCluster:
    id: int
    role: str
    waypoints: np.ndarray

    def __post_init__(self):
        wp = np.array(self.waypoints, dtype=np.float64, copy=True).reshape(-1, 2)
        wp.setflags(write=False)
        object.__setattr__(self, "waypoints", wp)

    @property
    def length(self):
        if len(self.waypoints) < 2:
            return 0.0
        d = np.diff(self.waypoints, axis=0)
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    @property
    def start(self):
        return self.waypoints[0]

    @property
    def end(self):
        return self.waypoints[-1]


def cluster_path(path, budget_length, role=None):
    """Cut ``path`` left to right into pieces of at most ``budget_length`` meters.

    A cut that falls inside a leg is placed by linear interpolation, so each
    cluster except the last has length equal to the budget.
    """
    if not budget_length > 0:
        raise InfeasibleError(f"cluster budget must be > 0 m, got {budget_length:.6g} m",
                              budget=budget_length)
    role = path.role if role is None else role
    wp = path.waypoints
    if len(wp) == 0:
        return []
    limit = budget_length * (1.0 + CUT_RTOL)
    pieces = []
    cur = [wp[0]]
    used = 0.0
    p = wp[0]
    for i in range(1, len(wp)):
        q = wp[i]
        seg = float(np.hypot(*(q - p)))
        while used + seg > limit:
            cut = p + (q - p) * ((budget_length - used) / seg)
            cur.append(cut)
            pieces.append(cur)
            cur = [cut]
            used = 0.0
            p = cut
            seg = float(np.hypot(*(q - p)))
        cur.append(q)
        used += seg
        p = q
        if used >= budget_length * (1.0 - CUT_RTOL) and i < len(wp) - 1:
            pieces.append(cur)
            cur = [q]
            used = 0.0
    if pieces and len(cur) > 1 and PathCluster(0, role, cur).length <= EPS:
        pieces[-1].extend(cur[1:])     # drop a numerically empty tail
    elif len(cur) > 1 or not pieces:
        pieces.append(cur)
    return [PathCluster(i, role, np.array(c)) for i, c in enumerate(pieces)]


def concat_clusters(clusters, role=""):
    """Parent path (with cut points) from consecutive clusters."""
    parts = [clusters[0].waypoints] + [c.waypoints[1:] for c in clusters[1:]]
    return CoveragePath(np.concatenate(parts), role)


def aerial_budget(scenario, t_max, formula="T_minus_2tmax"):
    """Per-cluster coverage length reserved for the UAV, in meters."""
    if formula not in BUDGET_FORMULAS:
        raise ValueError(f"unknown budget formula {formula!r}; expected one of {BUDGET_FORMULAS}")
    reserve = 2.0 if formula == "T_minus_2tmax" else 1.0
    return (scenario.energy.flight_time - reserve * t_max) * scenario.aerial.speed


def ground_budget(scenario):
    return scenario.energy.flight_time * scenario.ground.speed


def build_cluster_costs(vc_a, vc_g, speed_a):
    """Seconds of flight between the nearest terminals of each cluster pair."""
    if not vc_a or not vc_g:
        raise ValueError("cluster lists must be non-empty")
    ta = np.array([[c.start, c.end] for c in vc_a])       # (na, 2, 2)
    tg = np.array([[c.start, c.end] for c in vc_g])
    d = ta[:, None, :, None, :] - tg[None, :, None, :, :]
    dist = np.hypot(d[..., 0], d[..., 1]).reshape(len(vc_a), len(vc_g), 4).min(axis=2)
    return assignment.BipartiteCosts(dist / speed_a, unit="s")


def match_clusters(vc_a, vc_g, speed_a):
    return assignment.min_cost_matching(build_cluster_costs(vc_a, vc_g, speed_a))


# ---------------------------------------------------------------------------
# plan data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RendezvousEvent:
    location: tuple
    aerial_arrival: float
    ground_arrival: float
    wait: float
    recharge_index: int
    aerial_index: int        # waypoint of the aerial path where the UAV lands
    ground_index: int        # waypoint of the ground path where the UGV waits

    def to_dict(self):
        return {"location": list(self.location), "aerial_arrival": self.aerial_arrival,
                "ground_arrival": self.ground_arrival, "wait": self.wait,
                "recharge_index": self.recharge_index, "aerial_index": self.aerial_index,
                "ground_index": self.ground_index}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(float(v) for v in d["location"]), float(d["aerial_arrival"]),
                   float(d["ground_arrival"]), float(d["wait"]), int(d["recharge_index"]),
                   int(d["aerial_index"]), int(d["ground_index"]))


@dataclass(frozen=True)
class Takeoff:
    aerial_index: int        # aerial waypoint the UAV lifts off from
    ground_index: int        # UGV waypoint it leaves from; -1 for the launch point
    time: float

    def to_dict(self):
        return {"aerial_index": self.aerial_index, "ground_index": self.ground_index,
                "time": self.time}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["aerial_index"]), int(d["ground_index"]), float(d["time"]))


def path_lengths(waypoints, actions):
    """(L1, L2): flown length and coverage-only length of an aerial path.

    Legs are attributed to the action of the waypoint they arrive at; docked
    legs are carried by the UGV and excluded. ``L1 = L2 + detours`` so that
    ``L1 >= L2`` holds exactly in floating point.
    """
    wp = np.asarray(waypoints, dtype=np.float64).reshape(-1, 2)
    if len(wp) < 2:
        return 0.0, 0.0
    d = np.diff(wp, axis=0)
    seg = np.hypot(d[:, 0], d[:, 1])
    act = np.asarray(actions[1:])
    cover = float(seg[act == "cover"].sum())
    detour = float(seg[(act == "transit") | (act == "rendezvous")].sum())
    return cover + detour, cover


def overhead_of(l1, l2):
    return (l1 - l2) / l1 if l1 > 0 else 0.0


@dataclass(frozen=True, eq=False)
class RendezvousPlan:
    strategy: str
    aerial: CoveragePath
    actions: tuple
    ground: CoveragePath
    events: tuple
    takeoffs: tuple
    L1: float
    L2: float
    coverage_length: float = 0.0    # length of the unclustered aerial coverage path
    t_max: float = 0.0
    aerial_budget: float = 0.0
    ground_budget: float = 0.0
    recharge_time: float = 0.0
    n_aerial_clusters: int = 0
    n_ground_clusters: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def overhead(self):
        return overhead_of(self.L1, self.L2)

    @property
    def n_rendezvous(self):
        return len(self.events)

    @property
    def launch_delay(self):
        return self.takeoffs[0].time if self.takeoffs else 0.0

    def to_dict(self):
        return {
            "strategy": self.strategy,
            "L1": self.L1, "L2": self.L2, "overhead": self.overhead,
            "coverage_length": self.coverage_length,
            "t_max": self.t_max, "aerial_budget": self.aerial_budget,
            "ground_budget": self.ground_budget, "recharge_time": self.recharge_time,
            "n_aerial_clusters": self.n_aerial_clusters,
            "n_ground_clusters": self.n_ground_clusters,
            "meta": dict(self.meta),
            "aerial": {"waypoints": self.aerial.waypoints.tolist(), "actions": list(self.actions)},
            "ground": {"waypoints": self.ground.waypoints.tolist()},
            "events": [e.to_dict() for e in self.events],
            "takeoffs": [t.to_dict() for t in self.takeoffs],
        }

    @classmethod
    def from_dict(cls, doc):
        aw = np.asarray(doc["aerial"]["waypoints"], dtype=np.float64).reshape(-1, 2)
        actions = tuple(doc["aerial"]["actions"])
        bad = set(actions) - set(ACTIONS)
        if bad or len(actions) != len(aw):
            raise ValueError("aerial actions must match waypoints and be one of " + ", ".join(ACTIONS))
        l1, l2 = path_lengths(aw, actions)
        return cls(
            strategy=doc["strategy"], aerial=CoveragePath(aw, AERIAL), actions=actions,
            ground=CoveragePath(np.asarray(doc["ground"]["waypoints"], dtype=np.float64), GROUND),
            events=tuple(RendezvousEvent.from_dict(e) for e in doc["events"]),
            takeoffs=tuple(Takeoff.from_dict(t) for t in doc["takeoffs"]),
            L1=l1, L2=l2, coverage_length=float(doc.get("coverage_length", l2)),
            t_max=float(doc.get("t_max", 0.0)), aerial_budget=float(doc.get("aerial_budget", 0.0)),
            ground_budget=float(doc.get("ground_budget", 0.0)),
            recharge_time=float(doc.get("recharge_time", 0.0)),
            n_aerial_clusters=int(doc.get("n_aerial_clusters", 0)),
            n_ground_clusters=int(doc.get("n_ground_clusters", 0)),
            meta=dict(doc.get("meta", {})))


def plan_to_json(plan):
    return json.dumps(plan.to_dict(), indent=1) + "\n"


def save_plan(plan, path):
    Path(path).write_text(plan_to_json(plan))


def load_plan(path):
    return RendezvousPlan.from_dict(json.loads(Path(path).read_text()))


def stretch_lengths(plan):
    """Flown length of each maximal flight between takeoff and landing."""
    wp = plan.aerial.waypoints
    out = []
    cur = 0.0
    flying = False
    for i in range(1, len(wp)):
        act = plan.actions[i]
        if act == "dock":
            continue
        cur += float(np.hypot(*(wp[i] - wp[i - 1])))
        flying = True
        if act == "rendezvous":
            out.append(cur)
            cur = 0.0
            flying = False
    if flying:
        out.append(cur)
    return out


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

class _LegFailure(Exception):
    def __init__(self, cluster, surplus, needed, available, ground_index, first=False):
        self.cluster = cluster
        self.first = first
        self.surplus = surplus
        self.needed = needed
        self.available = available
        self.ground_index = ground_index
        super().__init__(cluster)


class _Schedule:
    """Builds the aerial waypoint list leg by leg on a shared clock."""

    def __init__(self, scenario, ground_wps, recharge_time):
        self.g = ground_wps
        d = np.diff(ground_wps, axis=0)
        self.arc = np.concatenate([[0.0], np.cumsum(np.hypot(d[:, 0], d[:, 1]))])
        self.va = scenario.aerial.speed
        self.vg = scenario.ground.speed
        self.t_off = scenario.energy.takeoff_time
        self.t_lnd = scenario.energy.landing_time
        self.ft = scenario.energy.flight_time
        self.rc = recharge_time
        self.launch = ground_wps[0] + ugv_offset_to_planner(scenario.launch_offset)
        # a launch pad on the UGV reference point means the UAV starts docked
        self.on_board = not any(scenario.launch_offset)
        self.wps = [self.launch]
        self.actions = ["dock"]
        self.events = []
        self.takeoffs = []
        self.t_free = 0.0
        self.g_prev = 0

    @property
    def pad_only(self):
        """The next leg can only start from the fixed launch pad."""
        return not self.events and not self.on_board

    def ugv_time(self, idx):
        return self.t_free + (self.arc[idx] - self.arc[self.g_prev]) / self.vg

    def option(self, cluster, g_r, sigmas, reverse):
        """Cheapest energy-feasible way to fly ``cluster`` and meet at ``g_r``.

        Returns ``(option, needed)``; ``option`` is None when nothing fits and
        ``needed`` is then the smallest energy (s) any candidate required.
        """
        wps = cluster.waypoints
        length = cluster.length
        r = self.g[g_r]
        t_g = self.ugv_time(g_r)
        best, needed = None, np.inf
        first = not self.events
        idx = np.asarray(sigmas, dtype=np.int64)
        if first and not self.on_board:
            idx = idx[:0]
        dirs = (False, True) if reverse and len(wps) > 1 else (False,)
        for rev in dirs:
            entry, exit_ = (wps[-1], wps[0]) if rev else (wps[0], wps[-1])
            back = float(np.hypot(*(exit_ - r)))
            origin = self.g[idx]
            approach = np.hypot(origin[:, 0] - entry[0], origin[:, 1] - entry[1])
            flight = approach + length + back
            t_fly = flight / self.va
            t0 = self.ugv_time(idx)
            if first:
                # launch pad: take off late enough not to hover
                pad = float(np.hypot(*(self.launch - entry))) + length + back
                t0_pad = max(0.0, t_g - self.t_off - pad / self.va)
                flight = np.concatenate([[pad], flight])
                t_fly = np.concatenate([[pad / self.va], t_fly])
                t0 = np.concatenate([[t0_pad], t0])
                cand = np.concatenate([[-1], idx])
            else:
                cand = idx
            t_a = t0 + self.t_off + t_fly
            hover = np.maximum(0.0, t_g - t_a)
            energy = t_fly + hover
            ok = (energy <= self.ft + EPS) & (flight <= self.ft * self.va + EPS)
            needed = min(needed, float(energy.min()))
            if not ok.any():
                continue
            k = int(np.argmin(np.where(ok, flight, np.inf)))
            if best is None or flight[k] < best["flight"]:
                best = {"rev": rev, "sigma": int(cand[k]), "t0": float(t0[k]),
                        "t_a": float(t_a[k]), "t_g": float(t_g), "flight": float(flight[k]),
                        "g_r": int(g_r)}
        return best, needed

    def commit(self, cluster, opt):
        if opt["sigma"] >= 0:
            for gi in range(self.g_prev + 1, opt["sigma"] + 1):
                self._add(self.g[gi], "dock")
        self.takeoffs.append(Takeoff(len(self.wps) - 1, opt["sigma"], opt["t0"]))
        seq = cluster.waypoints[::-1] if opt["rev"] else cluster.waypoints
        self._add(seq[0], "transit")
        for p in seq[1:]:
            self._add(p, "cover")
        r = self.g[opt["g_r"]]
        self._add(r, "rendezvous")
        t_a, t_g = opt["t_a"], opt["t_g"]
        self.events.append(RendezvousEvent(
            (float(r[0]), float(r[1])), t_a, t_g, abs(t_a - t_g), len(self.events),
            len(self.wps) - 1, opt["g_r"]))
        self.t_free = max(t_a, t_g) + self.t_lnd + self.rc
        self.g_prev = opt["g_r"]

    def _add(self, p, action):
        self.wps.append(np.asarray(p, dtype=np.float64))
        self.actions.append(action)


def _ground_ends(vc_g):
    """Indices of each ground cluster's start and end in the concatenated path."""
    starts, ends = [], []
    pos = 0
    for c in vc_g:
        starts.append(pos)
        pos += len(c.waypoints) - 1
        ends.append(pos)
    return starts, ends


def _finish(strategy, sched, vc_a, vc_g, ground, extra):
    extra = dict(extra, recharge_time=sched.rc)
    wps = np.array(sched.wps)
    actions = tuple(sched.actions)
    l1, l2 = path_lengths(wps, actions)
    return RendezvousPlan(
        strategy=strategy, aerial=CoveragePath(wps, AERIAL), actions=actions,
        ground=ground, events=tuple(sched.events), takeoffs=tuple(sched.takeoffs),
        L1=l1, L2=l2, n_aerial_clusters=len(vc_a), n_ground_clusters=len(vc_g), **extra)


def assemble_uav_path(vc_a, vc_g, matching, scenario, recharge_time=0.0, **extra):
    """Aerial path with rendezvous detours for a cluster matching.

    Raises ``_LegFailure`` (internal) when a leg cannot be flown; the planner
    repairs by splitting clusters.
    """
    ground = concat_clusters(vc_g, GROUND)
    starts, ends = _ground_ends(vc_g)
    last = len(ground.waypoints) - 1
    sched = _Schedule(scenario, ground.waypoints, recharge_time)
    for i, j in sorted(matching.pairs, key=lambda p: (p[1], p[0])):
        opt, needed = sched.option(vc_a[i], ends[j], np.arange(sched.g_prev, ends[j] + 1), True)
        if opt is None:
            raise _LegFailure(i, False, needed, sched.ft, ends[j], sched.pad_only)
        sched.commit(vc_a[i], opt)
    end_pt = ground.waypoints[-1]
    surplus = matching.unmatched_left(len(vc_a))
    surplus.sort(key=lambda i: (min(np.hypot(*(vc_a[i].start - end_pt)),
                                    np.hypot(*(vc_a[i].end - end_pt))), i))
    for i in surplus:
        opt, needed = sched.option(vc_a[i], last, np.arange(sched.g_prev, last + 1), True)
        if opt is None:
            raise _LegFailure(i, True, needed, sched.ft, last, sched.pad_only)
        sched.commit(vc_a[i], opt)
    return _finish("agcvg", sched, vc_a, vc_g, ground, extra)


def assemble_greedy(vc_a, vc_g, scenario, recharge_time=0.0, **extra):
    """Out-and-back rendezvous at the closest reachable ground-cluster endpoint."""
    ground = concat_clusters(vc_g, GROUND)
    _, ends = _ground_ends(vc_g)
    ends = np.array(sorted(set(ends)))
    pts = ground.waypoints[ends]
    sched = _Schedule(scenario, ground.waypoints, recharge_time)
    for k, cl in enumerate(vc_a):
        cand = ends >= sched.g_prev
        dist = np.hypot(pts[:, 0] - cl.end[0], pts[:, 1] - cl.end[1])
        order = [int(e) for e in np.lexsort((ends, dist)) if cand[e]]
        chosen, needed = None, np.inf
        for e in order:
            # out-and-back from the last rendezvous; a later docked takeoff only if that fails
            for sigmas in ([sched.g_prev], np.arange(sched.g_prev, ends[e] + 1)):
                opt, need = sched.option(cl, int(ends[e]), sigmas, False)
                needed = min(needed, need)
                if opt is not None:
                    chosen = opt
                    break
            if chosen is not None:
                break
        if chosen is None:
            raise _LegFailure(k, False, needed, sched.ft, int(ends[order[0]]) if order else -1,
                              sched.pad_only)
        sched.commit(cl, chosen)
    return _finish("greedy", sched, vc_a, vc_g, ground, extra)


def _split(clusters, idx):
    """Replace cluster ``idx`` with its two halves and renumber."""
    c = clusters[idx]
    halves = cluster_path(CoveragePath(c.waypoints, c.role), c.length / 2 + EPS, c.role)
    out = clusters[:idx] + halves + clusters[idx + 1:]
    return [PathCluster(i, x.role, x.waypoints) for i, x in enumerate(out)]


def coverage_paths(scenario):
    """Unconstrained coverage paths ``(aerial, ground)`` for a scenario.

    Sweep directions are free, so the pair is oriented to start together at
    the launch point and finish close to each other: the UGV then moves the
    same way the UAV sweeps.
    """
    m = scenario.map
    pa = plan_coverage(m, scenario.aerial_region, scenario.aerial.footprint_width, AERIAL)
    pg = plan_coverage(m, scenario.ground_region, scenario.ground.footprint_width, GROUND)
    offset = ugv_offset_to_planner(scenario.launch_offset)
    best, best_score = None, np.inf
    for ga in (pg.waypoints, pg.waypoints[::-1]):
        for aa in (pa.waypoints, pa.waypoints[::-1]):
            score = np.hypot(*(aa[0] - ga[0] - offset)) + np.hypot(*(aa[-1] - ga[-1]))
            if score < best_score - EPS:
                best, best_score = (aa, ga), score
    return CoveragePath(best[0], AERIAL), CoveragePath(best[1], GROUND)


def _prepare(scenario, tmax_mode, budget_formula, paths):
    pa, pg = paths if paths is not None else coverage_paths(scenario)
    t_max = assignment.rendezvous_bound(pa, pg, scenario.aerial.speed, mode=tmax_mode)
    ba = aerial_budget(scenario, t_max, budget_formula)
    if not ba > 0:
        raise InfeasibleError(
            f"aerial cluster budget is {ba:.6g} m: flight time {scenario.energy.flight_time:.6g} s "
            f"cannot cover the rendezvous reserve for t_max = {t_max:.6g} s", budget=ba)
    bg = ground_budget(scenario)
    return pa, pg, t_max, ba, bg


def _leg_error(strategy, fail, vc_a):
    c = vc_a[fail.cluster]
    return InfeasibleError(
        f"{strategy}: aerial cluster {fail.cluster} ({c.length:.6g} m) with rendezvous at ground "
        f"waypoint {fail.ground_index} needs {fail.needed:.6g} s of flight, "
        f"{fail.available:.6g} s available", leg=fail.cluster)


def _nearest_ground_cluster(cluster, vc_g):
    """Index of the splittable ground cluster passing closest to ``cluster``'s terminals."""
    best, best_d = -1, np.inf
    terms = np.array([cluster.start, cluster.end])
    for j, g in enumerate(vc_g):
        if g.length <= 2 * EPS:
            continue
        d = g.waypoints[:, None, :] - terms[None, :, :]
        dj = float(np.hypot(d[..., 0], d[..., 1]).min())
        if dj < best_d:
            best, best_d = j, dj
    return best


def _repair(fail, vc_a, vc_g, speed_a, strategy):
    """Split one cluster so the failing leg has a chance next time.

    A surplus cluster (no ground partner) gets one by cutting the ground
    cluster passing closest to it. Otherwise a shorter aerial cluster helps
    when the coverage part is what overflows the charge; if not, the
    rendezvous is too far or too late, and a ground cut near the aerial
    cluster adds a closer, earlier meeting point.
    """
    c = vc_a[fail.cluster]
    if fail.surplus:
        j = _nearest_ground_cluster(c, vc_g)
        if j >= 0:
            return vc_a, _split(vc_g, j)
    if c.length > 2 * EPS and fail.needed - c.length / speed_a <= fail.available:
        return _split(vc_a, fail.cluster), vc_g
    if fail.first and strategy == "greedy":
        return None     # fixed launch pad and fixed first cluster
    j = _nearest_ground_cluster(c, vc_g)
    if j >= 0:
        return vc_a, _split(vc_g, j)
    if c.length > 2 * EPS:
        return _split(vc_a, fail.cluster), vc_g
    return None


def _plan_with_repairs(strategy, scenario, tmax_mode, budget_formula, recharge_time, paths,
                       max_repairs):
    pa, pg, t_max, ba, bg = _prepare(scenario, tmax_mode, budget_formula, paths)
    vc_a = cluster_path(pa, ba, AERIAL)
    vc_g = cluster_path(pg, bg, GROUND)
    extra = dict(coverage_length=pa.total_length, t_max=t_max, aerial_budget=ba,
                 ground_budget=bg)
    va = scenario.aerial.speed
    repairs = 0
    while True:
        try:
            if strategy == "agcvg":
                plan = assemble_uav_path(vc_a, vc_g, match_clusters(vc_a, vc_g, va),
                                         scenario, recharge_time, **extra)
            else:
                plan = assemble_greedy(vc_a, vc_g, scenario, recharge_time, **extra)
            break
        except _LegFailure as fail:
            repairs += 1
            fixed = _repair(fail, vc_a, vc_g, va, strategy) if repairs <= max_repairs else None
            if fixed is None:
                raise _leg_error(strategy, fail, vc_a) from None
            vc_a, vc_g = fixed
    plan.meta.update(repairs=repairs, scenario=scenario.name,
                     map_shape=[scenario.map.height, scenario.map.width],
                     resolution=scenario.map.resolution,
                     launch_offset=list(scenario.launch_offset))
    return plan


def plan_agcvg(scenario, tmax_mode="nearest", budget_formula="T_minus_2tmax",
               recharge_time=0.0, paths=None, max_repairs=MAX_REPAIRS):
    """Clustered coverage with matched recharging rendezvous."""
    return _plan_with_repairs("agcvg", scenario, tmax_mode, budget_formula, recharge_time,
                              paths, max_repairs)


def plan_greedy(scenario, tmax_mode="nearest", budget_formula="T_minus_2tmax",
                recharge_time=0.0, paths=None, max_repairs=MAX_REPAIRS):
    """Baseline without the global assignment."""
    return _plan_with_repairs("greedy", scenario, tmax_mode, budget_formula, recharge_time,
                              paths, max_repairs)


def plan(scenario, strategy="agcvg", **kwargs):
    if strategy == "agcvg":
        return plan_agcvg(scenario, **kwargs)
    if strategy == "greedy":
        return plan_greedy(scenario, **kwargs)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
