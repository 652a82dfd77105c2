"""Event-driven execution of a rendezvous plan on a shared clock.

The simulator re-derives every time from the plan geometry and the scenario
speeds; it only takes two commands from the plan: where each takeoff happens
and how long the UAV sits at the launch point before the first one. It is the
independent feasibility check for both planners.
"""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np

from agcvg import kernels
from agcvg.grid_world import covered_cells

STATES = ("covering", "transit", "waiting", "recharging", "docked")
ENERGY_TOL = 1e-7     # seconds of charge; absorbs planner/simulator rounding
POSITION_TOL = 1e-6


class EnergyExhaustedError(RuntimeError):
    def __init__(self, time, position):
        self.time = float(time)
        self.position = (float(position[0]), float(position[1]))
        super().__init__(f"UAV battery exhausted at t = {self.time:.6g} s, "
                         f"position ({self.position[0]:.6g}, {self.position[1]:.6g}) m")


class PlanConsistencyError(ValueError):
    """The plan's waypoints and events do not describe an executable mission."""


@dataclass(frozen=True, eq=False)
class VehicleTrack:
    vehicle: str
    times: np.ndarray
    positions: np.ndarray
    energy: np.ndarray      # NaN for the ground vehicle
    states: tuple           # state of the interval starting at each sample

    def durations(self):
        out = dict.fromkeys(STATES, 0.0)
        dt = np.diff(self.times)
        for s, d in zip(self.states[:-1], dt):
            out[s] += float(d)
        return out

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class SimEvent:
    recharge_index: int
    location: tuple
    aerial_arrival: float
    ground_arrival: float
    aerial_wait: float
    ground_wait: float

    @property
    def wait(self):
        return self.aerial_wait + self.ground_wait


@dataclass(frozen=True, eq=False)
class Timeline:
    aerial: VehicleTrack
    ground: VehicleTrack
    mission_time: float
    events: tuple
    stretches: tuple        # flown meters per takeoff-to-landing flight

    @property
    def total_wait(self):
        return float(sum(e.wait for e in self.events))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time_s", "vehicle", "x_m", "y_m", "state", "energy_s"])
        for tr in (self.aerial, self.ground):
            for t, p, e, s in zip(tr.times, tr.positions, tr.energy, tr.states):
                w.writerow([repr(float(t)), tr.vehicle, repr(float(p[0])), repr(float(p[1])), s,
                            "" if np.isnan(e) else repr(float(e))])
        return buf.getvalue()


class _Track:
    def __init__(self, vehicle):
        self.vehicle = vehicle
        self.t, self.p, self.e, self.s = [], [], [], []

    def push(self, t, p, e, state):
        if self.t and t < self.t[-1]:
            raise PlanConsistencyError(f"{self.vehicle} clock went backwards at t = {t}")
        self.t.append(float(t))
        self.p.append((float(p[0]), float(p[1])))
        self.e.append(float(e))
        self.s.append(state)

    def freeze(self):
        return VehicleTrack(self.vehicle, np.array(self.t, dtype=np.float64),
                            np.array(self.p, dtype=np.float64).reshape(-1, 2),
                            np.array(self.e, dtype=np.float64), tuple(self.s))


def _empty():
    z = np.zeros(0)
    tr = lambda v: VehicleTrack(v, z, np.zeros((0, 2)), z, ())
    return Timeline(tr("aerial"), tr("ground"), 0.0, (), ())


def simulate(plan, scenario, recharge_time=None):
    """Fly ``plan`` and return the sampled timeline.

    Raises :class:`EnergyExhaustedError` when the UAV would run out of charge.
    """
    aw = plan.aerial.waypoints
    gw = plan.ground.waypoints
    acts = plan.actions
    if len(aw) == 0 and len(gw) == 0:
        return _empty()
    if len(plan.takeoffs) != len(plan.events):
        raise PlanConsistencyError("every rendezvous needs exactly one preceding takeoff")
    rc = plan.recharge_time if recharge_time is None else float(recharge_time)
    va, vg = scenario.aerial.speed, scenario.ground.speed
    t_off, t_lnd = scenario.energy.takeoff_time, scenario.energy.landing_time
    full = scenario.energy.flight_time

    ua, ug = _Track("aerial"), _Track("ground")
    ugv_t = np.full(len(gw), np.nan)      # arrival time at each UGV waypoint
    gi, tg = 0, 0.0
    ugv_t[0] = 0.0

    def drive(j):
        nonlocal gi, tg
        while gi < j:
            ug.push(tg, gw[gi], np.nan, "covering")
            tg += float(np.hypot(*(gw[gi + 1] - gw[gi]))) / vg
            gi += 1
            ugv_t[gi] = tg

    ai, ta, energy = 0, 0.0, full
    g_prev = 0
    sim_events, stretches = [], []

    def dock_until(a_stop):
        """Ride the UGV over the dock waypoints up to aerial index ``a_stop``."""
        nonlocal ai, ta
        gj = g_prev
        while ai < a_stop:
            if acts[ai + 1] != "dock":
                raise PlanConsistencyError(f"aerial waypoint {ai + 1} should be a dock waypoint")
            ua.push(ta, aw[ai], energy, "docked")
            gj += 1
            if gj >= len(gw) or np.hypot(*(aw[ai + 1] - gw[gj])) > POSITION_TOL:
                raise PlanConsistencyError(f"dock waypoint {ai + 1} is not on the UGV path")
            drive(gj)
            ai += 1
            ta = max(ta, float(ugv_t[gj]))
        return gj

    for k, (ev, tk) in enumerate(zip(plan.events, plan.takeoffs)):
        if k == 0 and tk.ground_index < 0:
            if tk.aerial_index != 0:
                raise PlanConsistencyError("a launch-pad takeoff must be from the first waypoint")
            ua.push(0.0, aw[0], energy, "docked")
            ta = max(0.0, tk.time)
        else:
            if k == 0 and np.hypot(*(aw[0] - gw[0])) > POSITION_TOL:
                raise PlanConsistencyError("UAV must start on the UGV to ride before its first takeoff")
            if tk.aerial_index < ai:
                raise PlanConsistencyError(f"takeoff {k} precedes the previous landing")
            gj = dock_until(tk.aerial_index)
            if gj != tk.ground_index:
                raise PlanConsistencyError(f"takeoff {k} ground index {tk.ground_index} != {gj}")
        # takeoff climb: reserved out of the endurance, no drain
        ua.push(ta, aw[ai], energy, "docked")
        ta += t_off
        flown = 0.0
        while ai < ev.aerial_index:
            act = acts[ai + 1]
            if act == "dock":
                raise PlanConsistencyError(f"dock waypoint {ai + 1} inside a flight")
            seg = float(np.hypot(*(aw[ai + 1] - aw[ai])))
            dt = seg / va
            if energy - dt < -ENERGY_TOL:
                frac = max(energy, 0.0) / dt
                raise EnergyExhaustedError(ta + max(energy, 0.0), aw[ai] + frac * (aw[ai + 1] - aw[ai]))
            ua.push(ta, aw[ai], energy, "covering" if act == "cover" else "transit")
            ta += dt
            energy -= dt
            flown += seg
            ai += 1
        stretches.append(flown)
        if not 0 <= ev.ground_index < len(gw) or ev.ground_index < g_prev:
            raise PlanConsistencyError(f"rendezvous {k} has invalid ground index {ev.ground_index}")
        if np.hypot(*(aw[ai] - gw[ev.ground_index])) > POSITION_TOL:
            raise PlanConsistencyError(f"rendezvous {k} is not on the UGV path")
        drive(ev.ground_index)
        t_a, t_g = ta, tg
        if t_a < t_g:
            hover = t_g - t_a
            if energy - hover < -ENERGY_TOL:
                raise EnergyExhaustedError(t_a + max(energy, 0.0), aw[ai])
            ua.push(t_a, aw[ai], energy, "waiting")
            energy -= hover
        elif t_g < t_a:
            ug.push(t_g, gw[gi], np.nan, "waiting")
        meet = max(t_a, t_g)
        ua.push(meet, aw[ai], energy, "recharging")
        ug.push(meet, gw[gi], np.nan, "waiting")
        release = meet + t_lnd + rc
        energy = full
        ta = tg = release
        g_prev = gi
        sim_events.append(SimEvent(k, (float(aw[ai][0]), float(aw[ai][1])), t_a, t_g,
                                   max(0.0, t_g - t_a), max(0.0, t_a - t_g)))

    # carried to the end of the UGV path
    if ai != len(aw) - 1:
        raise PlanConsistencyError("aerial waypoints continue past the last rendezvous")
    drive(len(gw) - 1)
    end = max(ta, tg)
    if plan.events:
        for gj in range(g_prev, len(gw) - 1):
            ua.push(max(ta, ugv_t[gj]), gw[gj], energy, "docked")
        ua.push(end, gw[-1], energy, "docked")
    elif len(aw):
        ua.push(0.0, aw[0], energy, "docked")
        ua.push(end, aw[0], energy, "docked")
    if ug.t or len(gw):
        ug.push(end, gw[gi], np.nan, "waiting")
    return Timeline(ua.freeze(), ug.freeze(), end, tuple(sim_events), tuple(stretches))


# ---------------------------------------------------------------------------
# coverage and metrics
# ---------------------------------------------------------------------------

def verify_coverage(path, grid, mask, footprint_width):
    """Fraction of free masked cells whose center lies inside the path's swath."""
    target = covered_cells(mask, grid)
    total = int(np.count_nonzero(target))
    if total == 0:
        return 1.0
    pts = path.waypoints if hasattr(path, "waypoints") else np.asarray(path, dtype=np.float64)
    if len(pts) == 0:
        return 0.0
    swath = kernels.swath_mask(pts, footprint_width / 2.0, grid.resolution, grid.shape)
    return int(np.count_nonzero(swath & target)) / total


@dataclass(frozen=True)
class MissionMetrics:
    strategy: str
    overhead: float
    total_wait: float
    n_rendezvous: int
    L1: float
    L2: float
    coverage_aerial: float
    coverage_ground: float
    mission_time: float

    def to_dict(self):
        return asdict(self)


def compute_metrics(plan, timeline, scenario):
    m = scenario.map
    return MissionMetrics(
        strategy=plan.strategy, overhead=(plan.L1 - plan.L2) / plan.L1 if plan.L1 > 0 else 0.0,
        total_wait=timeline.total_wait, n_rendezvous=len(plan.events), L1=plan.L1, L2=plan.L2,
        coverage_aerial=verify_coverage(plan.aerial, m, scenario.aerial_region,
                                        scenario.aerial.footprint_width),
        coverage_ground=verify_coverage(plan.ground, m, scenario.ground_region,
                                        scenario.ground.footprint_width),
        mission_time=timeline.mission_time)


def metrics_to_text(metrics):
    """Flat ``key=value`` record, one per line."""
    return "".join(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n"
                   for k, v in metrics.to_dict().items())


@dataclass(frozen=True)
class Comparison:
    name: str
    agcvg: MissionMetrics | None
    greedy: MissionMetrics | None
    error: str = ""

    @property
    def gap(self):
        """Overhead difference greedy - agcvg in percentage points."""
        if self.agcvg is None or self.greedy is None:
            return float("nan")
        return 100.0 * (self.greedy.overhead - self.agcvg.overhead)

    @property
    def ok(self):
        return self.agcvg is not None and self.greedy is not None


def compare(scenario, tmax_mode="nearest", budget_formula="T_minus_2tmax", recharge_time=0.0):
    """Plan, simulate and score both strategies on one scenario."""
    from agcvg import planner

    paths = planner.coverage_paths(scenario)
    out, errors = {}, []
    for strategy in planner.STRATEGIES:
        try:
            p = planner.plan(scenario, strategy, tmax_mode=tmax_mode, budget_formula=budget_formula,
                             recharge_time=recharge_time, paths=paths)
            out[strategy] = compute_metrics(p, simulate(p, scenario), scenario)
        except (planner.InfeasibleError, EnergyExhaustedError, PlanConsistencyError) as exc:
            out[strategy] = None
            errors.append(f"{strategy}: {exc}")
    return Comparison(scenario.name, out["agcvg"], out["greedy"], "; ".join(errors))


COMPARE_COLUMNS = ("scenario", "status", "agcvg_overhead", "greedy_overhead", "gap_pp",
                   "agcvg_L1", "greedy_L1", "L2", "agcvg_rendezvous", "greedy_rendezvous",
                   "agcvg_wait_s", "greedy_wait_s", "agcvg_mission_s", "greedy_mission_s", "error")


def comparison_row(c):
    a, g = c.agcvg, c.greedy

    def f(m, attr):
        return "" if m is None else repr(getattr(m, attr))
    return {"scenario": c.name, "status": "ok" if c.ok else "failed",
            "agcvg_overhead": f(a, "overhead"), "greedy_overhead": f(g, "overhead"),
            "gap_pp": repr(c.gap) if c.ok else "",
            "agcvg_L1": f(a, "L1"), "greedy_L1": f(g, "L1"), "L2": f(a or g, "L2"),
            "agcvg_rendezvous": f(a, "n_rendezvous"), "greedy_rendezvous": f(g, "n_rendezvous"),
            "agcvg_wait_s": f(a, "total_wait"), "greedy_wait_s": f(g, "total_wait"),
            "agcvg_mission_s": f(a, "mission_time"), "greedy_mission_s": f(g, "mission_time"),
            "error": c.error}


def comparisons_to_csv(rows):
    """CSV table of comparison rows (dicts from :func:`comparison_row`)."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COMPARE_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def mean_gap(comparisons):
    gaps = [c.gap for c in comparisons if c.ok]
    return float(np.mean(gaps)) if gaps else float("nan")
