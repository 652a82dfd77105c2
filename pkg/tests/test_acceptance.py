"""Acceptance criteria 1-9. Each test prints one PASS/FAIL line with its numbers."""
import itertools
import time
from pathlib import Path

import numpy as np
import pytest

from agcvg import planner, sim, suite
from agcvg.assignment import BipartiteCosts, bottleneck_matching, min_cost_matching
from agcvg.bcd import plan_coverage
from agcvg.export import export_mission, import_mission
from agcvg.grid_world import load_scenario, save_scenario, scenario_from_dict, scenario_to_dict
from agcvg.planner import cluster_path, concat_clusters
from agcvg.render import render_svg

ROOT = Path(__file__).resolve().parents[1]
SUITE_DIR = ROOT / "scenarios" / "suite"
FIELD_DIR = ROOT / "scenarios" / "field"
REFERENCE_MEAN_GAP, REFERENCE_MAX_GAP = 11.33, 25.0      # percent, reference only


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}")


@pytest.fixture(scope="module")
def random50():
    return suite.scenario_batch(2024, 50, size=(10, 30), density=(0.0, 0.2), clusters=(2, 6))


@pytest.fixture(scope="module")
def suite_runs():
    """Plans and timelines for both strategies over the committed suite."""
    files = sorted(SUITE_DIR.glob("*.json"))
    t0 = time.perf_counter()
    runs = []
    for f in files:
        sc = load_scenario(f)
        c = sim.compare(sc)
        runs.append((sc, c))
    return runs, time.perf_counter() - t0


def _brute(c):
    n, m = c.shape
    perms = np.array(list(itertools.permutations(range(m), n)))
    vals = c[np.arange(n), perms]
    k = int(np.argmin(vals.sum(1)))
    total = float(sum(float(v) for v in vals[k]))      # row order, as the matcher sums
    return total, float(vals.max(1).min())


def test_c1_matching_optimality(capsys):
    rng = np.random.default_rng(1)
    mats = []
    for _ in range(200):
        n, m = int(rng.integers(1, 8)), int(rng.integers(1, 8))
        n, m = min(n, m), max(n, m)
        mats.append(rng.uniform(0, 100, (n, m)))
    t0 = time.perf_counter()
    got = [(min_cost_matching(BipartiteCosts(c)).total_cost,
            bottleneck_matching(BipartiteCosts(c)).max_edge_cost) for c in mats]
    elapsed = time.perf_counter() - t0
    ref = [_brute(c) for c in mats]
    n_tot = sum(g[0] == r[0] for g, r in zip(got, ref))
    n_bot = sum(g[1] == r[1] for g, r in zip(got, ref))
    ok = n_tot == 200 and n_bot == 200 and elapsed < 5.0
    report(capsys, 1, ok, f"min-cost exact {n_tot}/200, bottleneck exact {n_bot}/200, "
                          f"{elapsed:.3f} s (< 5 s)")
    assert ok


def test_c2_coverage_completeness(capsys, random50):
    worst = 1.0
    for sc in random50:
        for mask, veh in ((sc.aerial_region, sc.aerial), (sc.ground_region, sc.ground)):
            p = plan_coverage(sc.map, mask, veh.footprint_width)
            worst = min(worst, sim.verify_coverage(p, sc.map, mask, veh.footprint_width))
    ok = worst == 1.0
    report(capsys, 2, ok, f"min coverage over 50 scenarios x 2 paths = {worst!r}")
    assert ok


def test_c3_energy_feasibility(capsys, random50):
    planned = {s: 0 for s in planner.STRATEGIES}
    not_planned = {s: [] for s in planner.STRATEGIES}
    exhausted, worst_margin = [], -np.inf
    for sc in random50:
        rng_m = sc.energy.flight_range(sc.aerial.speed)
        paths = planner.coverage_paths(sc)
        for s in planner.STRATEGIES:
            try:
                p = planner.plan(sc, s, paths=paths)
            except planner.InfeasibleError:
                not_planned[s].append(sc.name)
                continue
            planned[s] += 1
            try:
                tl = sim.simulate(p, sc)
            except sim.EnergyExhaustedError:
                exhausted.append((sc.name, s))
                continue
            worst_margin = max(worst_margin, max(tl.stretches) - rng_m)
    ok = not exhausted and worst_margin <= 1e-9 and planned["agcvg"] == 50
    report(capsys, 3, ok, f"plans emitted agcvg {planned['agcvg']}/50, greedy "
                          f"{planned['greedy']}/50 (greedy found no feasible plan on "
                          f"{len(not_planned['greedy'])}); energy exhaustions {len(exhausted)}; "
                          f"max(stretch - range) = {worst_margin:.3g} m (<= 1e-9)")
    assert ok


def test_c4_comparison_direction(capsys, suite_runs):
    runs, elapsed = suite_runs
    gaps = [c.gap for _, c in runs if c.ok]
    mean = float(np.mean(gaps)) if gaps else float("nan")
    pos = sum(g > 0 for g in gaps)
    ok = len(runs) == 11 and len(gaps) == 11 and mean >= 0 and pos >= 6 and elapsed < 60
    report(capsys, 4, ok, f"{len(gaps)}/11 compared, mean gap {mean:.2f} pp (>= 0), "
                          f"positive on {pos}/11 (>= 6), max {max(gaps):.2f} pp, "
                          f"{elapsed:.1f} s (< 60 s); reference: mean >= {REFERENCE_MEAN_GAP}%, "
                          f"max {REFERENCE_MAX_GAP}% on the original maps")
    for sc, c in runs:
        with capsys.disabled():
            print(f"    {sc.name}: agcvg {c.agcvg.overhead:.4f} greedy {c.greedy.overhead:.4f} "
                  f"gap {c.gap:+.2f} pp")
    assert ok


def test_c5_rendezvous_count(capsys):
    large = load_scenario(FIELD_DIR / "field_large.json")
    doc = scenario_to_dict(large)
    doc["energy"]["endurance_s"] = large.energy.endurance / 2
    half = scenario_from_dict(doc)
    n_full = planner.plan_agcvg(large).n_rendezvous
    n_half = planner.plan_agcvg(half).n_rendezvous
    small = load_scenario(FIELD_DIR / "field_small.json")
    n_small = planner.plan_agcvg(small).n_rendezvous
    ok = n_half >= 3 and n_half > n_full and n_small >= 3
    report(capsys, 5, ok, f"10 m x 25 m: {n_full} rendezvous at T = {large.energy.endurance:g} s, "
                          f"{n_half} at T/2; 6.4 m x 10 m: {n_small} (field trial: 4 and >= 3)")
    assert ok


def test_c6_cluster_partition(capsys):
    rng = np.random.default_rng(6)
    bad = 0
    for _ in range(500):
        n = int(rng.integers(2, 60))
        pts = np.cumsum(rng.normal(0, rng.uniform(0.1, 3), (n, 2)), 0)
        path = planner.CoveragePath(pts)
        budget = float(rng.uniform(0.05, 1.2) * max(path.total_length, 1e-3))
        cl = cluster_path(path, budget)
        back = concat_clusters(cl).waypoints
        it = iter(map(tuple, back))
        subseq = all(any(q == p for q in it) for p in map(tuple, pts))
        same = abs(concat_clusters(cl).total_length - path.total_length) <= 1e-9
        within = all(c.length <= budget + 1e-9 for c in cl)
        linked = all(np.array_equal(a.end, b.start) for a, b in zip(cl, cl[1:]))
        bad += not (subseq and same and within and linked)
    ok = bad == 0
    report(capsys, 6, ok, f"{500 - bad}/500 random paths partition exactly within budget + 1e-9")
    assert ok


def test_c7_conservation(capsys, suite_runs):
    runs, _ = suite_runs
    worst_dt, min_wait, n = 0.0, np.inf, 0
    for sc, _ in runs:
        paths = planner.coverage_paths(sc)
        for s in planner.STRATEGIES:
            tl = sim.simulate(planner.plan(sc, s, paths=paths), sc)
            for tr in (tl.aerial, tl.ground):
                worst_dt = max(worst_dt, abs(sum(tr.durations().values()) - tl.mission_time))
            for e in tl.events:
                min_wait = min(min_wait, e.aerial_wait, e.ground_wait)
            n += 1
    ok = worst_dt <= 1e-9 and min_wait >= 0 and n == 22
    report(capsys, 7, ok, f"{n} runs, max |sum(durations) - mission time| = {worst_dt:.3g} s, "
                          f"min wait = {min_wait:.3g} s")
    assert ok


def test_c8_determinism_round_trips(capsys, tmp_path):
    sc = load_scenario(sorted(SUITE_DIR.glob("*.json"))[0])
    same = True
    for s in planner.STRATEGIES:
        a, b = planner.plan(sc, s), planner.plan(sc, s)
        same &= planner.plan_to_json(a) == planner.plan_to_json(b)
        same &= render_svg(sc, a) == render_svg(sc, b)
        same &= sim.simulate(a, sc).to_csv() == sim.simulate(b, sc).to_csv()
    save_scenario(sc, tmp_path / "s.json")
    scen_ok = load_scenario(tmp_path / "s.json") == sc
    p = planner.plan_agcvg(sc)
    err = 0.0
    for frame in ("ugv_rhr", "uav_lhr"):
        for veh, ref in (("aerial", p.aerial.waypoints), ("ground", p.ground.waypoints)):
            pts, *_ = import_mission(export_mission(p, frame, vehicle=veh))
            err = max(err, float(np.abs(pts - ref).max()))
    ok = same and scen_ok and err <= 1e-9
    report(capsys, 8, ok, f"byte-identical plan/SVG/CSV: {same}; scenario round-trip: {scen_ok}; "
                          f"export round-trip max error {err:.3g} m")
    assert ok


def test_c9_scale(capsys):
    rng = np.random.default_rng(9)
    sc = suite.random_scenario(rng, size=(100, 100), density=(0.2, 0.2), clusters=(4, 4),
                               layouts=("full",))
    # compile the numba kernels outside the timed call
    planner.plan_agcvg(suite.random_scenario(np.random.default_rng(0), size=(8, 8)))
    t0 = time.perf_counter()
    p = planner.plan_agcvg(sc)
    elapsed = time.perf_counter() - t0
    from agcvg import kernels
    ok = elapsed < 10.0
    report(capsys, 9, ok, f"100x100, {sc.map.occupancy.mean():.0%} obstacles: plan_agcvg "
                          f"{elapsed:.2f} s (< 10 s, {kernels.BACKEND} backend), "
                          f"{p.n_rendezvous} rendezvous")
    assert ok
