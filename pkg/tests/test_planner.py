import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from agcvg import planner, sim
from agcvg.bcd import CoveragePath
from agcvg.planner import (InfeasibleError, PathCluster, RendezvousPlan, aerial_budget,
                           build_cluster_costs, cluster_path, concat_clusters, match_clusters,
                           path_lengths, plan_agcvg, plan_greedy, plan_to_json)
from conftest import make_scenario


def _line(n, step=1.0):
    return CoveragePath(np.stack([np.arange(n) * step, np.zeros(n)], 1))


def _cluster(i, pts, role="aerial"):
    return PathCluster(i, role, np.asarray(pts, dtype=float))


# -- clustering ---------------------------------------------------------------

def test_straight_path_budget_four():
    cl = cluster_path(_line(11), 4.0)
    assert [c.length for c in cl] == [4.0, 4.0, 2.0]
    assert [tuple(c.start) for c in cl] == [(0, 0), (4, 0), (8, 0)]


def test_cut_inside_a_leg_interpolates():
    cl = cluster_path(_line(3, step=5.0), 4.0)
    assert [c.length for c in cl] == [4.0, 4.0, 2.0]
    assert tuple(cl[1].start) == (4.0, 0.0)


def test_budget_exceeding_length_gives_one_cluster():
    p = _line(6)
    cl = cluster_path(p, 100.0)
    assert len(cl) == 1
    np.testing.assert_array_equal(cl[0].waypoints, p.waypoints)


def test_non_positive_budget():
    with pytest.raises(InfeasibleError) as exc:
        cluster_path(_line(3), -2.5)
    assert exc.value.budget == -2.5


def test_aerial_budget_formula():
    sc = make_scenario(["BB"], T=100.0)
    assert aerial_budget(sc, 10.0) == 80.0
    assert aerial_budget(sc, 10.0, "T_minus_tmax") == 90.0
    sc2 = make_scenario(["BB"], T=100.0, t_off=3.0, t_lnd=2.0, va=2.0)
    assert aerial_budget(sc2, 10.0) == (100 - 5 - 20) * 2.0
    with pytest.raises(ValueError):
        aerial_budget(sc, 1.0, "T")


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 40), st.floats(0.05, 30.0), st.integers(0, 2**31 - 1))
def test_cluster_partition_property(n, budget, seed):
    pts = np.cumsum(np.random.default_rng(seed).normal(0, 2, (n, 2)), 0)
    path = CoveragePath(pts)
    cl = cluster_path(path, budget)
    assert all(c.length <= budget + 1e-9 for c in cl)
    back = concat_clusters(cl)
    # parent waypoints are an exact subsequence; with equal length, the extra
    # (cut) points can only lie on the parent's legs
    it = iter(map(tuple, back.waypoints))
    assert all(any(q == p for q in it) for p in map(tuple, pts))
    assert back.total_length == pytest.approx(path.total_length, rel=1e-12, abs=1e-12)


# -- cluster costs / matching ---------------------------------------------------

def test_single_cluster_cost():
    a = [_cluster(0, [(-20, 0), (0, 0)])]
    g = [_cluster(0, [(6, 8), (30, 40)], "ground")]
    assert build_cluster_costs(a, g, 2.0).cost.tolist() == [[5.0]]


def test_shared_terminal_cost_zero():
    a = [_cluster(0, [(0, 0), (3, 3)])]
    g = [_cluster(0, [(3, 3), (9, 9)], "ground")]
    assert build_cluster_costs(a, g, 1.0).cost.tolist() == [[0.0]]


def test_three_by_three_min_of_four(rng):
    a = [_cluster(i, rng.uniform(0, 10, (4, 2))) for i in range(3)]
    g = [_cluster(j, rng.uniform(0, 10, (5, 2)), "ground") for j in range(3)]
    c = build_cluster_costs(a, g, 1.5).cost
    for i in range(3):
        for j in range(3):
            ends_a = [a[i].waypoints[0], a[i].waypoints[-1]]
            ends_g = [g[j].waypoints[0], g[j].waypoints[-1]]
            ref = min(np.linalg.norm(p - q) for p in ends_a for q in ends_g) / 1.5
            assert c[i, j] == pytest.approx(ref, rel=1e-15)


def test_matching_cases():
    one = match_clusters([_cluster(0, [(0, 0), (1, 0)])],
                         [_cluster(0, [(5, 5), (6, 5)], "ground")], 1.0)
    assert one.pairs == ((0, 0),)
    # costs [[1,5],[5,1]] from terminal geometry
    a = [_cluster(0, [(-9, 0), (0, 0)]), _cluster(1, [(-9, 10), (0, 10)])]
    g = [_cluster(0, [(1, 0), (1, -9)], "ground"), _cluster(1, [(1, 10), (1, 19)], "ground")]
    costs = build_cluster_costs(a, g, 1.0).cost
    assert costs[0, 0] == 1.0 and costs[1, 1] == 1.0 and costs[0, 1] > 5 - 1e-9
    m = match_clusters(a, g, 1.0)
    assert m.pairs == ((0, 0), (1, 1)) and m.total_cost == 2.0
    a3 = a + [_cluster(2, [(50, 50), (51, 50)])]
    m3 = match_clusters(a3, g, 1.0)
    assert len(m3.pairs) == 2 and m3.unmatched_left(3) == [2]


# -- whole plans ------------------------------------------------------------------

def test_single_cluster_shared_endpoint():
    sc = make_scenario(["B" * 11])
    p = plan_agcvg(sc)
    assert p.n_aerial_clusters == 1 and p.n_rendezvous == 1
    assert p.L1 == p.L2 == 10.0 and p.overhead == 0.0


def test_single_cluster_greedy_matches_agcvg():
    sc = make_scenario(["AAAA", "AAAA", "BBBB"], T=200)
    a, g = plan_agcvg(sc), plan_greedy(sc)
    da, dg = a.to_dict(), g.to_dict()
    da.pop("strategy"), dg.pop("strategy")
    assert da == dg


def test_equal_cardinality_three():
    sc = make_scenario(["BBBB"] * 4, T=7.0)
    p = plan_agcvg(sc)
    assert p.n_aerial_clusters == p.n_ground_clusters == 3
    assert p.n_rendezvous == 3
    _, pg = planner.coverage_paths(sc)
    ends = {tuple(c.end) for c in cluster_path(pg, planner.ground_budget(sc))}
    assert {tuple(e.location) for e in p.events} == ends


def test_toy_two_clusters_simulated():
    sc = make_scenario(["BBBB"] * 4, T=8.0)
    p = plan_agcvg(sc)
    assert p.n_aerial_clusters == 2 and p.n_rendezvous == 2
    tl = sim.simulate(p, sc)
    assert max(tl.stretches) <= sc.energy.flight_range(sc.aerial.speed) + 1e-9


def test_coincident_paths_zero_overhead():
    sc = make_scenario(["BBBBB"] * 5, T=9.0)
    for s in planner.STRATEGIES:
        p = planner.plan(sc, s)
        assert p.overhead == 0.0 and p.n_rendezvous >= 2


def test_overhead_in_unit_interval():
    sc = make_scenario(["AAAA"] * 3 + ["BBBB"], T=12.0)
    for s in planner.STRATEGIES:
        p = planner.plan(sc, s)
        assert 0.0 <= p.overhead < 1.0
        assert p.L1 >= p.L2 > 0


def test_road_scenario_values():
    # UGV on the bottom row, UAV sweeping 4x4; t_max = 3 s from the top row
    sc = make_scenario(["AAAA"] * 3 + ["BBBB"], T=14.0)
    p = plan_agcvg(sc)
    assert p.t_max == 3.0 and p.aerial_budget == 8.0
    assert p.n_aerial_clusters == 2 and p.L2 == 15.0
    assert p.L1 == pytest.approx(17.0, abs=1e-12)


def test_infeasible_budget():
    sc = make_scenario(["AAAA"] * 3 + ["BBBB"], T=6.0)
    with pytest.raises(InfeasibleError) as exc:
        plan_agcvg(sc)
    assert exc.value.budget == 0.0


def test_stretches_within_range():
    sc = make_scenario(["AAAA"] * 3 + ["BBBB"], T=10.0)
    for s in planner.STRATEGIES:
        p = planner.plan(sc, s)
        rng_m = sc.energy.flight_range(sc.aerial.speed)
        assert max(planner.stretch_lengths(p)) <= rng_m + 1e-9


def test_determinism():
    sc = make_scenario(["AAAAA", "AA#AA", "AA#AA", "GGGGG", "BBBBB"], T=20.0)
    for s in planner.STRATEGIES:
        assert plan_to_json(planner.plan(sc, s)) == plan_to_json(planner.plan(sc, s))


def test_serialization_round_trip(tmp_path):
    sc = make_scenario(["AAAAA", "AA#AA", "AA#AA", "GGGGG", "BBBBB"], T=20.0)
    p = plan_agcvg(sc)
    f = tmp_path / "p.json"
    planner.save_plan(p, f)
    q = planner.load_plan(f)
    assert plan_to_json(q) == plan_to_json(p)
    assert q.L1 == p.L1 and q.L2 == p.L2 and q.overhead == p.overhead


def test_lengths_recomputed_on_load():
    sc = make_scenario(["AAAA"] * 3 + ["BBBB"], T=12.0)
    doc = plan_agcvg(sc).to_dict()
    doc["L1"], doc["L2"] = 1.0, 1.0
    q = RendezvousPlan.from_dict(json.loads(json.dumps(doc)))
    assert (q.L1, q.L2) == path_lengths(q.aerial.waypoints, q.actions)


def test_bad_actions_rejected():
    doc = plan_agcvg(make_scenario(["BBB"])).to_dict()
    doc["aerial"]["actions"][0] = "jump"
    with pytest.raises(ValueError):
        RendezvousPlan.from_dict(doc)


def test_path_lengths_excludes_dock_legs():
    wp = [(0, 0), (1, 0), (1, 2), (4, 2), (4, 6)]
    acts = ("cover", "cover", "rendezvous", "dock", "transit")
    assert path_lengths(wp, acts) == (1.0 + 2.0 + 4.0, 1.0)


def test_unknown_strategy():
    with pytest.raises(ValueError):
        planner.plan(make_scenario(["BB"]), "random")


def test_tmax_modes_accepted():
    sc = make_scenario(["AAAA"] * 3 + ["BBBB"], T=14.0)
    for mode in ("nearest", "bottleneck", "min_cost_max_edge"):
        p = plan_agcvg(sc, tmax_mode=mode)
        assert p.t_max >= 0


def test_plan_invariants_on_random_batch():
    from agcvg.suite import scenario_batch
    checked = 0
    for sc in scenario_batch(77, 15, size=(8, 16), clusters=(2, 5)):
        paths = planner.coverage_paths(sc)
        rng_m = sc.energy.flight_range(sc.aerial.speed)
        for s in planner.STRATEGIES:
            try:
                p = planner.plan(sc, s, paths=paths)
            except InfeasibleError:
                assert s == "greedy"
                continue
            checked += 1
            assert 0.0 <= p.overhead < 1.0
            assert max(planner.stretch_lengths(p)) <= rng_m + 1e-9
            # detours never remove coverage
            assert sim.verify_coverage(p.aerial, sc.map, sc.aerial_region,
                                       sc.aerial.footprint_width) == 1.0
            gw = p.ground.waypoints
            for e in p.events:
                assert np.array_equal(gw[e.ground_index], e.location)
            if s == "agcvg":
                last = len(gw) - 1
                inner = [e.ground_index for e in p.events if e.ground_index != last]
                assert len(inner) == len(set(inner))
    assert checked >= 25
