import os
import subprocess
import sys

import numpy as np
import pytest

from agcvg import kernels
from agcvg._accel import HAS_NUMBA

NB, NP = kernels.NUMBA_KERNELS, kernels.NUMPY_KERNELS


def test_dijkstra_backends_agree(rng):
    free = rng.random((15, 17)) > 0.2
    free[0, 0] = True
    d1, p1 = NB["grid_dijkstra"](free, np.int64(0), np.int64(-1), 0.5)
    d2, p2 = NP["grid_dijkstra"](free, np.int64(0), np.int64(-1), 0.5)
    np.testing.assert_array_equal(d1, d2)
    np.testing.assert_array_equal(p1, p2)


def test_dijkstra_matches_scipy(rng):
    from oracles import grid_graph_distances
    free = rng.random((9, 11)) > 0.25
    free[4, 5] = True
    src = 4 * 11 + 5
    d, _ = kernels.grid_dijkstra(free, src, 0.5)
    ref = grid_graph_distances(free, 0.5, [src])[0]
    np.testing.assert_allclose(d, ref, rtol=1e-12)


def test_hungarian_backends_agree(rng):
    for shape in [(5, 5), (4, 7), (1, 3)]:
        c = rng.uniform(0, 10, shape)
        a, b = NB["hungarian"](c), NP["hungarian"](c)
        assert c[np.arange(shape[0]), a].sum() == pytest.approx(c[np.arange(shape[0]), b].sum())


def test_matching_and_distance_backends_agree(rng):
    adj = rng.random((12, 9)) < 0.3
    assert (NB["max_matching"](adj) >= 0).sum() == (NP["max_matching"](adj) >= 0).sum()
    a, b = rng.uniform(0, 5, (50, 2)), rng.uniform(0, 5, (30, 2))
    assert NB["max_min_dist"](a, b) == NP["max_min_dist"](a, b)


def test_swath_backends_agree(rng):
    pts = np.cumsum(rng.normal(0, 1, (30, 2)), 0) + 6
    for r in (0.5, 1.0, 1.5):
        np.testing.assert_array_equal(NB["swath_mask"](pts, r, 0.5, 24, 24),
                                      NP["swath_mask"](pts, r, 0.5, 24, 24))
    one = np.array([[2.25, 2.25]])
    m = NB["swath_mask"](one, 0.5, 0.5, 10, 10)
    assert m.sum() == 5 and (m == NP["swath_mask"](one, 0.5, 0.5, 10, 10)).all()


def test_ordering_backends_agree(rng):
    trans = rng.uniform(1, 9, (20, 20))
    s1, b1 = NB["held_karp"](trans, 5)
    s2, b2 = NP["held_karp"](trans, 5)
    assert b1 == pytest.approx(b2) and list(s1) == list(s2)
    exits = np.tile(np.array([3, 2, 1, 0], dtype=np.int64), 5)
    seq = np.arange(5, dtype=np.int64) * 4
    np.testing.assert_array_equal(NB["two_opt"](seq, trans, exits, 50),
                                  NP["two_opt"](seq, trans, exits, 50))


_SCRIPT = """
import sys
sys.path.insert(0, {tests!r})
from agcvg import kernels, planner
from conftest import make_scenario
sc = make_scenario(["AAAAAA", "AA#AAA", "AA#AAA", "GGGGGG", "BBBBBB"], T=20.0)
print(kernels.BACKEND)
print(planner.plan_to_json(planner.plan_agcvg(sc)))
"""


def _run(flag):
    env = dict(os.environ)
    env.pop("AGCVG_DISABLE_NUMBA", None)
    if flag:
        env["AGCVG_DISABLE_NUMBA"] = "1"
    code = _SCRIPT.format(tests=os.path.dirname(__file__))
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                          text=True, check=True).stdout


@pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")
def test_env_flag_selects_numpy_and_plans_match():
    a, b = _run(False), _run(True)
    assert a.splitlines()[0] == "numba" and b.splitlines()[0] == "numpy"
    assert a.split("\n", 1)[1] == b.split("\n", 1)[1]
