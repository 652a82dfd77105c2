import numpy as np
import pytest

from agcvg.grid_world import scenario_from_dict


def make_scenario(rows, res=1.0, fa=1.0, fg=1.0, va=1.0, vg=1.0, T=1000.0, t_off=0.0,
                  t_lnd=0.0, offset=(0.0, 0.0), name="t"):
    """Scenario from top-first grid rows using the file's character codes."""
    return scenario_from_dict({
        "resolution_m": res, "grid": list(rows),
        "aerial": {"footprint_m": fa, "speed_mps": va},
        "ground": {"footprint_m": fg, "speed_mps": vg},
        "energy": {"endurance_s": T, "takeoff_s": t_off, "landing_s": t_lnd},
        "launch_offset_m": list(offset), "name": name})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
