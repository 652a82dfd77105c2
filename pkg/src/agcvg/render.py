"""Deterministic SVG plots of a scenario and (optionally) a plan."""
from __future__ import annotations

import numpy as np

CELL_PX = 20
COLORS = {"background": "#ffffff", "obstacle": "#2b2b2b", "aerial_mask": "#fff2a8",
          "ground_mask": "#e3cdf2", "ugv": "#7b2d8e", "uav": "#e6b800", "marker": "#d62728"}


def _f(v):
    return f"{v:.3f}"


def _check(plan, scenario):
    m = scenario.map
    shape = plan.meta.get("map_shape")
    if shape is not None and tuple(shape) != m.shape:
        raise ValueError(f"plan was made for a {shape[0]}x{shape[1]} map, scenario map is "
                         f"{m.height}x{m.width}")
    res = plan.meta.get("resolution")
    if res is not None and res != m.resolution:
        raise ValueError(f"plan resolution {res} m != scenario resolution {m.resolution} m")
    for wp in (plan.aerial.waypoints, plan.ground.waypoints):
        if len(wp) and ((wp < -1e-9).any() or (wp[:, 0] > m.width * m.resolution + 1e-9).any()
                        or (wp[:, 1] > m.height * m.resolution + 1e-9).any()):
            raise ValueError("plan waypoints fall outside the scenario map")


def render_svg(scenario, plan=None):
    """SVG text; identical inputs give byte-identical output."""
    m = scenario.map
    h, w, res = m.height, m.width, m.resolution
    scale = CELL_PX / res

    def xy(p):
        return _f(p[0] * scale), _f((h * res - p[1]) * scale)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * CELL_PX}" '
           f'height="{h * CELL_PX}" viewBox="0 0 {w * CELL_PX} {h * CELL_PX}">',
           f'<rect x="0" y="0" width="{w * CELL_PX}" height="{h * CELL_PX}" '
           f'fill="{COLORS["background"]}"/>']

    def cells(mask, color, opacity, cls):
        out.append(f'<g class="{cls}" fill="{color}" fill-opacity="{opacity}">')
        for r, c in np.argwhere(mask):
            out.append(f'<rect x="{c * CELL_PX}" y="{(h - 1 - r) * CELL_PX}" '
                       f'width="{CELL_PX}" height="{CELL_PX}"/>')
        out.append("</g>")

    cells(scenario.aerial_region.cells, COLORS["aerial_mask"], "0.8", "aerial-mask")
    cells(scenario.ground_region.cells, COLORS["ground_mask"], "0.6", "ground-mask")
    cells(m.occupancy, COLORS["obstacle"], "1", "obstacles")

    if plan is not None:
        _check(plan, scenario)
        gw = plan.ground.waypoints
        if len(gw):
            pts = " ".join(",".join(xy(p)) for p in gw)
            out.append(f'<polyline class="ugv-path" points="{pts}" fill="none" '
                       f'stroke="{COLORS["ugv"]}" stroke-width="3"/>')
        # aerial path split at docked legs, which the UGV carries
        runs, cur = [], []
        aw = plan.aerial.waypoints
        for i, p in enumerate(aw):
            if i > 0 and plan.actions[i] == "dock":
                if len(cur) > 1:
                    runs.append(cur)
                cur = [p]
            else:
                cur.append(p)
        if len(cur) > 1:
            runs.append(cur)
        for run in runs:
            pts = " ".join(",".join(xy(p)) for p in run)
            out.append(f'<polyline class="uav-path" points="{pts}" fill="none" '
                       f'stroke="{COLORS["uav"]}" stroke-width="2"/>')
        for ev in plan.events:
            x, y = xy(ev.location)
            out.append(f'<circle class="rendezvous" cx="{x}" cy="{y}" r="{_f(CELL_PX * 0.45)}" '
                       f'fill="{COLORS["marker"]}" fill-opacity="0.85"/>')
            out.append(f'<text x="{x}" y="{y}" font-size="{_f(CELL_PX * 0.55)}" '
                       f'text-anchor="middle" dominant-baseline="central" fill="#ffffff">'
                       f'{ev.recharge_index}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
