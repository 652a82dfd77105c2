"""Waypoint mission files in the vehicles' own coordinate frames.

A mission file is CSV (``idx,x,y,z,action``) preceded by ``#`` header lines
that record the frame, the 2x2 axis matrix ``M`` and the planner-frame origin
``o``; a planner point ``p`` is written as ``M @ (p - o)``. All numbers are
written with ``repr`` so files re-import bit-exactly.

* ``ugv_rhr``: origin at the UGV start; X left, Y forward.
* ``uav_lhr``: origin at the UAV launch point (UGV start plus the launch
  offset, given in the UGV frame); X forward, Y right.
"""
from __future__ import annotations

import csv
import io

import numpy as np

from agcvg.frames import FRAMES, UGV_RHR, ugv_offset_to_planner

ALTITUDE = {"cover": 3.0, "transit": 3.0, "rendezvous": 1.0, "dock": 0.0}
DEFAULT_VEHICLE = {"ugv_rhr": "ground", "uav_lhr": "aerial"}


def _offset_from_plan(plan):
    if "launch_offset" in plan.meta:
        return tuple(plan.meta["launch_offset"])
    d = plan.aerial.waypoints[0] - plan.ground.waypoints[0]
    return tuple(float(v) for v in UGV_RHR @ d)


def export_mission(plan, frame="uav_lhr", launch_offset=None, vehicle=None):
    """Mission file text for one vehicle of ``plan`` in ``frame``."""
    if frame not in FRAMES:
        raise ValueError(f"unknown frame {frame!r}; expected one of {sorted(FRAMES)}")
    vehicle = vehicle or DEFAULT_VEHICLE[frame]
    if vehicle not in ("aerial", "ground"):
        raise ValueError(f"unknown vehicle {vehicle!r}")
    m = FRAMES[frame]
    g0 = plan.ground.waypoints[0]
    if frame == "uav_lhr":
        off = _offset_from_plan(plan) if launch_offset is None else launch_offset
        origin = g0 + ugv_offset_to_planner(off)
    else:
        origin = g0
    if vehicle == "aerial":
        pts, actions = plan.aerial.waypoints, plan.actions
        z = [ALTITUDE[a] for a in actions]
    else:
        pts = plan.ground.waypoints
        actions = ("cover",) * len(pts)
        z = [0.0] * len(pts)
    q = (pts - origin) @ m.T
    buf = io.StringIO()
    buf.write(f"# frame: {frame}\n# vehicle: {vehicle}\n")
    buf.write(f"# matrix: {repr(float(m[0, 0]))} {repr(float(m[0, 1]))} "
              f"{repr(float(m[1, 0]))} {repr(float(m[1, 1]))}\n")
    buf.write(f"# origin: {repr(float(origin[0]))} {repr(float(origin[1]))}\n")
    buf.write("# vehicle = matrix @ (planner - origin); planner frame x right, y up, meters\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["idx", "x", "y", "z", "action"])
    for i, (row, zz, a) in enumerate(zip(q, z, actions)):
        w.writerow([i, repr(float(row[0])), repr(float(row[1])), repr(zz), a])
    return buf.getvalue()


def import_mission(text):
    """Parse a mission file; returns ``(planner_points, z, actions, header)``."""
    header = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, val = line[1:].partition(":")
            if sep:
                header[key.strip()] = val.strip()
        elif line.strip():
            rows.append(line)
    if "matrix" not in header or "origin" not in header:
        raise ValueError("mission file header needs matrix and origin lines")
    m = np.array([float(v) for v in header["matrix"].split()]).reshape(2, 2)
    origin = np.array([float(v) for v in header["origin"].split()])
    reader = csv.DictReader(io.StringIO("\n".join(rows)))
    q, z, actions = [], [], []
    for r in reader:
        q.append((float(r["x"]), float(r["y"])))
        z.append(float(r["z"]))
        actions.append(r["action"])
    q = np.array(q, dtype=np.float64).reshape(-1, 2)
    pts = np.linalg.solve(m, q.T).T + origin
    return pts, np.array(z), tuple(actions), header
