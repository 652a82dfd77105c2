"""Planner-frame to vehicle-frame axis conventions.

Planner frame: x right, y up, meters. ``UGV_RHR`` maps planner offsets to the
ground vehicle frame (X left, Y forward); ``UAV_LHR`` maps them to the aerial
vehicle frame (X forward, Y right).
"""
import numpy as np

UGV_RHR = np.array([[-1.0, 0.0], [0.0, 1.0]])
UAV_LHR = np.array([[0.0, 1.0], [1.0, 0.0]])
FRAMES = {"ugv_rhr": UGV_RHR, "uav_lhr": UAV_LHR}


def ugv_offset_to_planner(offset):
    """Planner-frame vector for an offset given in the UGV frame."""
    return np.linalg.solve(UGV_RHR, np.asarray(offset, dtype=np.float64))
