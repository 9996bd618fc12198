"""Fixed 2-link kinematic map used for task scoring and scripted waypoints.

Joint 1 is base yaw, joints 2-3 form a planar 2-link chain in the vertical
plane (angles measured from horizontal), joint 4 is an unused wrist and
joint 5 the gripper.  Only the end-effector point matters here; the plant
itself stays per-joint decoupled.
"""

from __future__ import annotations

import math

import numpy as np

from .config import KinematicsParams


def forward(theta, kin: KinematicsParams):
    """End-effector position (x, y, z) for joint angles ``theta`` (5,)."""
    psi, q2, q3 = theta[0], theta[1], theta[2]
    r = kin.link1 * math.cos(q2) + kin.link2 * math.cos(q2 + q3)
    z = kin.shoulder_height + kin.link1 * math.sin(q2) + kin.link2 * math.sin(q2 + q3)
    return np.array([r * math.cos(psi), r * math.sin(psi), z])


def lift_levers(theta, kin: KinematicsParams):
    """dz/dq2 and dz/dq3: the lever arms that map a vertical end-effector
    load into torques on the two lift joints."""
    q2, q3 = theta[1], theta[2]
    l3 = kin.link2 * math.cos(q2 + q3)
    l2 = kin.link1 * math.cos(q2) + l3
    return l2, l3


def inverse(x: float, y: float, z: float, kin: KinematicsParams):
    """Joint angles (psi, q2, q3) reaching the point, elbow-positive branch.

    Raises ValueError when the point is outside the reachable annulus.
    """
    psi = math.atan2(y, x)
    r = math.hypot(x, y)
    dz = z - kin.shoulder_height
    d2 = r * r + dz * dz
    l1, l2 = kin.link1, kin.link2
    c3 = (d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    if not -1.0 <= c3 <= 1.0:
        raise ValueError(f"point ({x:.3f},{y:.3f},{z:.3f}) out of reach")
    q3 = math.acos(c3)
    q2 = math.atan2(dz, r) - math.atan2(l2 * math.sin(q3), l1 + l2 * math.cos(q3))
    return psi, q2, q3
