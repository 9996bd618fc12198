"""1-D spring-damper grasp contact between the follower gripper and an object.

The gripper squeeze is modeled along a single axis: finger aperture follows
the gripper joint linearly, and the object resists with a spring-damper
once the aperture falls below its diameter.  Lateral geometry reduces to a
capture region around the end-effector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import GRIPPER_JOINT, N_JOINTS, GripperMap, KinematicsParams, ObjectSpec
from .. import kinematics
from .arm import ArmState


@dataclass(frozen=True)
class ContactResult:
    torques: np.ndarray      # (5,) load torques on the follower [N m]
    grip_force: float        # normal force on the object [N]
    held: bool
    crushed: bool


class GripContactModel:
    """Pure per-step contact evaluation; no internal state."""

    # object must sit this close to the end-effector for the fingers to touch it
    capture_radius = 0.03    # planar [m]
    capture_height = 0.03    # vertical [m]
    # finger-pad compliance: a seated object stays captive until the aperture
    # clears its diameter by this much, so acquiring a grasp is strict but a
    # millisecond force dip cannot shake a held object loose
    slip_clearance = 0.003   # aperture margin [m]

    def __init__(self, gripper: GripperMap, kin: KinematicsParams, gravity: float):
        self.gripper = gripper
        self.kin = kin
        self.g0 = gravity

    def update(self, follower: ArmState, obj: ObjectSpec, obj_pos: np.ndarray,
               held_before: bool, vertical_accel: float = 0.0) -> ContactResult:
        """Evaluate squeeze force, hold condition and load torques.

        ``vertical_accel`` is the follower end-effector's vertical
        acceleration magnitude, which raises the required grip force while
        the arm accelerates the load.
        """
        torques = np.zeros(N_JOINTS)
        ee = kinematics.forward(follower.theta, self.kin)
        if not held_before:
            planar = float(np.hypot(ee[0] - obj_pos[0], ee[1] - obj_pos[1]))
            if planar > self.capture_radius or abs(ee[2] - obj_pos[2]) > self.capture_height:
                return ContactResult(torques, 0.0, False, False)

        aperture = self.gripper.aperture(follower.theta[GRIPPER_JOINT])
        penetration = 2.0 * obj.radius - aperture
        force = 0.0
        crushed = False
        if penetration > 0.0:
            # squeeze rate > 0 while closing; damping resists the squeeze only
            squeeze_rate = self.gripper.aperture_per_rad * follower.omega[GRIPPER_JOINT]
            force = obj.stiffness * penetration + obj.damping * max(0.0, squeeze_rate)
            crushed = force > obj.crush_force
            torques[GRIPPER_JOINT] = force * self.gripper.aperture_per_rad
        elif not held_before:
            return ContactResult(torques, 0.0, False, False)

        held = (not crushed) and \
            force * obj.friction_coeff >= obj.weight * (self.g0 + abs(vertical_accel))
        if not held and held_before and not crushed and \
                aperture < 2.0 * obj.radius + self.slip_clearance:
            held = True
        if held:
            l2, l3 = kinematics.lift_levers(follower.theta, self.kin)
            load = obj.weight * self.g0
            torques[1] += load * l2
            torques[2] += load * l3
        return ContactResult(torques, force, held, crushed)
