"""Deterministic two-arm world: leader + follower plants, one graspable
object, grasp contact and task scoring, stepped at the physics rate.

The world owns no controllers; an outer loop supplies torque references per
control period and the world advances the configured number of physics
substeps with those references held (zero-order hold).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import ObjectSpec, WorkbenchConfig
from .. import kinematics
from .arm import ArmPlant, ArmState, make_arm_state
from .contact import ContactResult, GripContactModel
from .task import TaskStage, TaskStatus, evaluate_task_status


@dataclass
class ObjectState:
    pos: np.ndarray        # center (x, y, z) [m]
    vz: float = 0.0        # vertical velocity while falling [m/s]
    held: bool = False
    crushed: bool = False
    resting: bool = True


class World:
    def __init__(self, cfg: WorkbenchConfig, obj: ObjectSpec,
                 spawn_xy=None, initial_theta=None):
        cfg.validate()
        self.cfg = cfg
        self.timing = cfg.timing
        self.plant = ArmPlant(cfg.arm, cfg.timing.physics_dt)
        self.contact_model = GripContactModel(cfg.gripper, cfg.kinematics, cfg.timing.gravity)
        self.obj_spec = obj

        self.leader = make_arm_state(initial_theta)
        self.follower = make_arm_state(initial_theta)
        xy = cfg.layout.pick_center if spawn_xy is None else spawn_xy
        self.obj = ObjectState(np.array([xy[0], xy[1], obj.radius], dtype=float))
        self.status = TaskStatus()
        self.grip_force = 0.0

        # follower end-effector vertical kinematics for the hold check
        self._ee_z = kinematics.forward(self.follower.theta, cfg.kinematics)[2]
        self._ee_vz = 0.0
        self._ee_az = 0.0

    @property
    def clock(self) -> float:
        return self.follower.clock

    def _update_object(self, contact: ContactResult, dt: float) -> None:
        obj = self.obj
        if obj.crushed:
            return
        if contact.crushed:
            obj.crushed = True
            obj.held = False
            obj.resting = False
            return
        if contact.held:
            ee = kinematics.forward(self.follower.theta, self.cfg.kinematics)
            obj.pos[:] = ee
            if obj.pos[2] < self.obj_spec.radius:  # table supports a carried object
                obj.pos[2] = self.obj_spec.radius
            obj.vz = self._ee_vz
            obj.held = True
            obj.resting = False
            return
        obj.held = False
        if obj.pos[2] > self.obj_spec.radius:
            obj.vz -= self.timing.gravity * dt
            obj.pos[2] += obj.vz * dt
            obj.resting = False
            if obj.pos[2] <= self.obj_spec.radius:
                obj.pos[2] = self.obj_spec.radius
                obj.vz = 0.0
                obj.resting = True
        else:
            obj.pos[2] = self.obj_spec.radius
            obj.vz = 0.0
            obj.resting = True

    def step_physics(self, tau_ref_l, tau_ref_f, leader_load_fn=None) -> None:
        """One physics substep for both arms, the object and the score."""
        dt = self.timing.physics_dt
        was_held = self.obj.held
        contact = self.contact_model.update(
            self.follower, self.obj_spec, self.obj.pos, was_held, self._ee_az)
        self.grip_force = contact.grip_force

        leader_load = 0.0
        if leader_load_fn is not None:
            leader_load = leader_load_fn(self.leader.theta, self.leader.omega)
        self.leader = self.plant.step(self.leader, tau_ref_l, leader_load)
        self.follower = self.plant.step(self.follower, tau_ref_f, contact.torques)

        z = kinematics.forward(self.follower.theta, self.cfg.kinematics)[2]
        vz = (z - self._ee_z) / dt
        self._ee_az = (vz - self._ee_vz) / dt
        self._ee_z, self._ee_vz = z, vz

        self._update_object(contact, dt)
        self.status = evaluate_task_status(
            self.status, held=self.obj.held, crushed=self.obj.crushed,
            obj_pos=self.obj.pos, obj_resting=self.obj.resting,
            obj_radius=self.obj_spec.radius, layout=self.cfg.layout,
            was_held=was_held)

    def step_control(self, tau_ref_l, tau_ref_f, leader_load_fn=None) -> None:
        """Advance one full control period (zero-order-hold torque refs)."""
        for _ in range(self.timing.substeps):
            self.step_physics(tau_ref_l, tau_ref_f, leader_load_fn)
            if self.status.terminal and self.status.stage is not TaskStage.PLACED:
                break
