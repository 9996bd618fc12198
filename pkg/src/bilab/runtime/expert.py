"""Scripted stand-in for the human operator.

Generates a minimum-jerk joint trajectory through the pick-and-place
waypoints (approach, close, lift, traverse, lower, open, retreat) and
serves position/velocity targets for the leader's hand servo.  A seeded
RNG jitters waypoint positions and segment timing so repeated
demonstrations vary like human ones would; with ``rng=None`` the
trajectory is exactly reproducible.
"""

from __future__ import annotations

import numpy as np

from .. import kinematics
from ..config import N_JOINTS, ObjectSpec, WorkbenchConfig


def min_jerk(u: float):
    """Quintic blend s(u) with s(0)=0, s(1)=1 and zero velocity/accel at
    both ends; returns (s, ds/du)."""
    s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    sdot = u * u * (30.0 + u * (-60.0 + 30.0 * u))
    return s, sdot


class JointTrajectory:
    """Piecewise minimum-jerk interpolation through joint waypoints."""

    def __init__(self, start: np.ndarray, segments):
        """segments: iterable of (name, duration_s, target_pose)."""
        poses = [np.asarray(start, dtype=float)]
        times = [0.0]
        names = []
        for name, dur, target in segments:
            if dur <= 0:
                raise ValueError(f"segment {name!r} has nonpositive duration")
            names.append(name)
            times.append(times[-1] + float(dur))
            poses.append(np.asarray(target, dtype=float))
        self.names = names
        self.times = np.array(times)
        self.poses = np.vstack(poses)

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def segment_at(self, t: float) -> str:
        if t >= self.duration:
            return "done"
        i = int(np.searchsorted(self.times, t, side="right") - 1)
        return self.names[max(0, min(i, len(self.names) - 1))]

    def sample(self, t: float):
        """Joint target and velocity at time t; clamps outside [0, T]."""
        if t <= 0.0:
            return self.poses[0].copy(), np.zeros(N_JOINTS)
        if t >= self.duration:
            return self.poses[-1].copy(), np.zeros(N_JOINTS)
        i = int(np.searchsorted(self.times, t, side="right") - 1)
        i = max(0, min(i, len(self.names) - 1))
        t0, t1 = self.times[i], self.times[i + 1]
        u = (t - t0) / (t1 - t0)
        s, sdot = min_jerk(u)
        delta = self.poses[i + 1] - self.poses[i]
        q = self.poses[i] + delta * s
        qdot = delta * (sdot / (t1 - t0))
        return q, qdot


def grip_target_force(obj: ObjectSpec, cfg: WorkbenchConfig) -> float:
    """Grip normal force the operator aims for: enough margin to hold the
    object against gravity, capped well below the crush limit."""
    c = cfg.collect
    f = c.grip_force_hold_factor * obj.weight * cfg.timing.gravity / obj.friction_coeff
    f = max(f, c.grip_force_floor)
    return min(f, c.grip_force_crush_margin * obj.crush_force)


def grip_close_angle(obj: ObjectSpec, cfg: WorkbenchConfig) -> float:
    """Gripper joint target that settles at grip_target_force.

    Three contributions: the angle where the fingers first touch, the
    elastic penetration at the target force, and the extra servo command
    needed so the hand PD keeps pushing with the matching torque once the
    bilateral loop reaches steady state.
    """
    f_star = grip_target_force(obj, cfg)
    g = cfg.gripper
    contact = (g.open_aperture - 2.0 * obj.radius) / g.aperture_per_rad
    penetration = (f_star / obj.stiffness) / g.aperture_per_rad
    servo_push = g.aperture_per_rad * f_star / cfg.collect.servo_kp
    target = contact + penetration + servo_push
    hi = cfg.arm.theta_max[N_JOINTS - 1]
    if not 0.0 < target < hi:
        raise ValueError(f"grip target {target:.3f} rad outside (0, {hi}) for {obj.name}")
    return target


def _jitter_xy(xy, rng, scale):
    xy = np.asarray(xy, dtype=float)
    if rng is None or scale <= 0:
        return xy
    return xy + rng.uniform(-scale, scale, size=2)


def _jitter_dur(dur, rng, rel):
    if rng is None or rel <= 0:
        return dur
    return dur * (1.0 + rng.uniform(-rel, rel))


# nominal segment durations [s]; jittered per episode.  The opening hold
# keeps the arm at the hover pose so recorded windows include the same
# all-stationary history an autonomous run sees right after warm-up.  The
# settle after the grasp stays short on purpose: if the pose dwells longer
# than the model's window, the window degenerates to a constant it never
# saw in training and the policy has no cue left to start the lift.
SEGMENT_PLAN = (
    ("hold", 1.0),
    ("descend", 1.2),
    ("close", 1.4),
    ("settle", 0.25),
    ("lift", 1.2),
    ("traverse", 2.4),
    ("lower", 1.2),
    ("open", 0.8),
    ("retreat", 0.8),
)


def build_expert_trajectory(cfg: WorkbenchConfig, obj: ObjectSpec,
                            spawn_xy=None, rng: np.random.Generator | None = None
                            ) -> JointTrajectory:
    """Pick-and-place joint trajectory aimed at the spawned object."""
    c = cfg.collect
    if spawn_xy is None:
        spawn_xy = cfg.layout.pick_center
    pick_xy = _jitter_xy(spawn_xy, rng, c.position_jitter)
    place_xy = _jitter_xy(cfg.layout.place_center, rng, c.position_jitter)
    z_grasp = obj.radius
    z_release = obj.radius + c.place_drop_height
    closed = grip_close_angle(obj, cfg)

    def pose(xy, z, grip):
        psi, q2, q3 = kinematics.inverse(xy[0], xy[1], z, cfg.kinematics)
        return np.array([psi, q2, q3, 0.0, grip])

    start = pose(pick_xy, c.carry_height, 0.0)
    targets = {
        "hold": start.copy(),
        "descend": pose(pick_xy, z_grasp, 0.0),
        "close": pose(pick_xy, z_grasp, closed),
        "settle": pose(pick_xy, z_grasp, closed),
        "lift": pose(pick_xy, c.carry_height, closed),
        "traverse": pose(place_xy, c.carry_height, closed),
        "lower": pose(place_xy, z_release, closed),
        "open": pose(place_xy, z_release, 0.0),
        "retreat": pose(place_xy, c.carry_height, 0.0),
    }
    segments = [(name, _jitter_dur(dur, rng, c.timing_jitter), targets[name])
                for name, dur in SEGMENT_PLAN]
    return JointTrajectory(start, segments)


class ScriptedExpert:
    """Bundles the jittered trajectory with its hand-servo targets."""

    def __init__(self, cfg: WorkbenchConfig, obj: ObjectSpec,
                 spawn_xy=None, rng: np.random.Generator | None = None):
        self.trajectory = build_expert_trajectory(cfg, obj, spawn_xy, rng)
        self.start_pose = self.trajectory.poses[0].copy()

    @property
    def duration(self) -> float:
        return self.trajectory.duration

    def target(self, t: float):
        return self.trajectory.sample(t)

    def segment_at(self, t: float) -> str:
        return self.trajectory.segment_at(t)
