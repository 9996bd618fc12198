"""Autonomous execution: a trained policy stands in for the leader arm.

Each 10 ms cycle the follower's observers refresh, the policy turns the
follower's recent states into a predicted leader state, and that prediction
fills the leader slots of the follower half of the bilateral law. Only the
follower arm does useful work; the leader plant idles at zero torque.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .. import kinematics
from ..config import N_JOINTS, WorkbenchConfig, as_gain_dict
from ..control import JointObservers, bilateral_torque_refs
from ..episodes import Episode
from ..sim import TaskStage, TaskStatus, World

_ZEROS = np.zeros(N_JOINTS)


class SafeStop(RuntimeError):
    """Prediction unusable; the follower must be torque-zeroed."""


def follower_state_vector(theta, omega, tau_res) -> np.ndarray:
    """Pack one robot's measurements into the interleaved 15-vector."""
    out = np.empty(3 * N_JOINTS)
    out[0::3] = theta
    out[1::3] = omega
    out[2::3] = tau_res
    return out


def autonomous_step(policy, theta_f, omega_f, tau_res_f, tau_dis_f, gains):
    """One decision cycle: predict the leader state, derive the follower
    torque reference.

    Returns (tau_ref_f, prediction, elapsed wall seconds). The prediction's
    angle, velocity and torque channels take the leader's places in the
    position, velocity and force terms. A non-finite prediction raises
    SafeStop; the caller commands zero torque in the same control step.
    """
    t0 = time.perf_counter()
    state = follower_state_vector(theta_f, omega_f, tau_res_f)
    try:
        pred = policy.predict(state)
    except FloatingPointError as err:
        raise SafeStop(str(err)) from None
    pred = np.asarray(pred, dtype=float).reshape(3 * N_JOINTS)
    if not np.all(np.isfinite(pred)):
        raise SafeStop("non-finite prediction")
    e = pred[0::3] - theta_f
    e_dot = pred[1::3] - omega_f
    _, tau_ref_f = bilateral_torque_refs(gains, e, e_dot, pred[2::3],
                                         tau_res_f, _ZEROS, tau_dis_f)
    return tau_ref_f, pred, time.perf_counter() - t0


@dataclass
class AutonomousResult:
    episode: Episode
    status: TaskStatus
    latencies_s: np.ndarray
    fault: str | None = None

    @property
    def place_succeeded(self) -> bool:
        return self.status.place_succeeded

    def latency_stats_ms(self) -> dict:
        lat = self.latencies_s * 1e3
        if lat.size == 0:
            return {"n": 0}
        return {"n": int(lat.size), "mean": float(lat.mean()),
                "p50": float(np.percentile(lat, 50)),
                "p99": float(np.percentile(lat, 99)),
                "max": float(lat.max())}


def start_pose(cfg: WorkbenchConfig) -> np.ndarray:
    """Hover above the nominal pick point, gripper open; matches how
    scripted demonstrations begin."""
    x, y = cfg.layout.pick_center
    psi, q2, q3 = kinematics.inverse(x, y, cfg.collect.carry_height, cfg.kinematics)
    return np.array([psi, q2, q3, 0.0, 0.0])


def run_autonomous_episode(cfg: WorkbenchConfig, policy, obj_name: str,
                           seed: int | None = None, timeout_s: float | None = None,
                           ) -> AutonomousResult:
    """One policy-driven pick-and-place attempt.

    The seed only jitters the object spawn (the policy has no vision, so
    per-trial variation must be mechanically absorbable). Ends on a
    terminal task state, the timeout, or a safe-stop.
    """
    obj = cfg.object(obj_name)
    spawn = np.asarray(cfg.layout.pick_center, dtype=float)
    if seed is not None and cfg.collect.spawn_jitter > 0:
        rng = np.random.default_rng(seed)
        spawn = spawn + rng.uniform(-cfg.collect.spawn_jitter,
                                    cfg.collect.spawn_jitter, size=2)

    world = World(cfg, obj, spawn_xy=spawn, initial_theta=start_pose(cfg))
    dt = cfg.timing.control_dt
    obs_f = JointObservers(cfg.gains, dt)
    policy.reset()
    if timeout_s is None:
        timeout_s = cfg.eval.timeout_s

    tau_f = np.zeros(N_JOINTS)
    rows: list = []
    latencies: list = []
    fault = None
    for _ in range(int(round(timeout_s / dt))):
        t = world.clock
        f_theta = world.follower.theta.copy()
        f_omega = world.follower.omega.copy()
        obs_f.update(tau_f, f_omega, f_theta)
        f_res = obs_f.tau_res.copy()
        try:
            tau_f, pred, elapsed = autonomous_step(
                policy, f_theta, f_omega, f_res, obs_f.tau_dis, cfg.gains)
        except SafeStop as err:
            fault = str(err)
            world.step_control(_ZEROS, _ZEROS)
            break
        latencies.append(elapsed)
        rows.append((t, pred[0::3].copy(), pred[1::3].copy(), pred[2::3].copy(),
                     f_theta, f_omega, f_res))
        world.step_control(_ZEROS, tau_f)
        if world.status.terminal and world.status.stage is not TaskStage.PLACED:
            break
        if world.clock >= timeout_s:
            break

    episode = _pack(rows, cfg, policy, obj_name, seed, world, fault, spawn)
    return AutonomousResult(episode=episode, status=world.status,
                            latencies_s=np.asarray(latencies), fault=fault)


def _pack(rows, cfg, policy, obj_name, seed, world, fault, spawn) -> Episode:
    if not rows:
        empty = np.zeros((0, N_JOINTS))
        return Episode(t=np.zeros(0), leader_theta=empty, leader_omega=empty,
                       leader_tau=empty, follower_theta=empty,
                       follower_omega=empty, follower_tau=empty,
                       meta={"source": "autonomous", "fault": fault})
    t = np.array([r[0] for r in rows])
    stack = lambda i: np.vstack([r[i] for r in rows])
    meta = {
        "source": "autonomous",
        "policy": getattr(policy, "kind", "unknown"),
        "object": obj_name,
        "seed": seed,
        "steps": len(rows),
        "spawn_xy": [float(spawn[0]), float(spawn[1])],
        "outcome": world.status.as_dict(),
        "fault": fault,
        "gains": as_gain_dict(cfg.gains),
        "control_dt": cfg.timing.control_dt,
    }
    return Episode(t=t, leader_theta=stack(1), leader_omega=stack(2),
                   leader_tau=stack(3), follower_theta=stack(4),
                   follower_omega=stack(5), follower_tau=stack(6), meta=meta)


__all__ = ["SafeStop", "AutonomousResult", "autonomous_step",
           "run_autonomous_episode", "follower_state_vector", "start_pose"]
