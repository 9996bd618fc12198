"""Demonstration collection: scripted expert drives the leader through the
hand servo, bilateral control couples the follower, everything is recorded
at the control rate.
"""

from __future__ import annotations

import numpy as np

from ..config import N_JOINTS, WorkbenchConfig, as_gain_dict
from ..control import BilateralController, JointObservers
from ..episodes import Episode
from ..sim import TaskStage, World
from .expert import ScriptedExpert


def run_demo_episode(cfg: WorkbenchConfig, obj_name: str, seed: int | None = None,
                     settle_s: float = 0.5):
    """One scripted bilateral demonstration.

    Returns (episode, world); the final task outcome is in episode.meta
    and world.status.  ``seed=None`` disables every jitter source.
    """
    obj = cfg.object(obj_name)
    rng = np.random.default_rng(seed) if seed is not None else None
    spawn = np.asarray(cfg.layout.pick_center, dtype=float)
    if rng is not None and cfg.collect.spawn_jitter > 0:
        spawn = spawn + rng.uniform(-cfg.collect.spawn_jitter,
                                    cfg.collect.spawn_jitter, size=2)

    expert = ScriptedExpert(cfg, obj, spawn, rng)
    world = World(cfg, obj, spawn_xy=spawn, initial_theta=expert.start_pose)
    dt = cfg.timing.control_dt
    ctl = BilateralController(cfg.gains, dt)
    obs_l = JointObservers(cfg.gains, dt)
    obs_f = JointObservers(cfg.gains, dt)
    kp_h, kd_h = cfg.collect.servo_kp, cfg.collect.servo_kd

    stop_at = expert.duration + settle_s
    n_max = int(round(cfg.collect.timeout_s / dt))
    tau_l = np.zeros(N_JOINTS)
    tau_f = np.zeros(N_JOINTS)
    rows = []
    peak_grip = 0.0

    for _ in range(n_max):
        t = world.clock
        obs_l.update(tau_l, world.leader.omega, world.leader.theta)
        obs_f.update(tau_f, world.follower.omega, world.follower.theta)
        rows.append((t,
                     world.leader.theta.copy(), world.leader.omega.copy(),
                     obs_l.tau_res.copy(),
                     world.follower.theta.copy(), world.follower.omega.copy(),
                     obs_f.tau_res.copy()))
        tau_l, tau_f = ctl.step(world.leader.theta, world.follower.theta,
                                obs_l.tau_res, obs_f.tau_res,
                                obs_l.tau_dis, obs_f.tau_dis)

        q_des, qdot_des = expert.target(t)

        def hand_load(theta, omega):
            return -(kp_h * (q_des - theta) + kd_h * (qdot_des - omega))

        world.step_control(tau_l, tau_f, hand_load)
        peak_grip = max(peak_grip, world.grip_force)
        if world.status.terminal and world.status.stage is not TaskStage.PLACED:
            break
        if world.clock >= stop_at:
            break

    episode = _pack_episode(rows, cfg, obj_name, seed, world, peak_grip, spawn)
    return episode, world


def _pack_episode(rows, cfg, obj_name, seed, world, peak_grip, spawn) -> Episode:
    n = len(rows)
    t = np.array([r[0] for r in rows])
    stack = lambda i: np.vstack([r[i] for r in rows])
    meta = {
        "source": "scripted",
        "object": obj_name,
        "seed": seed,
        "steps": n,
        "spawn_xy": [float(spawn[0]), float(spawn[1])],
        "outcome": world.status.as_dict(),
        "peak_grip_force": float(peak_grip),
        "gains": as_gain_dict(cfg.gains),
        "control_dt": cfg.timing.control_dt,
    }
    return Episode(t=t, leader_theta=stack(1), leader_omega=stack(2),
                   leader_tau=stack(3), follower_theta=stack(4),
                   follower_omega=stack(5), follower_tau=stack(6), meta=meta)


def collect_demos(cfg: WorkbenchConfig, objects, per_object: int, out_dir,
                  base_seed: int = 100, save=None, progress=None):
    """Run per_object scripted demos for each object name; returns metadata
    list.  ``save(episode, path)`` defaults to episodes.save_episode."""
    from pathlib import Path

    from ..episodes import save_episode
    if save is None:
        save = save_episode
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    i = 0
    for obj_name in objects:
        for k in range(per_object):
            seed = base_seed + i
            episode, world = run_demo_episode(cfg, obj_name, seed)
            path = out_dir / f"demo_{i:03d}_{obj_name}.csv"
            save(episode, path)
            records.append({"path": str(path), "object": obj_name, "seed": seed,
                            "steps": len(episode),
                            "stage": world.status.stage.name,
                            "place": world.status.place_succeeded})
            if progress is not None:
                progress(records[-1])
            i += 1
    return records
