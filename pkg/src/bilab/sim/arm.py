"""Per-joint decoupled rigid plant for one 5-DOF arm (4 arm joints + gripper).

The plant is deliberately simple: each joint is an inertia with viscous
friction, an optional gravity torque A_j*cos(theta_j) on the lift joints,
and hard mechanical stops.  Integration is semi-implicit Euler at a fixed
1 ms step, which keeps stiff grasp contact stable at desk-scale gains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import N_JOINTS, ArmParams, arm_arrays


class SimFault(RuntimeError):
    """Raised when the plant receives non-finite inputs (controller divergence)."""


@dataclass(frozen=True)
class JointState:
    """Angle / angular velocity / torque triple for one joint."""

    theta: float
    omega: float
    tau: float


@dataclass(frozen=True)
class ArmState:
    """State of one arm: joint angles, velocities, last applied torques, clock."""

    theta: np.ndarray   # (5,) [rad]
    omega: np.ndarray   # (5,) [rad/s]
    tau: np.ndarray     # (5,) last total joint torque [N m]
    clock: float        # [s]

    @property
    def joints(self) -> tuple:
        return tuple(JointState(float(t), float(w), float(u))
                     for t, w, u in zip(self.theta, self.omega, self.tau))

    def copy(self) -> "ArmState":
        return ArmState(self.theta.copy(), self.omega.copy(), self.tau.copy(), self.clock)


def make_arm_state(theta=None, omega=None, clock: float = 0.0) -> ArmState:
    th = np.zeros(N_JOINTS) if theta is None else np.array(theta, dtype=float)
    om = np.zeros(N_JOINTS) if omega is None else np.array(omega, dtype=float)
    if th.shape != (N_JOINTS,) or om.shape != (N_JOINTS,):
        raise ValueError(f"arm state needs exactly {N_JOINTS} joints")
    return ArmState(th, om, np.zeros(N_JOINTS), float(clock))


class ArmPlant:
    """Integrator bound to one set of arm parameters."""

    def __init__(self, params: ArmParams, physics_dt: float):
        arr = arm_arrays(params)
        self.inertia = arr["inertia"]
        self.viscous = arr["viscous"]
        self.gravity_coeff = arr["gravity_coeff"]
        self.theta_min = arr["theta_min"]
        self.theta_max = arr["theta_max"]
        self.dt = float(physics_dt)

    def gravity_torque(self, theta: np.ndarray) -> np.ndarray:
        return self.gravity_coeff * np.cos(theta)

    def step(self, state: ArmState, tau_ref: np.ndarray,
             tau_load: np.ndarray | float = 0.0) -> ArmState:
        """One semi-implicit Euler step.

        ``tau_load`` is subtracted from the torque balance; it bundles grasp
        contact reactions and (negated) externally applied torques such as
        the operator's hand on the leader.
        """
        tau_ref = np.asarray(tau_ref, dtype=float)
        if tau_ref.shape != (N_JOINTS,):
            raise SimFault(f"torque reference must have shape ({N_JOINTS},), got {tau_ref.shape}")
        if not np.all(np.isfinite(tau_ref)):
            raise SimFault("non-finite torque reference: controller diverged")
        tau_load = np.broadcast_to(np.asarray(tau_load, dtype=float), (N_JOINTS,))
        if not np.all(np.isfinite(tau_load)):
            raise SimFault("non-finite load torque")

        total = tau_ref - self.viscous * state.omega \
            - self.gravity_torque(state.theta) - tau_load
        omega = state.omega + self.dt * total / self.inertia
        theta = state.theta + self.dt * omega

        # hard stops: clamp and kill velocity at the limit
        low = theta < self.theta_min
        high = theta > self.theta_max
        if low.any() or high.any():
            theta = np.clip(theta, self.theta_min, self.theta_max)
            omega = np.where(low | high, 0.0, omega)
        return ArmState(theta, omega, tau_ref - tau_load, state.clock + self.dt)


def step_dynamics(state: ArmState, tau_ref, params: ArmParams, dt: float,
                  tau_load=0.0) -> ArmState:
    """Functional single-step form of :class:`ArmPlant.step`."""
    return ArmPlant(params, dt).step(state, np.asarray(tau_ref, dtype=float), tau_load)


def kinetic_energy(state: ArmState, params: ArmParams) -> float:
    j = np.asarray(params.inertia, dtype=float)
    return float(0.5 * np.sum(j * state.omega ** 2))
