"""Per-axis position/force control: pseudo-derivative, disturbance observer
(DOB), reaction-force observer (RFOB) and the 4-channel bilateral law.

Discrete realization: every filter is a first-order low-pass integrated by
forward Euler at the control rate (100 Hz by default).  All blocks are
vectorized over the five joints; state is explicit per instance so the two
robots each own their observer set.

Sign conventions (see also sim.arm): a positive load torque resists motion
in +theta.  The RFOB's reaction estimate is positive when the arm pushes
against something, i.e. it recovers the load torque on the plant:
tau_res ~= tau_load.
"""

from __future__ import annotations

import numpy as np

from .config import N_JOINTS, ControllerGains


class LowPass:
    """First-order low-pass y' = g (u - y), forward-Euler discretized."""

    def __init__(self, cutoff: float, dt: float, n: int = N_JOINTS):
        if not 0.0 < cutoff * dt < 2.0:
            raise ValueError(f"unstable low-pass: cutoff {cutoff} at dt {dt}")
        self.alpha = cutoff * dt
        self.y = np.zeros(n)

    def reset(self) -> None:
        self.y[:] = 0.0

    def update(self, u: np.ndarray) -> np.ndarray:
        self.y = self.y + self.alpha * (u - self.y)
        return self.y


class PseudoDerivative:
    """Filtered differentiator g s / (s + g).

    Output is g*(x - lp(x)), which settles to the true slope of a ramp and
    to zero for a constant input.
    """

    def __init__(self, cutoff: float, dt: float, n: int = N_JOINTS):
        self.cutoff = cutoff
        self.lp = LowPass(cutoff, dt, n)

    def reset(self) -> None:
        self.lp.reset()

    def update(self, x: np.ndarray) -> np.ndarray:
        xdot = self.cutoff * (x - self.lp.y)
        self.lp.update(x)
        return xdot


class DisturbanceObserver:
    """Velocity-form DOB: tau_dis = LPF(tau_ref + g J_n w) - g J_n w.

    The estimate converges to the low-passed total disturbance
    tau_ref - J_n * domega/dt, i.e. friction + gravity - external torque on
    a nominally modeled joint.
    """

    def __init__(self, gains: ControllerGains, dt: float):
        self.g = gains.g_dob
        self.j_n = np.asarray(gains.j_n, dtype=float)
        self.lp = LowPass(self.g, dt)
        self.tau_dis = np.zeros(N_JOINTS)

    def reset(self) -> None:
        self.lp.reset()
        self.tau_dis[:] = 0.0

    def update(self, tau_ref: np.ndarray, omega: np.ndarray) -> np.ndarray:
        momentum = self.g * self.j_n * omega
        self.tau_dis = self.lp.update(tau_ref + momentum) - momentum
        if not np.all(np.isfinite(self.tau_dis)):
            raise FloatingPointError("disturbance observer produced non-finite estimate")
        return self.tau_dis


class ReactionForceObserver:
    """RFOB: subtract nominal friction/gravity from the DOB estimate and
    low-pass the remainder; what is left is the externally caused torque."""

    def __init__(self, gains: ControllerGains, dt: float):
        self.d_n = np.asarray(gains.d_n, dtype=float)
        self.gravity_n = np.asarray(gains.gravity_n, dtype=float)
        self.lp = LowPass(gains.g_dob, dt)
        self.tau_res = np.zeros(N_JOINTS)

    def reset(self) -> None:
        self.lp.reset()
        self.tau_res[:] = 0.0

    def nominal_gravity(self, theta: np.ndarray) -> np.ndarray:
        return self.gravity_n * np.cos(theta)

    def update(self, tau_dis: np.ndarray, omega: np.ndarray, theta: np.ndarray) -> np.ndarray:
        self.tau_res = self.lp.update(
            tau_dis - self.d_n * omega - self.nominal_gravity(theta))
        return self.tau_res


class JointObservers:
    """DOB + RFOB pair for one robot, updated once per control step."""

    def __init__(self, gains: ControllerGains, dt: float):
        self.dob = DisturbanceObserver(gains, dt)
        self.rfob = ReactionForceObserver(gains, dt)

    def reset(self) -> None:
        self.dob.reset()
        self.rfob.reset()

    def update(self, tau_ref_prev: np.ndarray, omega: np.ndarray,
               theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        tau_dis = self.dob.update(tau_ref_prev, omega)
        tau_res = self.rfob.update(tau_dis, omega, theta)
        return tau_dis, tau_res

    @property
    def tau_dis(self) -> np.ndarray:
        return self.dob.tau_dis

    @property
    def tau_res(self) -> np.ndarray:
        return self.rfob.tau_res


def bilateral_torque_refs(gains: ControllerGains, e: np.ndarray, e_dot: np.ndarray,
                          tau_res_l: np.ndarray, tau_res_f: np.ndarray,
                          tau_dis_l: np.ndarray, tau_dis_f: np.ndarray):
    """4-channel bilateral law for one control step.

    Position channel: a PD spring on the angle difference e = theta_l -
    theta_f pulls the arms together (opposite signs on the two sides).
    Force channel: the same -Kf*(tau_res_l + tau_res_f) on both sides
    drives the reaction sum to zero (action-reaction).  Each side adds its
    own disturbance estimate for nominal-acceleration behavior.
    """
    j = np.asarray(gains.j_n, dtype=float)
    position = j * (gains.kp * e + gains.kd * e_dot)
    force = -gains.kf * (tau_res_l + tau_res_f)
    tau_ref_l = -position + force + tau_dis_l
    tau_ref_f = position + force + tau_dis_f
    return tau_ref_l, tau_ref_f


class BilateralController:
    """Stateful wrapper: owns the error pseudo-derivative filter."""

    def __init__(self, gains: ControllerGains, dt: float):
        self.gains = gains
        self.e_filter = PseudoDerivative(gains.g_pd, dt)

    def reset(self) -> None:
        self.e_filter.reset()

    def step(self, theta_l, theta_f, tau_res_l, tau_res_f, tau_dis_l, tau_dis_f):
        e = np.asarray(theta_l, dtype=float) - np.asarray(theta_f, dtype=float)
        e_dot = self.e_filter.update(e)
        return bilateral_torque_refs(self.gains, e, e_dot,
                                     tau_res_l, tau_res_f, tau_dis_l, tau_dis_f)
