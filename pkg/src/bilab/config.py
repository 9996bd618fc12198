"""Workbench configuration: embedded defaults plus INI-file overrides.

Every numeric default lives here so experiments are reproducible from a
single place.  A config file (simple INI, see ``docs/config.example.ini``)
overrides individual keys; anything not mentioned keeps its default.
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

ENV_CONFIG_VAR = "BILAB_CONFIG"

N_JOINTS = 5
GRIPPER_JOINT = 4  # index of joint 5, the gripper


class ConfigError(ValueError):
    """Raised when a configuration value violates its invariants."""


@dataclass(frozen=True)
class SimTiming:
    physics_dt: float = 0.001   # 1 kHz plant integration
    control_dt: float = 0.01    # 100 Hz control / inference cycle
    gravity: float = 9.81       # g0 [m/s^2]

    @property
    def substeps(self) -> int:
        return round(self.control_dt / self.physics_dt)

    def validate(self) -> None:
        n = self.control_dt / self.physics_dt
        if abs(n - round(n)) > 1e-9 or round(n) < 1:
            raise ConfigError(
                f"physics_dt {self.physics_dt} must divide control_dt {self.control_dt} exactly")


@dataclass(frozen=True)
class ArmParams:
    """Per-joint decoupled plant parameters (joints 1-4 arm, joint 5 gripper)."""

    inertia: tuple = (0.01,) * N_JOINTS          # J_j [kg m^2]
    viscous: tuple = (0.05,) * N_JOINTS          # D_j [N m s/rad]
    gravity_coeff: tuple = (0.0, 0.12, 0.06, 0.0, 0.0)  # A_j: tau_g = A_j cos(theta_j)
    theta_min: tuple = (-math.pi / 2,) * 4 + (0.0,)
    theta_max: tuple = (math.pi / 2,) * 4 + (0.6,)

    def validate(self) -> None:
        for name in ("inertia", "viscous", "gravity_coeff", "theta_min", "theta_max"):
            vals = getattr(self, name)
            if len(vals) != N_JOINTS:
                raise ConfigError(f"arm.{name} needs exactly {N_JOINTS} entries")
        if any(j <= 0 for j in self.inertia):
            raise ConfigError("arm inertia must be strictly positive")
        if any(d < 0 for d in self.viscous):
            raise ConfigError("arm viscous friction must be nonnegative")
        if any(lo >= hi for lo, hi in zip(self.theta_min, self.theta_max)):
            raise ConfigError("arm joint limits must satisfy theta_min < theta_max")


@dataclass(frozen=True)
class ControllerGains:
    """Per-axis position/force controller gains shared by both robots."""

    j_n: tuple = (0.01,) * N_JOINTS   # nominal inertia [kg m^2]
    kp: float = 100.0                 # position gain [1/s^2]
    kd: float = 20.0                  # velocity gain [1/s]
    kf: float = 1.0                   # force gain [-]
    g_dob: float = 50.0               # DOB low-pass cutoff [rad/s]
    g_pd: float = 100.0               # pseudo-derivative cutoff [rad/s]
    # nominal friction/gravity models used by the RFOB (default: match plant)
    d_n: tuple = (0.05,) * N_JOINTS
    gravity_n: tuple = (0.0, 0.12, 0.06, 0.0, 0.0)

    def validate(self, control_dt: float) -> None:
        if len(self.j_n) != N_JOINTS or len(self.d_n) != N_JOINTS or len(self.gravity_n) != N_JOINTS:
            raise ConfigError(f"gain vectors need exactly {N_JOINTS} entries")
        for name in ("kp", "kd", "kf", "g_dob", "g_pd"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"gains.{name} must be strictly positive")
        if any(j <= 0 for j in self.j_n):
            raise ConfigError("nominal inertia must be strictly positive")
        nyquist = math.pi / control_dt
        if self.g_dob > nyquist:
            raise ConfigError(f"g_dob {self.g_dob} exceeds pi/dt = {nyquist:.1f} rad/s")
        if self.g_pd > 2.0 / control_dt:
            # forward-Euler low-pass becomes unstable past 2/dt
            raise ConfigError(f"g_pd {self.g_pd} unstable at control_dt {control_dt}")


@dataclass(frozen=True)
class GripperMap:
    """Linear map from gripper joint angle to finger aperture."""

    open_aperture: float = 0.09     # [m] at theta5 = 0
    aperture_per_rad: float = 0.1   # [m/rad], aperture shrinks as theta5 grows

    def aperture(self, theta5: float) -> float:
        return self.open_aperture - self.aperture_per_rad * theta5


@dataclass(frozen=True)
class ObjectSpec:
    """Size/stiffness/weight description of one manipulable object."""

    name: str
    radius: float          # [m]
    stiffness: float       # contact spring constant [N/m]
    damping: float         # contact damping [N s/m]
    weight: float          # mass [kg]
    crush_force: float     # max tolerable grip normal force [N]
    friction_coeff: float  # dimensionless grip friction

    def validate(self) -> None:
        if self.stiffness <= 0:
            raise ConfigError(f"object {self.name}: stiffness must be > 0")
        if self.weight <= 0:
            raise ConfigError(f"object {self.name}: weight must be > 0")
        if self.crush_force <= 0:
            raise ConfigError(f"object {self.name}: crush_force must be > 0")
        if not 0 < self.friction_coeff <= 2:
            raise ConfigError(f"object {self.name}: friction_coeff must be in (0, 2]")
        if self.radius <= 0 or self.damping < 0:
            raise ConfigError(f"object {self.name}: bad radius/damping")


# Object library.  Weights follow the five test objects (69/21/14/29/25 g);
# stiffness maps the qualitative hardness levels onto N/m, crush_force and
# friction_coeff are experiment configuration.
DEFAULT_OBJECTS = {
    # stiffness is the EFFECTIVE squeeze stiffness seen by the gripper: the
    # object in series with the compliant finger pads, so even a firm ball
    # yields a few millimetres under grasp forces.  A stiff contact here
    # turns the 100 Hz grip force loop into a marginally stable oscillator.
    "tennis": ObjectSpec("tennis", radius=0.033, stiffness=2400.0, damping=8.0,
                         weight=0.069, crush_force=60.0, friction_coeff=0.8),
    "soccer": ObjectSpec("soccer", radius=0.034, stiffness=1500.0, damping=5.0,
                         weight=0.021, crush_force=25.0, friction_coeff=0.9),
    "tomato": ObjectSpec("tomato", radius=0.025, stiffness=2600.0, damping=10.0,
                         weight=0.014, crush_force=3.0, friction_coeff=0.6),
    "soft_tennis": ObjectSpec("soft_tennis", radius=0.033, stiffness=1000.0, damping=4.0,
                              weight=0.029, crush_force=15.0, friction_coeff=0.9),
    "basketball": ObjectSpec("basketball", radius=0.0375, stiffness=1700.0, damping=6.0,
                             weight=0.025, crush_force=40.0, friction_coeff=0.7),
}


@dataclass(frozen=True)
class TaskLayout:
    """Pick/place geometry on the table plane (z = 0)."""

    pick_center: tuple = (0.14283, -0.14)   # (x, y) [m]
    place_center: tuple = (0.14283, 0.14)   # (x, y) [m]
    place_radius: float = 0.035             # [m] (0.07 m diameter disc)
    lift_threshold: float = 0.02            # object bottom height for a pick [m]

    @property
    def pick_place_distance(self) -> float:
        dx = self.pick_center[0] - self.place_center[0]
        dy = self.pick_center[1] - self.place_center[1]
        return math.hypot(dx, dy)

    def validate(self) -> None:
        if self.place_radius <= 0 or self.lift_threshold <= 0:
            raise ConfigError("task layout radii must be positive")


@dataclass(frozen=True)
class KinematicsParams:
    """2-link lever-arm map of joints 2-3 used for task scoring."""

    link1: float = 0.13       # [m]
    link2: float = 0.13       # [m]
    shoulder_height: float = 0.12  # [m] above the table
    work_radius: float = 0.2  # horizontal reach used by the scripted task [m]


@dataclass(frozen=True)
class CollectionConfig:
    """Scripted-expert demonstration settings (stands in for the human operator)."""

    servo_kp: float = 2.0      # leader hand-servo stiffness [N m/rad]
    servo_kd: float = 0.2      # leader hand-servo damping [N m s/rad]
    position_jitter: float = 0.005  # waypoint jitter [m]
    timing_jitter: float = 0.10     # relative segment-duration jitter
    spawn_jitter: float = 0.005     # object spawn jitter [m]
    timeout_s: float = 20.0
    carry_height: float = 0.15      # end-effector z while traversing [m]
    place_drop_height: float = 0.004  # object bottom height at release [m]
    grip_force_floor: float = 1.2     # minimum commanded grip force [N]
    grip_force_hold_factor: float = 2.5   # times m*g/mu
    grip_force_crush_margin: float = 0.45  # times crush_force, upper cap


@dataclass(frozen=True)
class EvalConfig:
    trials_per_cell: int = 10
    base_seed: int = 7000
    trained_objects: tuple = ("tennis", "soccer")
    timeout_s: float = 20.0


@dataclass
class WorkbenchConfig:
    timing: SimTiming = field(default_factory=SimTiming)
    arm: ArmParams = field(default_factory=ArmParams)
    gains: ControllerGains = field(default_factory=ControllerGains)
    gripper: GripperMap = field(default_factory=GripperMap)
    kinematics: KinematicsParams = field(default_factory=KinematicsParams)
    layout: TaskLayout = field(default_factory=TaskLayout)
    collect: CollectionConfig = field(default_factory=CollectionConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    objects: dict = field(default_factory=lambda: dict(DEFAULT_OBJECTS))

    def validate(self) -> "WorkbenchConfig":
        self.timing.validate()
        self.arm.validate()
        self.gains.validate(self.timing.control_dt)
        self.layout.validate()
        for spec in self.objects.values():
            spec.validate()
        return self

    def object(self, name: str) -> ObjectSpec:
        try:
            return self.objects[name]
        except KeyError:
            raise ConfigError(f"unknown object {name!r}; have {sorted(self.objects)}") from None


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _override(obj, section: configparser.SectionProxy, casts: dict):
    updates = {}
    for key, raw in section.items():
        if key not in casts:
            raise ConfigError(f"unknown config key {key!r} in [{section.name}]")
        updates[key] = casts[key](raw)
    return replace(obj, **updates) if updates else obj


def load_config(path: str | None = None) -> WorkbenchConfig:
    """Build the workbench config from defaults, then apply INI overrides.

    ``path=None`` falls back to the ``BILAB_CONFIG`` environment variable;
    if that is unset too, pure defaults are returned.
    """
    cfg = WorkbenchConfig()
    if path is None:
        path = os.environ.get(ENV_CONFIG_VAR)
    if path is None:
        return cfg.validate()
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")

    parser = configparser.ConfigParser()
    parser.read(path)
    f, i, s = float, int, str
    for name in parser.sections():
        sec = parser[name]
        if name == "sim":
            cfg.timing = _override(cfg.timing, sec, dict(physics_dt=f, control_dt=f, gravity=f))
        elif name == "arm":
            cfg.arm = _override(cfg.arm, sec, dict(
                inertia=_floats, viscous=_floats, gravity_coeff=_floats,
                theta_min=_floats, theta_max=_floats))
        elif name == "gains":
            cfg.gains = _override(cfg.gains, sec, dict(
                j_n=_floats, kp=f, kd=f, kf=f, g_dob=f, g_pd=f,
                d_n=_floats, gravity_n=_floats))
        elif name == "gripper":
            cfg.gripper = _override(cfg.gripper, sec, dict(open_aperture=f, aperture_per_rad=f))
        elif name == "kinematics":
            cfg.kinematics = _override(cfg.kinematics, sec, dict(
                link1=f, link2=f, shoulder_height=f, work_radius=f))
        elif name == "task":
            cfg.layout = _override(cfg.layout, sec, dict(
                pick_center=_floats, place_center=_floats, place_radius=f, lift_threshold=f))
        elif name == "collect":
            cfg.collect = _override(cfg.collect, sec, dict(
                servo_kp=f, servo_kd=f, position_jitter=f, timing_jitter=f, spawn_jitter=f,
                timeout_s=f, carry_height=f, place_drop_height=f, grip_force_floor=f,
                grip_force_hold_factor=f, grip_force_crush_margin=f))
        elif name == "eval":
            cfg.eval = _override(cfg.eval, sec, dict(
                trials_per_cell=i, base_seed=i, timeout_s=f,
                trained_objects=lambda t: tuple(x.strip() for x in t.split(","))))
        elif name.startswith("object."):
            obj_name = name.split(".", 1)[1]
            base = cfg.objects.get(obj_name, ObjectSpec(obj_name, 0.03, 1000.0, 5.0, 0.05, 10.0, 0.8))
            cfg.objects[obj_name] = _override(base, sec, dict(
                name=s, radius=f, stiffness=f, damping=f, weight=f,
                crush_force=f, friction_coeff=f))
        else:
            raise ConfigError(f"unknown config section [{name}]")
    return cfg.validate()


def as_gain_dict(gains: ControllerGains) -> dict:
    """Flat dict snapshot of the gains for episode metadata."""
    return {
        "j_n": list(gains.j_n), "kp": gains.kp, "kd": gains.kd, "kf": gains.kf,
        "g_dob": gains.g_dob, "g_pd": gains.g_pd,
        "d_n": list(gains.d_n), "gravity_n": list(gains.gravity_n),
    }


def arm_arrays(arm: ArmParams) -> dict:
    """Arm parameters as float64 arrays for the integrator."""
    return {k: np.asarray(getattr(arm, k), dtype=float)
            for k in ("inertia", "viscous", "gravity_coeff", "theta_min", "theta_max")}
