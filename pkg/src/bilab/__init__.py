"""Bilateral teleoperation workbench: two simulated 5-joint arms under
4-channel position/force coupling, demonstration recording, and sequence
models that imitate the leader side from follower observations."""

__version__ = "0.1.0"

from .config import (
    DEFAULT_OBJECTS,
    ArmParams,
    CollectionConfig,
    ConfigError,
    ControllerGains,
    EvalConfig,
    GripperMap,
    KinematicsParams,
    ObjectSpec,
    SimTiming,
    TaskLayout,
    WorkbenchConfig,
    load_config,
)
