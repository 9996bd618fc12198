from .arm import ArmPlant, ArmState, JointState, SimFault, kinetic_energy, make_arm_state, step_dynamics
from .contact import ContactResult, GripContactModel
from .task import (
    AIRBORNE_EPS,
    TERMINAL_STAGES,
    TaskStage,
    TaskStatus,
    evaluate_task_status,
    in_place_disc,
    status_from_dict,
)
from .world import ObjectState, World

__all__ = [
    "AIRBORNE_EPS", "ArmPlant", "ArmState", "JointState", "SimFault",
    "kinetic_energy", "make_arm_state", "step_dynamics", "ContactResult",
    "GripContactModel", "TERMINAL_STAGES", "TaskStage", "TaskStatus",
    "evaluate_task_status", "in_place_disc", "status_from_dict",
    "ObjectState", "World",
]
