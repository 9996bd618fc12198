"""Pick / move / place task scoring.

Stage flags form an implication chain (place => move => pick) maintained by
construction; Dropped and Crushed are terminal failures.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ..config import TaskLayout


class TaskStage(enum.Enum):
    PRE_PICK = "pre_pick"
    GRASPED = "grasped"
    MOVING = "moving"
    PLACED = "placed"
    DROPPED = "dropped"
    CRUSHED = "crushed"


TERMINAL_STAGES = frozenset({TaskStage.PLACED, TaskStage.DROPPED, TaskStage.CRUSHED})

# object bottom heights [m] above which a free-falling object counts as airborne
AIRBORNE_EPS = 0.002


@dataclass(frozen=True)
class TaskStatus:
    stage: TaskStage = TaskStage.PRE_PICK
    pick_succeeded: bool = False
    move_succeeded: bool = False
    place_succeeded: bool = False

    @property
    def terminal(self) -> bool:
        return self.stage in TERMINAL_STAGES

    def check_chain(self) -> bool:
        ok = True
        if self.place_succeeded:
            ok = ok and self.move_succeeded
        if self.move_succeeded:
            ok = ok and self.pick_succeeded
        return ok

    def as_dict(self) -> dict:
        return {"stage": self.stage.value, "pick": self.pick_succeeded,
                "move": self.move_succeeded, "place": self.place_succeeded}


def status_from_dict(d: dict) -> TaskStatus:
    return TaskStatus(TaskStage(d["stage"]), bool(d["pick"]), bool(d["move"]), bool(d["place"]))


def in_place_disc(obj_xy, layout: TaskLayout) -> bool:
    dx = obj_xy[0] - layout.place_center[0]
    dy = obj_xy[1] - layout.place_center[1]
    return math.hypot(dx, dy) <= layout.place_radius


def evaluate_task_status(prev: TaskStatus, *, held: bool, crushed: bool,
                         obj_pos, obj_resting: bool, obj_radius: float,
                         layout: TaskLayout, was_held: bool) -> TaskStatus:
    """Advance the task status by one simulation step.

    Terminal statuses are returned unchanged.  ``was_held`` is the held flag
    of the previous step, needed to detect the drop transition.
    """
    if prev.terminal:
        return prev
    if crushed:
        return TaskStatus(TaskStage.CRUSHED, prev.pick_succeeded,
                          prev.move_succeeded, False)

    pick = prev.pick_succeeded
    move = prev.move_succeeded
    bottom = obj_pos[2] - obj_radius
    inside = in_place_disc(obj_pos, layout)

    if held and bottom > layout.lift_threshold:
        pick = True
    if pick and inside:
        move = True

    if was_held and not held and bottom > AIRBORNE_EPS and not inside:
        return TaskStatus(TaskStage.DROPPED, pick, move, False)

    if move and not held and obj_resting and inside:
        return TaskStatus(TaskStage.PLACED, pick, move, True)

    if move:
        stage = TaskStage.MOVING
    elif pick:
        stage = TaskStage.GRASPED
    else:
        stage = TaskStage.PRE_PICK
    return TaskStatus(stage, pick, move, False)
