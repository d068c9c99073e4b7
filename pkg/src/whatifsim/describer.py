"""Per-object outcome descriptions: pairwise trajectory differencing, cause
attribution from the contact log, and template realization.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core.catalog import ObjectClass, display_name
from .core.types import Action, ActionKind, Scene, Trajectory
from .effects import (
    PoseStats,
    Thresholds,
    first_motion_time,
    is_affected,
    max_displacement,
    summarize,
)
from .physics.engine import SimulationResult

#: Below this peak displacement an affected object is only "pushed a little".
SLIGHT_DISPLACEMENT = 0.03


class EventKind(str, Enum):
    NOTHING = "nothing"
    PUSHED_BY = "pushed_by"
    HIT_BY_DROPPED = "hit_by_dropped"
    FALLS_OFF_TABLE = "falls_off_table"
    MOVED = "moved"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    subject: ObjectClass
    agent: ObjectClass | None = None
    magnitude: str | None = None  # "slight" | "normal" for motion events

    def __post_init__(self) -> None:
        if self.kind in (EventKind.PUSHED_BY, EventKind.HIT_BY_DROPPED):
            if self.agent is None:
                raise ValueError(f"{self.kind.value} event requires an agent")
        elif self.agent is not None:
            raise ValueError(f"{self.kind.value} event carries no agent")


@dataclass(frozen=True)
class DiffSeries:
    subject: ObjectClass
    other: ObjectClass
    deltas: np.ndarray  # (T, 12)


def diff_trajectories(subject: Trajectory, other: Trajectory) -> DiffSeries:
    """Elementwise pose difference (subject minus other) per timestep, over
    the shorter of the two trajectories."""
    if subject.removed or other.removed:
        raise ValueError("removed object has no trajectory")
    n = min(len(subject), len(other))
    dt = subject.translations[:n] - other.translations[:n]
    dr = subject.rotations[:n].reshape(n, 9) - other.rotations[:n].reshape(n, 9)
    return DiffSeries(subject.cls, other.cls, np.concatenate([dt, dr], axis=1))


def _decide_affected(
    traj: Trajectory,
    stats: PoseStats | None,
    thresholds: Thresholds | None,
    override: bool | None,
) -> bool:
    if override is not None:
        return override
    if stats is None or thresholds is None:
        raise ValueError("affected decision needs fitted stats and thresholds")
    return is_affected(summarize(traj, stats), thresholds)


def extract_event(
    subject: ObjectClass,
    result: SimulationResult,
    action: Action,
    scene: Scene,
    stats: PoseStats | None = None,
    thresholds: Thresholds | None = None,
    affected: bool | None = None,
) -> Event:
    """Classify what happened to one non-target object.

    Unaffected objects map to NOTHING. Otherwise: objects ending beyond the
    table edge and below its top fall off; objects whose earliest relevant
    contact names another object are pushed by it (or hit by the dropped
    target); motion with no attributable contact is a generic shake.
    """
    if subject == action.target:
        raise ValueError("subject is the acted object")
    traj = result.trajectories[subject]
    if not _decide_affected(traj, stats, thresholds, affected):
        return Event(EventKind.NOTHING, subject)

    hx, hy, _ = scene.table.half_extents
    fx, fy, fz = traj.translations[-1]
    if (abs(fx) > hx or abs(fy) > hy) and fz < 0.0:
        return Event(EventKind.FALLS_OFF_TABLE, subject)

    magnitude = "slight" if max_displacement(traj) < SLIGHT_DISPLACEMENT else "normal"
    cutoff = first_motion_time(traj)
    agent: ObjectClass | None = None
    for ev in result.contacts:
        if ev.t > cutoff:
            break
        if ev.a == subject and isinstance(ev.b, ObjectClass):
            agent = ev.b
        elif ev.b == subject and isinstance(ev.a, ObjectClass):
            agent = ev.a
        else:
            continue
        break
    if agent is None:
        return Event(EventKind.MOVED, subject, magnitude=magnitude)
    if action.kind == ActionKind.DROP and agent == action.target:
        return Event(EventKind.HIT_BY_DROPPED, subject, agent=agent, magnitude=magnitude)
    return Event(EventKind.PUSHED_BY, subject, agent=agent, magnitude=magnitude)


def realize(event: Event) -> str:
    """One sentence per event, over the fixed template set."""
    name = display_name(event.subject)
    if event.kind == EventKind.NOTHING:
        return "nothing"
    if event.kind == EventKind.FALLS_OFF_TABLE:
        return f"the {name} falls off the table"
    if event.kind == EventKind.MOVED:
        return f"the {name} shakes a little from the impact"
    assert event.agent is not None
    agent = display_name(event.agent)
    if event.kind == EventKind.PUSHED_BY and event.magnitude == "slight":
        return f"the {name} is pushed a little by the {agent}"
    return f"the {name} is pushed by the {agent}"


def extract_events(
    result: SimulationResult,
    action: Action,
    scene: Scene,
    stats: PoseStats | None = None,
    thresholds: Thresholds | None = None,
    affected: dict[ObjectClass, bool] | None = None,
) -> dict[ObjectClass, Event]:
    """One event per non-target object, in scene order."""
    events: dict[ObjectClass, Event] = {}
    for obj in scene.objects:
        if obj.cls == action.target:
            continue
        events[obj.cls] = extract_event(
            obj.cls,
            result,
            action,
            scene,
            stats,
            thresholds,
            affected.get(obj.cls) if affected is not None else None,
        )
    return events


def describe_all(
    result: SimulationResult,
    action: Action,
    scene: Scene,
    stats: PoseStats | None = None,
    thresholds: Thresholds | None = None,
    affected: dict[ObjectClass, bool] | None = None,
) -> dict[ObjectClass, str]:
    """One description per non-target object; the acted object is excluded."""
    return {
        cls: realize(event)
        for cls, event in extract_events(
            result, action, scene, stats, thresholds, affected
        ).items()
    }
