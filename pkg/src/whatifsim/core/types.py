"""Domain types shared by every module: poses, scenes, actions, trajectories.

All types are immutable values and safe to share between threads. Rotations
are stored row-major as 9 floats; helpers convert to/from numpy matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .catalog import (
    MASS_TABLE,
    SHAPE_TABLE,
    TABLE_HALF_EXTENTS,
    ObjectClass,
)

#: Sampling rate of every trajectory, in Hz.
TRAJECTORY_RATE_HZ = 300
#: Simulated duration after the action is applied, in seconds.
SIMULATION_SECONDS = 5.0
#: Sample count of a full (non-removed) trajectory.
TRAJECTORY_SAMPLES = int(SIMULATION_SECONDS * TRAJECTORY_RATE_HZ)

#: Max elementwise deviation of R^T R from the identity for a valid rotation.
ROTATION_TOL = 1e-6

IDENTITY_ROTATION = (1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)


class DegeneratePushDirection(ValueError):
    """Raised when a push direction vector is the zero vector."""


def angle_from_xy(x: float, y: float) -> float:
    """Convert a planar direction vector into an angle in (-pi, pi].

    The magnitude of (x, y) carries no information; only the direction is kept.
    """
    if x == 0.0 and y == 0.0:
        raise DegeneratePushDirection("degenerate push direction: (0, 0) has no angle")
    return math.atan2(y, x)


def rotation_orthonormality_error(r: tuple[float, ...]) -> float:
    """Max |(R^T R - I)_ij| for a row-major 9-tuple rotation."""
    m = np.asarray(r, dtype=np.float64).reshape(3, 3)
    return float(np.abs(m.T @ m - np.eye(3)).max())


def yaw_rotation(angle: float) -> tuple[float, ...]:
    """Row-major rotation matrix for a yaw (about +z) by `angle` radians."""
    c, s = math.cos(angle), math.sin(angle)
    return (c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True, slots=True)
class Pose:
    """Rigid pose: translation in meters plus a row-major 3x3 rotation."""

    translation: tuple[float, float, float]
    rotation: tuple[float, ...] = IDENTITY_ROTATION

    def matrix(self) -> np.ndarray:
        return np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)

    @staticmethod
    def from_arrays(translation: np.ndarray, rotation: np.ndarray) -> "Pose":
        t = tuple(float(v) for v in np.asarray(translation).reshape(3))
        r = tuple(float(v) for v in np.asarray(rotation).reshape(9))
        return Pose(t, r)


@dataclass(frozen=True, slots=True)
class Shape:
    """Primitive collision shape.

    kind "box": dims = half extents (hx, hy, hz)
    kind "sphere": dims = (radius,)
    kind "cylinder": dims = (radius, height), axis along local z
    """

    kind: str
    dims: tuple[float, ...]

    def __post_init__(self) -> None:
        expected = {"box": 3, "sphere": 1, "cylinder": 2}
        if self.kind not in expected:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if len(self.dims) != expected[self.kind]:
            raise ValueError(f"shape {self.kind!r} takes {expected[self.kind]} dims")

    def half_height(self) -> float:
        """Distance from center to the lowest point in canonical orientation."""
        if self.kind == "box":
            return self.dims[2]
        if self.kind == "sphere":
            return self.dims[0]
        return self.dims[1] / 2.0

    def bounding_radius(self) -> float:
        if self.kind == "box":
            return math.sqrt(sum(d * d for d in self.dims))
        if self.kind == "sphere":
            return self.dims[0]
        r, h = self.dims
        return math.sqrt(r * r + (h / 2.0) ** 2)


def shape_for(cls: ObjectClass) -> Shape:
    kind, dims = SHAPE_TABLE[cls]
    return Shape(kind, dims)


def mass_for(cls: ObjectClass) -> float:
    return MASS_TABLE[cls]


@dataclass(frozen=True, slots=True)
class SceneObject:
    cls: ObjectClass
    shape: Shape
    mass: float
    pose: Pose

    @staticmethod
    def standard(cls: ObjectClass, pose: Pose) -> "SceneObject":
        """Object with the catalog shape and mass for its class."""
        return SceneObject(cls, shape_for(cls), mass_for(cls), pose)


@dataclass(frozen=True, slots=True)
class Table:
    half_extents: tuple[float, float, float] = TABLE_HALF_EXTENTS


@dataclass(frozen=True, slots=True)
class Scene:
    id: str
    objects: tuple[SceneObject, ...]
    table: Table = field(default_factory=Table)

    def classes(self) -> tuple[ObjectClass, ...]:
        return tuple(o.cls for o in self.objects)

    def object(self, cls: ObjectClass) -> SceneObject:
        for o in self.objects:
            if o.cls == cls:
                return o
        raise KeyError(cls)


class ActionKind(str, Enum):
    PUSH = "push"
    ROTATE = "rotate"
    REMOVE = "remove"
    DROP = "drop"


class RotateSense(str, Enum):
    CW = "cw"
    CCW = "ccw"


@dataclass(frozen=True, slots=True)
class Action:
    """Parsed action: kind plus the parameters relevant to that kind.

    push  -> direction_angle in [-pi, pi]
    rotate -> sense
    drop  -> onto (must differ from target)
    remove -> no parameters
    """

    kind: ActionKind
    target: ObjectClass
    direction_angle: float | None = None
    sense: RotateSense | None = None
    onto: ObjectClass | None = None

    def __post_init__(self) -> None:
        if self.kind == ActionKind.PUSH:
            if self.direction_angle is None:
                raise ValueError("push action requires direction_angle")
            if not -math.pi <= self.direction_angle <= math.pi:
                raise ValueError("direction_angle must lie in [-pi, pi]")
        elif self.kind == ActionKind.ROTATE:
            if self.sense is None:
                raise ValueError("rotate action requires sense")
        elif self.kind == ActionKind.DROP:
            if self.onto is None:
                raise ValueError("drop action requires onto")
            if self.onto == self.target:
                raise ValueError("cannot drop an object onto itself")

    @staticmethod
    def push(target: ObjectClass, direction_angle: float) -> "Action":
        return Action(ActionKind.PUSH, target, direction_angle=direction_angle)

    @staticmethod
    def rotate(target: ObjectClass, sense: RotateSense) -> "Action":
        return Action(ActionKind.ROTATE, target, sense=sense)

    @staticmethod
    def remove(target: ObjectClass) -> "Action":
        return Action(ActionKind.REMOVE, target)

    @staticmethod
    def drop(target: ObjectClass, onto: ObjectClass) -> "Action":
        return Action(ActionKind.DROP, target, onto=onto)


@dataclass(frozen=True, slots=True)
class TrajectorySample:
    t: float
    pose: Pose


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Pose time series for one object at TRAJECTORY_RATE_HZ.

    A removed object's trajectory has removed=True and no samples. Arrays are
    read-only: times (T,), translations (T, 3), rotations (T, 3, 3).
    """

    cls: ObjectClass
    removed: bool
    times: np.ndarray
    translations: np.ndarray
    rotations: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.times, self.translations, self.rotations):
            arr.flags.writeable = False

    def __len__(self) -> int:
        return int(self.times.shape[0])

    def sample(self, i: int) -> TrajectorySample:
        return TrajectorySample(
            float(self.times[i]),
            Pose.from_arrays(self.translations[i], self.rotations[i]),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.cls == other.cls
            and self.removed == other.removed
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.translations, other.translations)
            and np.array_equal(self.rotations, other.rotations)
        )

    @staticmethod
    def removed_for(cls: ObjectClass) -> "Trajectory":
        empty = np.zeros((0,), dtype=np.float64)
        return Trajectory(
            cls,
            True,
            empty,
            np.zeros((0, 3), dtype=np.float64),
            np.zeros((0, 3, 3), dtype=np.float64),
        )


@dataclass(frozen=True, slots=True)
class Example:
    """One dataset entry: a scene, an action with its text surface form, and
    the simulation-derived ground truth for the four non-target objects."""

    scene: Scene
    action: Action
    action_text: str
    gt_descriptions: dict[ObjectClass, str]
    affected_labels: dict[ObjectClass, bool]
    batch: int
    index: int
