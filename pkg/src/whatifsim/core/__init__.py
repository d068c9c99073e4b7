"""Domain types, the object catalog, validation, and text serialization."""

from .catalog import (
    DISPLAY_NAMES,
    MASS_TABLE,
    SHAPE_TABLE,
    SYNONYMS,
    TABLE_HALF_EXTENTS,
    TABLE_NAME,
    ObjectClass,
    all_surface_forms,
    display_name,
)
from .serialize import (
    SchemaError,
    decode_action,
    decode_example,
    decode_pose,
    decode_scene,
    decode_trajectory,
    dumps,
    encode_action,
    encode_example,
    encode_pose,
    encode_scene,
    encode_trajectory,
    loads,
)
from .types import (
    IDENTITY_ROTATION,
    ROTATION_TOL,
    SIMULATION_SECONDS,
    TRAJECTORY_RATE_HZ,
    TRAJECTORY_SAMPLES,
    Action,
    ActionKind,
    DegeneratePushDirection,
    Example,
    Pose,
    RotateSense,
    Scene,
    SceneObject,
    Shape,
    Table,
    Trajectory,
    TrajectorySample,
    angle_from_xy,
    mass_for,
    rotation_orthonormality_error,
    shape_for,
    yaw_rotation,
)
from .validate import INTERPENETRATION_TOL, validate_scene

__all__ = [
    "Action",
    "ActionKind",
    "DegeneratePushDirection",
    "DISPLAY_NAMES",
    "Example",
    "IDENTITY_ROTATION",
    "INTERPENETRATION_TOL",
    "MASS_TABLE",
    "ObjectClass",
    "Pose",
    "ROTATION_TOL",
    "RotateSense",
    "Scene",
    "SceneObject",
    "SchemaError",
    "Shape",
    "SHAPE_TABLE",
    "SIMULATION_SECONDS",
    "SYNONYMS",
    "Table",
    "TABLE_HALF_EXTENTS",
    "TABLE_NAME",
    "Trajectory",
    "TrajectorySample",
    "TRAJECTORY_RATE_HZ",
    "TRAJECTORY_SAMPLES",
    "all_surface_forms",
    "angle_from_xy",
    "decode_action",
    "decode_example",
    "decode_pose",
    "decode_scene",
    "decode_trajectory",
    "display_name",
    "dumps",
    "encode_action",
    "encode_example",
    "encode_pose",
    "encode_scene",
    "encode_trajectory",
    "loads",
    "mass_for",
    "rotation_orthonormality_error",
    "shape_for",
    "validate_scene",
    "yaw_rotation",
]
