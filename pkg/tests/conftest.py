import math

import pytest

from whatifsim.core import ObjectClass, Pose, Scene, SceneObject, shape_for
from whatifsim.core.types import yaw_rotation
from whatifsim.datagen import _rest_pose
from whatifsim.physics import settle


def standard_object(cls: ObjectClass, x: float, y: float, yaw: float = 0.0, z: float | None = None) -> SceneObject:
    if z is None:
        return SceneObject.standard(cls, _rest_pose(cls, x, y, yaw))
    return SceneObject.standard(cls, Pose((x, y, z), yaw_rotation(yaw)))


def spread_scene(scene_id: str = "spread") -> Scene:
    """Five objects far apart: no object-object contact is possible."""
    return Scene(
        scene_id,
        (
            standard_object(ObjectClass.SOFTBALL, 0.0, 0.0),
            standard_object(ObjectClass.FOAM_BRICK, 0.33, 0.0),
            standard_object(ObjectClass.SCREWDRIVER, -0.33, 0.0, yaw=1.5),
            standard_object(ObjectClass.CHEEZIT_BOX, 0.0, 0.33, yaw=0.4),
            standard_object(ObjectClass.MUSTARD_BOTTLE, 0.0, -0.33),
        ),
    )


def row1_scene() -> Scene:
    """Screwdriver adjacent to the foam brick (not touching), others far away."""
    return Scene(
        "row1",
        (
            standard_object(ObjectClass.FOAM_BRICK, 0.0, 0.0, yaw=0.3),
            standard_object(ObjectClass.SCREWDRIVER, 0.2, 0.1, yaw=1.9),
            standard_object(ObjectClass.SOFTBALL, -0.3, -0.3),
            standard_object(ObjectClass.BANANA, 0.3, -0.3),
            standard_object(ObjectClass.COFFEE_CAN, -0.3, 0.3),
        ),
    )


@pytest.fixture(scope="session")
def settled_spread() -> Scene:
    return settle(spread_scene())


@pytest.fixture(scope="session")
def settled_row1() -> Scene:
    return settle(row1_scene())
