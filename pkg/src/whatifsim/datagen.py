"""Synthetic dataset generation: random settled scenes, sampled actions,
grammar-generated action descriptions, and simulation-derived ground truth.

Everything is a pure function of the master seed. Per-example seeds are
derived arithmetically so batches can be generated independently.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .core.catalog import (
    LYING_CLASSES,
    ObjectClass,
    short_name,
    target_names,
)
from .core.serialize import decode_example, dumps, encode_example, loads
from .core.types import (
    Action,
    ActionKind,
    Example,
    Pose,
    RotateSense,
    Scene,
    SceneObject,
    shape_for,
)
from .core.validate import validate_scene
from .describer import describe_all
from .effects import truth_affected
from .parsing.rules import COMPASS_ANGLES, DIRECTION_WORDS, parse_rules
from .physics.engine import (
    DEFAULT_PARAMS,
    EngineParams,
    pair_penetration,
    settle,
    simulate,
)

#: Objects are placed over this half-width around the table center (the table
#: half extents are 0.5); keeping them off the rim reduces immediate
#: fall-offs while leaving room to slide.
PLACEMENT_HALF = 0.28

#: After the first object, each object is placed next to an already placed one
#: with this probability (uniformly elsewhere otherwise), giving the close,
#: interaction-prone configurations the task is about.
CLUSTER_PROB = 0.85
#: Clustered center distance as a fraction of the footprint-circle sum.
#: Below 1.0 the circles overlap; the rejection loop still forbids real
#: shape overlap, so neighbors end up as close as their yaws allow.
CLUSTER_DIST = (0.65, 1.0)

EXAMPLES_PER_KIND = 17
KINDS_IN_ORDER = (ActionKind.PUSH, ActionKind.ROTATE, ActionKind.REMOVE, ActionKind.DROP)
BATCH_SIZE = EXAMPLES_PER_KIND * len(KINDS_IN_ORDER)
TEST_BATCHES = 3


class PlacementError(RuntimeError):
    pass


def _footprint_radius(cls: ObjectClass) -> float:
    """Horizontal reach of the object in its rest orientation."""
    shape = shape_for(cls)
    if cls in LYING_CLASSES:
        return shape.dims[1] / 2.0  # lying cylinder: half its length
    if shape.kind == "box":
        return math.hypot(shape.dims[0], shape.dims[1])
    return shape.dims[0]


def _rest_pose(cls: ObjectClass, x: float, y: float, yaw: float) -> Pose:
    """Canonical rest orientation: lying classes are rotated onto their side
    (body z-axis horizontal) before the yaw is applied."""
    shape = shape_for(cls)
    cy, sy = math.cos(yaw), math.sin(yaw)
    if cls in LYING_CLASSES:
        height = shape.dims[0]  # radius of a lying cylinder
        # yaw about world z composed with a 90 degree lie-down about y
        r = (0.0, -sy, cy, 0.0, cy, sy, -1.0, 0.0, 0.0)
    else:
        height = shape.half_height()
        r = (cy, -sy, 0.0, sy, cy, 0.0, 0.0, 0.0, 1.0)
    return Pose((x, y, height + 0.001), r)


def sample_scene(seed: int, params: EngineParams = DEFAULT_PARAMS) -> Scene:
    """Five distinct classes placed uniformly (positions and yaw) without
    overlap, then settled. Deterministic in the seed."""
    rng = np.random.default_rng(seed)
    classes = [list(ObjectClass)[i] for i in rng.choice(8, size=5, replace=False)]
    rejections = 0
    objects: list[SceneObject] = []
    for cls in classes:
        shape = shape_for(cls)
        while True:
            if objects and rng.uniform() < CLUSTER_PROB:
                anchor = objects[int(rng.integers(len(objects)))]
                frac = rng.uniform(*CLUSTER_DIST)
                dist = (_footprint_radius(anchor.cls) + _footprint_radius(cls)) * frac
                theta = rng.uniform(-math.pi, math.pi)
                x = anchor.pose.translation[0] + dist * math.cos(theta)
                y = anchor.pose.translation[1] + dist * math.sin(theta)
            else:
                x, y = rng.uniform(-PLACEMENT_HALF, PLACEMENT_HALF, size=2)
            yaw = rng.uniform(-math.pi, math.pi)
            candidate = SceneObject.standard(
                cls, _rest_pose(cls, float(x), float(y), float(yaw))
            )
            in_bounds = abs(x) <= PLACEMENT_HALF and abs(y) <= PLACEMENT_HALF
            if in_bounds and all(
                pair_penetration(candidate, prev) == 0.0 for prev in objects
            ):
                objects.append(candidate)
                break
            rejections += 1
            if rejections > 1000:
                raise PlacementError("cannot place scene: too many overlapping draws")
    scene = Scene(f"scene-{seed}", tuple(objects))
    violations = validate_scene(scene)
    if violations:  # pragma: no cover - placement loop prevents this
        raise PlacementError(f"cannot place scene: {violations}")
    return settle(scene, seed, params)


def sample_action(scene: Scene, kind: ActionKind, seed: int) -> Action:
    """Uniform target; push directions over the eight compass angles; drop
    destination never equals the target."""
    rng = np.random.default_rng(seed)
    target = scene.objects[int(rng.integers(5))].cls
    if kind == ActionKind.PUSH:
        return Action.push(target, COMPASS_ANGLES[int(rng.integers(8))])
    if kind == ActionKind.ROTATE:
        sense = RotateSense.CCW if rng.integers(2) else RotateSense.CW
        return Action.rotate(target, sense)
    if kind == ActionKind.REMOVE:
        return Action.remove(target)
    others = [o.cls for o in scene.objects if o.cls != target]
    return Action.drop(target, others[int(rng.integers(len(others)))])


_PUSH_VERBS = ("pushes", "shoves", "rolls")
_ROTATE_VERBS = ("spins", "rotates", "turns")
_REMOVE_VERBS = ("removes", "takes")
_DROP_VERBS = ("drops", "places", "puts")
_SENSE_WORDS = {RotateSense.CW: ("clockwise",), RotateSense.CCW: ("anti-clockwise", "counter-clockwise")}


def _object_surface(cls: ObjectClass, rng: np.random.Generator) -> str:
    """Acted objects get fuller names ("the screw driver", "the cheese box");
    the short form is reserved for passive references ("on the foam")."""
    options = target_names(cls)
    return options[int(rng.integers(len(options)))]


def _direction_surface(angle: float, rng: np.random.Generator) -> str:
    bucket = int(round(angle / (math.pi / 4))) % 8
    words = DIRECTION_WORDS[bucket]
    return words[int(rng.integers(len(words)))]


def gen_action_text(action: Action, seed: int) -> str:
    """One grammatical surface form of the action, sampled from templates with
    synonym variation. Every generated text parses back to the same action
    under the rule grammar."""
    rng = np.random.default_rng(seed)
    obj = _object_surface(action.target, rng)
    if action.kind == ActionKind.PUSH:
        verb = _PUSH_VERBS[int(rng.integers(len(_PUSH_VERBS)))]
        direction = _direction_surface(action.direction_angle, rng)
        templates = (
            f"the robot {verb} the {obj} to the {direction}",
            f"the robot {verb} the {obj} to the {direction} side of the table",
            f"the robot {verb} the {obj} towards the {direction}",
        )
    elif action.kind == ActionKind.ROTATE:
        verb = _ROTATE_VERBS[int(rng.integers(len(_ROTATE_VERBS)))]
        words = _SENSE_WORDS[action.sense]
        sense = words[int(rng.integers(len(words)))]
        templates = (
            f"the robot {verb} the {obj} in {sense} direction",
            f"the robot {verb} the {obj} {sense}",
            f"the robot {verb} the {obj} in a {sense} motion",
        )
    elif action.kind == ActionKind.REMOVE:
        verb = _REMOVE_VERBS[int(rng.integers(len(_REMOVE_VERBS)))]
        templates = (
            f"the robot {verb} the {obj} from the table",
            f"the robot {verb} the {obj} off the table",
            f"the robot {verb} the {obj} away",
        )
    else:
        verb = _DROP_VERBS[int(rng.integers(len(_DROP_VERBS)))]
        onto = short_name(action.onto)
        templates = (
            f"the robot {verb} the {obj} on the {onto}",
            f"the robot {verb} the {obj} onto the {onto}",
            f"the robot {verb} the {obj} on top of the {onto}",
        )
    return templates[int(rng.integers(len(templates)))]


def _example_seed(master_seed: int, batch_index: int, index: int) -> int:
    return master_seed * 1_000_000 + batch_index * 1_000 + index


def gen_example(
    batch_index: int,
    index: int,
    master_seed: int,
    params: EngineParams = DEFAULT_PARAMS,
) -> Example:
    seed = _example_seed(master_seed, batch_index, index)
    kind = KINDS_IN_ORDER[index // EXAMPLES_PER_KIND]
    scene = sample_scene(seed, params)
    action = sample_action(scene, kind, seed + 1)
    text = gen_action_text(action, seed + 2)
    assert parse_rules(text).action == action, "grammar/rules lexicon drift"
    result = simulate(scene, action, seed, params)
    labels = {
        obj.cls: truth_affected(result.trajectories[obj.cls])
        for obj in scene.objects
        if obj.cls != action.target
    }
    descriptions = describe_all(result, action, scene, affected=labels)
    return Example(scene, action, text, descriptions, labels, batch_index, index)


def gen_batch(
    batch_index: int, seed: int, params: EngineParams = DEFAULT_PARAMS
) -> list[Example]:
    """One batch: EXAMPLES_PER_KIND examples of each of the four kinds."""
    return [gen_example(batch_index, i, seed, params) for i in range(BATCH_SIZE)]


def gen_dataset(
    batches: int, seed: int, params: EngineParams = DEFAULT_PARAMS
) -> list[Example]:
    examples: list[Example] = []
    for b in range(batches):
        examples.extend(gen_batch(b, seed, params))
    return examples


def split(dataset: list[Example]) -> tuple[list[Example], list[Example]]:
    """Last TEST_BATCHES batches are the test set; the rest train."""
    batch_ids = sorted({ex.batch for ex in dataset})
    if len(batch_ids) < 15:
        raise ValueError(f"split needs at least 15 batches, got {len(batch_ids)}")
    test_ids = set(batch_ids[-TEST_BATCHES:])
    train = [ex for ex in dataset if ex.batch not in test_ids]
    test = [ex for ex in dataset if ex.batch in test_ids]
    return train, test


# ------------------------------------------------------------ dataset files

def write_dataset(directory: str | Path, examples: list[Example], seed: int) -> None:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    batches = sorted({ex.batch for ex in examples})
    for ex in examples:
        batch_dir = root / f"batch_{ex.batch:02d}"
        batch_dir.mkdir(exist_ok=True)
        path = batch_dir / f"example_{ex.index:03d}.json"
        path.write_text(dumps(encode_example(ex)), encoding="utf-8")
    manifest = {
        "seed": seed,
        "batches": len(batches),
        "examples": len(examples),
        "examples_per_kind_per_batch": EXAMPLES_PER_KIND,
        "batch_size": BATCH_SIZE,
        "descriptions": sum(len(ex.gt_descriptions) for ex in examples),
    }
    (root / "manifest.json").write_text(dumps(manifest), encoding="utf-8")


def load_dataset(directory: str | Path) -> list[Example]:
    root = Path(directory)
    examples = []
    for path in sorted(root.glob("batch_*/example_*.json")):
        examples.append(decode_example(loads(path.read_text(encoding="utf-8"))))
    examples.sort(key=lambda ex: (ex.batch, ex.index))
    return examples


def load_manifest(directory: str | Path) -> dict:
    return loads((Path(directory) / "manifest.json").read_text(encoding="utf-8"))
