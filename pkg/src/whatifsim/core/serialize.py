"""Text (JSON) serialization for scenes, actions, trajectories and dataset
examples.

decode(encode(v)) == v exactly: floats go through Python's shortest
round-trip repr, so every bit pattern survives. Decode errors name the
offending path ("" is the document root, ".objects[2].pose.r" a leaf).
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .catalog import ObjectClass
from .types import (
    TRAJECTORY_RATE_HZ,
    Action,
    ActionKind,
    Example,
    Pose,
    RotateSense,
    Scene,
    SceneObject,
    Shape,
    Table,
    Trajectory,
)


class SchemaError(ValueError):
    """A document does not conform to the schema; `path` names the problem."""

    def __init__(self, path: str, message: str):
        self.path = path or "."
        super().__init__(f"{self.path}: {message}")


def _get(doc: Any, path: str, key: str) -> Any:
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected an object")
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing field")
    return doc[key]


def _floats(value: Any, path: str, n: int) -> tuple[float, ...]:
    if not isinstance(value, list) or len(value) != n:
        raise SchemaError(path, f"expected a list of {n} numbers")
    out = []
    for i, v in enumerate(value):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise SchemaError(f"{path}[{i}]", "expected a number")
        out.append(float(v))
    return tuple(out)


def _float(value: Any, path: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SchemaError(path, "expected a number")
    return float(value)


def _str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, "expected a string")
    return value


def _object_class(value: Any, path: str) -> ObjectClass:
    name = _str(value, path)
    try:
        return ObjectClass(name)
    except ValueError:
        raise SchemaError(path, f"unknown object class {name!r}") from None


# ---------------------------------------------------------------- scene

def encode_pose(pose: Pose) -> dict:
    return {"t": list(pose.translation), "r": list(pose.rotation)}


def decode_pose(doc: Any, path: str = "") -> Pose:
    t = _floats(_get(doc, path, "t"), f"{path}.t", 3)
    r = _floats(_get(doc, path, "r"), f"{path}.r", 9)
    return Pose(t, r)  # type: ignore[arg-type]


def encode_scene(scene: Scene) -> dict:
    return {
        "id": scene.id,
        "table": {"half_extents": list(scene.table.half_extents)},
        "objects": [
            {
                "class": o.cls.value,
                "shape": {"kind": o.shape.kind, "dims": list(o.shape.dims)},
                "mass": o.mass,
                "pose": encode_pose(o.pose),
            }
            for o in scene.objects
        ],
    }


def decode_scene(doc: Any, path: str = "") -> Scene:
    scene_id = _str(_get(doc, path, "id"), f"{path}.id")
    table_doc = _get(doc, path, "table")
    he = _floats(
        _get(table_doc, f"{path}.table", "half_extents"),
        f"{path}.table.half_extents",
        3,
    )
    objects_doc = _get(doc, path, "objects")
    if not isinstance(objects_doc, list):
        raise SchemaError(f"{path}.objects", "expected a list")
    objects = []
    for i, odoc in enumerate(objects_doc):
        opath = f"{path}.objects[{i}]"
        cls = _object_class(_get(odoc, opath, "class"), f"{opath}.class")
        shape_doc = _get(odoc, opath, "shape")
        kind = _str(_get(shape_doc, f"{opath}.shape", "kind"), f"{opath}.shape.kind")
        dims_doc = _get(shape_doc, f"{opath}.shape", "dims")
        if not isinstance(dims_doc, list):
            raise SchemaError(f"{opath}.shape.dims", "expected a list")
        dims = _floats(dims_doc, f"{opath}.shape.dims", len(dims_doc))
        try:
            shape = Shape(kind, dims)
        except ValueError as exc:
            raise SchemaError(f"{opath}.shape", str(exc)) from None
        mass = _float(_get(odoc, opath, "mass"), f"{opath}.mass")
        pose = decode_pose(_get(odoc, opath, "pose"), f"{opath}.pose")
        objects.append(SceneObject(cls, shape, mass, pose))
    return Scene(scene_id, tuple(objects), Table(he))  # type: ignore[arg-type]


# ---------------------------------------------------------------- action

def encode_action(action: Action) -> dict:
    params: dict | None
    if action.kind == ActionKind.PUSH:
        params = {"direction_angle": action.direction_angle}
    elif action.kind == ActionKind.ROTATE:
        assert action.sense is not None
        params = {"sense": action.sense.value}
    elif action.kind == ActionKind.DROP:
        assert action.onto is not None
        params = {"onto": action.onto.value}
    else:
        params = None
    return {"kind": action.kind.value, "target": action.target.value, "params": params}


def decode_action(doc: Any, path: str = "") -> Action:
    kind_name = _str(_get(doc, path, "kind"), f"{path}.kind")
    try:
        kind = ActionKind(kind_name)
    except ValueError:
        raise SchemaError(f"{path}.kind", f"unknown action kind {kind_name!r}") from None
    target = _object_class(_get(doc, path, "target"), f"{path}.target")
    params = _get(doc, path, "params")
    ppath = f"{path}.params"
    try:
        if kind == ActionKind.PUSH:
            angle = _float(_get(params, ppath, "direction_angle"), f"{ppath}.direction_angle")
            return Action.push(target, angle)
        if kind == ActionKind.ROTATE:
            sense_name = _str(_get(params, ppath, "sense"), f"{ppath}.sense")
            try:
                sense = RotateSense(sense_name)
            except ValueError:
                raise SchemaError(f"{ppath}.sense", f"unknown sense {sense_name!r}") from None
            return Action.rotate(target, sense)
        if kind == ActionKind.DROP:
            onto = _object_class(_get(params, ppath, "onto"), f"{ppath}.onto")
            return Action.drop(target, onto)
        return Action.remove(target)
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(ppath, str(exc)) from None


# ---------------------------------------------------------------- trajectory

def encode_trajectory(traj: Trajectory) -> dict:
    samples = [
        {
            "t": float(traj.times[i]),
            "t3": [float(v) for v in traj.translations[i]],
            "r9": [float(v) for v in traj.rotations[i].reshape(9)],
        }
        for i in range(len(traj))
    ]
    return {
        "class": traj.cls.value,
        "removed": traj.removed,
        "rate_hz": TRAJECTORY_RATE_HZ,
        "samples": samples,
    }


def decode_trajectory(doc: Any, path: str = "") -> Trajectory:
    cls = _object_class(_get(doc, path, "class"), f"{path}.class")
    removed = _get(doc, path, "removed")
    if not isinstance(removed, bool):
        raise SchemaError(f"{path}.removed", "expected a boolean")
    rate = _get(doc, path, "rate_hz")
    if rate != TRAJECTORY_RATE_HZ:
        raise SchemaError(f"{path}.rate_hz", f"expected {TRAJECTORY_RATE_HZ}")
    samples_doc = _get(doc, path, "samples")
    if not isinstance(samples_doc, list):
        raise SchemaError(f"{path}.samples", "expected a list")
    n = len(samples_doc)
    times = np.zeros(n, dtype=np.float64)
    translations = np.zeros((n, 3), dtype=np.float64)
    rotations = np.zeros((n, 3, 3), dtype=np.float64)
    for i, sdoc in enumerate(samples_doc):
        spath = f"{path}.samples[{i}]"
        times[i] = _float(_get(sdoc, spath, "t"), f"{spath}.t")
        translations[i] = _floats(_get(sdoc, spath, "t3"), f"{spath}.t3", 3)
        rotations[i] = np.array(
            _floats(_get(sdoc, spath, "r9"), f"{spath}.r9", 9)
        ).reshape(3, 3)
    return Trajectory(cls, removed, times, translations, rotations)


# ---------------------------------------------------------------- example

def encode_example(example: Example) -> dict:
    return {
        "scene": encode_scene(example.scene),
        "action_text": example.action_text,
        "action": encode_action(example.action),
        "descriptions": [
            {"subject": cls.value, "text": text}
            for cls, text in sorted(example.gt_descriptions.items())
        ],
        "affected": [
            {"subject": cls.value, "affected": flag}
            for cls, flag in sorted(example.affected_labels.items())
        ],
        "batch": example.batch,
        "index": example.index,
    }


def decode_example(doc: Any, path: str = "") -> Example:
    scene = decode_scene(_get(doc, path, "scene"), f"{path}.scene")
    action_text = _str(_get(doc, path, "action_text"), f"{path}.action_text")
    action = decode_action(_get(doc, path, "action"), f"{path}.action")
    descs_doc = _get(doc, path, "descriptions")
    if not isinstance(descs_doc, list):
        raise SchemaError(f"{path}.descriptions", "expected a list")
    descriptions = {}
    for i, ddoc in enumerate(descs_doc):
        dpath = f"{path}.descriptions[{i}]"
        subject = _object_class(_get(ddoc, dpath, "subject"), f"{dpath}.subject")
        descriptions[subject] = _str(_get(ddoc, dpath, "text"), f"{dpath}.text")
    aff_doc = _get(doc, path, "affected")
    if not isinstance(aff_doc, list):
        raise SchemaError(f"{path}.affected", "expected a list")
    affected = {}
    for i, adoc in enumerate(aff_doc):
        apath = f"{path}.affected[{i}]"
        subject = _object_class(_get(adoc, apath, "subject"), f"{apath}.subject")
        flag = _get(adoc, apath, "affected")
        if not isinstance(flag, bool):
            raise SchemaError(f"{apath}.affected", "expected a boolean")
        affected[subject] = flag
    batch = _get(doc, path, "batch")
    index = _get(doc, path, "index")
    if not isinstance(batch, int) or isinstance(batch, bool):
        raise SchemaError(f"{path}.batch", "expected an integer")
    if not isinstance(index, int) or isinstance(index, bool):
        raise SchemaError(f"{path}.index", "expected an integer")
    return Example(scene, action, action_text, descriptions, affected, batch, index)


# ---------------------------------------------------------------- files

def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from None
