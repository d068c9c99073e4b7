import collections

import numpy as np
import pytest

from whatifsim.core import Example, ObjectClass, validate_scene
from whatifsim.core.types import Action, ActionKind
from whatifsim.datagen import (
    BATCH_SIZE,
    EXAMPLES_PER_KIND,
    gen_action_text,
    gen_batch,
    load_dataset,
    load_manifest,
    sample_action,
    sample_scene,
    split,
    write_dataset,
)
from whatifsim.parsing import parse_rules


@pytest.fixture(scope="module")
def batch0():
    return gen_batch(0, seed=0)


def test_batch_counts(batch0):
    assert len(batch0) == BATCH_SIZE == 68
    kinds = collections.Counter(ex.action.kind for ex in batch0)
    assert all(kinds[k] == EXAMPLES_PER_KIND == 17 for k in ActionKind)


def test_batch_deterministic(batch0):
    again = gen_batch(0, seed=0)
    for a, b in zip(batch0, again):
        assert a == b


def test_different_seeds_differ():
    a = sample_scene(1)
    b = sample_scene(2)
    assert a.objects != b.objects


def test_scene_sampling_valid_and_settled():
    for seed in range(5):
        scene = sample_scene(seed)
        assert validate_scene(scene) == []
        assert len({o.cls for o in scene.objects}) == 5


def test_action_sampling_contracts():
    scene = sample_scene(3)
    for seed in range(30):
        drop = sample_action(scene, ActionKind.DROP, seed)
        assert drop.onto != drop.target
        remove = sample_action(scene, ActionKind.REMOVE, seed)
        assert remove.direction_angle is None and remove.sense is None and remove.onto is None
        assert sample_action(scene, ActionKind.PUSH, seed) == sample_action(
            scene, ActionKind.PUSH, seed
        )


def test_action_text_round_trip(batch0):
    for ex in batch0:
        assert parse_rules(ex.action_text).action == ex.action


def test_text_generation_deterministic():
    action = Action.drop(ObjectClass.BANANA, ObjectClass.FOAM_BRICK)
    assert gen_action_text(action, 7) == gen_action_text(action, 7)


def test_labels_match_descriptions(batch0):
    for ex in batch0:
        assert set(ex.gt_descriptions) == set(ex.affected_labels)
        assert len(ex.gt_descriptions) == 4
        assert ex.action.target not in ex.gt_descriptions
        for cls, label in ex.affected_labels.items():
            if label:
                assert ex.gt_descriptions[cls] != "nothing"
            else:
                assert ex.gt_descriptions[cls] == "nothing"


def _fake_examples(n_batches: int) -> list[Example]:
    scene = sample_scene(0)
    target = scene.objects[0].cls
    others = [o.cls for o in scene.objects[1:]]
    out = []
    for b in range(n_batches):
        for i in range(3):
            out.append(
                Example(
                    scene,
                    Action.remove(target),
                    "the robot removes the thing",
                    {c: "nothing" for c in others},
                    {c: False for c in others},
                    batch=b,
                    index=i,
                )
            )
    return out


def test_split_by_batches():
    dataset = _fake_examples(15)
    train, test = split(dataset)
    assert {ex.batch for ex in test} == {12, 13, 14}
    assert {ex.batch for ex in train} == set(range(12))
    assert len(train) + len(test) == len(dataset)


def test_split_requires_15_batches():
    with pytest.raises(ValueError, match="15 batches"):
        split(_fake_examples(10))


def test_dataset_files_round_trip(tmp_path, batch0):
    subset = batch0[:6]
    write_dataset(tmp_path / "data", subset, seed=0)
    back = load_dataset(tmp_path / "data")
    assert back == subset
    manifest = load_manifest(tmp_path / "data")
    assert manifest["examples"] == 6
    assert manifest["seed"] == 0
