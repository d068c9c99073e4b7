import math
import re

import numpy as np
import pytest

from whatifsim.core import ObjectClass, Scene, SceneObject, Trajectory
from whatifsim.core.types import Action, RotateSense
from whatifsim.describer import (
    Event,
    EventKind,
    describe_all,
    diff_trajectories,
    extract_event,
    extract_events,
    realize,
)
from whatifsim.effects import PoseStats, Thresholds, truth_affected
from whatifsim.physics import settle, simulate

from conftest import row1_scene, standard_object

TEMPLATES = [
    re.compile(r"^nothing$"),
    re.compile(r"^the .+ is pushed by the .+$"),
    re.compile(r"^the .+ is pushed a little by the .+$"),
    re.compile(r"^the .+ falls off the table$"),
    re.compile(r"^the .+ shakes a little from the impact$"),
]


def _traj(translations, cls=ObjectClass.BANANA):
    n = len(translations)
    return Trajectory(
        cls,
        False,
        (np.arange(n) + 1.0) / 300.0,
        np.asarray(translations, dtype=float),
        np.tile(np.eye(3), (n, 1, 1)),
    )


# ---------------------------------------------------------------- diffs

def test_diff_identical_is_zero():
    a = _traj(np.random.default_rng(0).uniform(size=(50, 3)))
    d = diff_trajectories(a, a)
    assert np.all(d.deltas == 0.0)


def test_diff_ramp():
    n = 60
    static = _traj(np.zeros((n, 3)), ObjectClass.FOAM_BRICK)
    moving = _traj(np.stack([np.linspace(0, 0.4, n), np.zeros(n), np.zeros(n)], 1))
    d = diff_trajectories(moving, static)
    assert d.deltas[-1, 0] == pytest.approx(0.4)
    assert np.all(d.deltas[:, 1:] == 0.0)


def test_diff_antisymmetric():
    rng = np.random.default_rng(1)
    a = _traj(rng.uniform(size=(40, 3)), ObjectClass.FOAM_BRICK)
    b = _traj(rng.uniform(size=(40, 3)), ObjectClass.BANANA)
    assert np.array_equal(diff_trajectories(a, b).deltas, -diff_trajectories(b, a).deltas)


def test_diff_uses_shorter_length():
    a = _traj(np.zeros((40, 3)), ObjectClass.FOAM_BRICK)
    b = _traj(np.zeros((25, 3)), ObjectClass.BANANA)
    assert diff_trajectories(a, b).deltas.shape == (25, 12)


def test_diff_removed_rejected():
    a = _traj(np.zeros((10, 3)))
    with pytest.raises(ValueError, match="removed"):
        diff_trajectories(a, Trajectory.removed_for(ObjectClass.FOAM_BRICK))


# ---------------------------------------------------------------- realize

def test_realize_templates_match_dataset_patterns():
    assert realize(Event(EventKind.NOTHING, ObjectClass.BANANA)) == "nothing"
    assert (
        realize(
            Event(EventKind.PUSHED_BY, ObjectClass.MUSTARD_BOTTLE,
                  agent=ObjectClass.SCREWDRIVER, magnitude="normal")
        )
        == "the mustard container is pushed by the screw driver"
    )
    assert (
        realize(
            Event(EventKind.PUSHED_BY, ObjectClass.FOAM_BRICK,
                  agent=ObjectClass.SCREWDRIVER, magnitude="slight")
        )
        == "the foam is pushed a little by the screw driver"
    )
    assert (
        realize(
            Event(EventKind.HIT_BY_DROPPED, ObjectClass.FOAM_BRICK,
                  agent=ObjectClass.SCREWDRIVER, magnitude="slight")
        )
        == "the foam is pushed by the screw driver"
    )
    assert (
        realize(Event(EventKind.FALLS_OFF_TABLE, ObjectClass.BANANA))
        == "the banana falls off the table"
    )
    assert (
        realize(Event(EventKind.MOVED, ObjectClass.PUDDING_BOX, magnitude="slight"))
        == "the chocolate box shakes a little from the impact"
    )


def test_event_invariants():
    with pytest.raises(ValueError):
        Event(EventKind.PUSHED_BY, ObjectClass.BANANA)  # missing agent
    with pytest.raises(ValueError):
        Event(EventKind.NOTHING, ObjectClass.BANANA, agent=ObjectClass.FOAM_BRICK)


# ---------------------------------------------------------------- events

def test_untouched_object_is_nothing(settled_spread):
    result = simulate(settled_spread, Action.remove(ObjectClass.SOFTBALL))
    ev = extract_event(
        ObjectClass.CHEEZIT_BOX,
        result,
        Action.remove(ObjectClass.SOFTBALL),
        settled_spread,
        affected=False,
    )
    assert ev.kind == EventKind.NOTHING


def test_drop_attribution_names_dropped_object(settled_row1):
    action = Action.drop(ObjectClass.SCREWDRIVER, ObjectClass.FOAM_BRICK)
    result = simulate(settled_row1, action)
    traj = result.trajectories[ObjectClass.FOAM_BRICK]
    ev = extract_event(
        ObjectClass.FOAM_BRICK, result, action, settled_row1,
        affected=truth_affected(traj),
    )
    assert ev.kind == EventKind.HIT_BY_DROPPED
    assert ev.agent == ObjectClass.SCREWDRIVER
    assert "screw driver" in realize(ev)


def test_pushed_off_table_branch():
    # Construct the branch fixture: a sphere near the edge pushed outward by
    # the neighboring pushed ball.
    scene = settle(
        Scene(
            "edge",
            (
                standard_object(ObjectClass.SOFTBALL, 0.30, 0.0),
                standard_object(ObjectClass.COFFEE_CAN, 0.14, 0.0),
                standard_object(ObjectClass.FOAM_BRICK, -0.35, -0.35),
                standard_object(ObjectClass.BANANA, -0.35, 0.35),
                standard_object(ObjectClass.SCREWDRIVER, 0.0, -0.35),
            ),
        )
    )
    action = Action.push(ObjectClass.COFFEE_CAN, 0.0)  # toward the ball and the edge
    result = simulate(scene, action)
    traj = result.trajectories[ObjectClass.SOFTBALL]
    assert truth_affected(traj)
    final = traj.translations[-1]
    assert abs(final[0]) > 0.5 and final[2] < 0.0, "ball should have left the table"
    ev = extract_event(ObjectClass.SOFTBALL, result, action, scene, affected=True)
    assert ev.kind == EventKind.FALLS_OFF_TABLE
    assert realize(ev) == "the softball falls off the table"


def test_subject_equal_target_rejected(settled_spread):
    action = Action.remove(ObjectClass.SOFTBALL)
    result = simulate(settled_spread, action)
    with pytest.raises(ValueError, match="acted object"):
        extract_event(ObjectClass.SOFTBALL, result, action, settled_spread, affected=False)


def test_describe_all_excludes_target_and_defaults_nothing(settled_spread):
    action = Action.remove(ObjectClass.SOFTBALL)
    result = simulate(settled_spread, action)
    labels = {
        cls: truth_affected(t)
        for cls, t in result.trajectories.items()
        if cls != action.target and not t.removed
    }
    texts = describe_all(result, action, settled_spread, affected=labels)
    assert ObjectClass.SOFTBALL not in texts
    assert len(texts) == 4
    assert all(t == "nothing" for t in texts.values())


def test_describe_all_drop_fixture(settled_row1):
    action = Action.drop(ObjectClass.SCREWDRIVER, ObjectClass.FOAM_BRICK)
    result = simulate(settled_row1, action)
    labels = {
        cls: truth_affected(t)
        for cls, t in result.trajectories.items()
        if cls != action.target and not t.removed
    }
    texts = describe_all(result, action, settled_row1, affected=labels)
    assert "screw driver" in texts[ObjectClass.FOAM_BRICK]
    for cls in (ObjectClass.SOFTBALL, ObjectClass.BANANA, ObjectClass.COFFEE_CAN):
        assert texts[cls] == "nothing"


def test_every_sentence_matches_a_template(settled_row1):
    for action in (
        Action.drop(ObjectClass.SCREWDRIVER, ObjectClass.FOAM_BRICK),
        Action.push(ObjectClass.COFFEE_CAN, math.pi / 2),
        Action.rotate(ObjectClass.SCREWDRIVER, RotateSense.CCW),
    ):
        result = simulate(settled_row1, action)
        labels = {
            cls: truth_affected(t)
            for cls, t in result.trajectories.items()
            if cls != action.target and not t.removed
        }
        for text in describe_all(result, action, settled_row1, affected=labels).values():
            assert any(t.match(text) for t in TEMPLATES), text


def test_constant_trajectory_described_as_nothing(settled_spread):
    # Threshold route (no override): fitted stats with any positive thresholds
    # must classify an all-constant trajectory as nothing.
    action = Action.remove(ObjectClass.SOFTBALL)
    result = simulate(settled_spread, action)
    texts = describe_all(
        result, action, settled_spread,
        stats=PoseStats.identity(), thresholds=Thresholds(1e-9, 1e-9),
    )
    assert all(t == "nothing" for t in texts.values())


def test_agent_contact_precedes_first_motion(settled_row1):
    from whatifsim.effects import first_motion_time

    action = Action.drop(ObjectClass.SCREWDRIVER, ObjectClass.FOAM_BRICK)
    result = simulate(settled_row1, action)
    events = extract_events(
        result, action, settled_row1,
        affected={
            cls: truth_affected(t)
            for cls, t in result.trajectories.items()
            if cls != action.target and not t.removed
        },
    )
    for cls, ev in events.items():
        if ev.agent is None:
            continue
        cutoff = first_motion_time(result.trajectories[cls])
        touch = [
            c.t
            for c in result.contacts
            if {c.a, c.b} == {cls, ev.agent}
        ]
        assert touch and touch[0] <= cutoff
