import math

import numpy as np
import pytest

from whatifsim.core import ObjectClass, Pose, Scene, SceneObject, shape_for
from whatifsim.core.types import TRAJECTORY_SAMPLES, Action, RotateSense
from whatifsim.physics import (
    DEFAULT_PARAMS,
    DT,
    GRAVITY,
    EngineParams,
    World,
    pair_penetration,
    settle,
    simulate,
)

from conftest import row1_scene, spread_scene, standard_object

SPHERE_R = shape_for(ObjectClass.SOFTBALL).dims[0]


def single_body_world(cls=ObjectClass.SOFTBALL, z=1.0, params=DEFAULT_PARAMS):
    return World(Scene("one", (SceneObject.standard(cls, Pose((0.0, 0.0, z))),)), params)


# ---------------------------------------------------------------- settle

def test_settle_is_fixed_point_for_resting_sphere():
    scene = Scene(
        "rest", (SceneObject.standard(ObjectClass.SOFTBALL, Pose((0.0, 0.0, SPHERE_R))),)
    )
    settled = settle(scene)
    moved = np.abs(
        np.array(settled.objects[0].pose.translation) - np.array([0.0, 0.0, SPHERE_R])
    ).max()
    assert moved < 1e-3


def test_sphere_released_above_table_settles_at_radius():
    # Analytic rest height for a sphere on a plane: center z = radius.
    scene = Scene(
        "drop", (SceneObject.standard(ObjectClass.SOFTBALL, Pose((0.0, 0.0, SPHERE_R + 0.2))),)
    )
    settled = settle(scene)
    assert settled.objects[0].pose.translation[2] == pytest.approx(SPHERE_R, abs=5e-3)


def test_tilted_box_settles_flat():
    # Gravity torque oracle: a box tilted 5 degrees rests on an edge with its
    # center of mass inside the support region, so it must fall back flat.
    tilt = math.radians(5.0)
    c, s = math.cos(tilt), math.sin(tilt)
    rot = (1, 0, 0, 0, c, -s, 0, s, c)
    box = SceneObject.standard(ObjectClass.FOAM_BRICK, Pose((0.0, 0.0, 0.032), rot))
    settled = settle(Scene("tilt", (box,)))
    r = np.asarray(settled.objects[0].pose.rotation).reshape(3, 3)
    # rotation about x/y within 1 degree of identity: world-z stays world-z
    assert abs(r[2, 2]) > math.cos(math.radians(1.0))


def test_settle_idempotent(settled_spread):
    again = settle(settled_spread)
    for a, b in zip(settled_spread.objects, again.objects):
        drift = np.abs(np.array(a.pose.translation) - np.array(b.pose.translation)).max()
        assert drift < 1e-3


# ---------------------------------------------------------------- apply_action

def test_push_impulse_momentum_theorem(settled_spread):
    world = World(settled_spread)
    target = ObjectClass.CHEEZIT_BOX
    before = world.body_state(target).linear_velocity
    world.apply_action(Action.push(target, 0.0))
    after = world.body_state(target).linear_velocity
    mass = shape_for(target) and world.mass[world.index_of(target)]
    expected = DEFAULT_PARAMS.push_impulse(mass) / mass
    assert after[0] - before[0] == pytest.approx(expected, rel=1e-12)
    assert after[1] == before[1] and after[2] == before[2]


def test_remove_deletes_target(settled_spread):
    world = World(settled_spread)
    world.apply_action(Action.remove(ObjectClass.SCREWDRIVER))
    assert not world.is_active(ObjectClass.SCREWDRIVER)
    with pytest.raises(Exception):
        world.body_state(ObjectClass.SCREWDRIVER)


def test_rotate_cw_decreases_angular_velocity_by_l_over_iz(settled_spread):
    world = World(settled_spread)
    target = ObjectClass.SOFTBALL
    i = world.index_of(target)
    iz = float(world.ib[i, 2])
    world.apply_action(Action.rotate(target, RotateSense.CW))
    expected = -DEFAULT_PARAMS.rotate_impulse(iz) / iz
    assert world.omega[i, 2] == pytest.approx(expected, rel=1e-12)


def test_unknown_target_rejected(settled_spread):
    world = World(settled_spread)
    with pytest.raises(Exception, match="unknown action target"):
        world.apply_action(Action.remove(ObjectClass.PUDDING_BOX))


# ---------------------------------------------------------------- simulate

def test_remove_trajectory_flags(settled_spread):
    result = simulate(settled_spread, Action.remove(ObjectClass.SOFTBALL))
    assert result.trajectories[ObjectClass.SOFTBALL].removed
    assert len(result.trajectories[ObjectClass.SOFTBALL]) == 0
    for cls, traj in result.trajectories.items():
        if cls != ObjectClass.SOFTBALL:
            assert not traj.removed
            assert len(traj) == TRAJECTORY_SAMPLES


def test_push_isolated_object_leaves_others_static(settled_spread):
    # The diagonal is clear of the four objects sitting on the axes.
    result = simulate(settled_spread, Action.push(ObjectClass.SOFTBALL, math.pi / 4))
    for cls, traj in result.trajectories.items():
        if cls == ObjectClass.SOFTBALL:
            continue
        assert float(traj.translations.std(axis=0).max()) < 1e-9


def test_drop_contact_time_matches_free_fall(settled_spread):
    # Free-fall oracle: the dropped object's lowest point starts exactly
    # drop_height above the target's top, so first contact is at sqrt(2h/g).
    result = simulate(settled_spread, Action.drop(ObjectClass.SOFTBALL, ObjectClass.FOAM_BRICK))
    expected = math.sqrt(2.0 * DEFAULT_PARAMS.drop_height / GRAVITY)
    hits = [
        ev.t
        for ev in result.contacts
        if {ev.a, ev.b} == {ObjectClass.SOFTBALL, ObjectClass.FOAM_BRICK}
    ]
    assert hits, "dropped object never touched its target"
    assert hits[0] < 1.0
    assert hits[0] == pytest.approx(expected, abs=0.05)


def test_simulation_is_bit_deterministic(settled_spread):
    a = simulate(settled_spread, Action.push(ObjectClass.CHEEZIT_BOX, math.pi / 2))
    b = simulate(settled_spread, Action.push(ObjectClass.CHEEZIT_BOX, math.pi / 2))
    for cls in a.trajectories:
        assert a.trajectories[cls] == b.trajectories[cls]
    assert a.contacts == b.contacts


def test_emitted_rotations_orthonormal(settled_row1):
    result = simulate(settled_row1, Action.drop(ObjectClass.SCREWDRIVER, ObjectClass.FOAM_BRICK))
    eye = np.eye(3)
    for traj in result.trajectories.values():
        if traj.removed:
            continue
        prods = np.einsum("tij,tik->tjk", traj.rotations, traj.rotations)
        assert float(np.abs(prods - eye).max()) < 1e-5


# ---------------------------------------------------------------- step-level

def test_ballistic_matches_closed_form():
    # Closed-form kinematics oracle: x(t) = x0 + v0 t - g t^2 / 2 z-hat.
    world = single_body_world(z=3.0)
    world.vel[1] = (0.3, -0.2, 0.5)
    p0 = world.pos[1].copy()
    v0 = world.vel[1].copy()
    pos_out, _, _ = world.run(150, record=True)
    g = np.array([0.0, 0.0, -GRAVITY])
    worst = 0.0
    for k in range(150):
        t = (k + 1) * DT
        expected = p0 + v0 * t + 0.5 * g * t * t
        worst = max(worst, float(np.abs(pos_out[k, 1] - expected).max()))
    assert worst < 1e-3


def test_momentum_conserved_for_contact_free_body():
    world = single_body_world(z=3.0)
    world.vel[1] = (0.4, 0.1, 0.0)
    world.omega[1] = (0.2, -0.3, 0.5)
    for _ in range(30):
        vx, vy = world.vel[1, 0], world.vel[1, 1]
        om = world.omega[1].copy()
        world.step()
        assert world.vel[1, 0] == pytest.approx(vx, rel=1e-9)
        assert world.vel[1, 1] == pytest.approx(vy, rel=1e-9)
        assert np.allclose(world.omega[1], om, rtol=1e-9)


def test_head_on_equal_mass_inelastic_collision():
    # Perfectly inelastic limit: equal masses, restitution 0, velocities equalize.
    params = EngineParams(restitution=0.0)
    sphere = shape_for(ObjectClass.SOFTBALL)
    objs = (
        SceneObject(ObjectClass.SOFTBALL, sphere, 0.18, Pose((-0.2, 0.0, 1.0))),
        SceneObject(ObjectClass.COFFEE_CAN, sphere, 0.18, Pose((0.2, 0.0, 1.0))),
    )
    world = World(Scene("headon", objs), params)
    world.vel[1] = (1.0, 0.0, 0.0)
    world.vel[2] = (-1.0, 0.0, 0.0)
    world.run(90)
    assert world.vel[1, 0] == pytest.approx(0.0, abs=1e-6)
    assert world.vel[2, 0] == pytest.approx(0.0, abs=1e-6)


def test_sliding_box_decelerates_at_mu_g():
    # Coulomb sliding oracle: a = mu * g.
    world = single_body_world(ObjectClass.CHEEZIT_BOX, z=0.105)
    world.run(30)
    world.vel[1, 0] = 1.0
    v0 = world.vel[1, 0]
    n = 30
    world.run(n)
    decel = (v0 - world.vel[1, 0]) / (n * DT)
    assert decel == pytest.approx(DEFAULT_PARAMS.mu_table * GRAVITY, rel=0.05)


def test_no_deep_interpenetration_after_resolution(settled_row1):
    result = simulate(settled_row1, Action.drop(ObjectClass.SCREWDRIVER, ObjectClass.FOAM_BRICK))
    shapes = {o.cls: o.shape for o in settled_row1.objects}
    classes = list(result.trajectories)
    for k in range(0, TRAJECTORY_SAMPLES, 25):
        posed = []
        for cls in classes:
            traj = result.trajectories[cls]
            if traj.removed:
                continue
            posed.append(
                SceneObject.standard(
                    cls, Pose.from_arrays(traj.translations[k], traj.rotations[k])
                )
            )
        for i, a in enumerate(posed):
            for b in posed[i + 1 :]:
                assert pair_penetration(a, b) < 2e-3


def test_energy_never_increases(settled_row1):
    for action in (
        Action.drop(ObjectClass.SCREWDRIVER, ObjectClass.FOAM_BRICK),
        Action.push(ObjectClass.COFFEE_CAN, math.pi),
        Action.rotate(ObjectClass.SCREWDRIVER, RotateSense.CCW),
    ):
        world = World(settled_row1)
        world.apply_action(action)
        e0 = world.total_energy()
        _, _, energies = world.run(TRAJECTORY_SAMPLES, energy_trace=True)
        diffs = np.diff(np.concatenate([[e0], energies]))
        scale = max(abs(e0), 1.0)
        assert float(diffs.max()) <= 1e-6 * scale


def test_diverged_simulation_raises():
    from whatifsim.physics import SimulationDiverged

    world = single_body_world(z=1.0)
    world.vel[1] = (1e9, 0.0, 0.0)
    with pytest.raises(SimulationDiverged):
        world.run(10)
