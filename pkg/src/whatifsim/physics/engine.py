"""Deterministic rigid-body simulation of tabletop scenes.

Protocol: settle a scene for one second of passive simulation, apply the
action as an impulse (or teleport/removal), then integrate five seconds at
300 Hz recording every body's pose at every step plus a contact onset log.
Identical inputs produce bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core.catalog import TABLE_NAME, ObjectClass
from ..core.types import (
    TRAJECTORY_RATE_HZ,
    TRAJECTORY_SAMPLES,
    Action,
    ActionKind,
    Pose,
    RotateSense,
    Scene,
    SceneObject,
    Shape,
    Table,
    Trajectory,
)
from . import kernel

DT = 1.0 / TRAJECTORY_RATE_HZ
GRAVITY = 9.81

_KIND_CODE = {"box": kernel.BOX, "sphere": kernel.SPHERE, "cylinder": kernel.CYLINDER}

#: Contact-onset log capacity per simulation.
_MAX_EVENTS = 4096


class SimulationDiverged(RuntimeError):
    def __init__(self, step: int):
        self.step = step
        super().__init__(f"simulation diverged at step {step}")


class UnknownActionTarget(ValueError):
    pass


@dataclass(frozen=True)
class EngineParams:
    """Contact and action tuning. Defaults are calibrated so that a push
    slides an object tens of centimeters and drops visibly disturb the
    object landed on."""

    mu_table: float = 0.5
    mu_object: float = 0.4
    restitution: float = 0.1
    restitution_threshold: float = 0.25
    slop: float = 5e-5
    iterations: int = 16
    # Positional correction: energy budget fraction and per-step cap.
    kappa: float = 0.8
    max_correction: float = 0.01
    lateral_pad: float = 0.005
    # Supported bodies slower than this (m/s, plus angular contribution) snap
    # to exact rest: the static-friction regime, and the reason untouched
    # objects have bit-constant trajectories.
    sleep_velocity: float = 1e-3
    # Push and rotate are applied as impulses sized per target: J = m * v and
    # L = I_z * w, so every object starts at the same speed regardless of
    # mass (a fixed J would launch the foam brick at ~12 m/s while barely
    # nudging the mustard bottle).
    push_speed: float = 2.6
    spin_rate: float = 30.0
    drop_height: float = 0.4
    # Dropped objects are released tilted (about world x) so a perfectly
    # centered drop still breaks symmetry, as irregular real shapes would.
    drop_tilt: float = 0.4
    settle_seconds: float = 1.0

    def push_impulse(self, mass: float) -> float:
        return self.push_speed * mass

    def rotate_impulse(self, inertia_z: float) -> float:
        return self.spin_rate * inertia_z


DEFAULT_PARAMS = EngineParams()


@dataclass(frozen=True)
class BodyState:
    pose: Pose
    linear_velocity: tuple[float, float, float]
    angular_velocity: tuple[float, float, float]


@dataclass(frozen=True)
class ContactEvent:
    """First touch between a pair within a contact episode. `b` is either an
    object class value or the table."""

    t: float
    a: ObjectClass
    b: ObjectClass | str
    impulse_magnitude: float


@dataclass
class SimulationResult:
    trajectories: dict[ObjectClass, Trajectory]
    contacts: list[ContactEvent] = field(default_factory=list)


def _body_inertia(shape: Shape, mass: float) -> tuple[float, float, float]:
    if shape.kind == "box":
        hx, hy, hz = shape.dims
        return (
            mass / 3.0 * (hy * hy + hz * hz),
            mass / 3.0 * (hx * hx + hz * hz),
            mass / 3.0 * (hx * hx + hy * hy),
        )
    if shape.kind == "sphere":
        r = shape.dims[0]
        i = 0.4 * mass * r * r
        return (i, i, i)
    r, h = shape.dims
    ixy = mass * (3.0 * r * r + h * h) / 12.0
    return (ixy, ixy, 0.5 * mass * r * r)


def _shape_dims_row(shape: Shape) -> tuple[float, float, float]:
    if shape.kind == "box":
        return shape.dims  # type: ignore[return-value]
    if shape.kind == "sphere":
        return (shape.dims[0], 0.0, 0.0)
    r, h = shape.dims
    return (r, h / 2.0, max(h / 2.0 - r, 0.0))


def _support_down(kind: int, dims: np.ndarray, rot9: np.ndarray) -> float:
    """Distance from center to the lowest point of the body (support along -z)."""
    if kind == kernel.BOX:
        return float(
            dims[0] * abs(rot9[6]) + dims[1] * abs(rot9[7]) + dims[2] * abs(rot9[8])
        )
    if kind == kernel.SPHERE:
        return float(dims[0])
    axis_z = float(rot9[8])
    return float(dims[1] * abs(axis_z) + dims[0] * math.sqrt(max(1.0 - axis_z * axis_z, 0.0)))


class World:
    """Mutable simulation state for one scene. Owns its arrays exclusively;
    independent worlds may run concurrently."""

    def __init__(self, scene: Scene, params: EngineParams = DEFAULT_PARAMS):
        self.params = params
        self.classes: list[ObjectClass] = [o.cls for o in scene.objects]
        n = len(scene.objects) + 1
        self.n = n
        self.kind = np.zeros(n, dtype=np.int64)
        self.dims = np.zeros((n, 3), dtype=np.float64)
        self.mass = np.zeros(n, dtype=np.float64)
        self.inv_mass = np.zeros(n, dtype=np.float64)
        self.ib = np.zeros((n, 3), dtype=np.float64)
        self.ibinv = np.zeros((n, 3), dtype=np.float64)
        self.brad = np.zeros(n, dtype=np.float64)
        self.active = np.zeros(n, dtype=np.uint8)
        self.pos = np.zeros((n, 3), dtype=np.float64)
        self.rot = np.zeros((n, 9), dtype=np.float64)
        self.vel = np.zeros((n, 3), dtype=np.float64)
        self.omega = np.zeros((n, 3), dtype=np.float64)
        self.prev_contact = np.zeros((n, n), dtype=np.uint8)
        self.time = 0.0
        self._events: list[tuple[float, int, int, float]] = []

        # Body 0: the static table box, top face at z = 0.
        hx, hy, hz = scene.table.half_extents
        self.kind[0] = kernel.BOX
        self.dims[0] = (hx, hy, hz)
        self.pos[0] = (0.0, 0.0, -hz)
        self.rot[0] = (1, 0, 0, 0, 1, 0, 0, 0, 1)
        self.active[0] = 1
        self.brad[0] = math.sqrt(hx * hx + hy * hy + hz * hz)

        for idx, obj in enumerate(scene.objects, start=1):
            self.kind[idx] = _KIND_CODE[obj.shape.kind]
            self.dims[idx] = _shape_dims_row(obj.shape)
            self.mass[idx] = obj.mass
            self.inv_mass[idx] = 1.0 / obj.mass
            inertia = _body_inertia(obj.shape, obj.mass)
            self.ib[idx] = inertia
            self.ibinv[idx] = tuple(1.0 / v for v in inertia)
            self.brad[idx] = obj.shape.bounding_radius()
            self.active[idx] = 1
            self.pos[idx] = obj.pose.translation
            self.rot[idx] = obj.pose.rotation

        self._table = scene.table
        self._scene_id = scene.id
        self._shapes = {o.cls: o.shape for o in scene.objects}

    # ------------------------------------------------------------ access

    def index_of(self, cls: ObjectClass) -> int:
        return self.classes.index(cls) + 1

    def body_state(self, cls: ObjectClass) -> BodyState:
        i = self.index_of(cls)
        if not self.active[i]:
            raise UnknownActionTarget(f"{cls.value} has been removed")
        return BodyState(
            Pose.from_arrays(self.pos[i], self.rot[i].reshape(3, 3)),
            tuple(float(v) for v in self.vel[i]),
            tuple(float(v) for v in self.omega[i]),
        )

    def is_active(self, cls: ObjectClass) -> bool:
        return bool(self.active[self.index_of(cls)])

    def scene(self) -> Scene:
        objects = []
        for idx, cls in enumerate(self.classes, start=1):
            objects.append(
                SceneObject(
                    cls,
                    self._shapes[cls],
                    float(self.mass[idx]),
                    Pose.from_arrays(self.pos[idx], self.rot[idx].reshape(3, 3)),
                )
            )
        return Scene(self._scene_id, tuple(objects), self._table)

    def total_energy(self) -> float:
        return float(
            kernel._total_energy(
                self.pos, self.rot, self.vel, self.omega,
                self.mass, self.ib, self.inv_mass, self.active, GRAVITY,
            )
        )

    # ------------------------------------------------------------ actions

    def apply_action(self, action: Action) -> None:
        """Apply the action impulsively to the current state (at time zero)."""
        p = self.params
        if action.target not in self.classes:
            raise UnknownActionTarget(f"unknown action target {action.target.value}")
        i = self.index_of(action.target)
        if action.kind == ActionKind.PUSH:
            assert action.direction_angle is not None
            j_over_m = p.push_impulse(self.mass[i]) * self.inv_mass[i]
            self.vel[i, 0] += j_over_m * math.cos(action.direction_angle)
            self.vel[i, 1] += j_over_m * math.sin(action.direction_angle)
        elif action.kind == ActionKind.ROTATE:
            sign = 1.0 if action.sense == RotateSense.CCW else -1.0
            # World-frame inertia about z, so lying bodies spin at the same
            # rate as standing ones.
            r9 = self.rot[i]
            izz = float(
                self.ib[i, 0] * r9[6] ** 2
                + self.ib[i, 1] * r9[7] ** 2
                + self.ib[i, 2] * r9[8] ** 2
            )
            lx, ly, lz = 0.0, 0.0, sign * p.rotate_impulse(izz)
            bx, by, bz = kernel._mat_tvec(self.rot[i], lx, ly, lz)
            bx *= self.ibinv[i, 0]
            by *= self.ibinv[i, 1]
            bz *= self.ibinv[i, 2]
            wx, wy, wz = kernel._mat_vec(self.rot[i], bx, by, bz)
            self.omega[i, 0] += wx
            self.omega[i, 1] += wy
            self.omega[i, 2] += wz
        elif action.kind == ActionKind.REMOVE:
            self.active[i] = 0
            self.vel[i] = 0.0
            self.omega[i] = 0.0
        else:  # drop
            assert action.onto is not None
            if action.onto not in self.classes:
                raise UnknownActionTarget(f"unknown action target {action.onto.value}")
            j = self.index_of(action.onto)
            if not self.active[j]:
                raise UnknownActionTarget(f"unknown action target {action.onto.value}")
            c, s = math.cos(p.drop_tilt), math.sin(p.drop_tilt)
            tilt = np.array([1, 0, 0, 0, c, -s, 0, s, c], dtype=np.float64)
            onto_top = self.pos[j, 2] + _support_down(
                int(self.kind[j]), self.dims[j], self.rot[j]
            )
            self.rot[i] = tilt
            down = _support_down(int(self.kind[i]), self.dims[i], self.rot[i])
            self.pos[i, 0] = self.pos[j, 0]
            self.pos[i, 1] = self.pos[j, 1]
            self.pos[i, 2] = onto_top + p.drop_height + down
            self.vel[i] = 0.0
            self.omega[i] = 0.0

    # ------------------------------------------------------------ stepping

    def run(
        self,
        n_steps: int,
        record: bool = False,
        log_events: bool = False,
        energy_trace: bool = False,
    ) -> tuple[np.ndarray | None, np.ndarray | None, np.ndarray | None]:
        """Advance n_steps. Returns (positions, rotations, energies); the
        recorded arrays are (n_steps, n_bodies, 3|9) or None when not asked for."""
        p = self.params
        out_pos = np.zeros((n_steps if record else 1, self.n, 3), dtype=np.float64)
        out_rot = np.zeros((n_steps if record else 1, self.n, 9), dtype=np.float64)
        ev_t = np.zeros(_MAX_EVENTS, dtype=np.float64)
        ev_a = np.zeros(_MAX_EVENTS, dtype=np.int64)
        ev_b = np.zeros(_MAX_EVENTS, dtype=np.int64)
        ev_imp = np.zeros(_MAX_EVENTS, dtype=np.float64)
        energy = np.zeros(n_steps if energy_trace else 0, dtype=np.float64)
        status, n_events = kernel.run_steps(
            n_steps,
            DT,
            GRAVITY,
            self.kind,
            self.dims,
            self.mass,
            self.inv_mass,
            self.ib,
            self.ibinv,
            self.brad,
            self.active,
            self.pos,
            self.rot,
            self.vel,
            self.omega,
            p.mu_table,
            p.mu_object,
            p.restitution,
            p.restitution_threshold,
            p.slop,
            p.iterations,
            p.kappa,
            p.max_correction,
            p.lateral_pad,
            p.sleep_velocity,
            record,
            out_pos,
            out_rot,
            log_events,
            self.prev_contact,
            ev_t,
            ev_a,
            ev_b,
            ev_imp,
            0,
            self.time,
            energy,
        )
        if status != 0:
            raise SimulationDiverged(int(self.time / DT) + status - 1)
        if log_events:
            for k in range(n_events):
                self._events.append(
                    (float(ev_t[k]), int(ev_a[k]), int(ev_b[k]), float(ev_imp[k]))
                )
        self.time += n_steps * DT
        return (
            out_pos if record else None,
            out_rot if record else None,
            energy if energy_trace else None,
        )

    def step(self) -> None:
        self.run(1)

    def contact_events(self) -> list[ContactEvent]:
        events = []
        for t, i, j, imp in self._events:
            if i == 0:
                a: ObjectClass | str = self.classes[j - 1]
                b: ObjectClass | str = TABLE_NAME
            elif j == 0:
                a = self.classes[i - 1]
                b = TABLE_NAME
            else:
                a = self.classes[i - 1]
                b = self.classes[j - 1]
            events.append(ContactEvent(t, a, b, imp))  # type: ignore[arg-type]
        return events


# ------------------------------------------------------------------ protocol


def settle(scene: Scene, seed: int = 0, params: EngineParams = DEFAULT_PARAMS) -> Scene:
    """One second of passive simulation; returns the scene at rest.

    The seed is accepted for interface stability (reserved for noise
    injection); the integrator itself is deterministic.
    """
    del seed
    world = World(scene, params)
    world.run(int(round(params.settle_seconds / DT)))
    return world.scene()


def simulate(
    scene: Scene,
    action: Action,
    seed: int = 0,
    params: EngineParams = DEFAULT_PARAMS,
) -> SimulationResult:
    """Apply the action at t=0 and integrate five seconds at 300 Hz.

    The caller is expected to pass an already-settled scene.
    """
    del seed
    world = World(scene, params)
    world.apply_action(action)
    out_pos, out_rot, _ = world.run(TRAJECTORY_SAMPLES, record=True, log_events=True)
    assert out_pos is not None and out_rot is not None
    times = (np.arange(TRAJECTORY_SAMPLES, dtype=np.float64) + 1.0) * DT
    trajectories: dict[ObjectClass, Trajectory] = {}
    for idx, cls in enumerate(world.classes, start=1):
        if not world.active[idx]:
            trajectories[cls] = Trajectory.removed_for(cls)
            continue
        translations = out_pos[:, idx, :].copy()
        rotations = out_rot[:, idx, :].reshape(TRAJECTORY_SAMPLES, 3, 3).copy()
        trajectories[cls] = Trajectory(cls, False, times.copy(), translations, rotations)
    return SimulationResult(trajectories, world.contact_events())


def downsample_30hz(traj: Trajectory) -> Trajectory:
    """Exact stride-10 subsample (300 Hz -> 30 Hz) for transport."""
    if traj.removed:
        return traj
    return Trajectory(
        traj.cls,
        False,
        traj.times[::10].copy(),
        traj.translations[::10].copy(),
        traj.rotations[::10].copy(),
    )


# ------------------------------------------------------------------ probes


def _probe_max_penetration(
    shapes: list[Shape], poses: list[Pose]
) -> float:
    n = len(shapes)
    kind = np.zeros(n, dtype=np.int64)
    dims = np.zeros((n, 3), dtype=np.float64)
    pos = np.zeros((n, 3), dtype=np.float64)
    rot = np.zeros((n, 9), dtype=np.float64)
    vel = np.zeros((n, 3), dtype=np.float64)
    omega = np.zeros((n, 3), dtype=np.float64)
    brad = np.zeros(n, dtype=np.float64)
    active = np.ones(n, dtype=np.uint8)
    inv_mass = np.ones(n, dtype=np.float64)
    for i, (shape, pose) in enumerate(zip(shapes, poses)):
        kind[i] = _KIND_CODE[shape.kind]
        dims[i] = _shape_dims_row(shape)
        brad[i] = shape.bounding_radius()
        pos[i] = pose.translation
        rot[i] = pose.rotation
    maxc = kernel.MAX_CONTACTS
    c_a = np.zeros(maxc, dtype=np.int64)
    c_b = np.zeros(maxc, dtype=np.int64)
    c_p = np.zeros((maxc, 3), dtype=np.float64)
    c_n = np.zeros((maxc, 3), dtype=np.float64)
    c_sep = np.zeros(maxc, dtype=np.float64)
    verts = np.zeros((8, 3), dtype=np.float64)
    m = kernel.gen_contacts(
        kind, dims, pos, rot, vel, omega, brad, active, inv_mass,
        0.0, 0.0, 1e-6, DEFAULT_PARAMS.lateral_pad, verts,
        c_a, c_b, c_p, c_n, c_sep,
    )
    if m == 0:
        return 0.0
    return max(0.0, float(-c_sep[:m].min()))


def pair_penetration(a: SceneObject, b: SceneObject) -> float:
    """Overlap depth between two posed objects (0 when separated)."""
    return _probe_max_penetration([a.shape, b.shape], [a.pose, b.pose])


def table_penetration(obj: SceneObject, table: Table) -> float:
    """Depth by which an object dips below the table top (0 when above)."""
    hx, hy, hz = table.half_extents
    table_shape = Shape("box", (hx, hy, hz))
    table_pose = Pose((0.0, 0.0, -hz))
    return _probe_max_penetration([obj.shape, table_shape], [obj.pose, table_pose])


