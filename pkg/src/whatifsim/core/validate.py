"""Scene validation. Violations are data, not errors: each one names the
object(s) involved and the invariant broken."""

from __future__ import annotations

from .types import ROTATION_TOL, Scene, rotation_orthonormality_error

#: Two objects may touch, but not overlap deeper than this (meters).
INTERPENETRATION_TOL = 1e-4


def validate_scene(scene: Scene) -> list[str]:
    """Return a list of human-readable violation descriptions (empty = valid)."""
    # Imported lazily: the collision routines live in the physics package,
    # which itself depends on core types.
    from ..physics.engine import pair_penetration, table_penetration

    violations: list[str] = []
    if len(scene.objects) != 5:
        violations.append(f"scene must have exactly 5 objects, found {len(scene.objects)}")

    seen = set()
    for obj in scene.objects:
        if obj.cls in seen:
            violations.append(f"duplicate class: two {obj.cls.value} objects")
        seen.add(obj.cls)

    for obj in scene.objects:
        if not obj.mass > 0:
            violations.append(f"{obj.cls.value}: mass must be > 0, got {obj.mass}")
        if any(d <= 0 for d in obj.shape.dims):
            violations.append(f"{obj.cls.value}: shape dimensions must be > 0")
        err = rotation_orthonormality_error(obj.pose.rotation)
        if err > ROTATION_TOL:
            violations.append(
                f"{obj.cls.value}: rotation is not orthonormal (error {err:.3g})"
            )

    if violations:
        # Geometry checks assume well-formed objects.
        return violations

    for i, a in enumerate(scene.objects):
        for b in scene.objects[i + 1 :]:
            depth = pair_penetration(a, b)
            if depth > INTERPENETRATION_TOL:
                violations.append(
                    f"interpenetration: {a.cls.value} and {b.cls.value} "
                    f"overlap by {depth:.4g} m"
                )

    for obj in scene.objects:
        depth = table_penetration(obj, scene.table)
        if depth > INTERPENETRATION_TOL:
            violations.append(
                f"{obj.cls.value}: not above the table surface "
                f"(penetrates table by {depth:.4g} m)"
            )

    return violations
