"""Object catalog: the eight object classes, their primitive shapes, masses,
display names and synonyms, plus the fixed table geometry.

The synonym table is the single source of truth for both the language rules
and the mention detector, so the two cannot drift.
"""

from __future__ import annotations

from enum import Enum


class ObjectClass(str, Enum):
    FOAM_BRICK = "foam_brick"
    CHEEZIT_BOX = "cheezit_box"
    PUDDING_BOX = "pudding_box"
    MUSTARD_BOTTLE = "mustard_bottle"
    BANANA = "banana"
    SOFTBALL = "softball"
    COFFEE_CAN = "coffee_can"
    SCREWDRIVER = "screwdriver"


#: Counterparty name used in contact logs for the table itself.
TABLE_NAME = "table"

#: Table top is the z = 0 plane; the table box sits below it, centered at the
#: origin in x,y. Half extents in meters (x, y, z).
TABLE_HALF_EXTENTS = (0.5, 0.5, 0.05)


# kind -> one of "box" (half extents), "sphere" (radius), "cylinder" (radius, height)
SHAPE_TABLE: dict[ObjectClass, tuple[str, tuple[float, ...]]] = {
    ObjectClass.FOAM_BRICK: ("box", (0.05, 0.075, 0.025)),
    ObjectClass.CHEEZIT_BOX: ("box", (0.079, 0.032, 0.105)),
    ObjectClass.PUDDING_BOX: ("box", (0.055, 0.044, 0.019)),
    ObjectClass.MUSTARD_BOTTLE: ("cylinder", (0.032, 0.19)),
    ObjectClass.BANANA: ("box", (0.095, 0.019, 0.017)),
    ObjectClass.SOFTBALL: ("sphere", (0.048,)),
    ObjectClass.COFFEE_CAN: ("cylinder", (0.051, 0.14)),
    ObjectClass.SCREWDRIVER: ("cylinder", (0.012, 0.20)),
}

MASS_TABLE: dict[ObjectClass, float] = {
    ObjectClass.FOAM_BRICK: 0.05,
    ObjectClass.CHEEZIT_BOX: 0.35,
    ObjectClass.PUDDING_BOX: 0.15,
    ObjectClass.MUSTARD_BOTTLE: 0.60,
    ObjectClass.BANANA: 0.12,
    ObjectClass.SOFTBALL: 0.18,
    ObjectClass.COFFEE_CAN: 0.55,
    ObjectClass.SCREWDRIVER: 0.10,
}

#: Canonical display name, used verbatim in generated sentences.
DISPLAY_NAMES: dict[ObjectClass, str] = {
    ObjectClass.FOAM_BRICK: "foam",
    ObjectClass.CHEEZIT_BOX: "cheese box",
    ObjectClass.PUDDING_BOX: "chocolate box",
    ObjectClass.MUSTARD_BOTTLE: "mustard container",
    ObjectClass.BANANA: "banana",
    ObjectClass.SOFTBALL: "softball",
    ObjectClass.COFFEE_CAN: "coffee can",
    ObjectClass.SCREWDRIVER: "screw driver",
}

#: Classes that rest on their side rather than standing (a screwdriver or a
#: squeeze bottle lies flat on a cluttered table; cans stand).
LYING_CLASSES = frozenset({ObjectClass.SCREWDRIVER, ObjectClass.MUSTARD_BOTTLE})

#: Alternative surface forms accepted on input (display name is always accepted too).
SYNONYMS: dict[ObjectClass, tuple[str, ...]] = {
    ObjectClass.FOAM_BRICK: ("foam brick", "foam block", "brick"),
    ObjectClass.CHEEZIT_BOX: ("cheezit box", "cheez-it box", "cracker box", "cheezit"),
    ObjectClass.PUDDING_BOX: ("pudding box", "chocolate pudding box", "pudding"),
    ObjectClass.MUSTARD_BOTTLE: ("mustard bottle", "mustard"),
    ObjectClass.BANANA: (),
    ObjectClass.SOFTBALL: ("baseball", "ball"),
    ObjectClass.COFFEE_CAN: ("coffee container", "coffee tin", "can of coffee"),
    ObjectClass.SCREWDRIVER: ("screwdriver",),
}


def all_surface_forms() -> list[tuple[tuple[str, ...], ObjectClass]]:
    """Every accepted token sequence for every class, longest sequences first.

    Returned split into lowercase token tuples so matchers can do exact
    token-level comparison (e.g. "screw driver" -> ("screw", "driver")).
    """
    forms: list[tuple[tuple[str, ...], ObjectClass]] = []
    for cls in ObjectClass:
        names = (DISPLAY_NAMES[cls],) + SYNONYMS[cls]
        for name in names:
            forms.append((tuple(name.lower().split()), cls))
    forms.sort(key=lambda item: -len(item[0]))
    return forms


def short_name(cls: ObjectClass) -> str:
    """The casual, shortest surface form of a class ("the foam", "the ball").

    Spoken references distinguish roles: the object being acted on gets a
    fuller name, an object merely referred to (e.g. what something is dropped
    onto) gets the short one.
    """
    names = (DISPLAY_NAMES[cls],) + SYNONYMS[cls]
    return min(names, key=lambda n: (len(n.split()), len(n), n))


def target_names(cls: ObjectClass) -> tuple[str, ...]:
    """Surface forms used when the class is the acted object: everything but
    the short name (unless it is the only name)."""
    names = (DISPLAY_NAMES[cls],) + SYNONYMS[cls]
    if len(names) == 1:
        return names
    short = short_name(cls)
    return tuple(n for n in names if n != short)


def display_name(cls: ObjectClass) -> str:
    return DISPLAY_NAMES[cls]
