"""Deterministic rule-grammar parser: verb lexicon for the action type, the
shared synonym table for objects, direction/sense lexicons for parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core.catalog import ObjectClass, all_surface_forms
from ..core.types import Action, ActionKind, RotateSense, Scene
from .tokenize import tokenize


class ParseError(ValueError):
    pass


class UnparseableAction(ParseError):
    pass


class UnknownTarget(ParseError):
    pass


VERB_KINDS: dict[str, ActionKind] = {}
for _verb in ("push", "pushes", "pushed", "shove", "shoves", "shoved", "roll", "rolls", "rolled"):
    VERB_KINDS[_verb] = ActionKind.PUSH
for _verb in ("spin", "spins", "spun", "rotate", "rotates", "rotated", "turn", "turns", "turned"):
    VERB_KINDS[_verb] = ActionKind.ROTATE
for _verb in ("remove", "removes", "removed", "take", "takes", "took"):
    VERB_KINDS[_verb] = ActionKind.REMOVE
for _verb in ("drop", "drops", "dropped", "place", "places", "placed", "put", "puts"):
    VERB_KINDS[_verb] = ActionKind.DROP


#: The eight compass bucket centers, index k at angle k*pi/4 wrapped to (-pi, pi].
COMPASS_ANGLES: tuple[float, ...] = (
    0.0,
    math.pi / 4,
    math.pi / 2,
    3 * math.pi / 4,
    math.pi,
    -3 * math.pi / 4,
    -math.pi / 2,
    -math.pi / 4,
)

#: Surface words per compass bucket; every word parses back to the bucket center.
DIRECTION_WORDS: tuple[tuple[str, ...], ...] = (
    ("right", "east"),
    ("north-east", "northeast", "top-right", "upper-right"),
    ("north", "up", "top", "forward"),
    ("north-west", "northwest", "top-left", "upper-left"),
    ("left", "west"),
    ("south-west", "southwest", "bottom-left", "lower-left"),
    ("south", "down", "bottom", "backward"),
    ("south-east", "southeast", "bottom-right", "lower-right"),
)

DIRECTIONS: dict[str, float] = {}
for _k, _words in enumerate(DIRECTION_WORDS):
    for _w in _words:
        DIRECTIONS[_w] = COMPASS_ANGLES[_k]

SENSES: dict[str, RotateSense] = {
    "clockwise": RotateSense.CW,
    "anti-clockwise": RotateSense.CCW,
    "anticlockwise": RotateSense.CCW,
    "counter-clockwise": RotateSense.CCW,
    "counterclockwise": RotateSense.CCW,
}

_SURFACE_FORMS = all_surface_forms()


def compass_bucket(angle: float) -> int:
    """Discretize an angle into the eight compass buckets (boundaries at odd
    multiples of pi/8)."""
    return int(round(angle / (math.pi / 4))) % 8


@dataclass(frozen=True)
class ParseOutcome:
    action: Action
    confidences: dict[str, dict[str, float]]
    push_confidence: float | None
    backend: str


def find_object(tokens: list[str], start: int) -> tuple[ObjectClass, int, int] | None:
    """First object mention at or after `start`: (class, begin, end) token span.
    Longest surface form wins at each position."""
    for i in range(start, len(tokens)):
        for form, cls in _SURFACE_FORMS:
            k = len(form)
            if tuple(tokens[i : i + k]) == form:
                return cls, i, i + k
    return None


def _one_hot(labels: list[str], chosen: str) -> dict[str, float]:
    return {lab: 1.0 if lab == chosen else 0.0 for lab in labels}


def _middle_of_table(tokens: list[str], start: int) -> bool:
    for i in range(start, len(tokens) - 2):
        if tokens[i] in ("middle", "center", "centre") and tokens[i + 1] == "of":
            if tokens[i + 2] == "the" and i + 3 < len(tokens) and tokens[i + 3] == "table":
                return True
            if tokens[i + 2] == "table":
                return True
    return False


def parse_rules(text: str, scene: Scene | None = None) -> ParseOutcome:
    """Parse an action description with the rule grammar.

    The scene is only consulted for the one scene-dependent phrase, a push
    toward the middle of the table (the direction depends on where the
    target currently is).
    """
    tokens = tokenize(text)

    kind = None
    verb_idx = -1
    for i, tok in enumerate(tokens):
        if tok in VERB_KINDS:
            kind = VERB_KINDS[tok]
            verb_idx = i
            break
    if kind is None:
        raise UnparseableAction("unparseable action: no action verb found")

    found = find_object(tokens, verb_idx + 1)
    if found is None:
        raise UnknownTarget("unknown target: no object mentioned after the verb")
    target, _, target_end = found

    confidences = {
        "action_type": _one_hot([k.value for k in ActionKind], kind.value),
        "acted_object": _one_hot([c.value for c in ObjectClass], target.value),
    }
    push_confidence: float | None = None

    if kind == ActionKind.PUSH:
        angle = None
        for tok in tokens[target_end:]:
            if tok in DIRECTIONS:
                angle = DIRECTIONS[tok]
                break
        if angle is None and _middle_of_table(tokens, target_end):
            if scene is not None and any(o.cls == target for o in scene.objects):
                x, y, _ = scene.object(target).pose.translation
                if x != 0.0 or y != 0.0:
                    # +0.0 avoids the atan2(-0.0, ...) negative-zero branch
                    angle = math.atan2(-y + 0.0, -x + 0.0)
        if angle is None:
            action = Action.push(target, 0.0)
            push_confidence = 0.0
        else:
            action = Action.push(target, angle)
            push_confidence = 1.0
    elif kind == ActionKind.ROTATE:
        sense = None
        for tok in tokens[verb_idx + 1 :]:
            if tok in SENSES:
                sense = SENSES[tok]
                break
        if sense is None:
            # Undetermined: deterministic tie-break to the lowest class index.
            action = Action.rotate(target, RotateSense.CW)
            confidences["rotate_sense"] = {"cw": 0.5, "ccw": 0.5}
        else:
            action = Action.rotate(target, sense)
            confidences["rotate_sense"] = _one_hot(["cw", "ccw"], sense.value)
    elif kind == ActionKind.REMOVE:
        action = Action.remove(target)
    else:
        onto_pos = None
        for i in range(target_end, len(tokens)):
            if tokens[i] in ("on", "onto", "upon"):
                onto_pos = i
                break
        if onto_pos is None:
            raise UnknownTarget("unknown target: no drop destination found")
        onto_found = find_object(tokens, onto_pos + 1)
        if onto_found is None:
            raise UnknownTarget("unknown target: no object mentioned after 'on'")
        onto = onto_found[0]
        if onto == target:
            raise UnknownTarget("unknown target: drop destination equals the acted object")
        action = Action.drop(target, onto)
        confidences["drop_onto"] = _one_hot([c.value for c in ObjectClass], onto.value)

    return ParseOutcome(action, confidences, push_confidence, "rules")
