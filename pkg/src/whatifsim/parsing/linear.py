"""Learned parser over bag-of-words features: averaged-perceptron
classification heads plus a least-squares push-direction regressor squashed
to [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.catalog import ObjectClass
from ..core.types import Action, ActionKind, RotateSense, angle_from_xy
from .rules import ParseOutcome
from .tokenize import tokenize

ACTION_LABELS = [k.value for k in ActionKind]
OBJECT_LABELS = [c.value for c in ObjectClass]
SENSE_LABELS = [s.value for s in RotateSense]


class CoverageError(ValueError):
    pass


def count_vector(tokens: list[str], vocab_index: dict[str, int]) -> np.ndarray:
    """Word-count features over the frozen vocabulary; out-of-vocabulary
    tokens are dropped."""
    x = np.zeros(len(vocab_index), dtype=np.float64)
    for tok in tokens:
        idx = vocab_index.get(tok)
        if idx is not None:
            x[idx] += 1.0
    return x


@dataclass
class ClassifierHead:
    labels: list[str]
    weights: np.ndarray  # (n_labels, vocab)
    bias: np.ndarray  # (n_labels,)

    def scores(self, x: np.ndarray) -> np.ndarray:
        return self.weights @ x + self.bias

    def predict(self, x: np.ndarray) -> str:
        # argmax with ties broken by the lowest label index
        return self.labels[int(np.argmax(self.scores(x)))]

    def distribution(self, x: np.ndarray) -> dict[str, float]:
        s = self.scores(x)
        s = s - s.max()
        e = np.exp(s)
        p = e / e.sum()
        return {lab: float(v) for lab, v in zip(self.labels, p)}


@dataclass
class LinearModel:
    vocabulary: list[str]
    heads: dict[str, ClassifierHead]
    push_weights: np.ndarray  # (vocab + 1, 2), bias row last
    vocab_index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.vocab_index:
            self.vocab_index = {w: i for i, w in enumerate(self.vocabulary)}


def _train_head(
    labels: list[str],
    xs: np.ndarray,
    ys: list[int],
    rng: np.random.Generator,
    epochs: int,
    use_bias: bool,
) -> ClassifierHead:
    """Averaged multi-class perceptron; deterministic given the rng state."""
    n, v = xs.shape
    c = len(labels)
    w = np.zeros((c, v))
    b = np.zeros(c)
    w_sum = np.zeros((c, v))
    b_sum = np.zeros(c)
    for _ in range(epochs):
        order = rng.permutation(n)
        for i in order:
            x = xs[i]
            pred = int(np.argmax(w @ x + b))
            y = ys[i]
            if pred != y:
                w[y] += x
                w[pred] -= x
                if use_bias:
                    b[y] += 1.0
                    b[pred] -= 1.0
            w_sum += w
            b_sum += b
    steps = max(n * epochs, 1)
    return ClassifierHead(labels, w_sum / steps, b_sum / steps)


def train_linear(
    corpus: list[tuple[str, Action]],
    seed: int = 0,
    epochs: int = 10,
    use_bias: bool = True,
) -> LinearModel:
    """Fit all five heads on (text, action) pairs.

    Training is deterministic given corpus order and seed. The corpus must
    cover every action kind and every object class as a target at least once.
    """
    kinds_seen = {a.kind for _, a in corpus}
    for kind in ActionKind:
        if kind not in kinds_seen:
            raise CoverageError(f"insufficient class coverage: no {kind.value} examples")
    targets_seen = {a.target for _, a in corpus}
    for cls in ObjectClass:
        if cls not in targets_seen:
            raise CoverageError(
                f"insufficient class coverage: no examples acting on {cls.value}"
            )

    token_lists = [tokenize(text) for text, _ in corpus]
    vocabulary = sorted({tok for toks in token_lists for tok in toks})
    vocab_index = {w: i for i, w in enumerate(vocabulary)}
    xs = np.stack([count_vector(toks, vocab_index) for toks in token_lists])

    rng = np.random.default_rng(seed)
    heads: dict[str, ClassifierHead] = {}

    kind_ys = [ACTION_LABELS.index(a.kind.value) for _, a in corpus]
    heads["action_type"] = _train_head(ACTION_LABELS, xs, kind_ys, rng, epochs, use_bias)

    obj_ys = [OBJECT_LABELS.index(a.target.value) for _, a in corpus]
    heads["acted_object"] = _train_head(OBJECT_LABELS, xs, obj_ys, rng, epochs, use_bias)

    rot_rows = [i for i, (_, a) in enumerate(corpus) if a.kind == ActionKind.ROTATE]
    rot_ys = [SENSE_LABELS.index(corpus[i][1].sense.value) for i in rot_rows]
    heads["rotate_sense"] = _train_head(
        SENSE_LABELS, xs[rot_rows], rot_ys, rng, epochs, use_bias
    )

    drop_rows = [i for i, (_, a) in enumerate(corpus) if a.kind == ActionKind.DROP]
    drop_ys = [OBJECT_LABELS.index(corpus[i][1].onto.value) for i in drop_rows]
    heads["drop_onto"] = _train_head(
        OBJECT_LABELS, xs[drop_rows], drop_ys, rng, epochs, use_bias
    )

    push_rows = [i for i, (_, a) in enumerate(corpus) if a.kind == ActionKind.PUSH]
    xp = np.concatenate([xs[push_rows], np.ones((len(push_rows), 1))], axis=1)
    yp = np.array(
        [
            (np.cos(corpus[i][1].direction_angle), np.sin(corpus[i][1].direction_angle))
            for i in push_rows
        ]
    )
    push_weights, *_ = np.linalg.lstsq(xp, np.arctanh(np.clip(yp, -0.999, 0.999)), rcond=None)

    return LinearModel(vocabulary, heads, push_weights)


def push_direction(model: LinearModel, x: np.ndarray) -> tuple[float, float]:
    """Raw regression output squashed into [-1, 1] per component."""
    raw = np.concatenate([x, [1.0]]) @ model.push_weights
    out = np.tanh(raw)
    return float(out[0]), float(out[1])


def linear_params_for_kind(
    model: LinearModel, text: str, kind: ActionKind, target: ObjectClass
) -> dict:
    """Evaluate only the parameter head matching `kind` (drop destination is
    forced away from the target so the action stays well-formed)."""
    x = count_vector(tokenize(text), model.vocab_index)
    if kind == ActionKind.PUSH:
        px, py = push_direction(model, x)
        if px == 0.0 and py == 0.0:
            return {"direction_angle": 0.0, "push_confidence": 0.0}
        return {
            "direction_angle": angle_from_xy(px, py),
            "push_confidence": min(1.0, float(np.hypot(px, py))),
        }
    if kind == ActionKind.ROTATE:
        return {"sense": RotateSense(model.heads["rotate_sense"].predict(x))}
    if kind == ActionKind.DROP:
        head = model.heads["drop_onto"]
        scores = head.scores(x)
        order = np.argsort(-scores, kind="stable")
        for idx in order:
            cls = ObjectClass(head.labels[int(idx)])
            if cls != target:
                return {"onto": cls}
    return {}


def parse_linear(model: LinearModel, text: str) -> ParseOutcome:
    """Classify action type, then acted object, then the matching parameter
    head only."""
    tokens = tokenize(text)
    x = count_vector(tokens, model.vocab_index)
    kind = ActionKind(model.heads["action_type"].predict(x))
    target = ObjectClass(model.heads["acted_object"].predict(x))
    confidences = {
        "action_type": model.heads["action_type"].distribution(x),
        "acted_object": model.heads["acted_object"].distribution(x),
    }
    push_confidence: float | None = None
    params = linear_params_for_kind(model, text, kind, target)
    if kind == ActionKind.PUSH:
        action = Action.push(target, params["direction_angle"])
        push_confidence = params["push_confidence"]
    elif kind == ActionKind.ROTATE:
        action = Action.rotate(target, params["sense"])
        confidences["rotate_sense"] = model.heads["rotate_sense"].distribution(x)
    elif kind == ActionKind.DROP:
        action = Action.drop(target, params["onto"])
        confidences["drop_onto"] = model.heads["drop_onto"].distribution(x)
    else:
        action = Action.remove(target)
    return ParseOutcome(action, confidences, push_confidence, "linear")


# ------------------------------------------------------------ serialization

def encode_model(model: LinearModel) -> dict:
    return {
        "vocabulary": model.vocabulary,
        "heads": {
            name: {
                "labels": head.labels,
                "weights": [list(map(float, row)) for row in head.weights],
                "bias": list(map(float, head.bias)),
            }
            for name, head in model.heads.items()
        },
        "push_weights": [list(map(float, row)) for row in model.push_weights],
    }


def decode_model(doc: dict) -> LinearModel:
    heads = {
        name: ClassifierHead(
            list(h["labels"]),
            np.array(h["weights"], dtype=np.float64),
            np.array(h["bias"], dtype=np.float64),
        )
        for name, h in doc["heads"].items()
    }
    return LinearModel(
        list(doc["vocabulary"]), heads, np.array(doc["push_weights"], dtype=np.float64)
    )
