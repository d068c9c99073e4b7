"""End-to-end orchestration: parse, simulate, describe; model fitting; corpus
evaluation with the ground-truth-substitution ablation harness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .core.catalog import ObjectClass
from .core.serialize import encode_action
from .core.types import Action, ActionKind, Example, Scene
from .describer import Event, extract_events, realize
from .effects import (
    PoseStats,
    Thresholds,
    decode_stats,
    encode_stats,
    grid_search,
    pose_moments,
    summarize_moments,
    truth_affected,
)
from .metrics import EvalReport, evaluate_corpus
from .parsing.linear import (
    LinearModel,
    decode_model,
    encode_model,
    linear_params_for_kind,
    parse_linear,
    train_linear,
)
from .parsing.rules import ParseError, ParseOutcome, compass_bucket, parse_rules
from .physics.engine import (
    DEFAULT_PARAMS,
    EngineParams,
    SimulationDiverged,
    SimulationResult,
    UnknownActionTarget,
    simulate,
)


class PipelineError(RuntimeError):
    """A pipeline failure, tagged with the stage that raised it."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(message)


@dataclass
class ModelBundle:
    """Everything the learned pipeline needs: the linear parser plus the
    trajectory statistics and movement thresholds."""

    parser: LinearModel
    stats: PoseStats
    thresholds: Thresholds
    threshold_accuracy: float = 0.0

    def save(self, directory: str | Path) -> None:
        root = Path(directory)
        root.mkdir(parents=True, exist_ok=True)
        (root / "parser.json").write_text(
            json.dumps(encode_model(self.parser), indent=1), encoding="utf-8"
        )
        doc = encode_stats(self.stats, self.thresholds)
        doc["threshold_accuracy"] = self.threshold_accuracy
        (root / "effects.json").write_text(json.dumps(doc, indent=1), encoding="utf-8")

    @staticmethod
    def load(directory: str | Path) -> "ModelBundle":
        root = Path(directory)
        parser = decode_model(json.loads((root / "parser.json").read_text(encoding="utf-8")))
        doc = json.loads((root / "effects.json").read_text(encoding="utf-8"))
        stats, thresholds = decode_stats(doc)
        return ModelBundle(parser, stats, thresholds, float(doc.get("threshold_accuracy", 0.0)))


@dataclass(frozen=True)
class AblationConfig:
    true_action_type: bool = False
    true_acted_object: bool = False
    true_action_params: bool = False
    true_trajectories: bool = False
    true_affected: bool = False


#: The cumulative sweep rows, in ablation-table order.
SWEEP_ROWS: tuple[tuple[str, AblationConfig], ...] = (
    ("all_predictions", AblationConfig()),
    ("true_action_type", AblationConfig(True)),
    ("true_acted_object", AblationConfig(True, True)),
    ("true_action_params", AblationConfig(True, True, True)),
    ("true_trajectories", AblationConfig(True, True, True, True)),
    ("true_affected", AblationConfig(True, True, True, True, True)),
)


@dataclass
class WhatIfAnswer:
    scene_id: str
    action_text: str
    action: Action
    backend: str
    descriptions: dict[ObjectClass, str]
    events: dict[ObjectClass, Event]
    result: SimulationResult


def fit_models(
    train_set: list[Example],
    seed: int = 0,
    params: EngineParams = DEFAULT_PARAMS,
) -> ModelBundle:
    """Train the linear parser heads, fit pose statistics over re-simulated
    training trajectories, and grid-search the movement thresholds against
    the stored ground-truth labels."""
    corpus = [(ex.action_text, ex.action) for ex in train_set]
    parser = train_linear(corpus, seed=seed)

    all_moments = []  # (moments, label or None)
    for ex in train_set:
        result = simulate(ex.scene, ex.action, seed, params)
        for cls, traj in result.trajectories.items():
            if traj.removed:
                continue
            all_moments.append((pose_moments(traj), ex.affected_labels.get(cls)))

    # Pose statistics pool every trajectory; thresholds train only on the
    # labeled (non-target) ones.
    stats = _stats_from_moments([m for m, _ in all_moments])
    labeled = [
        (summarize_moments(m, stats), label)
        for m, label in all_moments
        if label is not None
    ]
    search = grid_search(labeled)
    return ModelBundle(parser, stats, search.thresholds, search.accuracy)


def _stats_from_moments(moments) -> PoseStats:
    import numpy as np

    n_total = 0
    mean = np.zeros(12)
    m2 = np.zeros(12)
    for mom in moments:
        nb = mom.n
        mb = np.asarray(mom.mean)
        m2b = np.asarray(mom.var) * nb
        if n_total == 0:
            n_total, mean, m2 = nb, mb.copy(), m2b.copy()
        else:
            delta = mb - mean
            na = n_total
            n_total = na + nb
            mean = mean + delta * (nb / n_total)
            m2 = m2 + m2b + delta * delta * (na * nb / n_total)
    if n_total == 0:
        raise ValueError("no training data: cannot fit pose statistics")
    var = m2 / n_total
    std = np.sqrt(np.maximum(var, 0.0))
    std[var < 1e-18] = 1.0
    return PoseStats(tuple(float(v) for v in mean), tuple(float(v) for v in std))


def parse_text(
    text: str,
    backend: str = "rules",
    models: ModelBundle | None = None,
    scene: Scene | None = None,
) -> ParseOutcome:
    if backend == "rules":
        return parse_rules(text, scene)
    if backend == "linear":
        if models is None:
            raise PipelineError("parse", "linear backend requires trained models")
        return parse_linear(models.parser, text)
    raise PipelineError("parse", f"unknown parser backend {backend!r}")


def answer_whatif(
    scene: Scene,
    action_text: str,
    models: ModelBundle | None = None,
    backend: str = "rules",
    seed: int = 0,
    params: EngineParams = DEFAULT_PARAMS,
) -> WhatIfAnswer:
    """Parse, simulate, and describe. Failures carry the stage that failed.

    With fitted models the affected decision uses the learned thresholds;
    without them it falls back to the raw ground-truth motion rule.
    """
    try:
        outcome = parse_text(action_text, backend, models, scene)
    except PipelineError:
        raise
    except ParseError as exc:
        raise PipelineError("parse", str(exc)) from exc
    action = outcome.action
    try:
        result = simulate(scene, action, seed, params)
    except (SimulationDiverged, UnknownActionTarget) as exc:
        raise PipelineError("simulate", str(exc)) from exc
    if models is not None:
        events = extract_events(result, action, scene, models.stats, models.thresholds)
    else:
        affected = {
            cls: truth_affected(traj)
            for cls, traj in result.trajectories.items()
            if cls != action.target and not traj.removed
        }
        events = extract_events(result, action, scene, affected=affected)
    descriptions = {cls: realize(ev) for cls, ev in events.items()}
    return WhatIfAnswer(scene.id, action_text, action, outcome.backend, descriptions, events, result)


def _assemble_action(
    ex: Example,
    parsed: ParseOutcome,
    cfg: AblationConfig,
    models: ModelBundle,
) -> Action:
    """Substitute ground truth into the parsed action per the ablation flags;
    parameters come from the head matching the chosen kind."""
    kind = ex.action.kind if cfg.true_action_type else parsed.action.kind
    target = ex.action.target if cfg.true_acted_object else parsed.action.target
    if cfg.true_action_params and kind == ex.action.kind:
        gt = ex.action
        if kind == ActionKind.PUSH:
            return Action.push(target, gt.direction_angle)
        if kind == ActionKind.ROTATE:
            return Action.rotate(target, gt.sense)
        if kind == ActionKind.DROP:
            onto = gt.onto
            if onto == target:
                onto = next(c for c in ObjectClass if c != target)
            return Action.drop(target, onto)
        return Action.remove(target)
    params = linear_params_for_kind(models.parser, ex.action_text, kind, target)
    if kind == ActionKind.PUSH:
        return Action.push(target, params["direction_angle"])
    if kind == ActionKind.ROTATE:
        return Action.rotate(target, params["sense"])
    if kind == ActionKind.DROP:
        return Action.drop(target, params["onto"])
    return Action.remove(target)


def run_eval(
    test_set: list[Example],
    config: AblationConfig,
    models: ModelBundle,
    seed: int = 0,
    params: EngineParams = DEFAULT_PARAMS,
    _sim_cache: dict | None = None,
) -> EvalReport:
    """Evaluate pipeline predictions against the stored ground-truth
    descriptions, substituting ground truth for the flagged stages."""
    pairs: list[tuple[str, str]] = []
    cache = _sim_cache if _sim_cache is not None else {}
    for ei, ex in enumerate(test_set):
        parsed = parse_linear(models.parser, ex.action_text)
        action = ex.action if cfg_all_action(config) else _assemble_action(ex, parsed, config, models)
        sim_action = ex.action if config.true_trajectories else action
        key = (ei, json.dumps(encode_action(sim_action), sort_keys=True))
        result = cache.get(key)
        if result is None:
            result = simulate(ex.scene, sim_action, seed, params)
            cache[key] = result
        affected = ex.affected_labels if config.true_affected else None
        events = extract_events(
            result,
            sim_action,
            ex.scene,
            models.stats,
            models.thresholds,
            affected=affected,
        )
        predictions = {cls: realize(ev) for cls, ev in events.items()}
        for cls, reference in sorted(ex.gt_descriptions.items()):
            pairs.append((predictions.get(cls, ""), reference))
    return evaluate_corpus(pairs)


def cfg_all_action(config: AblationConfig) -> bool:
    return (
        config.true_action_type
        and config.true_acted_object
        and config.true_action_params
    )


def ablation_sweep(
    test_set: list[Example],
    models: ModelBundle,
    seed: int = 0,
    params: EngineParams = DEFAULT_PARAMS,
) -> list[tuple[str, EvalReport]]:
    """The six-row cumulative substitution table, in fixed row order."""
    cache: dict = {}
    return [
        (name, run_eval(test_set, cfg, models, seed, params, _sim_cache=cache))
        for name, cfg in SWEEP_ROWS
    ]


def component_eval(
    test_set: list[Example],
    models: ModelBundle,
) -> dict[str, dict[str, float]]:
    """Per-head accuracy for both parser backends. Push direction is scored
    after discretizing the angle into the eight compass buckets."""
    counts: dict[str, dict[str, list[int]]] = {
        backend: {
            "action_type": [0, 0],
            "acted_object": [0, 0],
            "push_direction": [0, 0],
            "rotate_sense": [0, 0],
            "drop_onto": [0, 0],
        }
        for backend in ("rules", "linear")
    }
    for ex in test_set:
        for backend in ("rules", "linear"):
            try:
                if backend == "rules":
                    parsed = parse_rules(ex.action_text).action
                else:
                    parsed = parse_linear(models.parser, ex.action_text).action
            except ParseError:
                parsed = None
            gt = ex.action
            _tally(counts[backend]["action_type"], parsed is not None and parsed.kind == gt.kind)
            _tally(counts[backend]["acted_object"], parsed is not None and parsed.target == gt.target)
            if gt.kind == ActionKind.PUSH:
                ok = (
                    parsed is not None
                    and parsed.kind == ActionKind.PUSH
                    and compass_bucket(parsed.direction_angle) == compass_bucket(gt.direction_angle)
                )
                _tally(counts[backend]["push_direction"], ok)
            elif gt.kind == ActionKind.ROTATE:
                ok = parsed is not None and parsed.kind == ActionKind.ROTATE and parsed.sense == gt.sense
                _tally(counts[backend]["rotate_sense"], ok)
            elif gt.kind == ActionKind.DROP:
                ok = parsed is not None and parsed.kind == ActionKind.DROP and parsed.onto == gt.onto
                _tally(counts[backend]["drop_onto"], ok)
    return {
        backend: {
            head: (c[0] / c[1] if c[1] else 1.0) for head, c in heads.items()
        }
        for backend, heads in counts.items()
    }


def _tally(counter: list[int], correct: bool) -> None:
    counter[1] += 1
    if correct:
        counter[0] += 1


def format_ablation_table(rows: list[tuple[str, EvalReport]]) -> str:
    header = f"{'row':24s} {'BLEU':>8s} {'ROUGE':>8s} {'COM':>8s}"
    lines = [header]
    for name, report in rows:
        lines.append(
            f"{name:24s} {report.bleu:8.4f} {report.rouge_l:8.4f} {report.com:8.4f}"
        )
    return "\n".join(lines)
