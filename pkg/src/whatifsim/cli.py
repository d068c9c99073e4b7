"""Command-line entry point. Thin dispatch onto the library; every workflow
is reproducible from its flags plus --seed.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
Errors are written to stderr as one JSON object per failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core.serialize import (
    SchemaError,
    decode_action,
    decode_scene,
    dumps,
    encode_action,
    encode_trajectory,
    loads,
)
from .core.validate import validate_scene
from .parsing.linear import CoverageError
from .parsing.rules import ParseError
from .pipeline import (
    ModelBundle,
    PipelineError,
    ablation_sweep,
    answer_whatif,
    fit_models,
    format_ablation_table,
    parse_text,
    run_eval,
    AblationConfig,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        _fail(message, stage="usage")
        raise SystemExit(EXIT_USAGE)


def _fail(message: str, stage: str | None = None) -> None:
    doc = {"error": message}
    if stage:
        doc["stage"] = stage
    print(json.dumps(doc), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="whatifsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-dataset", help="generate a synthetic dataset")
    p.add_argument("--batches", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fit", help="train parser heads, pose stats, thresholds")
    p.add_argument("--data", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("parse", help="parse an action description")
    p.add_argument("--models")
    p.add_argument("--backend", choices=["rules", "linear"], default="rules")
    p.add_argument("text")

    p = sub.add_parser("simulate", help="simulate an action on a scene file")
    p.add_argument("--scene", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("answer", help="answer a hypothetical action question")
    p.add_argument("--models")
    p.add_argument("--backend", choices=["rules", "linear"], default="rules")
    p.add_argument("--scene", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("text")

    p = sub.add_parser("evaluate", help="evaluate on a dataset's test split")
    p.add_argument("--models", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--ablation", choices=["sweep", "none"], default="none")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--models")
    p.add_argument("--addr", default="127.0.0.1:8000")
    p.add_argument("--store", help="directory for scene persistence (in-memory if omitted)")

    return parser


def _cmd_gen_dataset(args) -> int:
    from .datagen import gen_dataset, write_dataset

    examples = gen_dataset(args.batches, args.seed)
    write_dataset(args.out, examples, args.seed)
    print(json.dumps({"examples": len(examples), "batches": args.batches, "out": args.out}))
    return EXIT_OK


def _cmd_fit(args) -> int:
    from .datagen import load_dataset, split

    dataset = load_dataset(args.data)
    if not dataset:
        _fail(f"no dataset found under {args.data}", stage="fit")
        return EXIT_DATA
    train, _ = split(dataset)
    models = fit_models(train, seed=args.seed)
    models.save(args.out)
    print(
        json.dumps(
            {
                "train_examples": len(train),
                "vocabulary": len(models.parser.vocabulary),
                "tau_t": models.thresholds.tau_t,
                "tau_r": models.thresholds.tau_r,
                "threshold_accuracy": models.threshold_accuracy,
                "out": args.out,
            }
        )
    )
    return EXIT_OK


def _load_models(path: str | None) -> ModelBundle | None:
    return ModelBundle.load(path) if path else None


def _cmd_parse(args) -> int:
    models = _load_models(args.models)
    outcome = parse_text(args.text, args.backend, models)
    print(dumps(encode_action(outcome.action)))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    from .physics.engine import simulate

    scene = decode_scene(loads(Path(args.scene).read_text(encoding="utf-8")))
    violations = validate_scene(scene)
    if violations:
        _fail("; ".join(violations), stage="validate")
        return EXIT_DATA
    action = decode_action(loads(Path(args.action).read_text(encoding="utf-8")))
    result = simulate(scene, action, args.seed)
    doc = {
        "trajectories": [encode_trajectory(t) for t in result.trajectories.values()],
        "contacts": [
            {
                "t": ev.t,
                "a": ev.a.value,
                "b": ev.b if isinstance(ev.b, str) else ev.b.value,
                "impulse": ev.impulse_magnitude,
            }
            for ev in result.contacts
        ],
    }
    Path(args.out).write_text(dumps(doc), encoding="utf-8")
    print(json.dumps({"out": args.out, "contacts": len(result.contacts)}))
    return EXIT_OK


def _cmd_answer(args) -> int:
    scene = decode_scene(loads(Path(args.scene).read_text(encoding="utf-8")))
    models = _load_models(args.models)
    answer = answer_whatif(scene, args.text, models, backend=args.backend, seed=args.seed)
    doc = {
        "scene_id": answer.scene_id,
        "action_text": answer.action_text,
        "action": encode_action(answer.action),
        "descriptions": [
            {"subject": cls.value, "text": text, "event": answer.events[cls].kind.value}
            for cls, text in sorted(answer.descriptions.items())
        ],
    }
    print(dumps(doc))
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    from .datagen import load_dataset, split

    dataset = load_dataset(args.data)
    if not dataset:
        _fail(f"no dataset found under {args.data}", stage="evaluate")
        return EXIT_DATA
    _, test = split(dataset)
    models = ModelBundle.load(args.models)
    if args.ablation == "sweep":
        rows = ablation_sweep(test, models, seed=args.seed)
        table = format_ablation_table(rows)
        doc = {name: report.as_table_row() for name, report in rows}
        Path(args.out).write_text(json.dumps(doc, indent=1), encoding="utf-8")
        print(table)
    else:
        report = run_eval(test, AblationConfig(), models, seed=args.seed)
        Path(args.out).write_text(
            json.dumps(report.as_table_row(), indent=1), encoding="utf-8"
        )
        print(json.dumps(report.as_table_row()))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    host, _, port = args.addr.rpartition(":")
    app = create_app(models=_load_models(args.models), store_dir=args.store)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


_COMMANDS = {
    "gen-dataset": _cmd_gen_dataset,
    "fit": _cmd_fit,
    "parse": _cmd_parse,
    "simulate": _cmd_simulate,
    "answer": _cmd_answer,
    "evaluate": _cmd_evaluate,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (SchemaError, ParseError, CoverageError, ValueError) as exc:
        _fail(str(exc), stage="data")
        return EXIT_DATA
    except PipelineError as exc:
        _fail(str(exc), stage=exc.stage)
        return EXIT_DATA
    except FileNotFoundError as exc:
        _fail(str(exc), stage="data")
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        _fail(f"{type(exc).__name__}: {exc}", stage="internal")
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
