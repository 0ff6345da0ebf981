"""Command-line driver: validate, build-index, train, predict, evaluate, report.

Exit codes: 0 success, 1 validation/data error, 2 usage error, 3 scorer
protocol error. All knobs live in one JSON config; every leaf is overridable
with a flag of the same dotted name (e.g. ``--retrieval.k 50``). Timestamps
never enter model or prediction files, only ``*.meta.json`` sidecars, so
reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from pathlib import Path

from . import classifier, pipeline, representation, retrieval
from .classifier import ClassifierConfig
from .config import RunConfig, UsageError, apply_overrides, iter_leaves, load_config
from .corpus import Corpus, DataError, load_claims, load_corpus
from .evaluation import evaluate, load_metrics, render_report, save_metrics
from .pipeline import (
    PipelineSettings,
    RationaleMode,
    StageScorers,
    build_abstract_training_set,
    build_rationale_training_set,
    build_stance_training_sets,
    load_predictions,
    run_pipeline,
    save_predictions,
)
from .remote import ScorerProtocolError
from .representation import ReprKind, ReprStrategy
from .scoring import ModelScorer, PairScorer, scorer_from_endpoint
from .synthetic import write_synthetic_dataset

INDEX_FILE = "tfidf_index.json"
POSITION_TABLE_FILE = "position_table.json"
MODEL_FILES = {
    "abstract": "abstract.model.json",
    "rationale": "rationale.model.json",
    "stance_noinfo": "stance_noinfo.model.json",
    "stance_sr": "stance_sr.model.json",
    "multiclass": "stance_multiclass.model.json",
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    for dotted, _ in iter_leaves():
        parser.add_argument(f"--{dotted}", dest=dotted, metavar="VALUE", help=argparse.SUPPRESS)


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    raw = vars(args)
    overrides = {
        dotted: raw[dotted] for dotted, _ in iter_leaves() if raw.get(dotted) is not None
    }
    return apply_overrides(config, overrides)


def _require_file(path: str | None, what: str) -> Path:
    if not path:
        raise UsageError(f"{what} path is not configured")
    resolved = Path(path)
    if not resolved.exists():
        raise UsageError(f"{what} path does not exist: {resolved}")
    return resolved


def _load_dataset(config: RunConfig) -> tuple[Corpus, list]:
    corpus = load_corpus(_require_file(config.paths.corpus, "corpus"))
    claims = load_claims(_require_file(config.paths.claims, "claims"), corpus)
    return corpus, claims


def _write_meta(path: Path, config: RunConfig, extra: dict | None = None) -> None:
    payload = {
        "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": config.to_dict(),
    }
    if extra:
        payload.update(extra)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _get_index(config: RunConfig, corpus: Corpus) -> retrieval.TfIdfIndex:
    index_path = Path(config.paths.model_dir) / INDEX_FILE
    if index_path.exists():
        index = retrieval.load_index(index_path)
        if index.fields == config.retrieval.fields:
            return index
    return retrieval.build_index(corpus, config.retrieval.fields)


def _strategy(
    config: RunConfig,
    corpus: Corpus,
    claims: list | None = None,
    learn_table: bool = False,
) -> ReprStrategy:
    try:
        kind = ReprKind(config.representation.strategy)
    except ValueError:
        raise UsageError(
            f"unknown representation strategy {config.representation.strategy!r}"
        ) from None
    if kind not in (ReprKind.DIFF5, ReprKind.DIFF3):
        return ReprStrategy(kind)
    table_path = Path(config.paths.model_dir) / POSITION_TABLE_FILE
    if learn_table:
        if claims is None:
            raise UsageError("learning a position table requires training claims")
        table = representation.learn_position_table(claims, corpus)
        table_path.parent.mkdir(parents=True, exist_ok=True)
        representation.save_position_table(table, table_path)
    else:
        if not table_path.exists():
            raise UsageError(
                f"{kind.value} strategy needs a learned position table; "
                f"run 'train --stage abstract' first (missing {table_path})"
            )
        table = representation.load_position_table(table_path)
    return ReprStrategy(kind, table)


def _classifier_config(params, config: RunConfig, threshold: float) -> ClassifierConfig:
    return ClassifierConfig(
        epochs=params.epochs,
        batch_size=params.batch_size,
        learning_rate=params.learning_rate,
        l2=params.l2,
        hash_dims=params.hash_dims,
        seed=config.seed,
        threshold=threshold,
    )


def _stage_scorer(config: RunConfig, stage: str, required_by: str) -> PairScorer:
    """Endpoint if configured (env wins), else the stage's trained model file."""
    endpoint = config.scorer_endpoint(stage)
    if endpoint:
        return scorer_from_endpoint(endpoint, stage, config.scorers.timeout)
    model_path = Path(config.paths.model_dir) / MODEL_FILES[stage]
    if not model_path.exists():
        raise UsageError(
            f"{required_by} needs the {stage} stage, but no scorer endpoint is "
            f"configured and {model_path} does not exist"
        )
    return ModelScorer(classifier.load_model(model_path))


def cmd_validate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    corpus, claims = _load_dataset(config)
    evidence_pairs = sum(len(claim.evidence) for claim in claims)
    print(f"{len(corpus)} docs, {len(claims)} claims, {evidence_pairs} evidence pairs")
    return 0


def cmd_build_index(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    corpus = load_corpus(_require_file(config.paths.corpus, "corpus"))
    index = retrieval.build_index(corpus, config.retrieval.fields)
    model_dir = Path(config.paths.model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    retrieval.save_index(index, model_dir / INDEX_FILE)
    print(f"indexed {index.doc_count} docs, vocabulary {len(index.vocabulary)} terms")
    return 0


def _save_model(model, name: str, config: RunConfig) -> Path:
    model_dir = Path(config.paths.model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    path = model_dir / MODEL_FILES[name]
    classifier.save_model(model, path)
    _write_meta(path.with_suffix(".meta.json"), config, {"stage": name})
    return path


def cmd_train(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    if args.mode:
        config = apply_overrides(config, {"rationale.mode": args.mode})
    corpus, claims = _load_dataset(config)
    index = _get_index(config, corpus)
    k = config.retrieval.k

    if args.stage == "abstract":
        strategy = _strategy(config, corpus, claims, learn_table=True)
        pairs = build_abstract_training_set(
            claims, corpus, index, strategy, k, config.abstract.neg_per_claim
        )
        model = classifier.train(
            pairs,
            _classifier_config(config.classifiers.abstract, config, config.thresholds.abstract),
        )
        path = _save_model(model, "abstract", config)
        print(f"trained abstract model on {len(pairs)} pairs -> {path}")
        return 0

    if args.stage == "rationale":
        try:
            mode = RationaleMode(config.rationale.mode)
        except ValueError:
            raise UsageError(f"unknown rationale mode {config.rationale.mode!r}") from None
        abstract_scorer = None
        strategy = None
        if mode is RationaleMode.LOOSE_COUPLING:
            strategy = _strategy(config, corpus)
            abstract_scorer = _stage_scorer(config, "abstract", "loose-coupling training")
        pairs = build_rationale_training_set(
            mode,
            claims,
            corpus,
            index,
            strategy,
            abstract_scorer,
            k,
            config.thresholds.abstract,
            config.rationale.tfidf_negatives,
        )
        model = classifier.train(
            pairs,
            _classifier_config(config.classifiers.rationale, config, config.thresholds.rationale),
        )
        path = _save_model(model, "rationale", config)
        print(f"trained rationale model ({mode.value}) on {len(pairs)} pairs -> {path}")
        return 0

    if args.stage == "stance":
        rationale_scorer = _stage_scorer(config, "rationale", "stance training")
        sets = build_stance_training_sets(
            claims,
            corpus,
            index,
            rationale_scorer,
            config.thresholds.rationale,
            k,
            config.stance.negatives_per_claim,
        )
        if config.stance.mode == pipeline.STANCE_MULTICLASS:
            model = classifier.train(
                sets.multiclass,
                _classifier_config(config.classifiers.multiclass, config, 0.5),
            )
            path = _save_model(model, "multiclass", config)
            print(f"trained multiclass stance model on {len(sets.multiclass)} pairs -> {path}")
            return 0
        noinfo = classifier.train(
            sets.noinfo,
            _classifier_config(
                config.classifiers.stance_noinfo, config, config.thresholds.stance_noinfo
            ),
        )
        sr = classifier.train(
            sets.supports_refutes,
            _classifier_config(config.classifiers.stance_sr, config, config.thresholds.stance_sr),
        )
        noinfo_path = _save_model(noinfo, "stance_noinfo", config)
        sr_path = _save_model(sr, "stance_sr", config)
        print(
            f"trained stance models on {len(sets.noinfo)} has-info pairs and "
            f"{len(sets.supports_refutes)} direction pairs -> {noinfo_path}, {sr_path}"
        )
        return 0

    raise UsageError(f"unknown training stage {args.stage!r}")


def cmd_predict(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    corpus, claims = _load_dataset(config)
    index = _get_index(config, corpus)
    strategy = _strategy(config, corpus)

    scorers = StageScorers(
        abstract=_stage_scorer(config, "abstract", "predict"),
        rationale=_stage_scorer(config, "rationale", "predict"),
    )
    if config.stance.mode == pipeline.STANCE_MULTICLASS:
        model_path = Path(config.paths.model_dir) / MODEL_FILES["multiclass"]
        if not model_path.exists():
            raise UsageError(f"multiclass stance mode needs {model_path}")
        scorers.multiclass_model = classifier.load_model(model_path)
    else:
        scorers.stance_noinfo = _stage_scorer(config, "stance_noinfo", "predict")
        scorers.stance_sr = _stage_scorer(config, "stance_sr", "predict")

    settings = PipelineSettings(
        k=config.retrieval.k,
        abstract_threshold=config.thresholds.abstract,
        rationale_threshold=config.thresholds.rationale,
        noinfo_threshold=config.thresholds.stance_noinfo,
        sr_threshold=config.thresholds.stance_sr,
        stance_mode=config.stance.mode,
        max_abstracts=config.abstract.max_abstracts,
        max_rationales=config.rationale.max_rationales,
        workers=config.workers or os.cpu_count() or 1,
    )
    trace: list[dict] | None = [] if args.emit_intermediate else None
    predictions = run_pipeline(claims, corpus, index, scorers, strategy, settings, trace)

    output_dir = Path(config.paths.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    predictions_path = output_dir / "predictions.jsonl"
    save_predictions(predictions, predictions_path)
    _write_meta(output_dir / "predictions.meta.json", config)
    if trace is not None:
        with open(output_dir / "retrieved.jsonl", "w", encoding="utf-8") as handle:
            for record in trace:
                handle.write(
                    json.dumps(
                        {"id": record["claim_id"], "retrieved": record.get("retrieved", [])}
                    )
                    + "\n"
                )
        with open(output_dir / "rationales.jsonl", "w", encoding="utf-8") as handle:
            for record in trace:
                handle.write(
                    json.dumps(
                        {"id": record["claim_id"], "rationales": record.get("rationales", [])}
                    )
                    + "\n"
                )
    emitted = sum(len(p.evidence) for p in predictions)
    print(f"wrote {len(predictions)} predictions ({emitted} evidence entries) -> {predictions_path}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    corpus, claims = _load_dataset(config)
    predictions = load_predictions(_require_file(args.predictions, "predictions"))
    report = evaluate(claims, predictions, args.rationale_truncation, corpus)
    output_dir = Path(config.paths.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    save_metrics(report, output_dir / "metrics.json")
    table = render_report({args.system_name: report})
    (output_dir / "report.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    reports = {}
    for entry in args.metrics:
        name, _, path = entry.partition("=")
        if not name or not path:
            raise UsageError(f"report entries look like NAME=metrics.json, got {entry!r}")
        reports[name] = load_metrics(_require_file(path, f"metrics for {name}"))
    table = render_report(reports)
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def cmd_make_dataset(args: argparse.Namespace) -> int:
    corpus_path, claims_path = write_synthetic_dataset(args.directory)
    print(f"wrote {corpus_path} and {claims_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rerrfact",
        description="Claim verification pipeline: retrieval, rationale selection, stance.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="load and validate corpus and claims")
    p_validate.set_defaults(func=cmd_validate)

    p_index = sub.add_parser("build-index", help="build and persist the TF-IDF index")
    p_index.set_defaults(func=cmd_build_index)

    p_train = sub.add_parser("train", help="train one pipeline stage")
    p_train.add_argument("--stage", required=True, choices=("abstract", "rationale", "stance"))
    p_train.add_argument(
        "--mode",
        choices=[mode.value for mode in RationaleMode],
        help="rationale training regime (stage=rationale)",
    )
    p_train.set_defaults(func=cmd_train)

    p_predict = sub.add_parser("predict", help="run the three-stage pipeline")
    p_predict.add_argument(
        "--emit-intermediate",
        action="store_true",
        help="also dump retrieved abstracts and rationale scores",
    )
    p_predict.set_defaults(func=cmd_predict)

    p_eval = sub.add_parser("evaluate", help="score predictions against gold claims")
    p_eval.add_argument("--predictions", required=True, metavar="PATH")
    p_eval.add_argument("--rationale-truncation", type=int, default=3)
    p_eval.add_argument("--system-name", default="rerrfact")
    p_eval.set_defaults(func=cmd_evaluate)

    p_report = sub.add_parser("report", help="render a comparison table from metrics files")
    p_report.add_argument("metrics", nargs="+", metavar="NAME=METRICS_JSON")
    p_report.add_argument("--out", metavar="PATH")
    p_report.set_defaults(func=cmd_report)

    p_dataset = sub.add_parser("make-dataset", help="write the synthetic demo dataset")
    p_dataset.add_argument("directory")
    p_dataset.set_defaults(func=cmd_make_dataset)

    for sub_parser in (p_validate, p_index, p_train, p_predict, p_eval):
        _add_config_flags(sub_parser)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ScorerProtocolError as exc:
        print(f"scorer protocol error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse usage failures
        return int(exc.code or 0)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
