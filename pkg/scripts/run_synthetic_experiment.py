#!/usr/bin/env python3
"""Train the full pipeline on the bundled synthetic dataset and print metrics.

Usage: python scripts/run_synthetic_experiment.py [--workdir DIR] [--seed N]
"""

import argparse
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from rerrfact.classifier import ClassifierConfig, train
from rerrfact.corpus import load_claims, load_corpus
from rerrfact.evaluation import evaluate, render_report
from rerrfact.pipeline import (
    PipelineSettings,
    RationaleMode,
    StageScorers,
    build_abstract_training_set,
    build_rationale_training_set,
    build_stance_training_sets,
    run_pipeline,
)
from rerrfact.representation import ReprKind, ReprStrategy
from rerrfact.retrieval import build_index
from rerrfact.scoring import ModelScorer
from rerrfact.synthetic import write_synthetic_dataset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default=None, help="where to write the dataset")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    workdir = Path(args.workdir) if args.workdir else Path(tempfile.mkdtemp(prefix="rerrfact_"))
    corpus_path, claims_path = write_synthetic_dataset(workdir)
    corpus = load_corpus(corpus_path)
    claims = load_claims(claims_path, corpus)
    index = build_index(corpus)
    strategy = ReprStrategy(ReprKind.REDUCED)
    print(f"dataset: {len(corpus)} docs, {len(claims)} claims ({workdir})")

    abstract = ModelScorer(
        train(
            build_abstract_training_set(claims, corpus, index, strategy),
            ClassifierConfig(epochs=10, batch_size=1, seed=args.seed),
        )
    )
    rationale = ModelScorer(
        train(
            build_rationale_training_set(
                RationaleMode.LOOSE_COUPLING, claims, corpus, index, strategy, abstract
            ),
            ClassifierConfig(epochs=10, batch_size=1, seed=args.seed),
        )
    )
    sets = build_stance_training_sets(claims, corpus, index, rationale)
    scorers = StageScorers(
        abstract=abstract,
        rationale=rationale,
        stance_noinfo=ModelScorer(
            train(sets.noinfo, ClassifierConfig(epochs=30, batch_size=1, seed=args.seed))
        ),
        stance_sr=ModelScorer(
            train(sets.supports_refutes, ClassifierConfig(epochs=30, batch_size=1, seed=args.seed))
        ),
    )

    predictions = run_pipeline(claims, corpus, index, scorers, strategy, PipelineSettings())
    metrics = evaluate(claims, predictions, corpus=corpus)
    print()
    print(render_report({"synthetic": metrics}), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
