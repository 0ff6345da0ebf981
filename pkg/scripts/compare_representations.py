#!/usr/bin/env python3
"""Compare the four context-building strategies on the synthetic dataset.

Trains one abstract-stage classifier per strategy and reports retrieval
precision/recall/F1 over gold (claim, abstract) pairs.

Usage: python scripts/compare_representations.py [--seed N] [--epochs N]
"""

import argparse
import sys
from pathlib import Path
from tempfile import mkdtemp

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from rerrfact.classifier import ClassifierConfig, train
from rerrfact.corpus import load_claims, load_corpus
from rerrfact.evaluation import f1, format_percent
from rerrfact.pipeline import build_abstract_training_set, retrieve_abstracts
from rerrfact.representation import ReprKind, ReprStrategy, learn_position_table
from rerrfact.retrieval import build_index
from rerrfact.scoring import ModelScorer
from rerrfact.synthetic import write_synthetic_dataset


def retrieval_scores(claims, corpus, index, scorer, strategy):
    correct = predicted = gold = 0
    for claim in claims:
        retrieved = set(retrieve_abstracts(claim.text, corpus, index, scorer, strategy))
        gold_docs = set(claim.evidence_doc_ids)
        correct += len(retrieved & gold_docs)
        predicted += len(retrieved)
        gold += len(gold_docs)
    p = correct / predicted if predicted else 0.0
    r = correct / gold if gold else 0.0
    return p, r, f1(p, r)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epochs", type=int, default=10)
    args = parser.parse_args()

    workdir = mkdtemp(prefix="rerrfact_repr_")
    corpus_path, claims_path = write_synthetic_dataset(workdir)
    corpus = load_corpus(corpus_path)
    claims = load_claims(claims_path, corpus)
    index = build_index(corpus)
    table = learn_position_table(claims, corpus)

    print(f"{'strategy':<10} {'P':>8} {'R':>8} {'F1':>8}")
    for kind in (ReprKind.TOTAL, ReprKind.DIFF5, ReprKind.DIFF3, ReprKind.REDUCED):
        strategy = ReprStrategy(kind, table if kind in (ReprKind.DIFF5, ReprKind.DIFF3) else None)
        pairs = build_abstract_training_set(claims, corpus, index, strategy)
        model = train(
            pairs, ClassifierConfig(epochs=args.epochs, batch_size=1, seed=args.seed)
        )
        p, r, score = retrieval_scores(claims, corpus, index, ModelScorer(model), strategy)
        print(
            f"{kind.value:<10} {format_percent(p):>8} {format_percent(r):>8} "
            f"{format_percent(score):>8}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
