import pytest

from rerrfact.classifier import ClassifierConfig, train
from rerrfact.corpus import load_claims, load_corpus
from rerrfact.pipeline import (
    RationaleMode,
    StageScorers,
    build_abstract_training_set,
    build_rationale_training_set,
    build_stance_training_sets,
)
from rerrfact.representation import ReprKind, ReprStrategy
from rerrfact.retrieval import build_index
from rerrfact.scoring import ModelScorer
from rerrfact.synthetic import write_synthetic_dataset


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("dataset")
    write_synthetic_dataset(directory)
    return directory


@pytest.fixture(scope="session")
def dataset(dataset_dir):
    corpus = load_corpus(dataset_dir / "corpus.jsonl")
    claims = load_claims(dataset_dir / "claims.jsonl", corpus)
    return corpus, claims


@pytest.fixture(scope="session")
def index(dataset):
    corpus, _ = dataset
    return build_index(corpus)


@pytest.fixture(scope="session")
def strategy():
    return ReprStrategy(ReprKind.REDUCED)


@pytest.fixture(scope="session")
def trained_scorers(dataset, index, strategy):
    """All four stage models trained once at default settings (seed 0)."""
    corpus, claims = dataset
    abstract_model = train(
        build_abstract_training_set(claims, corpus, index, strategy),
        ClassifierConfig(epochs=10, batch_size=1),
    )
    abstract = ModelScorer(abstract_model)
    rationale_model = train(
        build_rationale_training_set(
            RationaleMode.LOOSE_COUPLING, claims, corpus, index, strategy, abstract
        ),
        ClassifierConfig(epochs=10, batch_size=1),
    )
    rationale = ModelScorer(rationale_model)
    sets = build_stance_training_sets(claims, corpus, index, rationale)
    noinfo = ModelScorer(train(sets.noinfo, ClassifierConfig(epochs=30, batch_size=1)))
    sr = ModelScorer(train(sets.supports_refutes, ClassifierConfig(epochs=30, batch_size=1)))
    return StageScorers(abstract=abstract, rationale=rationale, stance_noinfo=noinfo, stance_sr=sr)
