"""Modular scientific claim verification: retrieval, rationale selection, stance."""

from .classifier import ClassifierConfig, ClassifierModel, LabeledPair, decide, train
from .corpus import (
    AbstractDoc,
    Claim,
    Corpus,
    DataError,
    DatasetSplit,
    GoldEvidence,
    GoldRationale,
    Label,
    load_claims,
    load_corpus,
    save_claims,
    save_corpus,
    split_claims,
)
from .evaluation import CountTable, MetricFamily, MetricReport, evaluate, f1, render_report
from .pipeline import (
    ClaimPrediction,
    PipelineSettings,
    PredictedEvidence,
    RationaleMode,
    StageScorers,
    predict_stance,
    predict_stance_multiclass,
    retrieve_abstracts,
    run_pipeline,
    select_rationales,
)
from .representation import (
    ReprKind,
    ReprStrategy,
    SizeGroup,
    SizeGroupTable,
    build_context,
    learn_position_table,
    reduced_indices,
    size_group,
)
from .retrieval import RankedAbstract, TfIdfIndex, build_index, top_k

__version__ = "0.1.0"
