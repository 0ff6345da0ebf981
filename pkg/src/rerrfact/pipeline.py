"""Three-stage orchestration: abstract retrieval, rationale selection, stance.

Stage 1 filters top-k TF-IDF candidates with a binary (claim, context) scorer.
Stage 2 classifies every sentence of each kept abstract. Stage 3 first gates
out NOINFO evidence, then decides SUPPORTS vs REFUTES; abstracts gated as
NOINFO (or with no selected rationale) are dropped from the prediction.

Predictions JSONL (one claim per line):
  {"id": <claim_id>, "evidence": {"<doc_id>": {"label": "SUPPORT"|"CONTRADICT",
                                               "sentences": [<int>, ...]}}}
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classifier import CLASS_ORDER, ClassifierModel, LabeledPair, decide
from .remote import ScorerProtocolError
from .corpus import (
    AbstractDoc,
    Claim,
    Corpus,
    DataError,
    Label,
    external_label,
    parse_evidence_label,
)
from .representation import ReprStrategy, build_context, reduced_indices
from .retrieval import TfIdfIndex, top_k
from .scoring import PairScorer


class RationaleMode(Enum):
    ORACLE = "oracle"
    ORACLE_PLUS_CITED = "oracle_plus_cited"
    ORACLE_PLUS_CITED_PLUS_TFIDF_NEG = "oracle_plus_cited_plus_tfidf_neg"
    LOOSE_COUPLING = "loose_coupling"


STANCE_TWO_STEP = "two_step"
STANCE_MULTICLASS = "multiclass"


@dataclass(frozen=True)
class PredictedEvidence:
    label: Label
    sentence_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sentence_indices", tuple(int(i) for i in self.sentence_indices))
        if self.label is Label.NOINFO:
            raise DataError("predicted evidence label may not be NOINFO")
        if not self.sentence_indices:
            raise DataError("predicted evidence needs at least one sentence index")
        if len(set(self.sentence_indices)) != len(self.sentence_indices):
            raise DataError(f"duplicate predicted sentence indices {self.sentence_indices}")


@dataclass(frozen=True)
class ClaimPrediction:
    claim_id: int
    evidence: dict[int, PredictedEvidence] = field(default_factory=dict)


def build_abstract_training_set(
    claims: Sequence[Claim],
    corpus: Corpus,
    index: TfIdfIndex,
    strategy: ReprStrategy,
    k: int = 30,
    neg_per_claim: int | None = None,
) -> list[LabeledPair]:
    """Positives from gold-evidence docs, negatives from non-gold top-k candidates.

    Gold docs count as positives even when TF-IDF misses them; negatives are
    capped at neg_per_claim per claim (None keeps every non-gold candidate).
    """
    pairs: list[LabeledPair] = []
    for claim in claims:
        gold_docs = set(claim.evidence_doc_ids)
        for doc_id in claim.evidence_doc_ids:
            pairs.append(LabeledPair(claim.text, build_context(corpus[doc_id], strategy), True))
        negatives = 0
        for candidate in top_k(index, claim.text, k):
            if candidate.doc_id in gold_docs:
                continue
            if neg_per_claim is not None and negatives >= neg_per_claim:
                break
            pairs.append(
                LabeledPair(claim.text, build_context(corpus[candidate.doc_id], strategy), False)
            )
            negatives += 1
    return pairs


def score_candidates(
    claim_text: str,
    corpus: Corpus,
    index: TfIdfIndex,
    scorer: PairScorer,
    strategy: ReprStrategy,
    k: int = 30,
) -> list[tuple[int, float]]:
    """Classifier scores for the top-k TF-IDF candidates, in candidate order."""
    candidates = top_k(index, claim_text, k)
    contexts = [(claim_text, build_context(corpus[c.doc_id], strategy)) for c in candidates]
    scores = scorer.score_pairs(contexts)
    return [(c.doc_id, score) for c, score in zip(candidates, scores)]


def retrieve_abstracts(
    claim_text: str,
    corpus: Corpus,
    index: TfIdfIndex,
    scorer: PairScorer,
    strategy: ReprStrategy,
    k: int = 30,
    threshold: float = 0.5,
    max_abstracts: int | None = None,
) -> list[int]:
    """Candidates the stage-1 classifier accepts, by score desc then doc_id asc."""
    scored = score_candidates(claim_text, corpus, index, scorer, strategy, k)
    kept = [(doc_id, score) for doc_id, score in scored if decide(score, threshold)]
    kept.sort(key=lambda item: (-item[1], item[0]))
    if max_abstracts is not None:
        kept = kept[:max_abstracts]
    return [doc_id for doc_id, _ in kept]


def _oracle_pairs(claim: Claim, corpus: Corpus) -> list[LabeledPair]:
    pairs = []
    for evidence in claim.evidence:
        doc = corpus[evidence.doc_id]
        gold = set(evidence.sentence_union)
        for idx, sentence in enumerate(doc.sentences):
            pairs.append(LabeledPair(claim.text, sentence, idx in gold))
    return pairs


def _all_negative_pairs(claim: Claim, doc: AbstractDoc) -> list[LabeledPair]:
    return [LabeledPair(claim.text, sentence, False) for sentence in doc.sentences]


def build_rationale_training_set(
    mode: RationaleMode,
    claims: Sequence[Claim],
    corpus: Corpus,
    index: TfIdfIndex,
    strategy: ReprStrategy | None = None,
    abstract_scorer: PairScorer | None = None,
    k: int = 30,
    abstract_threshold: float = 0.5,
    tfidf_negatives: int = 3,
) -> list[LabeledPair]:
    """Sentence-level pairs for the rationale stage, under one of four regimes.

    ORACLE labels every sentence of every gold abstract. ORACLE_PLUS_CITED adds
    all-negative sentences from abstracts that evidence-free claims merely
    cite. ORACLE_PLUS_CITED_PLUS_TFIDF_NEG further adds the top falsely
    retrieved TF-IDF candidates per claim as negatives. LOOSE_COUPLING instead
    takes every sentence of every abstract the trained stage-1 model retrieves.
    """
    if mode is RationaleMode.LOOSE_COUPLING:
        if abstract_scorer is None or strategy is None:
            raise DataError("loose coupling requires a trained abstract-stage scorer")
        pairs: list[LabeledPair] = []
        for claim in claims:
            retrieved = retrieve_abstracts(
                claim.text, corpus, index, abstract_scorer, strategy, k, abstract_threshold
            )
            for doc_id in retrieved:
                evidence = claim.evidence_for(doc_id)
                gold = set(evidence.sentence_union) if evidence else set()
                for idx, sentence in enumerate(corpus[doc_id].sentences):
                    pairs.append(LabeledPair(claim.text, sentence, idx in gold))
        return pairs

    pairs = []
    for claim in claims:
        pairs.extend(_oracle_pairs(claim, corpus))
    if mode is RationaleMode.ORACLE:
        return pairs

    for claim in claims:
        if claim.cited_only:
            for doc_id in claim.cited_doc_ids:
                pairs.extend(_all_negative_pairs(claim, corpus[doc_id]))
    if mode is RationaleMode.ORACLE_PLUS_CITED:
        return pairs

    for claim in claims:
        gold_docs = set(claim.evidence_doc_ids)
        added = 0
        for candidate in top_k(index, claim.text, k):
            if candidate.doc_id in gold_docs:
                continue
            if added >= tfidf_negatives:
                break
            pairs.extend(_all_negative_pairs(claim, corpus[candidate.doc_id]))
            added += 1
    return pairs


def score_sentences(
    claim_text: str, doc: AbstractDoc, scorer: PairScorer
) -> list[tuple[int, float]]:
    scores = scorer.score_pairs([(claim_text, sentence) for sentence in doc.sentences])
    return list(enumerate(scores))


def select_rationales(
    claim_text: str,
    doc: AbstractDoc,
    scorer: PairScorer,
    threshold: float = 0.5,
    max_rationales: int | None = None,
) -> list[int]:
    """Sentence indices at or above threshold, most confident first."""
    kept = [
        (idx, score)
        for idx, score in score_sentences(claim_text, doc, scorer)
        if decide(score, threshold)
    ]
    kept.sort(key=lambda item: (-item[1], item[0]))
    if max_rationales is not None:
        kept = kept[:max_rationales]
    return [idx for idx, _ in kept]


def rationale_context(doc: AbstractDoc, sentence_indices: Sequence[int]) -> str:
    """Selected sentences joined by single spaces in ascending document order."""
    return " ".join(doc.sentences[i] for i in sorted(set(sentence_indices)))


def predict_stance(
    claim_text: str,
    doc: AbstractDoc,
    sentence_indices: Sequence[int],
    noinfo_scorer: PairScorer,
    sr_scorer: PairScorer,
    noinfo_threshold: float = 0.5,
    sr_threshold: float = 0.5,
) -> Label:
    """Two-step decision: gate on has-info first, then SUPPORTS vs REFUTES."""
    if not sentence_indices:
        raise DataError("stance prediction needs at least one selected sentence")
    context = rationale_context(doc, sentence_indices)
    has_info = noinfo_scorer.score_pairs([(claim_text, context)])[0]
    if not decide(has_info, noinfo_threshold):
        return Label.NOINFO
    direction = sr_scorer.score_pairs([(claim_text, context)])[0]
    return Label.SUPPORTS if decide(direction, sr_threshold) else Label.REFUTES


def predict_stance_multiclass(
    claim_text: str,
    doc: AbstractDoc,
    sentence_indices: Sequence[int],
    model: ClassifierModel,
) -> Label:
    """Argmax of the 3-way model; ties break NOINFO < REFUTES < SUPPORTS."""
    if not sentence_indices:
        raise DataError("stance prediction needs at least one selected sentence")
    probs = model.predict_proba(claim_text, rationale_context(doc, sentence_indices))
    return CLASS_ORDER[int(np.argmax(probs))]


@dataclass
class StanceTrainingSets:
    noinfo: list[LabeledPair]
    supports_refutes: list[LabeledPair]
    multiclass: list[LabeledPair]


def build_stance_training_sets(
    claims: Sequence[Claim],
    corpus: Corpus,
    index: TfIdfIndex,
    rationale_scorer: PairScorer | None = None,
    rationale_threshold: float = 0.5,
    k: int = 30,
    negatives_per_claim: int = 2,
) -> StanceTrainingSets:
    """Stance-stage pairs: gold rationale contexts as positives, and contexts
    from each claim's top non-gold TF-IDF candidates as has-no-info negatives.

    Negative contexts use the rationale model's selected sentences when it
    selects any, falling back to the first/middle/last sentences so every
    candidate yields a context.
    """
    noinfo: list[LabeledPair] = []
    supports_refutes: list[LabeledPair] = []
    multiclass: list[LabeledPair] = []
    for claim in claims:
        for evidence in claim.evidence:
            doc = corpus[evidence.doc_id]
            context = rationale_context(doc, evidence.sentence_union)
            noinfo.append(LabeledPair(claim.text, context, True))
            supports_refutes.append(
                LabeledPair(claim.text, context, evidence.label is Label.SUPPORTS)
            )
            multiclass.append(LabeledPair(claim.text, context, evidence.label))
        gold_docs = set(claim.evidence_doc_ids)
        added = 0
        for candidate in top_k(index, claim.text, k):
            if candidate.doc_id in gold_docs:
                continue
            if added >= negatives_per_claim:
                break
            doc = corpus[candidate.doc_id]
            selected: list[int] = []
            if rationale_scorer is not None:
                selected = select_rationales(claim.text, doc, rationale_scorer, rationale_threshold)
            indices = selected or reduced_indices(doc.n)
            context = rationale_context(doc, indices)
            noinfo.append(LabeledPair(claim.text, context, False))
            multiclass.append(LabeledPair(claim.text, context, Label.NOINFO))
            added += 1
    return StanceTrainingSets(noinfo, supports_refutes, multiclass)


@dataclass
class StageScorers:
    """Everything the pipeline needs to score its three stages."""

    abstract: PairScorer
    rationale: PairScorer
    stance_noinfo: PairScorer | None = None
    stance_sr: PairScorer | None = None
    multiclass_model: ClassifierModel | None = None


@dataclass(frozen=True)
class PipelineSettings:
    k: int = 30
    abstract_threshold: float = 0.5
    rationale_threshold: float = 0.5
    noinfo_threshold: float = 0.5
    sr_threshold: float = 0.5
    stance_mode: str = STANCE_TWO_STEP
    max_abstracts: int | None = None
    max_rationales: int | None = None
    workers: int = 1


def _predict_claim(
    claim: Claim,
    corpus: Corpus,
    index: TfIdfIndex,
    scorers: StageScorers,
    strategy: ReprStrategy,
    settings: PipelineSettings,
    trace: dict | None,
) -> ClaimPrediction:
    try:
        scored = score_candidates(
            claim.text, corpus, index, scorers.abstract, strategy, settings.k
        )
        kept = [
            (doc_id, score)
            for doc_id, score in scored
            if decide(score, settings.abstract_threshold)
        ]
        kept.sort(key=lambda item: (-item[1], item[0]))
        if settings.max_abstracts is not None:
            kept = kept[: settings.max_abstracts]
        if trace is not None:
            trace["retrieved"] = [
                {"doc_id": doc_id, "score": score} for doc_id, score in kept
            ]
            trace["rationales"] = []

        evidence: dict[int, PredictedEvidence] = {}
        for doc_id, _ in kept:
            doc = corpus[doc_id]
            sentence_scores = score_sentences(claim.text, doc, scorers.rationale)
            selected = [
                (idx, score)
                for idx, score in sentence_scores
                if decide(score, settings.rationale_threshold)
            ]
            selected.sort(key=lambda item: (-item[1], item[0]))
            if settings.max_rationales is not None:
                selected = selected[: settings.max_rationales]
            if trace is not None:
                trace["rationales"].append(
                    {
                        "doc_id": doc_id,
                        "selected": [{"sentence": i, "score": s} for i, s in selected],
                    }
                )
            if not selected:
                continue
            indices = [idx for idx, _ in selected]
            if settings.stance_mode == STANCE_MULTICLASS:
                if scorers.multiclass_model is None:
                    raise DataError("multiclass stance mode requires a 3-way model")
                label = predict_stance_multiclass(
                    claim.text, doc, indices, scorers.multiclass_model
                )
            else:
                if scorers.stance_noinfo is None or scorers.stance_sr is None:
                    raise DataError("two-step stance mode requires both stance scorers")
                label = predict_stance(
                    claim.text,
                    doc,
                    indices,
                    scorers.stance_noinfo,
                    scorers.stance_sr,
                    settings.noinfo_threshold,
                    settings.sr_threshold,
                )
            if label is Label.NOINFO:
                continue
            evidence[doc_id] = PredictedEvidence(label=label, sentence_indices=tuple(indices))
        ordered = {doc_id: evidence[doc_id] for doc_id in sorted(evidence)}
        return ClaimPrediction(claim_id=claim.id, evidence=ordered)
    except ScorerProtocolError as exc:
        raise ScorerProtocolError(f"claim {claim.id}: {exc}") from exc
    except (DataError, KeyError) as exc:
        raise DataError(f"claim {claim.id}: {exc}") from exc


def run_pipeline(
    claims: Sequence[Claim],
    corpus: Corpus,
    index: TfIdfIndex,
    scorers: StageScorers,
    strategy: ReprStrategy,
    settings: PipelineSettings = PipelineSettings(),
    trace: list[dict] | None = None,
) -> list[ClaimPrediction]:
    """Predict evidence for every claim, in claim order, deterministically.

    Per-claim work is independent; with workers > 1 claims are scored in a
    thread pool and results are still emitted in input order. Pass a list as
    ``trace`` to collect per-claim intermediate artifacts.
    """
    traces: list[dict | None]
    if trace is not None:
        traces = [{"claim_id": claim.id} for claim in claims]
    else:
        traces = [None] * len(claims)

    def work(pair: tuple[Claim, dict | None]) -> ClaimPrediction:
        claim, claim_trace = pair
        return _predict_claim(claim, corpus, index, scorers, strategy, settings, claim_trace)

    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            predictions = list(pool.map(work, zip(claims, traces)))
    else:
        predictions = [work(item) for item in zip(claims, traces)]
    if trace is not None:
        trace.extend(t for t in traces if t is not None)
    return predictions


def prediction_to_record(prediction: ClaimPrediction) -> dict:
    return {
        "id": prediction.claim_id,
        "evidence": {
            str(doc_id): {
                "label": external_label(ev.label),
                "sentences": list(ev.sentence_indices),
            }
            for doc_id, ev in prediction.evidence.items()
        },
    }


def save_predictions(predictions: Iterable[ClaimPrediction], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for prediction in predictions:
            handle.write(json.dumps(prediction_to_record(prediction), ensure_ascii=False) + "\n")


def load_predictions(path: str | Path) -> list[ClaimPrediction]:
    predictions: list[ClaimPrediction] = []
    seen: set[int] = set()
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            try:
                claim_id = int(record["id"])
                evidence = {}
                for doc_key, entry in (record.get("evidence") or {}).items():
                    evidence[int(doc_key)] = PredictedEvidence(
                        label=parse_evidence_label(entry["label"]),
                        sentence_indices=tuple(entry["sentences"]),
                    )
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: malformed prediction record: {exc}") from exc
            if claim_id in seen:
                raise DataError(f"{path}:{lineno}: duplicate prediction for claim {claim_id}")
            seen.add(claim_id)
            predictions.append(ClaimPrediction(claim_id=claim_id, evidence=evidence))
    return predictions
