"""Verification metrics: sentence-level and abstract-level precision/recall/F1.

Four families, leaderboard-style:

* sentence selection-only:  a predicted sentence earns credit iff it belongs
  to a gold rationale whose sentences are all predicted.
* sentence selection+label: additionally the predicted abstract label matches.
* abstract label-only:      a predicted (claim, abstract) earns credit iff the
  abstract is gold evidence and the label matches.
* abstract label+rationale: additionally some complete gold rationale appears
  within the first `rationale_truncation` predicted sentences (default 3).

Precision denominators are predicted items, recall denominators gold items. A
predicted abstract for a claim without gold evidence counts against precision
in every family. Internally everything is exact counting over doubles;
percentages are rounded half-up to two decimals only when rendering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Claim, Corpus, DataError
from .pipeline import ClaimPrediction


def f1(p: float, r: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if not (0.0 <= p <= 1.0 and 0.0 <= r <= 1.0):
        raise DataError(f"precision and recall must be in [0, 1], got {p}, {r}")
    if p + r == 0.0:
        return 0.0
    return 2.0 * p * r / (p + r)


@dataclass(frozen=True)
class CountTable:
    correct: int
    predicted: int
    gold: int

    def __post_init__(self) -> None:
        if self.correct > self.predicted or self.correct > self.gold:
            raise DataError(
                f"inconsistent counts: correct={self.correct}, "
                f"predicted={self.predicted}, gold={self.gold}"
            )

    @property
    def precision(self) -> float:
        return self.correct / self.predicted if self.predicted else 0.0

    @property
    def recall(self) -> float:
        return self.correct / self.gold if self.gold else 0.0


@dataclass(frozen=True)
class MetricFamily:
    precision: float
    recall: float
    f1: float
    counts: CountTable | None = None

    @classmethod
    def from_counts(cls, counts: CountTable) -> "MetricFamily":
        return cls(counts.precision, counts.recall, f1(counts.precision, counts.recall), counts)

    @classmethod
    def from_precision_recall(cls, p: float, r: float) -> "MetricFamily":
        return cls(p, r, f1(p, r), None)

    def to_dict(self) -> dict:
        payload = {"precision": self.precision, "recall": self.recall, "f1": self.f1}
        if self.counts is not None:
            payload["counts"] = {
                "correct": self.counts.correct,
                "predicted": self.counts.predicted,
                "gold": self.counts.gold,
            }
        return payload


FAMILY_KEYS = (
    "sentence_selection_only",
    "sentence_selection_label",
    "abstract_label_only",
    "abstract_label_rationale",
)


@dataclass(frozen=True)
class MetricReport:
    sentence_selection_only: MetricFamily
    sentence_selection_label: MetricFamily
    abstract_label_only: MetricFamily
    abstract_label_rationale: MetricFamily

    def families(self) -> dict[str, MetricFamily]:
        return {key: getattr(self, key) for key in FAMILY_KEYS}

    def to_dict(self) -> dict:
        return {key: family.to_dict() for key, family in self.families().items()}

    @classmethod
    def from_dict(cls, payload: Mapping) -> "MetricReport":
        families = {}
        for key in FAMILY_KEYS:
            entry = payload[key]
            counts = entry.get("counts")
            families[key] = MetricFamily(
                precision=float(entry["precision"]),
                recall=float(entry["recall"]),
                f1=float(entry["f1"]),
                counts=CountTable(**counts) if counts else None,
            )
        return cls(**families)


def evaluate(
    gold: Sequence[Claim],
    predictions: Sequence[ClaimPrediction],
    rationale_truncation: int = 3,
    corpus: Corpus | None = None,
) -> MetricReport:
    """Score predictions against gold claims under the four metric families."""
    gold_by_id = {claim.id: claim for claim in gold}
    seen: set[int] = set()

    abstract_predicted = abstract_label_correct = abstract_rationalized_correct = 0
    sentence_predicted = selection_correct = selection_label_correct = 0

    for prediction in predictions:
        if prediction.claim_id not in gold_by_id:
            raise DataError(f"prediction for unknown claim id {prediction.claim_id}")
        if prediction.claim_id in seen:
            raise DataError(f"duplicate prediction for claim {prediction.claim_id}")
        seen.add(prediction.claim_id)
        claim = gold_by_id[prediction.claim_id]

        for doc_id, predicted in prediction.evidence.items():
            if corpus is not None:
                doc = corpus[doc_id]  # raises DataError for unknown docs
                for idx in predicted.sentence_indices:
                    if idx >= doc.n:
                        raise DataError(
                            f"claim {claim.id}: predicted sentence {idx} out of "
                            f"bounds for doc {doc_id}"
                        )
            evidence = claim.evidence_for(doc_id)
            label_ok = evidence is not None and predicted.label is evidence.label

            abstract_predicted += 1
            if label_ok:
                abstract_label_correct += 1
                truncated = set(predicted.sentence_indices[:rationale_truncation])
                if any(
                    set(r.sentence_indices) <= truncated
                    for r in evidence.rationales  # type: ignore[union-attr]
                ):
                    abstract_rationalized_correct += 1

            sentence_predicted += len(predicted.sentence_indices)
            if evidence is None:
                continue
            predicted_set = set(predicted.sentence_indices)
            complete = [
                set(r.sentence_indices)
                for r in evidence.rationales
                if set(r.sentence_indices) <= predicted_set
            ]
            for idx in predicted.sentence_indices:
                if any(idx in rationale for rationale in complete):
                    selection_correct += 1
                    if label_ok:
                        selection_label_correct += 1

    abstract_gold = sum(len(claim.evidence) for claim in gold)
    sentence_gold = sum(
        len(evidence.sentence_union) for claim in gold for evidence in claim.evidence
    )

    return MetricReport(
        sentence_selection_only=MetricFamily.from_counts(
            CountTable(selection_correct, sentence_predicted, sentence_gold)
        ),
        sentence_selection_label=MetricFamily.from_counts(
            CountTable(selection_label_correct, sentence_predicted, sentence_gold)
        ),
        abstract_label_only=MetricFamily.from_counts(
            CountTable(abstract_label_correct, abstract_predicted, abstract_gold)
        ),
        abstract_label_rationale=MetricFamily.from_counts(
            CountTable(abstract_rationalized_correct, abstract_predicted, abstract_gold)
        ),
    )


def format_percent(value: float) -> str:
    """Percentage with two decimals, rounded half-up (render-time only)."""
    return str(Decimal(repr(value * 100.0)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


_GROUPS = (
    ("Sentence-level", "Selection-only", "sentence_selection_only"),
    ("Sentence-level", "Selection+Label", "sentence_selection_label"),
    ("Abstract-level", "Label-Only", "abstract_label_only"),
    ("Abstract-level", "Label+Rationale", "abstract_label_rationale"),
)


def render_report(reports: Mapping[str, MetricReport]) -> str:
    """Fixed-width comparison table; one row per system, name-sorted."""
    if not reports:
        raise DataError("render_report needs at least one report")
    name_width = max(len("System"), max(len(name) for name in reports))
    cell = 8  # each P/R/F1 cell
    group_width = cell * 3

    def pad(text: str, width: int) -> str:
        return text.ljust(width)

    lines = []
    level_row = pad("", name_width)
    family_row = pad("", name_width)
    header_row = pad("System", name_width)
    previous_level = None
    for level, family, _ in _GROUPS:
        shown = level if level != previous_level else ""
        previous_level = level
        level_row += "  " + pad(shown, group_width)
        family_row += "  " + pad(family, group_width)
        header_row += "  " + "".join(pad(h, cell) for h in ("P", "R", "F1"))
    lines.extend([level_row.rstrip(), family_row.rstrip(), header_row.rstrip()])

    for name in sorted(reports):
        row = pad(name, name_width)
        families = reports[name].families()
        for _, _, key in _GROUPS:
            family = families[key]
            row += "  " + "".join(
                pad(format_percent(v), cell)
                for v in (family.precision, family.recall, family.f1)
            )
        lines.append(row.rstrip())
    return "\n".join(lines) + "\n"


def save_metrics(report: MetricReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(report.to_dict(), handle, sort_keys=True, indent=2)
        handle.write("\n")


def load_metrics(path: str | Path) -> MetricReport:
    with open(path, "r", encoding="utf-8") as handle:
        return MetricReport.from_dict(json.load(handle))
