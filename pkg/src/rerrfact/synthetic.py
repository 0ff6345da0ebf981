"""Small lexically separable dataset for end-to-end pipeline exercises.

Each claim shares ~10 private marker tokens (substance/enzyme/marker/cohort
words stamped with the claim number) with its own gold abstract and with
nothing else; stance direction is carried by "confirmed" vs "refuted" inside
the rationale sentences. Non-rationale sentences and distractor abstracts use
vocabulary disjoint from every claim, so the built-in classifiers at default
settings separate every stage exactly. Files are written in the standard
corpus/claims JSONL formats.
"""

from __future__ import annotations

import json
from pathlib import Path

_VERBS = (
    "improves",
    "reduces",
    "elevates",
    "stabilizes",
    "restores",
    "lowers",
    "boosts",
    "normalizes",
)

# Claims with a two-sentence gold rationale (1-based claim numbers).
_MULTI_SENTENCE = (3, 7)


def _subject(i: int) -> str:
    return f"substance{i}x enzyme{i}y compound{i}c agent{i}a"


def _target(i: int) -> str:
    return f"marker{i}z index{i}d ratio{i}e"


def synthetic_dataset(num_claims: int = 8, num_distractors: int = 12) -> tuple[list[dict], list[dict]]:
    """Corpus and claim records; claims alternate SUPPORTS (odd) / REFUTES (even)."""
    if not (1 <= num_claims <= len(_VERBS)):
        raise ValueError(f"num_claims must be in 1..{len(_VERBS)}")
    corpus_records: list[dict] = []
    claim_records: list[dict] = []

    for i in range(1, num_claims + 1):
        doc_id = 100 + i
        verb = _VERBS[i - 1]
        supports = i % 2 == 1
        stance_word = "confirmed" if supports else "refuted"

        opening = f"Site{i}r enrollment{i}n stays archived{i}v."
        closing = f"Consent{i}f papers{i}w stay under board{i}b review{i}u."
        if i in _MULTI_SENTENCE:
            sentences = [
                opening,
                f"Analysis{i}s {stance_word} {_subject(i)} activity in cohort{i}h group{i}g.",
                f"Registry{i}m records showed the regimen {verb} {_target(i)} measurably.",
                closing,
            ]
            gold_indices = [1, 2]
        else:
            sentences = [
                opening,
                f"Analysis{i}s {stance_word} that {_subject(i)} {verb} {_target(i)} "
                f"in cohort{i}h group{i}g participants.",
                f"Registry{i}m appendix{i}p holds extra notes.",
                closing,
            ]
            gold_indices = [1]

        corpus_records.append(
            {
                "doc_id": doc_id,
                "title": f"Report{i}t on {_subject(i)} against {_target(i)} "
                f"in cohort{i}h group{i}g",
                "abstract": sentences,
            }
        )
        claim_records.append(
            {
                "id": i,
                "claim": f"Treatment with {_subject(i)} {verb} {_target(i)} levels "
                f"in cohort{i}h group{i}g adults",
                "evidence": {
                    str(doc_id): [
                        {
                            "sentences": gold_indices,
                            "label": "SUPPORT" if supports else "CONTRADICT",
                        }
                    ]
                },
                "cited_doc_ids": [doc_id],
            }
        )

    for j in range(1, num_distractors + 1):
        corpus_records.append(
            {
                "doc_id": 200 + j,
                "title": f"Survey of compound{j}q dynamics",
                "abstract": [
                    f"Observations covered compound{j}q behavior in controlled settings.",
                    "Seasonal variation remained within expected ranges.",
                    "Data archives are stored for future reference.",
                ],
            }
        )

    # Evidence-free claims: cited abstracts exist but nothing supports or refutes.
    for offset, cited in enumerate((201, 202), start=1):
        claim_records.append(
            {
                "id": num_claims + offset,
                "claim": f"Dietary mystery{offset}k intake alters sleep quality scores",
                "evidence": {},
                "cited_doc_ids": [cited] if cited - 200 <= num_distractors else [],
            }
        )
    return corpus_records, claim_records


def write_synthetic_dataset(
    directory: str | Path, num_claims: int = 8, num_distractors: int = 12
) -> tuple[Path, Path]:
    """Write corpus.jsonl and claims.jsonl under directory; returns their paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    corpus_records, claim_records = synthetic_dataset(num_claims, num_distractors)
    corpus_path = directory / "corpus.jsonl"
    claims_path = directory / "claims.jsonl"
    with open(corpus_path, "w", encoding="utf-8") as handle:
        for record in corpus_records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    with open(claims_path, "w", encoding="utf-8") as handle:
        for record in claim_records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    return corpus_path, claims_path
