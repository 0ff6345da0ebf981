"""Corpus and claim data model: JSONL loading, validation, and deterministic splits.

File formats (one JSON record per line):

corpus:  {"doc_id": <int>, "title": <str>, "abstract": [<str>, ...]}
claims:  {"id": <int>, "claim": <str>,
          "evidence": {"<doc_id>": [{"sentences": [<int>, ...],
                                     "label": "SUPPORT"|"CONTRADICT"}, ...]},
          "cited_doc_ids": [<int>, ...]}

Extra keys (e.g. structured-abstract metadata) are accepted and ignored.
Evidence labels are accepted case-insensitively in both the SUPPORT/CONTRADICT
and SUPPORTS/REFUTES spellings; internally everything is SUPPORTS/REFUTES.
Rationale sentence indices are 0-based everywhere inside this package.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator


class DataError(ValueError):
    """An input file or record violates the data contract."""


class Label(Enum):
    SUPPORTS = "SUPPORTS"
    REFUTES = "REFUTES"
    NOINFO = "NOINFO"


# External (file) spellings for evidence labels.
_LABEL_ALIASES = {
    "support": Label.SUPPORTS,
    "supports": Label.SUPPORTS,
    "contradict": Label.REFUTES,
    "refutes": Label.REFUTES,
}
_EXTERNAL_LABEL = {Label.SUPPORTS: "SUPPORT", Label.REFUTES: "CONTRADICT"}


def parse_evidence_label(raw: str) -> Label:
    """Map a file label string to SUPPORTS/REFUTES; NOINFO never appears in files."""
    label = _LABEL_ALIASES.get(str(raw).strip().lower())
    if label is None:
        raise DataError(f"unknown evidence label {raw!r}")
    return label


def external_label(label: Label) -> str:
    if label is Label.NOINFO:
        raise DataError("NOINFO has no external evidence spelling")
    return _EXTERNAL_LABEL[label]


@dataclass(frozen=True)
class AbstractDoc:
    """One abstract: a title plus an ordered, non-empty list of sentences."""

    doc_id: int
    title: str
    sentences: tuple[str, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.doc_id, int) or isinstance(self.doc_id, bool):
            raise DataError(f"doc_id must be an integer, got {self.doc_id!r}")
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if not self.sentences:
            raise DataError(f"doc {self.doc_id}: empty sentence list")
        for i, sent in enumerate(self.sentences):
            if not isinstance(sent, str) or not sent.strip():
                raise DataError(f"doc {self.doc_id}: sentence {i} is empty")

    @property
    def n(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class GoldRationale:
    """One gold rationale: a set of 0-based sentence indices, stored sorted."""

    sentence_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        indices = tuple(sorted(set(int(i) for i in self.sentence_indices)))
        object.__setattr__(self, "sentence_indices", indices)
        if not indices:
            raise DataError("empty rationale")
        if indices[0] < 0:
            raise DataError(f"negative rationale index {indices[0]}")


MAX_RATIONALES_PER_EVIDENCE = 3


@dataclass(frozen=True)
class GoldEvidence:
    """Gold label and rationales tying one claim to one abstract."""

    doc_id: int
    label: Label
    rationales: tuple[GoldRationale, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rationales", tuple(self.rationales))
        if self.label is Label.NOINFO:
            raise DataError("gold evidence label may not be NOINFO")
        if not self.rationales:
            raise DataError(f"doc {self.doc_id}: evidence without rationales")
        if len(self.rationales) > MAX_RATIONALES_PER_EVIDENCE:
            raise DataError(
                f"doc {self.doc_id}: {len(self.rationales)} rationales exceed the "
                f"limit of {MAX_RATIONALES_PER_EVIDENCE} per claim-abstract pair"
            )

    @property
    def sentence_union(self) -> tuple[int, ...]:
        merged: set[int] = set()
        for rationale in self.rationales:
            merged.update(rationale.sentence_indices)
        return tuple(sorted(merged))


@dataclass(frozen=True)
class Claim:
    """A claim with optional gold evidence; empty evidence means NOINFO."""

    id: int
    text: str
    evidence: tuple[GoldEvidence, ...] = ()
    cited_doc_ids: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "evidence", tuple(self.evidence))
        object.__setattr__(self, "cited_doc_ids", tuple(int(d) for d in self.cited_doc_ids))
        if not isinstance(self.id, int) or isinstance(self.id, bool):
            raise DataError(f"claim id must be an integer, got {self.id!r}")
        if not self.text or not self.text.strip():
            raise DataError(f"claim {self.id}: empty claim text")
        labels = {ev.label for ev in self.evidence}
        if len(labels) > 1:
            raise DataError(
                f"claim {self.id}: mixed evidence labels "
                f"{sorted(l.value for l in labels)} (one label per claim)"
            )
        seen: set[int] = set()
        for ev in self.evidence:
            if ev.doc_id in seen:
                raise DataError(f"claim {self.id}: duplicate evidence doc {ev.doc_id}")
            seen.add(ev.doc_id)

    @property
    def label(self) -> Label | None:
        return self.evidence[0].label if self.evidence else None

    @property
    def evidence_doc_ids(self) -> tuple[int, ...]:
        return tuple(ev.doc_id for ev in self.evidence)

    def evidence_for(self, doc_id: int) -> GoldEvidence | None:
        for ev in self.evidence:
            if ev.doc_id == doc_id:
                return ev
        return None

    @property
    def cited_only(self) -> bool:
        """True for claims with no gold evidence but at least one cited abstract."""
        return not self.evidence and bool(self.cited_doc_ids)


class Corpus:
    """Immutable, insertion-ordered collection of abstracts keyed by doc_id."""

    def __init__(self, docs: Iterable[AbstractDoc]):
        self._docs: dict[int, AbstractDoc] = {}
        for doc in docs:
            if doc.doc_id in self._docs:
                raise DataError(f"duplicate doc_id {doc.doc_id}")
            self._docs[doc.doc_id] = doc

    def __len__(self) -> int:
        return len(self._docs)

    def __iter__(self) -> Iterator[AbstractDoc]:
        return iter(self._docs.values())

    def __contains__(self, doc_id: int) -> bool:
        return doc_id in self._docs

    def __getitem__(self, doc_id: int) -> AbstractDoc:
        try:
            return self._docs[doc_id]
        except KeyError:
            raise DataError(f"unknown doc_id {doc_id}") from None

    def get(self, doc_id: int) -> AbstractDoc | None:
        return self._docs.get(doc_id)

    @property
    def doc_ids(self) -> tuple[int, ...]:
        return tuple(self._docs.keys())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return list(self._docs.items()) == list(other._docs.items())


def _iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise DataError(f"{path}:{lineno}: record is not a JSON object")
            yield lineno, record


def load_corpus(path: str | Path) -> Corpus:
    """Load a corpus JSONL file, preserving line order; validates all invariants."""
    docs: dict[int, AbstractDoc] = {}
    first_line: dict[int, int] = {}
    for lineno, record in _iter_jsonl(path):
        try:
            doc_id = record["doc_id"]
            title = record["title"]
            sentences = record["abstract"]
        except KeyError as exc:
            raise DataError(f"{path}:{lineno}: missing key {exc.args[0]!r}") from None
        if not isinstance(title, str):
            raise DataError(f"{path}:{lineno}: title must be a string")
        if not isinstance(sentences, list):
            raise DataError(f"{path}:{lineno}: abstract must be a list of sentences")
        try:
            doc = AbstractDoc(doc_id=doc_id, title=title, sentences=tuple(sentences))
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        if doc.doc_id in docs:
            raise DataError(
                f"{path}:{lineno}: duplicate doc_id {doc.doc_id} "
                f"(first seen on line {first_line[doc.doc_id]})"
            )
        docs[doc.doc_id] = doc
        first_line[doc.doc_id] = lineno
    return Corpus(docs.values())


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for doc in corpus:
            record = {"doc_id": doc.doc_id, "title": doc.title, "abstract": list(doc.sentences)}
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def _parse_evidence(claim_id: int, raw: dict, corpus: Corpus) -> tuple[GoldEvidence, ...]:
    evidence: list[GoldEvidence] = []
    for doc_key, entries in raw.items():
        try:
            doc_id = int(doc_key)
        except (TypeError, ValueError):
            raise DataError(f"claim {claim_id}: evidence doc key {doc_key!r} is not an integer")
        if doc_id not in corpus:
            raise DataError(f"claim {claim_id}: unknown doc_id {doc_id} in evidence")
        doc = corpus[doc_id]
        if not isinstance(entries, list) or not entries:
            raise DataError(f"claim {claim_id}: evidence for doc {doc_id} must be a non-empty list")
        rationales: list[GoldRationale] = []
        labels: set[Label] = set()
        for entry in entries:
            if not isinstance(entry, dict) or "sentences" not in entry or "label" not in entry:
                raise DataError(
                    f"claim {claim_id}: evidence entry for doc {doc_id} needs 'sentences' and 'label'"
                )
            labels.add(parse_evidence_label(entry["label"]))
            rationale = GoldRationale(tuple(entry["sentences"]))
            for idx in rationale.sentence_indices:
                if idx >= doc.n:
                    raise DataError(
                        f"claim {claim_id}: rationale index {idx} out of bounds "
                        f"for doc {doc_id} with {doc.n} sentences"
                    )
            rationales.append(rationale)
        if len(labels) > 1:
            raise DataError(f"claim {claim_id}: mixed labels within evidence for doc {doc_id}")
        evidence.append(GoldEvidence(doc_id=doc_id, label=labels.pop(), rationales=tuple(rationales)))
    return tuple(evidence)


def load_claims(path: str | Path, corpus: Corpus) -> list[Claim]:
    """Load claims JSONL, validating evidence against the corpus."""
    claims: list[Claim] = []
    seen_ids: set[int] = set()
    for lineno, record in _iter_jsonl(path):
        try:
            claim_id = record["id"]
            text = record["claim"]
        except KeyError as exc:
            raise DataError(f"{path}:{lineno}: missing key {exc.args[0]!r}") from None
        raw_evidence = record.get("evidence") or {}
        if not isinstance(raw_evidence, dict):
            raise DataError(f"{path}:{lineno}: evidence must be an object")
        cited = record.get("cited_doc_ids") or []
        try:
            evidence = _parse_evidence(claim_id, raw_evidence, corpus)
            for doc_id in cited:
                if int(doc_id) not in corpus:
                    raise DataError(f"claim {claim_id}: unknown cited doc_id {doc_id}")
            claim = Claim(id=claim_id, text=text, evidence=evidence, cited_doc_ids=tuple(cited))
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
        if claim.id in seen_ids:
            raise DataError(f"{path}:{lineno}: duplicate claim id {claim.id}")
        seen_ids.add(claim.id)
        claims.append(claim)
    return claims


def save_claims(claims: Iterable[Claim], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for claim in claims:
            evidence = {
                str(ev.doc_id): [
                    {"sentences": list(r.sentence_indices), "label": external_label(ev.label)}
                    for r in ev.rationales
                ]
                for ev in claim.evidence
            }
            record = {
                "id": claim.id,
                "claim": claim.text,
                "evidence": evidence,
                "cited_doc_ids": list(claim.cited_doc_ids),
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class DatasetSplit:
    """Deterministic train/validation partition of a claim list."""

    train: tuple[Claim, ...]
    validation: tuple[Claim, ...]
    seed: int
    fraction: float


def split_claims(claims: list[Claim], fraction: float, seed: int) -> DatasetSplit:
    """Shuffle by seed and put the first ceil(fraction * n) claims into train.

    Both parts keep the shuffled order, so the split is reproducible and the
    two sides always partition the input.
    """
    if not claims:
        raise DataError("cannot split an empty claim list")
    if not (0.0 < fraction < 1.0):
        raise DataError(f"fraction must be in (0, 1), got {fraction}")
    shuffled = list(claims)
    random.Random(seed).shuffle(shuffled)
    cut = math.ceil(fraction * len(shuffled))
    return DatasetSplit(
        train=tuple(shuffled[:cut]),
        validation=tuple(shuffled[cut:]),
        seed=seed,
        fraction=fraction,
    )
