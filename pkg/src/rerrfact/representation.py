"""Claim-conditioning context strings built from abstracts.

Four strategies:

* TOTAL    - title followed by every sentence.
* REDUCED  - title plus first, middle (ceil(n/2), 1-based), and last sentence.
* DIFF5    - title plus the sentences at the doc's size group's top-5 learned
             relative positions.
* DIFF3    - same as DIFF5 but limited to the top-3 positions.

The learned positions come from a per-size-group histogram of gold-rationale
sentence positions, bucketed into deciles floor(10 * i / n). A group with no
observed rationales falls back to the REDUCED indices at build time.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .corpus import Claim, Corpus, AbstractDoc, DataError


class SizeGroup(Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"
    XLARGE = "xlarge"


class ReprKind(Enum):
    TOTAL = "total"
    DIFF5 = "diff5"
    DIFF3 = "diff3"
    REDUCED = "reduced"


_SMALL_MAX = 8
_MEDIUM_MAX = 14
_LARGE_MAX = 24


def size_group(n: int) -> SizeGroup:
    """Partition sentence counts: <=8 small, <=14 medium, <=24 large, else xlarge."""
    if n < 1:
        raise DataError(f"sentence count must be >= 1, got {n}")
    if n <= _SMALL_MAX:
        return SizeGroup.SMALL
    if n <= _MEDIUM_MAX:
        return SizeGroup.MEDIUM
    if n <= _LARGE_MAX:
        return SizeGroup.LARGE
    return SizeGroup.XLARGE


def reduced_indices(n: int) -> list[int]:
    """0-based [first, middle, last] with duplicates removed, ascending.

    Middle is the 1-based position ceil(n/2), i.e. the true middle for odd n.
    """
    if n < 1:
        raise DataError(f"sentence count must be >= 1, got {n}")
    return sorted({0, math.ceil(n / 2) - 1, n - 1})


MAX_POSITION_BUCKETS = 5


@dataclass(frozen=True)
class SizeGroupTable:
    """Top decile buckets of gold-rationale positions, per size group."""

    buckets: dict[SizeGroup, tuple[int, ...]]
    l_max: int

    def __post_init__(self) -> None:
        normalized = {}
        for group in SizeGroup:
            values = tuple(self.buckets.get(group, ()))
            if len(values) > MAX_POSITION_BUCKETS:
                raise DataError(f"{group.value}: more than {MAX_POSITION_BUCKETS} buckets")
            if len(set(values)) != len(values):
                raise DataError(f"{group.value}: duplicate buckets {values}")
            if any(not (0 <= b <= 9) for b in values):
                raise DataError(f"{group.value}: buckets must be deciles 0..9, got {values}")
            normalized[group] = values
        object.__setattr__(self, "buckets", normalized)

    def to_json(self) -> str:
        payload = {group.value: list(self.buckets[group]) for group in SizeGroup}
        payload["l_max"] = self.l_max
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "SizeGroupTable":
        payload = json.loads(text)
        buckets = {group: tuple(payload.get(group.value, [])) for group in SizeGroup}
        return cls(buckets=buckets, l_max=int(payload["l_max"]))


def save_position_table(table: SizeGroupTable, path: str | Path) -> None:
    Path(path).write_text(table.to_json() + "\n", encoding="utf-8")


def load_position_table(path: str | Path) -> SizeGroupTable:
    return SizeGroupTable.from_json(Path(path).read_text(encoding="utf-8"))


def learn_position_table(train_claims: list[Claim], corpus: Corpus) -> SizeGroupTable:
    """Histogram gold-rationale positions by decile within each size group.

    Emits each group's top-5 buckets by count (ties break toward the lower
    bucket). l_max is the largest sentence count seen anywhere in the corpus.
    """
    histograms: dict[SizeGroup, Counter] = {group: Counter() for group in SizeGroup}
    for claim in train_claims:
        for evidence in claim.evidence:
            doc = corpus[evidence.doc_id]
            group = size_group(doc.n)
            for rationale in evidence.rationales:
                for index in rationale.sentence_indices:
                    histograms[group][(10 * index) // doc.n] += 1

    buckets = {
        group: tuple(
            bucket
            for bucket, _ in sorted(counts.items(), key=lambda item: (-item[1], item[0]))[
                :MAX_POSITION_BUCKETS
            ]
        )
        for group, counts in histograms.items()
    }
    l_max = max((doc.n for doc in corpus), default=0)
    return SizeGroupTable(buckets=buckets, l_max=l_max)


@dataclass(frozen=True)
class ReprStrategy:
    """A context-building strategy; DIFF5/DIFF3 need a learned position table."""

    kind: ReprKind
    position_table: SizeGroupTable | None = None

    def __post_init__(self) -> None:
        if self.kind in (ReprKind.DIFF5, ReprKind.DIFF3) and self.position_table is None:
            raise DataError(f"{self.kind.value} strategy requires a position table")


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _diff_indices(doc: AbstractDoc, table: SizeGroupTable, top: int) -> list[int]:
    buckets = table.buckets[size_group(doc.n)][:top]
    if not buckets:
        return reduced_indices(doc.n)
    return sorted({_round_half_up(bucket / 10 * (doc.n - 1)) for bucket in buckets})


def context_indices(doc: AbstractDoc, strategy: ReprStrategy) -> list[int]:
    """The 0-based sentence indices a strategy selects, ascending."""
    if strategy.kind is ReprKind.TOTAL:
        return list(range(doc.n))
    if strategy.kind is ReprKind.REDUCED:
        return reduced_indices(doc.n)
    top = 5 if strategy.kind is ReprKind.DIFF5 else 3
    assert strategy.position_table is not None
    return _diff_indices(doc, strategy.position_table, top)


def build_context(doc: AbstractDoc, strategy: ReprStrategy) -> str:
    """Title plus the strategy's sentences, joined by single spaces; title first."""
    parts = [doc.title] + [doc.sentences[i] for i in context_indices(doc, strategy)]
    return " ".join(parts)
