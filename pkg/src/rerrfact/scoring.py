"""Uniform scoring interface the pipeline stages consume.

A stage scorer is anything with ``score_pairs(pairs) -> list[float]`` over
(claim, context) text pairs. Three implementations: the built-in trained
model, a remote wire-protocol endpoint, and a deterministic token-overlap
heuristic (``builtin:jaccard``) used for integration testing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from .classifier import ClassifierModel, load_model
from .remote import (
    DEFAULT_TIMEOUT,
    HttpScorerClient,
    ScorerEndpoint,
    ScorerProtocolError,
    StdioScorerClient,
    open_client,
    parse_endpoint,
)
from .tokenization import tokenize


class PairScorer(Protocol):
    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[float]: ...


@dataclass
class ModelScorer:
    """Scores with a trained binary model, in process."""

    model: ClassifierModel

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        return [self.model.predict(claim, context) for claim, context in pairs]


def jaccard_overlap_score(claim: str, context: str) -> float:
    """Token-set Jaccard similarity mapped into [0.5, 1.0] via 0.5 + 0.5 * J."""
    claim_tokens = set(tokenize(claim))
    context_tokens = set(tokenize(context))
    union = claim_tokens | context_tokens
    if not union:
        return 1.0
    return 0.5 + 0.5 * (len(claim_tokens & context_tokens) / len(union))


class JaccardScorer:
    """In-process twin of the reference scorer's heuristic."""

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        return [jaccard_overlap_score(claim, context) for claim, context in pairs]


class RemoteScorer:
    """Adapts a wire-protocol client to the stage scorer interface."""

    def __init__(self, client: StdioScorerClient | HttpScorerClient):
        self.client = client

    def score_pairs(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        batch = [(i, claim, context) for i, (claim, context) in enumerate(pairs)]
        scores = self.client.score_batch(batch)
        return [scores[i] for i in range(len(pairs))]

    def close(self) -> None:
        self.client.close()


def scorer_from_endpoint(
    spec: str | ScorerEndpoint, task: str, timeout: float = DEFAULT_TIMEOUT
) -> PairScorer:
    parsed = parse_endpoint(spec) if isinstance(spec, str) else spec
    if parsed.transport == "builtin":
        if parsed.target == "jaccard":
            return JaccardScorer()
        raise ScorerProtocolError(f"unknown builtin scorer {parsed.target!r}")
    return RemoteScorer(open_client(parsed, task, timeout))


def scorer_from_model_file(path) -> ModelScorer:
    return ModelScorer(load_model(path))
